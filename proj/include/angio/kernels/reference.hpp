/*
 * Copyright (C) 2026 The angiograph authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef ANGIO__KERNELS__REFERENCE_HPP
#define ANGIO__KERNELS__REFERENCE_HPP

#include <angio/kernels/kernels.hpp>

// Straightforward single-threaded versions of the kernels in kernels.hpp.
// They favour obviousness over speed (direct 3D convolution, brute-force
// distance scans) and exist to check the parallel kernels and to serve as the
// benchmark baseline. Only use them on small volumes.

namespace angio::kernels::reference {

HessianField gaussian_hessian(const Volume& v, double sigma_mm);

std::vector<float> vesselness(const HessianField& h, const VesselnessParams& p);

BinaryMask box_dilate(const BinaryMask& m, const std::array<int, 3>& half);
BinaryMask box_erode(const BinaryMask& m, const std::array<int, 3>& half);

std::vector<double> squared_distance_to(
  const BinaryMask& features, bool border_is_feature);

void rasterize_capsules(std::span<const Capsule> capsules, BinaryMask& out);

} // namespace angio::kernels::reference

#endif // ANGIO__KERNELS__REFERENCE_HPP
