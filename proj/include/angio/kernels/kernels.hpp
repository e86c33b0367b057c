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

#ifndef ANGIO__KERNELS__KERNELS_HPP
#define ANGIO__KERNELS__KERNELS_HPP

#include <angio/core/volume.hpp>

#include <array>
#include <span>
#include <vector>

// Data-parallel voxel kernels. Every kernel here is OpenMP-parallel over
// independent lines, slices or voxels, and writes each output element from
// exactly one iteration, so results do not depend on the thread schedule.
// Serial reference versions used by the tests and benchmarks live in
// angio/kernels/reference.hpp.

namespace angio::kernels {

enum class Axis { z = 0, y = 1, x = 2 };

//==============================================================================
/// Sampled Gaussian (order 0), first derivative (order 1) or second
/// derivative (order 2) with standard deviation `sigma_mm`, sampled at
/// `spacing_mm`. Tap i corresponds to offset (i - radius) * spacing.
/// Moments are normalised so convolution reproduces the matching derivative
/// of polynomials up to degree `order` exactly.
std::vector<double> gaussian_kernel(double sigma_mm, double spacing_mm, int order);

/// Convolve along one axis with clamp-to-edge boundaries.
/// `kernel` must have odd length.
void convolve_axis(
  std::span<const float> in,
  const Dims& dims,
  Axis axis,
  std::span<const double> kernel,
  std::span<float> out);

//==============================================================================
/// Scale-normalised Hessian (sigma^2 * second derivatives), one array per
/// unique component.
struct HessianField
{
  std::vector<float> zz, yy, xx, zy, zx, yx;
};

HessianField gaussian_hessian(const Volume& v, double sigma_mm);

//==============================================================================
/// Eigenvalues of a symmetric 3x3 matrix, sorted by ascending magnitude.
std::array<double, 3> symmetric_eigenvalues(
  double zz, double yy, double xx, double zy, double zx, double yx);

struct VesselnessParams
{
  double alpha = 0.5;
  double beta = 0.5;
  /// Structure constant. Non-positive means half the maximum Hessian norm.
  double c = 0.0;
};

/// Bright-tube vesselness of one voxel from its sorted eigenvalues, scaled by
/// the Hessian Frobenius norm so the response carries image contrast units.
double vesselness_at(const std::array<double, 3>& lambda, double alpha,
  double beta, double c);

/// Frobenius norm of the Hessian at every voxel.
double max_hessian_norm(const HessianField& h);

std::vector<float> vesselness(const HessianField& h, const VesselnessParams& p);

//==============================================================================
/// Binary dilation / erosion with a box of half-widths (z, y, x). Voxels
/// outside the grid are ignored, so erosion never removes a voxel because of
/// the border.
BinaryMask box_dilate(const BinaryMask& m, const std::array<int, 3>& half);
BinaryMask box_erode(const BinaryMask& m, const std::array<int, 3>& half);

//==============================================================================
/// Squared Euclidean distance in mm^2 from each voxel centre to the nearest
/// voxel with `features[i] != 0`. When `border_is_feature` is set, the grid
/// is treated as surrounded by one layer of feature voxels. Voxels with no
/// reachable feature get +infinity.
std::vector<double> squared_distance_to(
  const BinaryMask& features, bool border_is_feature);

//==============================================================================
/// A tube piece: the set of points within `radius` of segment [a, b].
struct Capsule
{
  Vec3 a;
  Vec3 b;
  double radius = 1.0;
};

/// Set every voxel whose centre lies within any capsule.
void rasterize_capsules(std::span<const Capsule> capsules, BinaryMask& out);

} // namespace angio::kernels

#endif // ANGIO__KERNELS__KERNELS_HPP
