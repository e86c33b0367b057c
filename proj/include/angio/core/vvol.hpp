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

#ifndef ANGIO__CORE__VVOL_HPP
#define ANGIO__CORE__VVOL_HPP

#include <angio/core/volume.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace angio::vvol {

// VVOL: UTF-8 header lines `dims z y x`, `spacing z y x`, `origin z y x`,
// `dtype int16|float32`, a blank line, then little-endian voxels in z-major
// order.

enum class DType { int16, float32 };

void write(std::ostream& out, const Volume& v, DType dtype = DType::float32);
void write(std::ostream& out, const BinaryMask& m);

void write(const std::filesystem::path& path, const Volume& v,
  DType dtype = DType::float32);
void write(const std::filesystem::path& path, const BinaryMask& m);

/// Parse a VVOL stream. Header problems raise ValidationError whose message
/// starts with "header line N".
Volume read_volume(std::istream& in);
Volume read_volume(const std::filesystem::path& path);

/// Read a VVOL mask; any nonzero voxel is set.
BinaryMask read_mask(std::istream& in);
BinaryMask read_mask(const std::filesystem::path& path);

} // namespace angio::vvol

#endif // ANGIO__CORE__VVOL_HPP
