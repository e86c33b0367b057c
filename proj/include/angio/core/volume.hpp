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

#ifndef ANGIO__CORE__VOLUME_HPP
#define ANGIO__CORE__VOLUME_HPP

#include <angio/core/error.hpp>
#include <angio/core/geometry.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace angio {

//==============================================================================
/// A dense voxel grid with millimetre geometry. Voxels are stored z-major
/// (x fastest).
template<typename T>
class Grid
{
public:
  using value_type = T;

  Grid() = default;

  explicit Grid(Geometry geometry, T fill = T{})
  : _geometry(geometry),
    _data(geometry.dims.count(), fill)
  {
    validate_geometry(_geometry);
  }

  Grid(Geometry geometry, std::vector<T> data)
  : _geometry(geometry),
    _data(std::move(data))
  {
    validate_geometry(_geometry);
    if (_data.size() != _geometry.dims.count())
      throw ValidationError("voxel data length does not match dims");
  }

  const Geometry& geometry() const { return _geometry; }
  const Dims& dims() const { return _geometry.dims; }
  const Vec3& spacing() const { return _geometry.spacing; }
  std::size_t size() const { return _data.size(); }
  bool empty() const { return _data.empty(); }

  T& operator[](std::size_t i) { return _data[i]; }
  const T& operator[](std::size_t i) const { return _data[i]; }

  T& at(std::int64_t z, std::int64_t y, std::int64_t x)
  {
    return _data[_geometry.dims.linear(z, y, x)];
  }
  const T& at(std::int64_t z, std::int64_t y, std::int64_t x) const
  {
    return _data[_geometry.dims.linear(z, y, x)];
  }
  T& at(const Index3& i) { return _data[_geometry.dims.linear(i)]; }
  const T& at(const Index3& i) const { return _data[_geometry.dims.linear(i)]; }

  std::span<T> data() { return _data; }
  std::span<const T> data() const { return _data; }
  std::vector<T>& storage() { return _data; }
  const std::vector<T>& storage() const { return _data; }

  bool operator==(const Grid&) const = default;

  static void validate_geometry(const Geometry& g)
  {
    if (g.dims.z <= 0 || g.dims.y <= 0 || g.dims.x <= 0)
      throw ValidationError("dims must be positive");
    if (!(g.spacing.z > 0.0 && g.spacing.y > 0.0 && g.spacing.x > 0.0))
      throw ValidationError("spacing components must be > 0");
  }

private:
  Geometry _geometry;
  std::vector<T> _data;
};

/// Scalar volume in HU-like units.
using Volume = Grid<float>;

/// Boolean voxel mask; voxels hold 0 or 1.
using BinaryMask = Grid<std::uint8_t>;

inline void require_same_geometry(
  const Geometry& a, const Geometry& b, const char* what)
{
  if (!(a.dims == b.dims))
    throw ValidationError(std::string(what) + ": dims mismatch");
  if (!(a.spacing == b.spacing))
    throw ValidationError(std::string(what) + ": spacing mismatch");
}

std::size_t count_set(const BinaryMask& m);

/// Dice overlap of two masks with identical dims.
double dice(const BinaryMask& a, const BinaryMask& b);

/// True iff every voxel set in `inner` is set in `outer`.
bool is_subset(const BinaryMask& inner, const BinaryMask& outer);

/// Label 26-connected components of the set voxels. Labels start at 1 and are
/// assigned in scan order; 0 marks background. Returns the component count.
std::size_t label_components(const BinaryMask& m, std::vector<std::uint32_t>& labels);

std::size_t count_components(const BinaryMask& m);

} // namespace angio

#endif // ANGIO__CORE__VOLUME_HPP
