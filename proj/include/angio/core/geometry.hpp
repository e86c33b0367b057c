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

#ifndef ANGIO__CORE__GEOMETRY_HPP
#define ANGIO__CORE__GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace angio {

//==============================================================================
/// A point or displacement in millimetres, stored in (z, y, x) order to match
/// the voxel layout.
struct Vec3
{
  double z = 0.0;
  double y = 0.0;
  double x = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double z_, double y_, double x_) : z(z_), y(y_), x(x_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {z + o.z, y + o.y, x + o.x}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {z - o.z, y - o.y, x - o.x}; }
  constexpr Vec3 operator*(double s) const { return {z * s, y * s, x * s}; }
  constexpr Vec3 operator/(double s) const { return {z / s, y / s, x / s}; }
  Vec3& operator+=(const Vec3& o) { z += o.z; y += o.y; x += o.x; return *this; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return z * o.z + y * o.y + x * o.x; }
  constexpr double squared_norm() const { return z * z + y * y + x * x; }
  double norm() const { return std::sqrt(squared_norm()); }

  Vec3 normalized() const
  {
    const double n = norm();
    return n > 0.0 ? *this / n : Vec3{};
  }
};

inline double distance(const Vec3& a, const Vec3& b)
{
  const double dz = a.z - b.z;
  const double dy = a.y - b.y;
  const double dx = a.x - b.x;
  return std::sqrt(dz * dz + dy * dy + dx * dx);
}

/// Distance from `p` to the closed segment [a, b].
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

//==============================================================================
/// Integer voxel coordinate, (z, y, x).
struct Index3
{
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;

  constexpr bool operator==(const Index3&) const = default;
};

//==============================================================================
/// Grid extent in voxels, (z, y, x).
struct Dims
{
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;

  constexpr std::size_t count() const
  {
    return static_cast<std::size_t>(z) * static_cast<std::size_t>(y)
      * static_cast<std::size_t>(x);
  }

  constexpr bool contains(std::int64_t iz, std::int64_t iy, std::int64_t ix) const
  {
    return iz >= 0 && iy >= 0 && ix >= 0 && iz < z && iy < y && ix < x;
  }
  constexpr bool contains(const Index3& i) const { return contains(i.z, i.y, i.x); }

  constexpr std::size_t linear(std::int64_t iz, std::int64_t iy, std::int64_t ix) const
  {
    return (static_cast<std::size_t>(iz) * static_cast<std::size_t>(y)
      + static_cast<std::size_t>(iy)) * static_cast<std::size_t>(x)
      + static_cast<std::size_t>(ix);
  }
  constexpr std::size_t linear(const Index3& i) const { return linear(i.z, i.y, i.x); }

  constexpr Index3 unravel(std::size_t i) const
  {
    const auto sx = static_cast<std::size_t>(x);
    const auto sy = static_cast<std::size_t>(y);
    return {
      static_cast<std::int64_t>(i / (sx * sy)),
      static_cast<std::int64_t>((i / sx) % sy),
      static_cast<std::int64_t>(i % sx)};
  }

  constexpr bool operator==(const Dims&) const = default;
};

//==============================================================================
/// Placement of a voxel grid in millimetre space.
struct Geometry
{
  Dims dims;
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  Vec3 position(const Index3& i) const
  {
    return {
      origin.z + static_cast<double>(i.z) * spacing.z,
      origin.y + static_cast<double>(i.y) * spacing.y,
      origin.x + static_cast<double>(i.x) * spacing.x};
  }

  Vec3 position(std::size_t linear_index) const
  {
    return position(dims.unravel(linear_index));
  }

  /// Nearest voxel to a millimetre position; may lie outside the grid.
  Index3 nearest_index(const Vec3& p) const
  {
    return {
      static_cast<std::int64_t>(std::llround((p.z - origin.z) / spacing.z)),
      static_cast<std::int64_t>(std::llround((p.y - origin.y) / spacing.y)),
      static_cast<std::int64_t>(std::llround((p.x - origin.x) / spacing.x))};
  }

  double voxel_volume() const { return spacing.z * spacing.y * spacing.x; }

  bool operator==(const Geometry&) const = default;
};

/// The 26 neighbour offsets of a voxel, (dz, dy, dx).
const std::array<std::array<int, 3>, 26>& neighbours26();

} // namespace angio

#endif // ANGIO__CORE__GEOMETRY_HPP
