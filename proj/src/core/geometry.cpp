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

#include <angio/core/geometry.hpp>

#include <algorithm>

namespace angio {

//==============================================================================
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b)
{
  const Vec3 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0)
    return distance(p, a);

  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

//==============================================================================
const std::array<std::array<int, 3>, 26>& neighbours26()
{
  static const auto offsets = []
  {
    std::array<std::array<int, 3>, 26> out{};
    std::size_t k = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dz != 0 || dy != 0 || dx != 0)
            out[k++] = {dz, dy, dx};
    return out;
  }();
  return offsets;
}

} // namespace angio
