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

#include <angio/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <deque>

namespace angio::pipeline {

namespace {

struct Gradient
{
  std::vector<float> gx, gy, mag;
};

Gradient sobel(std::span<const float> img, std::int64_t ny, std::int64_t nx)
{
  Gradient g;
  const auto n = static_cast<std::size_t>(ny * nx);
  g.gx.assign(n, 0.0f);
  g.gy.assign(n, 0.0f);
  g.mag.assign(n, 0.0f);

  auto px = [&](std::int64_t y, std::int64_t x)
  {
    y = std::clamp<std::int64_t>(y, 0, ny - 1);
    x = std::clamp<std::int64_t>(x, 0, nx - 1);
    return img[y * nx + x];
  };

  for (std::int64_t y = 0; y < ny; ++y)
    for (std::int64_t x = 0; x < nx; ++x)
    {
      const float dx = (px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1))
        - (px(y - 1, x - 1) + 2 * px(y, x - 1) + px(y + 1, x - 1));
      const float dy = (px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1))
        - (px(y - 1, x - 1) + 2 * px(y - 1, x) + px(y - 1, x + 1));
      const std::size_t i = y * nx + x;
      g.gx[i] = dx;
      g.gy[i] = dy;
      g.mag[i] = std::hypot(dx, dy);
    }
  return g;
}

/// Canny edges: non-maximum suppression plus hysteresis with low = high / 2.
std::vector<std::uint8_t> canny(const Gradient& g, std::int64_t ny, std::int64_t nx, double high)
{
  const double low = 0.5 * high;
  const auto n = static_cast<std::size_t>(ny * nx);
  // 0 = none, 1 = weak, 2 = strong
  std::vector<std::uint8_t> cls(n, 0);

  for (std::int64_t y = 1; y + 1 < ny; ++y)
    for (std::int64_t x = 1; x + 1 < nx; ++x)
    {
      const std::size_t i = y * nx + x;
      const float m = g.mag[i];
      if (m <= low)
        continue;

      // Quantise the gradient direction to one of four neighbour pairs.
      const double angle = std::atan2(g.gy[i], g.gx[i]);
      double a = angle * 180.0 / 3.14159265358979323846;
      if (a < 0)
        a += 180.0;
      std::int64_t oy = 0, ox = 0;
      if (a < 22.5 || a >= 157.5) { oy = 0; ox = 1; }
      else if (a < 67.5) { oy = 1; ox = 1; }
      else if (a < 112.5) { oy = 1; ox = 0; }
      else { oy = 1; ox = -1; }

      const float m1 = g.mag[(y + oy) * nx + (x + ox)];
      const float m2 = g.mag[(y - oy) * nx + (x - ox)];
      if (m > m1 && m >= m2)
        cls[i] = m > high ? 2 : 1;
    }

  std::vector<std::uint8_t> edges(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == 2)
    {
      edges[i] = 1;
      queue.push_back(i);
    }
  while (!queue.empty())
  {
    const std::size_t i = queue.front();
    queue.pop_front();
    const auto y = static_cast<std::int64_t>(i) / nx;
    const auto x = static_cast<std::int64_t>(i) % nx;
    for (std::int64_t dy = -1; dy <= 1; ++dy)
      for (std::int64_t dx = -1; dx <= 1; ++dx)
      {
        const std::int64_t yy = y + dy, xx = x + dx;
        if (yy < 0 || xx < 0 || yy >= ny || xx >= nx)
          continue;
        const std::size_t j = yy * nx + xx;
        if (cls[j] == 1 && !edges[j])
        {
          edges[j] = 1;
          queue.push_back(j);
        }
      }
  }
  return edges;
}

} // anonymous namespace

//==============================================================================
std::vector<Circle> hough_circles(std::span<const float> slice,
  std::int64_t ny, std::int64_t nx, const HoughParams& params)
{
  if (params.max_radius < params.min_radius || params.min_radius < 0)
    throw ValidationError("hough: require 0 <= min_radius <= max_radius");

  const Gradient g = sobel(slice, ny, nx);
  const auto edges = canny(g, ny, nx, params.canny_threshold);

  struct EdgePoint { std::int64_t y, x; };
  std::vector<EdgePoint> edge_points;
  std::vector<int> acc(static_cast<std::size_t>(ny * nx), 0);
  const int r0 = std::max(1, params.min_radius);

  for (std::int64_t y = 0; y < ny; ++y)
    for (std::int64_t x = 0; x < nx; ++x)
    {
      const std::size_t i = y * nx + x;
      if (!edges[i] || g.mag[i] <= 0.0f)
        continue;
      edge_points.push_back({y, x});
      const double uy = g.gy[i] / g.mag[i];
      const double ux = g.gx[i] / g.mag[i];
      for (const int sign : {-1, 1})
        for (int r = r0; r <= params.max_radius; ++r)
        {
          const auto cy = static_cast<std::int64_t>(std::lround(y + sign * r * uy));
          const auto cx = static_cast<std::int64_t>(std::lround(x + sign * r * ux));
          if (cy < 0 || cx < 0 || cy >= ny || cx >= nx)
            break;
          ++acc[cy * nx + cx];
        }
    }

  std::vector<Circle> candidates;
  for (std::int64_t y = 1; y + 1 < ny; ++y)
    for (std::int64_t x = 1; x + 1 < nx; ++x)
    {
      const int v = acc[y * nx + x];
      if (v > params.accumulator_threshold
          && v > acc[y * nx + x - 1] && v >= acc[y * nx + x + 1]
          && v > acc[(y - 1) * nx + x] && v >= acc[(y + 1) * nx + x])
        candidates.push_back({y, x, 0, v});
    }
  std::stable_sort(candidates.begin(), candidates.end(),
    [](const Circle& a, const Circle& b) { return a.votes > b.votes; });

  std::vector<Circle> accepted;
  const double min_d2 = params.min_distance * params.min_distance;
  for (const Circle& c : candidates)
  {
    const bool far = std::all_of(accepted.begin(), accepted.end(), [&](const Circle& a)
    {
      const double dy = double(a.y - c.y), dx = double(a.x - c.x);
      return dy * dy + dx * dx >= min_d2;
    });
    if (far)
      accepted.push_back(c);
  }

  // Radius: the most supported edge distance around each centre.
  std::vector<int> hist(params.max_radius + 1);
  for (Circle& c : accepted)
  {
    std::fill(hist.begin(), hist.end(), 0);
    for (const EdgePoint& e : edge_points)
    {
      const double d = std::hypot(double(e.y - c.y), double(e.x - c.x));
      const auto r = static_cast<int>(std::lround(d));
      if (r >= params.min_radius && r <= params.max_radius)
        ++hist[r];
    }
    const auto best = std::max_element(hist.begin() + params.min_radius, hist.end());
    c.radius = *best > 0 ? static_cast<int>(best - hist.begin()) : 0;
  }
  return accepted;
}

//==============================================================================
SeedPointSet hough_seed_points(const Volume& gated, const HoughParams& params)
{
  // Validate before the parallel region, which must not throw.
  if (params.max_radius < params.min_radius || params.min_radius < 0)
    throw ValidationError("hough: require 0 <= min_radius <= max_radius");
  const Dims& d = gated.dims();
  const std::int64_t plane = d.y * d.x;
  std::vector<std::vector<Circle>> per_slice(static_cast<std::size_t>(d.z));

  #pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    const auto slice = gated.data().subspan(static_cast<std::size_t>(z * plane),
      static_cast<std::size_t>(plane));
    if (std::all_of(slice.begin(), slice.end(), [](float v) { return v == 0.0f; }))
      continue;
    per_slice[z] = hough_circles(slice, d.y, d.x, params);
  }

  SeedPointSet out;
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    out.raw_count += per_slice[z].size();
    for (const Circle& c : per_slice[z])
      if (gated.at(z, c.y, c.x) != 0.0f)
        out.seeds.push_back({{z, c.y, c.x}, static_cast<double>(c.radius), c.votes});
  }
  return out;
}

} // namespace angio::pipeline
