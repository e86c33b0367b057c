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

#include <angio/kernels/reference.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace angio::kernels::reference {

//==============================================================================
HessianField gaussian_hessian(const Volume& v, double sigma_mm)
{
  const Dims& d = v.dims();
  const Vec3& sp = v.spacing();

  const std::vector<double> kz[3] = {
    gaussian_kernel(sigma_mm, sp.z, 0), gaussian_kernel(sigma_mm, sp.z, 1),
    gaussian_kernel(sigma_mm, sp.z, 2)};
  const std::vector<double> ky[3] = {
    gaussian_kernel(sigma_mm, sp.y, 0), gaussian_kernel(sigma_mm, sp.y, 1),
    gaussian_kernel(sigma_mm, sp.y, 2)};
  const std::vector<double> kx[3] = {
    gaussian_kernel(sigma_mm, sp.x, 0), gaussian_kernel(sigma_mm, sp.x, 1),
    gaussian_kernel(sigma_mm, sp.x, 2)};

  // Derivative orders (z, y, x) for each component.
  const int orders[6][3] = {
    {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};

  HessianField h;
  std::vector<float>* dst[6] = {&h.zz, &h.yy, &h.xx, &h.zy, &h.zx, &h.yx};
  const double s2 = sigma_mm * sigma_mm;

  for (int c = 0; c < 6; ++c)
  {
    const auto& fz = kz[orders[c][0]];
    const auto& fy = ky[orders[c][1]];
    const auto& fx = kx[orders[c][2]];
    const auto rz = static_cast<std::int64_t>(fz.size() / 2);
    const auto ry = static_cast<std::int64_t>(fy.size() / 2);
    const auto rx = static_cast<std::int64_t>(fx.size() / 2);

    dst[c]->assign(v.size(), 0.0f);
    for (std::int64_t z = 0; z < d.z; ++z)
      for (std::int64_t y = 0; y < d.y; ++y)
        for (std::int64_t x = 0; x < d.x; ++x)
        {
          double acc = 0.0;
          for (std::int64_t tz = -rz; tz <= rz; ++tz)
            for (std::int64_t ty = -ry; ty <= ry; ++ty)
              for (std::int64_t tx = -rx; tx <= rx; ++tx)
              {
                const auto iz = std::clamp<std::int64_t>(z - tz, 0, d.z - 1);
                const auto iy = std::clamp<std::int64_t>(y - ty, 0, d.y - 1);
                const auto ix = std::clamp<std::int64_t>(x - tx, 0, d.x - 1);
                acc += v.at(iz, iy, ix) * fz[tz + rz] * fy[ty + ry] * fx[tx + rx];
              }
          (*dst[c])[d.linear(z, y, x)] = static_cast<float>(acc * s2);
        }
  }
  return h;
}

//==============================================================================
std::vector<float> vesselness(const HessianField& h, const VesselnessParams& p)
{
  const std::size_t n = h.xx.size();
  double c = p.c;
  if (c <= 0.0)
  {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      const double f = double(h.zz[i]) * h.zz[i] + double(h.yy[i]) * h.yy[i]
        + double(h.xx[i]) * h.xx[i]
        + 2.0 * (double(h.zy[i]) * h.zy[i] + double(h.zx[i]) * h.zx[i]
          + double(h.yx[i]) * h.yx[i]);
      best = std::max(best, std::sqrt(f));
    }
    c = 0.5 * best;
  }

  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto l = symmetric_eigenvalues(h.zz[i], h.yy[i], h.xx[i],
      h.zy[i], h.zx[i], h.yx[i]);
    out[i] = static_cast<float>(vesselness_at(l, p.alpha, p.beta, c));
  }
  return out;
}

//==============================================================================
namespace {

template<bool Dilate>
BinaryMask box_scan(const BinaryMask& m, const std::array<int, 3>& half)
{
  const Dims& d = m.dims();
  BinaryMask out(m.geometry());
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
      {
        bool any = false;
        bool all = true;
        for (std::int64_t dz = -half[0]; dz <= half[0]; ++dz)
          for (std::int64_t dy = -half[1]; dy <= half[1]; ++dy)
            for (std::int64_t dx = -half[2]; dx <= half[2]; ++dx)
            {
              if (!d.contains(z + dz, y + dy, x + dx))
                continue;
              const bool s = m.at(z + dz, y + dy, x + dx) != 0;
              any = any || s;
              all = all && s;
            }
        out.at(z, y, x) = Dilate ? any : all;
      }
  return out;
}

} // anonymous namespace

BinaryMask box_dilate(const BinaryMask& m, const std::array<int, 3>& half)
{
  return box_scan<true>(m, half);
}

BinaryMask box_erode(const BinaryMask& m, const std::array<int, 3>& half)
{
  return box_scan<false>(m, half);
}

//==============================================================================
std::vector<double> squared_distance_to(const BinaryMask& features, bool border_is_feature)
{
  const Geometry& g = features.geometry();
  const Dims& d = g.dims;
  const Vec3& sp = g.spacing;
  std::vector<double> out(features.size(), std::numeric_limits<double>::infinity());

  std::vector<Index3> sites;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i])
      sites.push_back(d.unravel(i));

  for (std::size_t i = 0; i < out.size(); ++i)
  {
    const Index3 p = d.unravel(i);
    double best = std::numeric_limits<double>::infinity();
    for (const Index3& s : sites)
    {
      const double dz = double(p.z - s.z) * sp.z;
      const double dy = double(p.y - s.y) * sp.y;
      const double dx = double(p.x - s.x) * sp.x;
      best = std::min(best, dz * dz + dy * dy + dx * dx);
    }
    if (border_is_feature)
    {
      // Nearest virtual border voxel lies straight out along one axis.
      const double bz = double(std::min(p.z + 1, d.z - p.z)) * sp.z;
      const double by = double(std::min(p.y + 1, d.y - p.y)) * sp.y;
      const double bx = double(std::min(p.x + 1, d.x - p.x)) * sp.x;
      best = std::min({best, bz * bz, by * by, bx * bx});
    }
    out[i] = best;
  }
  return out;
}

//==============================================================================
void rasterize_capsules(std::span<const Capsule> capsules, BinaryMask& out)
{
  const Geometry& g = out.geometry();
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    const Vec3 p = g.position(i);
    for (const Capsule& c : capsules)
      if (point_segment_distance(p, c.a, c.b) <= c.radius)
      {
        out[i] = 1;
        break;
      }
  }
}

} // namespace angio::kernels::reference
