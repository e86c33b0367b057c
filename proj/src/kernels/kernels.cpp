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

#include <angio/kernels/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace angio::kernels {

namespace {

struct LineLayout
{
  std::int64_t count = 0;   // number of lines
  std::int64_t length = 0;  // samples per line
  std::int64_t stride = 0;  // distance between consecutive samples
};

LineLayout layout(const Dims& d, Axis axis)
{
  switch (axis)
  {
    case Axis::x: return {d.z * d.y, d.x, 1};
    case Axis::y: return {d.z * d.x, d.y, d.x};
    case Axis::z: return {d.y * d.x, d.z, d.y * d.x};
  }
  return {};
}

// First sample of line `line` for the given axis.
std::size_t line_start(const Dims& d, Axis axis, std::int64_t line)
{
  switch (axis)
  {
    case Axis::x: return static_cast<std::size_t>(line * d.x);
    case Axis::y:
    {
      const std::int64_t z = line / d.x;
      const std::int64_t x = line % d.x;
      return static_cast<std::size_t>(z * d.y * d.x + x);
    }
    case Axis::z: return static_cast<std::size_t>(line);
  }
  return 0;
}

constexpr double inf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas: out[q] = min_p w2 * (q - p)^2 + f[p].
void distance_1d(const std::vector<double>& f, double w2, std::vector<double>& out,
  std::vector<int>& v, std::vector<double>& zb)
{
  const int n = static_cast<int>(f.size());
  out.assign(n, inf);
  v.assign(n, 0);
  zb.assign(n + 1, 0.0);

  int k = -1;
  for (int q = 0; q < n; ++q)
  {
    if (f[q] == inf)
      continue;
    if (k < 0)
    {
      k = 0;
      v[0] = q;
      zb[0] = -inf;
      zb[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true)
    {
      const int p = v[k];
      s = ((f[q] + w2 * q * q) - (f[p] + w2 * p * p)) / (2.0 * w2 * (q - p));
      if (s <= zb[k] && k > 0)
        --k;
      else
        break;
    }
    if (s <= zb[k])
    {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      zb[0] = -inf;
      zb[1] = inf;
      continue;
    }
    ++k;
    v[k] = q;
    zb[k] = s;
    zb[k + 1] = inf;
  }

  if (k < 0)
    return;

  int j = 0;
  for (int q = 0; q < n; ++q)
  {
    while (zb[j + 1] < q)
      ++j;
    const double d = q - v[j];
    out[q] = w2 * d * d + f[v[j]];
  }
}

void distance_pass(std::vector<double>& grid, const Dims& dims, Axis axis,
  double spacing, bool border)
{
  const LineLayout L = layout(dims, axis);
  const double w2 = spacing * spacing;
  const std::int64_t pad = border ? 1 : 0;

  #pragma omp parallel
  {
    std::vector<double> f, out, zb;
    std::vector<int> v;
    #pragma omp for schedule(static)
    for (std::int64_t line = 0; line < L.count; ++line)
    {
      const std::size_t start = line_start(dims, axis, line);
      f.assign(static_cast<std::size_t>(L.length + 2 * pad), 0.0);
      for (std::int64_t i = 0; i < L.length; ++i)
        f[i + pad] = grid[start + i * L.stride];
      distance_1d(f, w2, out, v, zb);
      for (std::int64_t i = 0; i < L.length; ++i)
        grid[start + i * L.stride] = out[i + pad];
    }
  }
}

// Dilation (any) or erosion (all) over a clipped window along one axis.
template<bool Dilate>
void box_pass(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out,
  const Dims& dims, Axis axis, int half)
{
  const LineLayout L = layout(dims, axis);
  #pragma omp parallel for schedule(static)
  for (std::int64_t line = 0; line < L.count; ++line)
  {
    const std::size_t start = line_start(dims, axis, line);
    // Running count of set samples inside the window [i - half, i + half].
    std::int64_t set = 0;
    for (std::int64_t i = 0; i < std::min<std::int64_t>(half, L.length); ++i)
      set += in[start + i * L.stride] != 0;
    for (std::int64_t i = 0; i < L.length; ++i)
    {
      const std::int64_t enter = i + half;
      const std::int64_t leave = i - half - 1;
      if (enter < L.length)
        set += in[start + enter * L.stride] != 0;
      if (leave >= 0)
        set -= in[start + leave * L.stride] != 0;
      const std::int64_t lo = std::max<std::int64_t>(0, i - half);
      const std::int64_t hi = std::min<std::int64_t>(L.length - 1, i + half);
      const std::int64_t window = hi - lo + 1;
      if constexpr (Dilate)
        out[start + i * L.stride] = set > 0;
      else
        out[start + i * L.stride] = set == window;
    }
  }
}

template<bool Dilate>
BinaryMask box_filter(const BinaryMask& m, const std::array<int, 3>& half)
{
  for (const int h : half)
    if (h < 0)
      throw ValidationError("box half-width must be >= 0");

  std::vector<std::uint8_t> a = m.storage();
  std::vector<std::uint8_t> b(a.size());
  const Axis axes[3] = {Axis::z, Axis::y, Axis::x};
  for (int k = 0; k < 3; ++k)
  {
    if (half[k] == 0)
      continue;
    box_pass<Dilate>(a, b, m.dims(), axes[k], half[k]);
    a.swap(b);
  }
  return BinaryMask(m.geometry(), std::move(a));
}

} // anonymous namespace

//==============================================================================
std::vector<double> gaussian_kernel(double sigma_mm, double spacing_mm, int order)
{
  if (!(sigma_mm > 0.0) || !(spacing_mm > 0.0))
    throw ValidationError("gaussian_kernel: sigma and spacing must be > 0");
  if (order < 0 || order > 2)
    throw ValidationError("gaussian_kernel: order must be 0, 1 or 2");

  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_mm / spacing_mm)));
  const int n = 2 * radius + 1;
  const double s2 = sigma_mm * sigma_mm;

  std::vector<double> g(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
  {
    const double t = (i - radius) * spacing_mm;
    g[i] = std::exp(-t * t / (2.0 * s2));
    sum += g[i];
  }
  for (auto& v : g)
    v /= sum;

  if (order == 0)
    return g;

  std::vector<double> k(n);
  for (int i = 0; i < n; ++i)
  {
    const double t = (i - radius) * spacing_mm;
    k[i] = order == 1 ? -t / s2 * g[i] : (t * t / (s2 * s2) - 1.0 / s2) * g[i];
  }

  if (order == 1)
  {
    // Antisymmetric, so sum is zero; fix the first moment to -1.
    double m1 = 0.0;
    for (int i = 0; i < n; ++i)
      m1 += (i - radius) * spacing_mm * k[i];
    for (auto& v : k)
      v /= -m1;
    return k;
  }

  // Zero mean, then second moment / 2 equal to one.
  double mean = 0.0;
  for (const double v : k)
    mean += v;
  mean /= n;
  for (auto& v : k)
    v -= mean;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i)
  {
    const double t = (i - radius) * spacing_mm;
    m2 += 0.5 * t * t * k[i];
  }
  for (auto& v : k)
    v /= m2;
  return k;
}

//==============================================================================
void convolve_axis(
  std::span<const float> in,
  const Dims& dims,
  Axis axis,
  std::span<const double> kernel,
  std::span<float> out)
{
  if (kernel.size() % 2 == 0)
    throw ValidationError("convolve_axis: kernel length must be odd");

  const LineLayout L = layout(dims, axis);
  const std::int64_t radius = static_cast<std::int64_t>(kernel.size() / 2);
  // Derivative kernels sum to zero. Applying them to differences from the
  // centre sample makes the response to a constant line exactly zero.
  double sum = 0.0, mass = 0.0;
  for (const double k : kernel)
  {
    sum += k;
    mass += std::abs(k);
  }
  const bool differences = std::abs(sum) <= 1e-12 * mass;

  #pragma omp parallel
  {
    std::vector<double> line_buf;
    #pragma omp for schedule(static)
    for (std::int64_t line = 0; line < L.count; ++line)
    {
      const std::size_t start = line_start(dims, axis, line);
      line_buf.resize(static_cast<std::size_t>(L.length));
      for (std::int64_t i = 0; i < L.length; ++i)
        line_buf[i] = in[start + i * L.stride];

      for (std::int64_t i = 0; i < L.length; ++i)
      {
        const double centre = differences ? line_buf[i] : 0.0;
        double acc = 0.0;
        for (std::int64_t t = -radius; t <= radius; ++t)
        {
          const std::int64_t j = std::clamp<std::int64_t>(i - t, 0, L.length - 1);
          acc += (line_buf[j] - centre) * kernel[t + radius];
        }
        out[start + i * L.stride] = static_cast<float>(acc);
      }
    }
  }
}

//==============================================================================
HessianField gaussian_hessian(const Volume& v, double sigma_mm)
{
  const Dims& d = v.dims();
  const Vec3& sp = v.spacing();
  const std::size_t n = v.size();

  const auto kz0 = gaussian_kernel(sigma_mm, sp.z, 0);
  const auto kz1 = gaussian_kernel(sigma_mm, sp.z, 1);
  const auto kz2 = gaussian_kernel(sigma_mm, sp.z, 2);
  const auto ky0 = gaussian_kernel(sigma_mm, sp.y, 0);
  const auto ky1 = gaussian_kernel(sigma_mm, sp.y, 1);
  const auto ky2 = gaussian_kernel(sigma_mm, sp.y, 2);
  const auto kx0 = gaussian_kernel(sigma_mm, sp.x, 0);
  const auto kx1 = gaussian_kernel(sigma_mm, sp.x, 1);
  const auto kx2 = gaussian_kernel(sigma_mm, sp.x, 2);

  std::vector<float> x0(n), x1(n), x2(n);
  convolve_axis(v.data(), d, Axis::x, kx0, x0);
  convolve_axis(v.data(), d, Axis::x, kx1, x1);
  convolve_axis(v.data(), d, Axis::x, kx2, x2);

  std::vector<float> tmp(n);
  HessianField h;
  auto finish = [&](const std::vector<float>& src, const std::vector<double>& ky,
                    const std::vector<double>& kz, std::vector<float>& dst)
  {
    dst.resize(n);
    convolve_axis(src, d, Axis::y, ky, tmp);
    convolve_axis(tmp, d, Axis::z, kz, dst);
  };

  finish(x2, ky0, kz0, h.xx);
  finish(x0, ky2, kz0, h.yy);
  finish(x0, ky0, kz2, h.zz);
  finish(x1, ky1, kz0, h.yx);
  finish(x1, ky0, kz1, h.zx);
  finish(x0, ky1, kz1, h.zy);

  const float s2 = static_cast<float>(sigma_mm * sigma_mm);
  #pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
  {
    h.xx[i] *= s2; h.yy[i] *= s2; h.zz[i] *= s2;
    h.yx[i] *= s2; h.zx[i] *= s2; h.zy[i] *= s2;
  }
  return h;
}

//==============================================================================
std::array<double, 3> symmetric_eigenvalues(
  double a11, double a22, double a33, double a12, double a13, double a23)
{
  std::array<double, 3> e{};
  const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
  if (p1 == 0.0)
  {
    e = {a11, a22, a33};
  }
  else
  {
    const double q = (a11 + a22 + a33) / 3.0;
    const double b11 = a11 - q, b22 = a22 - q, b33 = a33 - q;
    const double p2 = b11 * b11 + b22 * b22 + b33 * b33 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const double det = b11 * (b22 * b33 - a23 * a23)
      - a12 * (a12 * b33 - a23 * a13)
      + a13 * (a12 * a23 - b22 * a13);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    e[0] = q + 2.0 * p * std::cos(phi);
    e[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    e[1] = 3.0 * q - e[0] - e[2];
  }
  std::sort(e.begin(), e.end(),
    [](double l, double r) { return std::abs(l) < std::abs(r); });
  return e;
}

//==============================================================================
double vesselness_at(const std::array<double, 3>& l, double alpha, double beta, double c)
{
  // Bright tubes need both large eigenvalues negative.
  if (l[1] >= 0.0 || l[2] >= 0.0 || c <= 0.0)
    return 0.0;

  const double a2 = std::abs(l[1]);
  const double a3 = std::abs(l[2]);
  const double ra = a2 / a3;
  const double rb = std::abs(l[0]) / std::sqrt(a2 * a3);
  const double s = std::sqrt(l[0] * l[0] + l[1] * l[1] + l[2] * l[2]);

  const double v = (1.0 - std::exp(-ra * ra / (2.0 * alpha * alpha)))
    * std::exp(-rb * rb / (2.0 * beta * beta))
    * (1.0 - std::exp(-s * s / (2.0 * c * c)));
  return v * s;
}

double max_hessian_norm(const HessianField& h)
{
  double best = 0.0;
  const auto n = static_cast<std::int64_t>(h.xx.size());
  #pragma omp parallel for reduction(max : best) schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
  {
    const double f = double(h.zz[i]) * h.zz[i] + double(h.yy[i]) * h.yy[i]
      + double(h.xx[i]) * h.xx[i]
      + 2.0 * (double(h.zy[i]) * h.zy[i] + double(h.zx[i]) * h.zx[i]
        + double(h.yx[i]) * h.yx[i]);
    best = std::max(best, std::sqrt(f));
  }
  return best;
}

std::vector<float> vesselness(const HessianField& h, const VesselnessParams& p)
{
  const double c = p.c > 0.0 ? p.c : 0.5 * max_hessian_norm(h);
  const auto n = static_cast<std::int64_t>(h.xx.size());
  std::vector<float> out(static_cast<std::size_t>(n));

  #pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
  {
    const auto l = symmetric_eigenvalues(h.zz[i], h.yy[i], h.xx[i],
      h.zy[i], h.zx[i], h.yx[i]);
    out[i] = static_cast<float>(vesselness_at(l, p.alpha, p.beta, c));
  }
  return out;
}

//==============================================================================
BinaryMask box_dilate(const BinaryMask& m, const std::array<int, 3>& half)
{
  return box_filter<true>(m, half);
}

BinaryMask box_erode(const BinaryMask& m, const std::array<int, 3>& half)
{
  return box_filter<false>(m, half);
}

//==============================================================================
std::vector<double> squared_distance_to(const BinaryMask& features, bool border_is_feature)
{
  std::vector<double> grid(features.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = features[i] ? 0.0 : inf;

  const Vec3& sp = features.spacing();
  distance_pass(grid, features.dims(), Axis::x, sp.x, border_is_feature);
  distance_pass(grid, features.dims(), Axis::y, sp.y, border_is_feature);
  distance_pass(grid, features.dims(), Axis::z, sp.z, border_is_feature);
  return grid;
}

//==============================================================================
void rasterize_capsules(std::span<const Capsule> capsules, BinaryMask& out)
{
  const Geometry& g = out.geometry();
  const Dims& d = g.dims;

  struct Box { std::int64_t lo[3]; std::int64_t hi[3]; };
  std::vector<Box> boxes(capsules.size());
  for (std::size_t c = 0; c < capsules.size(); ++c)
  {
    const Capsule& cap = capsules[c];
    const double lo[3] = {
      std::min(cap.a.z, cap.b.z) - cap.radius,
      std::min(cap.a.y, cap.b.y) - cap.radius,
      std::min(cap.a.x, cap.b.x) - cap.radius};
    const double hi[3] = {
      std::max(cap.a.z, cap.b.z) + cap.radius,
      std::max(cap.a.y, cap.b.y) + cap.radius,
      std::max(cap.a.x, cap.b.x) + cap.radius};
    const double org[3] = {g.origin.z, g.origin.y, g.origin.x};
    const double sp[3] = {g.spacing.z, g.spacing.y, g.spacing.x};
    const std::int64_t ext[3] = {d.z, d.y, d.x};
    for (int k = 0; k < 3; ++k)
    {
      boxes[c].lo[k] = std::max<std::int64_t>(0,
        static_cast<std::int64_t>(std::floor((lo[k] - org[k]) / sp[k])));
      boxes[c].hi[k] = std::min<std::int64_t>(ext[k] - 1,
        static_cast<std::int64_t>(std::ceil((hi[k] - org[k]) / sp[k])));
    }
  }

  #pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    for (std::size_t c = 0; c < capsules.size(); ++c)
    {
      const Box& b = boxes[c];
      if (z < b.lo[0] || z > b.hi[0])
        continue;
      for (std::int64_t y = b.lo[1]; y <= b.hi[1]; ++y)
        for (std::int64_t x = b.lo[2]; x <= b.hi[2]; ++x)
        {
          const Vec3 p = g.position(Index3{z, y, x});
          if (point_segment_distance(p, capsules[c].a, capsules[c].b) <= capsules[c].radius)
            out.at(z, y, x) = 1;
        }
    }
  }
}

} // namespace angio::kernels
