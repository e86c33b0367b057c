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

namespace angio::pipeline {

//==============================================================================
Volume frangi_vesselness(const Volume& v, std::span<const double> scales_mm,
  const kernels::VesselnessParams& params)
{
  if (scales_mm.empty())
    throw ValidationError("frangi: at least one scale required");
  for (const double s : scales_mm)
    if (!(s > 0.0))
      throw ValidationError("frangi: scales must be > 0");

  const double largest = *std::max_element(scales_mm.begin(), scales_mm.end());
  const Dims& d = v.dims();
  const Vec3& sp = v.spacing();
  const std::int64_t extent[3] = {d.z, d.y, d.x};
  const double spacing[3] = {sp.z, sp.y, sp.x};
  for (int k = 0; k < 3; ++k)
  {
    const auto support = kernels::gaussian_kernel(largest, spacing[k], 2).size();
    if (extent[k] < static_cast<std::int64_t>(support))
      throw ValidationError("frangi: volume smaller than filter support ("
        + std::to_string(support) + " voxels) along axis " + "zyx"[k]);
  }

  Volume out(v.geometry(), 0.0f);
  for (const double s : scales_mm)
  {
    const auto h = kernels::gaussian_hessian(v, s);
    const auto r = kernels::vesselness(h, params);
    auto& o = out.storage();
    #pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(o.size()); ++i)
      o[i] = std::max(o[i], r[i]);
  }
  return out;
}

//==============================================================================
BinaryMask build_atlas_mask(const Volume& prob, double t1_rel,
  const std::array<int, 3>& kernel_zyx)
{
  for (const int k : kernel_zyx)
    if (k < 1 || k % 2 == 0)
      throw ValidationError("atlas dilation kernel sizes must be odd and >= 1");

  float peak = 0.0f;
  for (const float p : prob.data())
  {
    if (p < 0.0f)
      throw ValidationError("atlas probabilities must be >= 0");
    peak = std::max(peak, p);
  }
  if (peak <= 0.0f)
    throw ValidationError("empty atlas");

  const double cut = t1_rel * peak;
  BinaryMask m(prob.geometry());
  // The peak itself always survives, so t1_rel = 1 keeps exactly the maxima.
  for (std::size_t i = 0; i < prob.size(); ++i)
    m[i] = prob[i] > cut || prob[i] == peak;

  return kernels::box_dilate(m, {kernel_zyx[0] / 2, kernel_zyx[1] / 2, kernel_zyx[2] / 2});
}

//==============================================================================
Volume gate_and_threshold(const Volume& resp, const BinaryMask& atlas, double t2)
{
  require_same_geometry(resp.geometry(), atlas.geometry(), "gate_and_threshold");
  Volume out(resp.geometry(), 0.0f);
  for (std::size_t i = 0; i < resp.size(); ++i)
    if (atlas[i] && resp[i] > t2)
      out[i] = resp[i];
  return out;
}

//==============================================================================
BinaryMask morphological_closing(const BinaryMask& m, int radius_vox)
{
  if (radius_vox < 1)
    throw ValidationError("closing radius must be >= 1");
  // Close on a background-padded copy: the box erosion ignores samples
  // outside the grid, which would otherwise keep dilated border voxels.
  const std::int64_t r = radius_vox;
  const Dims& d = m.dims();
  const Dims pd{d.z + 2 * r, d.y + 2 * r, d.x + 2 * r};
  BinaryMask padded(Geometry{pd, m.spacing()}, 0);
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
        padded.at(z + r, y + r, x + r) = m.at(z, y, x);

  const std::array<int, 3> half{radius_vox, radius_vox, radius_vox};
  const BinaryMask closed = kernels::box_erode(kernels::box_dilate(padded, half), half);
  BinaryMask out(m.geometry(), 0);
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
        out.at(z, y, x) = closed.at(z + r, y + r, x + r);
  return out;
}

} // namespace angio::pipeline
