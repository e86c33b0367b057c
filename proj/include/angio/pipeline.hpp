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

#ifndef ANGIO__PIPELINE_HPP
#define ANGIO__PIPELINE_HPP

#include <angio/core/volume.hpp>
#include <angio/kernels/kernels.hpp>

#include <array>
#include <span>
#include <vector>

namespace angio::pipeline {

//==============================================================================
/// Multi-scale bright-tube vesselness: per-voxel maximum over `scales_mm` of
/// the Frangi response (see kernels::vesselness_at). Throws ValidationError
/// if scales are empty or non-positive, or if any axis is shorter than the
/// Gaussian support of the largest scale.
Volume frangi_vesselness(const Volume& v, std::span<const double> scales_mm,
  const kernels::VesselnessParams& params = {});

/// Binarise an atlas probability volume at `t1_rel * max(prob)` (strictly
/// greater) and dilate it with a box of full size `kernel_zyx` (odd).
BinaryMask build_atlas_mask(const Volume& prob, double t1_rel,
  const std::array<int, 3>& kernel_zyx);

/// Keep `resp` where the atlas is set and `resp > t2`; zero elsewhere.
Volume gate_and_threshold(const Volume& resp, const BinaryMask& atlas, double t2);

//==============================================================================
struct HoughParams
{
  double canny_threshold = 10.0;
  /// A centre needs strictly more votes than this.
  double accumulator_threshold = 1.0;
  /// Minimum distance between accepted centres, pixels.
  double min_distance = 5.0;
  int min_radius = 0;
  int max_radius = 5;
};

struct Circle
{
  std::int64_t y = 0;
  std::int64_t x = 0;
  int radius = 0;
  int votes = 0;
};

/// Gradient Hough circle detection on one 2D slice (row-major, ny x nx).
std::vector<Circle> hough_circles(std::span<const float> slice,
  std::int64_t ny, std::int64_t nx, const HoughParams& params);

struct SeedPoint
{
  Index3 index;
  double radius_px = 0.0;
  int votes = 0;
};

struct SeedPointSet
{
  std::vector<SeedPoint> seeds;
  /// Circle centres found before discarding those off the gated support.
  std::size_t raw_count = 0;
};

/// Slice-wise (axial) Hough on the gated response, then keep only centres on
/// its nonzero support.
SeedPointSet hough_seed_points(const Volume& gated, const HoughParams& params = {});

//==============================================================================
/// Flood fill (26-connected) from all seeds jointly, accepting voxels whose
/// value is within `rel_tol * |mu|` of the mean seed intensity `mu`. When
/// `domain` is given, growth is confined to its set voxels.
BinaryMask region_grow_adaptive(const Volume& v, const SeedPointSet& seeds,
  double rel_tol, const BinaryMask* domain = nullptr);

/// Flood fill (26-connected) accepting voxels with lo <= value <= hi.
BinaryMask region_grow_window(const Volume& v, const SeedPointSet& seeds, double lo, double hi);
BinaryMask region_grow_window(const Volume& v, const BinaryMask& seeds, double lo, double hi);

/// Box closing of half-width `radius_vox`.
BinaryMask morphological_closing(const BinaryMask& m, int radius_vox);

//==============================================================================
struct PipelineConfig
{
  std::vector<double> frangi_scales{1.0, 1.5};
  double frangi_alpha = 0.5;
  double frangi_beta = 0.5;
  double atlas_t1 = 0.005;
  std::array<int, 3> atlas_dilation{11, 7, 7};
  double t2 = 4.0;
  HoughParams hough;
  double region_tolerance = 0.05;
  double window_lo = 130.0;
  double window_hi = 1500.0;
  int closing_radius = 1;
};

struct PipelineResult
{
  /// Atlas-restricted seeded growing result, used for labeling.
  BinaryMask stage_h;
  /// Final segmentation after window growing and closing.
  BinaryMask final_mask;
  SeedPointSet seeds;
};

/// Chain the stages. Errors are rethrown as StageError tagged (d) .. (i).
PipelineResult run_pipeline(const Volume& v, const Volume& atlas_prob,
  const PipelineConfig& cfg = {});

} // namespace angio::pipeline

#endif // ANGIO__PIPELINE_HPP
