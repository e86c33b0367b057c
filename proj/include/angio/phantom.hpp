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

#ifndef ANGIO__PHANTOM_HPP
#define ANGIO__PHANTOM_HPP

#include <angio/core/volume.hpp>
#include <angio/labeling.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace angio::phantom {

//==============================================================================
/// One straight or curved tube piece of a synthetic vessel tree.
struct Segment
{
  Vec3 start;
  Vec3 end;
  double radius = 1.0;
  std::string label;
  /// Optional interior polyline points between start and end.
  std::vector<Vec3> control_points;

  std::vector<Vec3> polyline() const;
};

/// Erase the part of a labelled vessel between two arc-length fractions.
struct Occlusion
{
  std::string label;
  double fraction_start = 0.0;
  double fraction_end = 1.0;
};

struct PhantomSpec
{
  std::vector<Segment> tree;
  double background_hu = 40.0;
  double vessel_hu = 300.0;
  double noise_sigma = 0.0;
  std::vector<Occlusion> occlusions;
  Dims dims{16, 16, 16};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  Geometry geometry() const { return {dims, spacing, origin}; }

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct CenterlineSample
{
  Vec3 position;
  double radius = 0.0;
  bool occluded = false;
};

struct PhantomGroundTruth
{
  /// Noise-free tube union after occlusion erasure.
  BinaryMask mask;
  /// Dense samples along each label's centerline, including occluded spans.
  std::map<std::string, std::vector<CenterlineSample>> centerlines;
  std::set<std::string> occluded_labels;
};

struct Phantom
{
  Volume volume;
  PhantomGroundTruth truth;
};

/// Rasterise a phantom. Identical (spec, seed) pairs give bit-identical
/// volumes.
Phantom render_phantom(const PhantomSpec& spec, std::uint64_t rng_seed);

/// Smooth vessel-probability volume around the centerlines of `spec`
/// (occlusions ignored: it plays the role of an anatomical prior). Labels in
/// `exclude` are left out.
Volume atlas_probability(const PhantomSpec& spec, const std::set<std::string>& exclude = {});

//==============================================================================
/// Canonical seven-vessel arterial circle (ICA, MCA, PCA left/right and ACA,
/// joined by communicating segments and a basilar trunk).
PhantomSpec standard_cow_spec();

/// Marker chains laid along each labelled vessel of `spec`: 12 markers per
/// vessel, allowed distance 3x the local radius, 60 % required, slope
/// criterion on the MCA chains.
std::vector<labeling::MarkerChain> marker_chains_for(const PhantomSpec& spec);

struct CowPhantom
{
  Volume volume;
  PhantomGroundTruth truth;
  std::vector<labeling::MarkerChain> chains;
  Volume atlas;
  PhantomSpec spec;
};

CowPhantom standard_cow_phantom(std::uint64_t rng_seed,
  const std::vector<Occlusion>& occlusions = {}, double noise_sigma = 10.0);

} // namespace angio::phantom

#endif // ANGIO__PHANTOM_HPP
