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

#ifndef ANGIO__LABELING_HPP
#define ANGIO__LABELING_HPP

#include <angio/core/volume.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace angio::labeling {

//==============================================================================
enum class Vessel { ICA_L, ICA_R, MCA_L, MCA_R, ACA, PCA_L, PCA_R };

inline constexpr Vessel all_vessels[] = {
  Vessel::ICA_L, Vessel::ICA_R, Vessel::MCA_L, Vessel::MCA_R,
  Vessel::ACA, Vessel::PCA_L, Vessel::PCA_R};

std::string to_string(Vessel v);

/// Parse "ICA_L", "MCA R", "mca_l" ...; nullopt for unknown names.
std::optional<Vessel> parse_vessel(std::string_view name);

//==============================================================================
struct Marker
{
  Vec3 position;
  double max_allowed_distance = 1.0;
};

/// Markers along the expected course of one vessel, ordered proximal to
/// distal.
struct MarkerChain
{
  Vessel vessel = Vessel::ICA_L;
  std::vector<Marker> markers;
  int required_present_count = 1;
  bool slope_enabled = false;
  double slope_threshold = 2.1;

  void validate() const;
};

enum class VerdictReason { enough_markers, too_few_markers, slope_exceeded };

std::string to_string(VerdictReason r);

struct VesselVerdict
{
  Vessel vessel = Vessel::ICA_L;
  bool present = false;
  std::vector<double> distances;
  int markers_within = 0;
  std::optional<Vec3> final_marker_position;
  std::optional<double> slope;
  VerdictReason reason = VerdictReason::too_few_markers;
};

struct LvoVerdict
{
  bool lvo_positive = false;
  std::vector<Vessel> implicated;
};

/// Which vessels count towards a positive large-vessel-occlusion call.
struct LvoRule
{
  bool include_posterior = false;
  /// Vessels that must have a verdict. Empty means every vessel.
  std::vector<Vessel> required;
};

//==============================================================================
/// Exact nearest-set-voxel queries over a mask (k-d tree over voxel centres).
class NearestVoxelIndex
{
public:
  explicit NearestVoxelIndex(const BinaryMask& mask);
  ~NearestVoxelIndex();
  NearestVoxelIndex(NearestVoxelIndex&&) noexcept;
  NearestVoxelIndex& operator=(NearestVoxelIndex&&) noexcept;

  bool empty() const;

  struct Hit
  {
    double distance = 0.0;
    Vec3 position;
  };

  /// Nearest set voxel centre; nullopt when the mask is empty.
  std::optional<Hit> nearest(const Vec3& p) const;

private:
  struct Tree;
  std::unique_ptr<Tree> _tree;
};

/// Per-marker Euclidean distance (mm) to the nearest set voxel centre.
/// An empty mask yields +infinity for every marker.
std::vector<double> marker_distances(const MarkerChain& chain, const BinaryMask& mask);
std::vector<double> marker_distances(const MarkerChain& chain, const NearestVoxelIndex& index);

/// Least-squares slope of distance versus 0-based marker index. Infinite
/// distances are skipped but keep their index.
double fit_distance_slope(std::span<const double> distances);

VesselVerdict judge_vessel(const MarkerChain& chain, const BinaryMask& mask);
VesselVerdict judge_vessel(const MarkerChain& chain, const NearestVoxelIndex& index);

std::vector<VesselVerdict> judge_all(std::span<const MarkerChain> chains, const BinaryMask& mask);

LvoVerdict classify_lvo(std::span<const VesselVerdict> verdicts, const LvoRule& rule = {});

} // namespace angio::labeling

#endif // ANGIO__LABELING_HPP
