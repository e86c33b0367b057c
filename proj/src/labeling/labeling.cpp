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

#include <angio/labeling.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace angio::labeling {

//==============================================================================
std::string to_string(Vessel v)
{
  switch (v)
  {
    case Vessel::ICA_L: return "ICA_L";
    case Vessel::ICA_R: return "ICA_R";
    case Vessel::MCA_L: return "MCA_L";
    case Vessel::MCA_R: return "MCA_R";
    case Vessel::ACA: return "ACA";
    case Vessel::PCA_L: return "PCA_L";
    case Vessel::PCA_R: return "PCA_R";
  }
  return "?";
}

std::optional<Vessel> parse_vessel(std::string_view name)
{
  std::string key;
  for (const char c : name)
    key.push_back(c == ' ' || c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  for (const Vessel v : all_vessels)
    if (to_string(v) == key)
      return v;
  return std::nullopt;
}

std::string to_string(VerdictReason r)
{
  switch (r)
  {
    case VerdictReason::enough_markers: return "enough_markers";
    case VerdictReason::too_few_markers: return "too_few_markers";
    case VerdictReason::slope_exceeded: return "slope_exceeded";
  }
  return "?";
}

//==============================================================================
void MarkerChain::validate() const
{
  const std::string name = to_string(vessel);
  if (required_present_count < 0
      || static_cast<std::size_t>(required_present_count) > markers.size())
    throw ValidationError(name + ": required_present_count must be in [0, marker count]");
  for (std::size_t i = 0; i < markers.size(); ++i)
    if (!(markers[i].max_allowed_distance > 0.0))
      throw ValidationError(name + ": markers[" + std::to_string(i)
        + "].max_allowed_distance must be > 0");
}

//==============================================================================
struct NearestVoxelIndex::Tree
{
  struct Point
  {
    Vec3 p;
    std::size_t linear;
  };

  std::vector<Point> points;
  std::vector<std::uint8_t> split_axis;

  static double coord(const Vec3& v, int axis)
  {
    return axis == 0 ? v.z : (axis == 1 ? v.y : v.x);
  }

  void build(std::size_t lo, std::size_t hi)
  {
    if (hi - lo <= 1)
      return;
    Vec3 mn = points[lo].p, mx = points[lo].p;
    for (std::size_t i = lo; i < hi; ++i)
    {
      const Vec3& q = points[i].p;
      mn = {std::min(mn.z, q.z), std::min(mn.y, q.y), std::min(mn.x, q.x)};
      mx = {std::max(mx.z, q.z), std::max(mx.y, q.y), std::max(mx.x, q.x)};
    }
    const Vec3 ext = mx - mn;
    const int axis = ext.z >= ext.y && ext.z >= ext.x ? 0 : (ext.y >= ext.x ? 1 : 2);
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(points.begin() + lo, points.begin() + mid, points.begin() + hi,
      [axis](const Point& a, const Point& b) { return coord(a.p, axis) < coord(b.p, axis); });
    split_axis[mid] = static_cast<std::uint8_t>(axis);
    build(lo, mid);
    build(mid + 1, hi);
  }

  void query(std::size_t lo, std::size_t hi, const Vec3& q,
    double& best2, std::size_t& best) const
  {
    if (lo >= hi)
      return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Point& p = points[mid];
    const double dz = q.z - p.p.z;
    const double dy = q.y - p.p.y;
    const double dx = q.x - p.p.x;
    const double d2 = dz * dz + dy * dy + dx * dx;
    if (d2 < best2 || (d2 == best2 && p.linear < points[best].linear))
    {
      best2 = d2;
      best = mid;
    }
    if (hi - lo == 1)
      return;

    const int axis = split_axis[mid];
    const double delta = coord(q, axis) - coord(p.p, axis);
    const bool left_first = delta < 0.0;
    if (left_first)
      query(lo, mid, q, best2, best);
    else
      query(mid + 1, hi, q, best2, best);
    if (delta * delta <= best2)
    {
      if (left_first)
        query(mid + 1, hi, q, best2, best);
      else
        query(lo, mid, q, best2, best);
    }
  }
};

NearestVoxelIndex::NearestVoxelIndex(const BinaryMask& mask)
: _tree(std::make_unique<Tree>())
{
  const Geometry& g = mask.geometry();
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      _tree->points.push_back({g.position(i), i});
  _tree->split_axis.assign(_tree->points.size(), 0);
  _tree->build(0, _tree->points.size());
}

NearestVoxelIndex::~NearestVoxelIndex() = default;
NearestVoxelIndex::NearestVoxelIndex(NearestVoxelIndex&&) noexcept = default;
NearestVoxelIndex& NearestVoxelIndex::operator=(NearestVoxelIndex&&) noexcept = default;

bool NearestVoxelIndex::empty() const
{
  return _tree->points.empty();
}

std::optional<NearestVoxelIndex::Hit> NearestVoxelIndex::nearest(const Vec3& p) const
{
  if (empty())
    return std::nullopt;
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  _tree->query(0, _tree->points.size(), p, best2, best);
  return Hit{std::sqrt(best2), _tree->points[best].p};
}

//==============================================================================
std::vector<double> marker_distances(const MarkerChain& chain, const NearestVoxelIndex& index)
{
  std::vector<double> out;
  out.reserve(chain.markers.size());
  for (const Marker& m : chain.markers)
  {
    const auto hit = index.nearest(m.position);
    out.push_back(hit ? hit->distance : std::numeric_limits<double>::infinity());
  }
  return out;
}

std::vector<double> marker_distances(const MarkerChain& chain, const BinaryMask& mask)
{
  return marker_distances(chain, NearestVoxelIndex(mask));
}

//==============================================================================
double fit_distance_slope(std::span<const double> distances)
{
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i)
  {
    if (!std::isfinite(distances[i]))
      continue;
    n += 1.0;
    sx += static_cast<double>(i);
    sy += distances[i];
  }
  if (n < 2.0)
    throw ValidationError("insufficient markers");

  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i)
  {
    if (!std::isfinite(distances[i]))
      continue;
    const double dx = static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (distances[i] - my);
  }
  return sxy / sxx;
}

//==============================================================================
VesselVerdict judge_vessel(const MarkerChain& chain, const NearestVoxelIndex& index)
{
  chain.validate();

  VesselVerdict v;
  v.vessel = chain.vessel;
  v.distances = marker_distances(chain, index);

  std::size_t finite = 0;
  for (std::size_t i = 0; i < v.distances.size(); ++i)
  {
    finite += std::isfinite(v.distances[i]);
    if (v.distances[i] <= chain.markers[i].max_allowed_distance)
      ++v.markers_within;
  }

  if (chain.slope_enabled && finite >= 2)
    v.slope = fit_distance_slope(v.distances);

  const bool enough = v.markers_within >= chain.required_present_count;
  const bool slope_bad = v.slope && *v.slope > chain.slope_threshold;

  if (slope_bad)
    v.reason = VerdictReason::slope_exceeded;
  else if (!enough)
    v.reason = VerdictReason::too_few_markers;
  else
    v.reason = VerdictReason::enough_markers;
  v.present = enough && !slope_bad && !index.empty();

  if (v.present)
  {
    const auto best = std::min_element(v.distances.begin(), v.distances.end());
    const auto k = static_cast<std::size_t>(best - v.distances.begin());
    v.final_marker_position = index.nearest(chain.markers[k].position)->position;
  }
  return v;
}

VesselVerdict judge_vessel(const MarkerChain& chain, const BinaryMask& mask)
{
  return judge_vessel(chain, NearestVoxelIndex(mask));
}

std::vector<VesselVerdict> judge_all(std::span<const MarkerChain> chains, const BinaryMask& mask)
{
  // Validate before the parallel region, which must not throw.
  for (const MarkerChain& c : chains)
    c.validate();
  const NearestVoxelIndex index(mask);
  std::vector<VesselVerdict> out(chains.size());
  #pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(chains.size()); ++i)
    out[i] = judge_vessel(chains[i], index);
  return out;
}

//==============================================================================
LvoVerdict classify_lvo(std::span<const VesselVerdict> verdicts, const LvoRule& rule)
{
  std::vector<Vessel> required = rule.required;
  if (required.empty())
    required.assign(std::begin(all_vessels), std::end(all_vessels));

  for (const Vessel r : required)
  {
    const bool found = std::any_of(verdicts.begin(), verdicts.end(),
      [r](const VesselVerdict& v) { return v.vessel == r; });
    if (!found)
      throw ValidationError("missing verdict for " + to_string(r));
  }

  auto counts = [&](Vessel v)
  {
    switch (v)
    {
      case Vessel::MCA_L: case Vessel::MCA_R: case Vessel::ICA_L: case Vessel::ICA_R:
        return true;
      case Vessel::PCA_L: case Vessel::PCA_R:
        return rule.include_posterior;
      case Vessel::ACA:
        return false;
    }
    return false;
  };

  LvoVerdict out;
  for (const VesselVerdict& v : verdicts)
    if (!v.present && counts(v.vessel)
        && std::find(out.implicated.begin(), out.implicated.end(), v.vessel)
          == out.implicated.end())
      out.implicated.push_back(v.vessel);
  out.lvo_positive = !out.implicated.empty();
  return out;
}

} // namespace angio::labeling
