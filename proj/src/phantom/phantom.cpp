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

#include <angio/phantom.hpp>

#include <angio/kernels/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace angio::phantom {

namespace {

using kernels::Capsule;

/// One segment's polyline placed on its label's arc-length axis.
struct Piece
{
  std::vector<Vec3> points;
  std::vector<double> arc;  // cumulative arc length per point, label-global
  double radius = 1.0;
};

struct LabelPath
{
  std::string label;
  std::vector<Piece> pieces;
  double length = 0.0;
};

std::vector<LabelPath> label_paths(const PhantomSpec& spec)
{
  std::vector<LabelPath> paths;
  for (const Segment& s : spec.tree)
  {
    auto it = std::find_if(paths.begin(), paths.end(),
      [&](const LabelPath& p) { return p.label == s.label; });
    if (it == paths.end())
    {
      paths.push_back({s.label, {}, 0.0});
      it = std::prev(paths.end());
    }

    Piece piece;
    piece.points = s.polyline();
    piece.radius = s.radius;
    piece.arc.resize(piece.points.size());
    double acc = it->length;
    piece.arc[0] = acc;
    for (std::size_t i = 1; i < piece.points.size(); ++i)
    {
      acc += distance(piece.points[i - 1], piece.points[i]);
      piece.arc[i] = acc;
    }
    it->length = acc;
    it->pieces.push_back(std::move(piece));
  }
  return paths;
}

Vec3 point_at(const Piece& p, double s)
{
  if (s <= p.arc.front())
    return p.points.front();
  for (std::size_t i = 1; i < p.points.size(); ++i)
  {
    if (s <= p.arc[i])
    {
      const double len = p.arc[i] - p.arc[i - 1];
      const double t = len > 0.0 ? (s - p.arc[i - 1]) / len : 0.0;
      return p.points[i - 1] + (p.points[i] - p.points[i - 1]) * t;
    }
  }
  return p.points.back();
}

/// Sub-polyline of a piece between label-global arc positions s0 < s1.
std::vector<Vec3> cut(const Piece& p, double s0, double s1)
{
  std::vector<Vec3> out;
  s0 = std::max(s0, p.arc.front());
  s1 = std::min(s1, p.arc.back());
  if (!(s1 > s0))
    return out;
  out.push_back(point_at(p, s0));
  for (std::size_t i = 0; i < p.points.size(); ++i)
    if (p.arc[i] > s0 && p.arc[i] < s1)
      out.push_back(p.points[i]);
  out.push_back(point_at(p, s1));
  return out;
}

using Interval = std::pair<double, double>;

/// Closed arc-length intervals of a label that remain visible.
std::vector<Interval> visible_intervals(const PhantomSpec& spec, const LabelPath& path)
{
  std::vector<Interval> occluded;
  for (const Occlusion& o : spec.occlusions)
    if (o.label == path.label)
      occluded.emplace_back(o.fraction_start * path.length, o.fraction_end * path.length);
  std::sort(occluded.begin(), occluded.end());

  std::vector<Interval> visible;
  double cursor = 0.0;
  for (const auto& [a, b] : occluded)
  {
    if (a > cursor)
      visible.emplace_back(cursor, a);
    cursor = std::max(cursor, b);
  }
  if (cursor < path.length || occluded.empty())
    visible.emplace_back(cursor, path.length);
  return visible;
}

void append_capsules(const std::vector<Vec3>& line, double radius, std::vector<Capsule>& out)
{
  if (line.size() == 1)
    out.push_back({line[0], line[0], radius});
  for (std::size_t i = 1; i < line.size(); ++i)
    out.push_back({line[i - 1], line[i], radius});
}

void check_point(const Vec3& p, const std::string& field)
{
  if (!std::isfinite(p.z) || !std::isfinite(p.y) || !std::isfinite(p.x))
    throw ValidationError(field + " must be finite");
}

} // anonymous namespace

//==============================================================================
std::vector<Vec3> Segment::polyline() const
{
  std::vector<Vec3> out;
  out.reserve(control_points.size() + 2);
  out.push_back(start);
  out.insert(out.end(), control_points.begin(), control_points.end());
  out.push_back(end);
  return out;
}

//==============================================================================
void PhantomSpec::validate() const
{
  if (dims.z < 16 || dims.y < 16 || dims.x < 16)
    throw ValidationError("dims must be at least (16, 16, 16)");
  if (!(spacing.z > 0.0 && spacing.y > 0.0 && spacing.x > 0.0))
    throw ValidationError("spacing components must be > 0");
  if (!(vessel_hu >= 130.0 && vessel_hu <= 1500.0))
    throw ValidationError("vessel_hu must lie within [130, 1500] HU");
  if (!std::isfinite(background_hu))
    throw ValidationError("background_hu must be finite");
  if (!(noise_sigma >= 0.0))
    throw ValidationError("noise_sigma must be >= 0");

  for (std::size_t i = 0; i < tree.size(); ++i)
  {
    const std::string field = "tree[" + std::to_string(i) + "]";
    const Segment& s = tree[i];
    if (!(s.radius > 0.0))
      throw ValidationError(field + ".radius must be > 0");
    if (s.label.empty())
      throw ValidationError(field + ".label must not be empty");
    check_point(s.start, field + ".start");
    check_point(s.end, field + ".end");
    for (std::size_t k = 0; k < s.control_points.size(); ++k)
      check_point(s.control_points[k], field + ".control_points[" + std::to_string(k) + "]");
  }

  for (std::size_t i = 0; i < occlusions.size(); ++i)
  {
    const std::string field = "occlusions[" + std::to_string(i) + "]";
    const Occlusion& o = occlusions[i];
    if (!(o.fraction_start >= 0.0 && o.fraction_end <= 1.0))
      throw ValidationError(field + " fractions must lie in [0, 1]");
    if (!(o.fraction_start < o.fraction_end))
      throw ValidationError(field + ".fraction_start must be < fraction_end");
    const bool known = std::any_of(tree.begin(), tree.end(),
      [&](const Segment& s) { return s.label == o.label; });
    if (!known)
      throw ValidationError(field + ".label '" + o.label + "' names no segment");
  }
}

//==============================================================================
Phantom render_phantom(const PhantomSpec& spec, std::uint64_t rng_seed)
{
  spec.validate();
  const Geometry geometry = spec.geometry();

  Phantom out{Volume(geometry), {BinaryMask(geometry), {}, {}}};
  PhantomGroundTruth& truth = out.truth;

  std::vector<Capsule> capsules;
  for (const LabelPath& path : label_paths(spec))
  {
    const auto visible = visible_intervals(spec, path);
    if (visible.size() != 1 || visible[0].first > 0.0 || visible[0].second < path.length)
      truth.occluded_labels.insert(path.label);

    auto& samples = truth.centerlines[path.label];
    for (const Piece& piece : path.pieces)
    {
      for (const auto& [a, b] : visible)
        append_capsules(cut(piece, a, b), piece.radius, capsules);

      const double a = piece.arc.front();
      const double b = piece.arc.back();
      const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
      for (int k = 0; k <= steps; ++k)
      {
        const double s = a + (b - a) * k / steps;
        const bool shown = std::any_of(visible.begin(), visible.end(),
          [&](const Interval& iv) { return s >= iv.first && s <= iv.second; });
        samples.push_back({point_at(piece, s), piece.radius, !shown});
      }
    }
  }

  kernels::rasterize_capsules(capsules, truth.mask);

  const auto vessel = static_cast<float>(spec.vessel_hu);
  const auto background = static_cast<float>(spec.background_hu);
  auto& data = out.volume.storage();
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = truth.mask[i] ? vessel : background;

  if (spec.noise_sigma > 0.0)
  {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& v : data)
      v = static_cast<float>(v + noise(rng));
  }
  return out;
}

//==============================================================================
Volume atlas_probability(const PhantomSpec& spec, const std::set<std::string>& exclude)
{
  spec.validate();
  const Geometry g = spec.geometry();
  Volume prob(g);

  std::vector<Capsule> capsules;
  for (const LabelPath& path : label_paths(spec))
  {
    if (exclude.count(path.label))
      continue;
    for (const Piece& piece : path.pieces)
      append_capsules(piece.points, piece.radius, capsules);
  }

  #pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t z = 0; z < g.dims.z; ++z)
  {
    for (const Capsule& c : capsules)
    {
      const double reach = 3.0 * c.radius;
      const double zlo = std::min(c.a.z, c.b.z) - reach;
      const double zhi = std::max(c.a.z, c.b.z) + reach;
      const double pz = g.origin.z + z * g.spacing.z;
      if (pz < zlo || pz > zhi)
        continue;

      const auto ylo = std::max<std::int64_t>(0, static_cast<std::int64_t>(
        std::floor((std::min(c.a.y, c.b.y) - reach - g.origin.y) / g.spacing.y)));
      const auto yhi = std::min<std::int64_t>(g.dims.y - 1, static_cast<std::int64_t>(
        std::ceil((std::max(c.a.y, c.b.y) + reach - g.origin.y) / g.spacing.y)));
      const auto xlo = std::max<std::int64_t>(0, static_cast<std::int64_t>(
        std::floor((std::min(c.a.x, c.b.x) - reach - g.origin.x) / g.spacing.x)));
      const auto xhi = std::min<std::int64_t>(g.dims.x - 1, static_cast<std::int64_t>(
        std::ceil((std::max(c.a.x, c.b.x) + reach - g.origin.x) / g.spacing.x)));

      for (std::int64_t y = ylo; y <= yhi; ++y)
        for (std::int64_t x = xlo; x <= xhi; ++x)
        {
          const double d = point_segment_distance(g.position(Index3{z, y, x}), c.a, c.b);
          if (d > reach)
            continue;
          const double r = d / c.radius;
          auto& v = prob.at(z, y, x);
          v = std::max(v, static_cast<float>(std::exp(-0.5 * r * r)));
        }
    }
  }
  return prob;
}

//==============================================================================
PhantomSpec standard_cow_spec()
{
  PhantomSpec s;
  s.dims = {52, 80, 136};
  s.spacing = {1.0, 0.8, 0.8};
  s.background_hu = 40.0;
  s.vessel_hu = 300.0;
  s.noise_sigma = 10.0;

  // (z, y, x) in mm; z runs inferior to superior, x from the left side.
  const double mid = 54.4;
  const double ica_l = mid - 6.0;
  const double ica_r = mid + 6.0;

  s.tree = {
    {{4, 30, ica_l}, {40, 30, ica_l}, 2.0, "ICA_L", {}},
    {{4, 30, ica_r}, {40, 30, ica_r}, 2.0, "ICA_R", {}},
    {{40, 30, ica_l}, {43, 30, 4.4}, 1.3, "MCA_L", {}},
    {{40, 30, ica_r}, {43, 30, 2 * mid - 4.4}, 1.3, "MCA_R", {}},
    {{40, 30, ica_l}, {48, 46, mid}, 1.2, "ACA", {{42, 38, mid}}},
    {{42, 38, mid}, {40, 30, ica_r}, 1.0, "ACOM", {}},
    {{4, 18, mid}, {32, 18, mid}, 1.6, "BA", {}},
    {{32, 18, mid}, {36, 10, mid - 34.0}, 1.2, "PCA_L", {{34, 14, mid - 14.0}}},
    {{32, 18, mid}, {36, 10, mid + 34.0}, 1.2, "PCA_R", {{34, 14, mid + 14.0}}},
    {{34, 14, mid - 14.0}, {36, 30, ica_l}, 0.9, "PCOM_L", {}},
    {{34, 14, mid + 14.0}, {36, 30, ica_r}, 0.9, "PCOM_R", {}},
  };
  return s;
}

//==============================================================================
std::vector<labeling::MarkerChain> marker_chains_for(const PhantomSpec& spec)
{
  constexpr int markers_per_vessel = 12;
  std::vector<labeling::MarkerChain> chains;

  for (const LabelPath& path : label_paths(spec))
  {
    const auto vessel = labeling::parse_vessel(path.label);
    if (!vessel)
      continue;

    labeling::MarkerChain chain;
    chain.vessel = *vessel;
    for (int i = 0; i < markers_per_vessel; ++i)
    {
      const double s = path.length * i / (markers_per_vessel - 1);
      const auto piece = std::find_if(path.pieces.begin(), path.pieces.end(),
        [&](const Piece& p) { return s <= p.arc.back(); });
      const Piece& p = piece != path.pieces.end() ? *piece : path.pieces.back();
      chain.markers.push_back({point_at(p, s), 3.0 * p.radius});
    }
    chain.required_present_count =
      static_cast<int>(std::ceil(0.6 * markers_per_vessel));
    chain.slope_enabled = *vessel == labeling::Vessel::MCA_L
      || *vessel == labeling::Vessel::MCA_R;
    chain.slope_threshold = 2.1;
    chains.push_back(std::move(chain));
  }
  return chains;
}

//==============================================================================
CowPhantom standard_cow_phantom(std::uint64_t rng_seed,
  const std::vector<Occlusion>& occlusions, double noise_sigma)
{
  PhantomSpec spec = standard_cow_spec();
  spec.occlusions = occlusions;
  spec.noise_sigma = noise_sigma;

  Phantom p = render_phantom(spec, rng_seed);
  CowPhantom out;
  out.volume = std::move(p.volume);
  out.truth = std::move(p.truth);
  out.chains = marker_chains_for(spec);
  out.atlas = atlas_probability(spec);
  out.spec = std::move(spec);
  return out;
}

} // namespace angio::phantom
