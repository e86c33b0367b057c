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

#ifndef ANGIO__TESTS__SUPPORT_HPP
#define ANGIO__TESTS__SUPPORT_HPP

#include <angio/core/volume.hpp>
#include <angio/labeling.hpp>
#include <angio/model.hpp>
#include <angio/phantom.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

// Fixtures and independent oracles shared by the unit tests and the
// acceptance checks. Oracles are deliberately naive: exhaustive scans and
// enumerations that share no code with the library.
namespace angio::test {

inline constexpr double inf = std::numeric_limits<double>::infinity();

//==============================================================================
/// Hand-built skeleton graphs with straight or bent edges.
class GraphBuilder
{
public:
  int node(const Vec3& p, double radius = 1.0)
  {
    model::GraphNode n;
    n.id = static_cast<int>(_nodes.size());
    n.position = p;
    n.radius = radius;
    _nodes.push_back(n);
    return n.id;
  }

  /// Edge through optional interior points; constant radius.
  int edge(int a, int b, double radius = 1.0, const std::vector<Vec3>& interior = {})
  {
    model::GraphEdge e;
    e.id = static_cast<int>(_edges.size());
    e.a = a;
    e.b = b;
    e.polyline.push_back(_nodes[a].position);
    e.polyline.insert(e.polyline.end(), interior.begin(), interior.end());
    e.polyline.push_back(_nodes[b].position);
    for (std::size_t k = 1; k < e.polyline.size(); ++k)
      e.arc_length += distance(e.polyline[k - 1], e.polyline[k]);
    e.min_radius = radius;
    e.mean_radius = radius;
    _edges.push_back(e);
    return e.id;
  }

  model::SkeletonGraph build() const { return model::make_graph(_nodes, _edges); }

private:
  std::vector<model::GraphNode> _nodes;
  std::vector<model::GraphEdge> _edges;
};

//==============================================================================
/// Optimal values over every simple path between two nodes.
struct Enumerated
{
  bool reachable = false;
  double shortest = inf;
  /// Largest bottleneck edge min_radius; +inf for from == to.
  double widest = -inf;
  /// Shortest arc length among paths achieving `widest`.
  double widest_length = inf;
  std::size_t paths = 0;
};

inline Enumerated enumerate_simple_paths(const model::SkeletonGraph& g, int from, int to)
{
  Enumerated out;
  if (from == to)
  {
    out.reachable = true;
    out.shortest = 0.0;
    out.widest = inf;
    out.widest_length = 0.0;
    out.paths = 1;
    return out;
  }
  std::vector<char> on_path(g.nodes.size(), 0);
  std::function<void(int, double, double)> walk = [&](int u, double len, double neck)
  {
    if (u == to)
    {
      ++out.paths;
      out.reachable = true;
      out.shortest = std::min(out.shortest, len);
      if (neck > out.widest || (neck == out.widest && len < out.widest_length))
      {
        out.widest = neck;
        out.widest_length = len;
      }
      return;
    }
    on_path[u] = 1;
    for (const auto& e : g.edges)
    {
      if (e.a == e.b || (e.a != u && e.b != u))
        continue;
      const int v = e.other(u);
      if (!on_path[v])
        walk(v, len + e.arc_length, std::min(neck, e.min_radius));
    }
    on_path[u] = 0;
  };
  walk(from, 0.0, inf);
  return out;
}

/// Quadratic-time Dijkstra over the edge list; distances from `from`.
inline std::vector<double> naive_distances(const model::SkeletonGraph& g, int from)
{
  std::vector<double> d(g.nodes.size(), inf);
  std::vector<char> done(g.nodes.size(), 0);
  d[from] = 0.0;
  for (;;)
  {
    int u = -1;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!done[i] && d[i] < inf && (u < 0 || d[i] < d[u]))
        u = static_cast<int>(i);
    if (u < 0)
      return d;
    done[u] = 1;
    for (const auto& e : g.edges)
      if (e.a == u || e.b == u)
        d[e.other(u)] = std::min(d[e.other(u)], d[u] + e.arc_length);
  }
}

/// Connected components by repeated relaxation over the edge list.
inline std::vector<int> naive_components(const model::SkeletonGraph& g)
{
  std::vector<int> label(g.nodes.size());
  for (std::size_t i = 0; i < label.size(); ++i)
    label[i] = static_cast<int>(i);
  for (bool changed = true; changed;)
  {
    changed = false;
    for (const auto& e : g.edges)
    {
      const int m = std::min(label[e.a], label[e.b]);
      if (label[e.a] != m || label[e.b] != m)
      {
        label[e.a] = label[e.b] = m;
        changed = true;
      }
    }
  }
  return label;
}

//==============================================================================
/// Distance from `p` to the nearest set voxel centre by scanning every voxel.
inline double scan_distance(const BinaryMask& m, const Vec3& p)
{
  double best = inf;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i])
    {
      const Vec3 q = m.geometry().position(i);
      const double dz = p.z - q.z, dy = p.y - q.y, dx = p.x - q.x;
      best = std::min(best, dz * dz + dy * dy + dx * dx);
    }
  return std::sqrt(best);
}

//==============================================================================
/// Straight tube along z through (cy, cx), spanning the whole volume.
inline phantom::PhantomSpec z_tube_spec(Dims dims, double radius, double noise = 0.0)
{
  phantom::PhantomSpec s;
  s.dims = dims;
  s.noise_sigma = noise;
  const double cy = 0.5 * static_cast<double>(dims.y - 1);
  const double cx = 0.5 * static_cast<double>(dims.x - 1);
  s.tree.push_back({{-2.0, cy, cx}, {static_cast<double>(dims.z) + 1.0, cy, cx}, radius, "T", {}});
  return s;
}

inline BinaryMask ball_mask(Dims dims, double radius)
{
  BinaryMask m(Geometry{dims});
  const double cz = 0.5 * static_cast<double>(dims.z - 1);
  const double cy = 0.5 * static_cast<double>(dims.y - 1);
  const double cx = 0.5 * static_cast<double>(dims.x - 1);
  for (std::int64_t z = 0; z < dims.z; ++z)
    for (std::int64_t y = 0; y < dims.y; ++y)
      for (std::int64_t x = 0; x < dims.x; ++x)
      {
        const double dz = static_cast<double>(z) - cz;
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        m.at(z, y, x) = dz * dz + dy * dy + dx * dx <= radius * radius;
      }
  return m;
}

/// Mask with voxels set where `inside(z, y, x)` holds.
template<typename F>
BinaryMask mask_from(Dims dims, F inside, Vec3 spacing = {1.0, 1.0, 1.0})
{
  BinaryMask m(Geometry{dims, spacing});
  for (std::int64_t z = 0; z < dims.z; ++z)
    for (std::int64_t y = 0; y < dims.y; ++y)
      for (std::int64_t x = 0; x < dims.x; ++x)
        m.at(z, y, x) = inside(z, y, x) ? 1 : 0;
  return m;
}

/// Random mask with the given fill probability.
inline BinaryMask random_mask(Dims dims, double p, std::uint64_t seed, Vec3 spacing = {1.0, 1.0, 1.0})
{
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution set(p);
  BinaryMask m(Geometry{dims, spacing});
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = set(rng);
  return m;
}

} // namespace angio::test

#endif // ANGIO__TESTS__SUPPORT_HPP
