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

#include <angio/search.hpp>

#include "workspace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <tuple>

namespace angio::search {

namespace {

/// Widest-path tree from `root`: bottleneck first, then path length, then
/// node id. Bottlenecks are exact; the length tie-break is greedy.
std::size_t widest_tree(const SearchGraph& g, int root, std::vector<NodeRecord>& records)
{
  using Label = std::tuple<double, double, int>; // -bottleneck, length, node
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  std::vector<double> length(g.node_count(), infinity);
  std::vector<char> done(g.node_count(), 0);

  records[root] = {infinity, -1, -1, true, root};
  length[root] = 0.0;
  heap.push({-infinity, 0.0, root});
  std::size_t expanded = 0;
  while (!heap.empty())
  {
    const auto [nb, len, u] = heap.top();
    heap.pop();
    if (done[u] || -nb != records[u].cost || len != length[u])
      continue;
    done[u] = 1;
    ++expanded;
    for (const auto& arc : g.arcs(u))
    {
      const int v = arc.to;
      if (done[v])
        continue;
      const double b = std::min(records[u].cost, arc.radius);
      const double l = len + arc.length;
      NodeRecord& r = records[v];
      if (!r.reachable || b > r.cost || (b == r.cost && l < length[v]))
      {
        r = {b, u, arc.edge, true, root};
        length[v] = l;
        heap.push({-b, l, v});
      }
    }
  }
  return expanded;
}

} // anonymous namespace

//==============================================================================
const NodeRecord& SearchCache::record(int node) const
{
  _graph->require_node(node);
  return _records[node];
}

int quasi_root(const model::SkeletonGraph& g, int component, int target_component)
{
  const auto& members = g.components.at(component);
  const auto& targets = g.components.at(target_component);
  int best = -1;
  double best_d = infinity;
  for (const int n : members)
    for (const int t : targets)
    {
      const double d = distance(g.nodes[n].position, g.nodes[t].position);
      if (d < best_d || (d == best_d && n < best))
      {
        best_d = d;
        best = n;
      }
    }
  return best;
}

//==============================================================================
SearchCache build_cache(std::shared_ptr<const SearchGraph> sg, int root, Criterion criterion,
  CacheStrategy strategy)
{
  if (!sg)
    throw ValidationError("search cache: null graph");
  sg->require_node(root);
  const auto start = std::chrono::steady_clock::now();
  const SearchGraph& g = *sg;
  const auto& graph = g.graph();

  SearchCache c;
  c._graph = sg;
  c._root = root;
  c._criterion = criterion;
  c._records.assign(g.node_count(), {});
  const int home = graph.component_of[root];
  c._component_roots.resize(graph.components.size());

  for (std::size_t comp = 0; comp < graph.components.size(); ++comp)
  {
    const int r = static_cast<int>(comp) == home ? root
      : quasi_root(graph, static_cast<int>(comp), home);
    c._component_roots[comp] = r;

    if (criterion == Criterion::widest_path)
    {
      c._stats.nodes_expanded += widest_tree(g, r, c._records);
      // Report bottleneck diameters, as widest_path does.
      for (const int n : graph.components[comp])
        c._records[n].cost *= 2.0;
      continue;
    }

    c._records[r] = {0.0, -1, -1, true, r};
    for (const int target : graph.components[comp])
    {
      if (target == r)
        continue;
      auto& w = detail::workspace(g.node_count());
      c._stats.nodes_expanded += strategy == CacheStrategy::astar
        ? detail::best_first<true>(g, r, target, 0.0, w)
        : detail::best_first<false>(g, r, target, 0.0, w);
      c._records[target] = {w.g[target], w.pred_node[target], w.pred_edge[target], true, r};
    }
  }

  c._stats.wall_time_ms = std::chrono::duration<double, std::milli>(
    std::chrono::steady_clock::now() - start).count();
  return c;
}

//==============================================================================
PathResult path_from_cache(const SearchCache& c, int to, bool root_component_only)
{
  const SearchGraph& g = c.graph();
  const NodeRecord& target = c.record(to);
  if (!target.reachable)
    return PathResult{};
  if (root_component_only && g.graph().component_of[to] != c.root_component())
    return PathResult{};

  std::vector<int> nodes;
  std::vector<int> edges;
  for (int v = to; v >= 0; v = c.records()[v].predecessor_node)
  {
    nodes.push_back(v);
    if (c.records()[v].predecessor_edge >= 0)
      edges.push_back(c.records()[v].predecessor_edge);
    if (nodes.size() > g.node_count())
      throw Error("search cache: predecessor cycle");
  }
  std::reverse(nodes.begin(), nodes.end());
  std::reverse(edges.begin(), edges.end());
  PathResult r = detail::assemble(g, std::move(nodes), std::move(edges));
  if (c.criterion() == Criterion::widest_path)
    r.total_cost = target.cost;
  return r;
}

//==============================================================================
VisibleSet geodesic_visible_set(const SearchCache& c, double d_max)
{
  if (c.criterion() != Criterion::shortest_path)
    throw ValidationError("geodesic visibility needs a shortest-path cache");
  if (!(d_max >= 0.0))
    throw ValidationError("geodesic distance must be non-negative");

  const auto& graph = c.graph().graph();
  const int home = c.root_component();
  const auto rec = c.records();
  VisibleSet out;
  for (const int n : graph.components[home])
    if (rec[n].cost <= d_max)
      out.nodes.push_back(n);

  for (const auto& e : graph.edges)
  {
    if (graph.component_of[e.a] != home)
      continue;
    const double ca = rec[e.a].cost;
    const double cb = rec[e.b].cost;
    const int anchor = ca <= cb ? e.a : e.b;
    const double near_cost = std::min(ca, cb);
    if (near_cost > d_max)
      continue;
    if (std::max(ca, cb) <= d_max)
    {
      out.edges.push_back({e.id, 1.0, anchor});
      continue;
    }
    const double f = e.arc_length > 0.0 ? std::min(1.0, (d_max - near_cost) / e.arc_length) : 1.0;
    if (f > 0.0)
      out.edges.push_back({e.id, f, anchor});
  }
  return out;
}

//==============================================================================
std::vector<ProximityHit> dual_root_proximity(const SearchCache& a, const SearchCache& b,
  const ProximityParams& params)
{
  if (&a.graph() != &b.graph())
    throw ValidationError("proximity: caches belong to different graphs");
  if (a.criterion() != Criterion::shortest_path || b.criterion() != Criterion::shortest_path)
    throw ValidationError("proximity needs shortest-path caches");
  if (a.root() == b.root())
    throw ValidationError("proximity: roots must be distinct");
  if (!(params.band >= 0.0) || !(params.ceiling >= 0.0))
    throw ValidationError("proximity: band and ceiling must be non-negative");

  std::vector<ProximityHit> out;
  for (std::size_t n = 0; n < a.records().size(); ++n)
  {
    const NodeRecord& ra = a.records()[n];
    const NodeRecord& rb = b.records()[n];
    if (ra.root != a.root() || rb.root != b.root())
      continue;
    if (!std::isfinite(ra.cost) || !std::isfinite(rb.cost))
      continue;
    if (ra.cost > params.ceiling || rb.cost > params.ceiling)
      continue;
    if (std::abs(ra.cost - rb.cost) <= params.band)
      out.push_back({static_cast<int>(n), ra.cost, rb.cost});
  }
  return out;
}

std::vector<ProximityHit> dual_root_proximity(std::shared_ptr<const SearchGraph> g,
  int root_a, int root_b, const ProximityParams& params)
{
  if (!g)
    throw ValidationError("proximity: null graph");
  g->require_node(root_a);
  g->require_node(root_b);
  if (root_a == root_b)
    throw ValidationError("proximity: roots must be distinct");
  return dual_root_proximity(build_cache(g, root_a), build_cache(g, root_b), params);
}

//==============================================================================
std::vector<EdgeDirection> edge_directions(const SearchCache& c, int node, double lookahead_mm)
{
  const SearchGraph& g = c.graph();
  const NodeRecord& self = c.record(node);
  if (!self.reachable)
    throw Error("node " + std::to_string(node) + " is unreachable");

  const auto& graph = g.graph();
  const bool widest = c.criterion() == Criterion::widest_path;
  std::vector<EdgeDirection> out;
  for (const auto& arc : g.arcs(node))
  {
    const auto& e = graph.edges[arc.edge];
    std::vector<Vec3> pts = e.polyline;
    if (e.a != node)
      std::reverse(pts.begin(), pts.end());

    // Point at arc length `span` from the node.
    const double span = std::min(lookahead_mm, 0.5 * e.arc_length);
    Vec3 target = pts.back();
    double walked = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
    {
      const double seg = distance(pts[i - 1], pts[i]);
      if (walked + seg >= span && seg > 0.0)
      {
        target = pts[i - 1] + (pts[i] - pts[i - 1]) * ((span - walked) / seg);
        break;
      }
      walked += seg;
    }
    Vec3 dir = target - pts.front();
    if (dir.squared_norm() == 0.0)
      dir = g.position(arc.to) - g.position(node);

    const NodeRecord& other = c.records()[arc.to];
    bool toward = arc.edge == self.predecessor_edge;
    if (!toward && other.predecessor_edge != arc.edge)
      toward = widest ? other.cost > self.cost : other.cost < self.cost;
    out.push_back({arc.edge, arc.to, dir.normalized(), toward});
  }
  return out;
}

} // namespace angio::search
