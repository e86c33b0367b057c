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
#include <cmath>
#include <string>

namespace angio::search {

//==============================================================================
std::string to_string(Criterion c)
{
  return c == Criterion::shortest_path ? "shortest_path" : "widest_path";
}

std::optional<Criterion> parse_criterion(std::string_view name)
{
  if (name == "shortest_path" || name == "shortest")
    return Criterion::shortest_path;
  if (name == "widest_path" || name == "widest")
    return Criterion::widest_path;
  return std::nullopt;
}

//==============================================================================
SearchGraph::SearchGraph(std::shared_ptr<const model::SkeletonGraph> graph)
: _graph(std::move(graph))
{
  if (!_graph)
    throw ValidationError("search graph: null graph");
  const std::size_t n = _graph->nodes.size();
  std::vector<std::size_t> count(n, 0);
  for (const auto& e : _graph->edges)
    if (e.a != e.b)
    {
      ++count[e.a];
      ++count[e.b];
    }
  _offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    _offsets[i + 1] = _offsets[i] + count[i];
  _arcs.resize(_offsets[n]);
  std::vector<std::size_t> fill(_offsets.begin(), _offsets.end() - 1);
  for (const auto& e : _graph->edges)
  {
    if (e.a == e.b)
      continue;
    _arcs[fill[e.a]++] = {e.b, e.id, e.arc_length, e.min_radius};
    _arcs[fill[e.b]++] = {e.a, e.id, e.arc_length, e.min_radius};
  }
}

SearchGraph::SearchGraph(model::SkeletonGraph graph)
: SearchGraph(std::make_shared<const model::SkeletonGraph>(std::move(graph)))
{
}

void SearchGraph::require_node(int node) const
{
  if (node < 0 || static_cast<std::size_t>(node) >= node_count())
    throw ValidationError("unknown node id " + std::to_string(node));
}

namespace detail {

//==============================================================================
Workspace& workspace(std::size_t n)
{
  thread_local Workspace w;
  if (w.g.size() < n)
  {
    w.g.resize(n);
    w.h.resize(n);
    w.key.resize(n);
    w.pred_node.resize(n);
    w.pred_edge.resize(n);
    w.seen.assign(n, 0);
    w.closed.assign(n, 0);
    w.stamp = 0;
  }
  if (++w.stamp == 0)
  {
    std::fill(w.seen.begin(), w.seen.end(), 0u);
    std::fill(w.closed.begin(), w.closed.end(), 0u);
    w.stamp = 1;
  }
  w.heap.clear();
  return w;
}

template <bool UseHeuristic>
std::size_t best_first(const SearchGraph& g, int from, int to, double min_radius, Workspace& w)
{
  const Vec3 goal = g.position(to);
  auto open = [&](int v, double gv, int pn, int pe)
  {
    if (w.seen[v] != w.stamp)
    {
      w.seen[v] = w.stamp;
      if constexpr (UseHeuristic)
        w.h[v] = distance(g.position(v), goal);
      else
        w.h[v] = 0.0;
    }
    w.g[v] = gv;
    w.pred_node[v] = pn;
    w.pred_edge[v] = pe;
    w.closed[v] = 0;
    w.key[v] = gv + w.h[v];
    w.heap.push_back({w.key[v], v});
    std::push_heap(w.heap.begin(), w.heap.end(), std::greater<>{});
  };

  std::size_t expanded = 0;
  open(from, 0.0, -1, -1);
  while (!w.heap.empty())
  {
    std::pop_heap(w.heap.begin(), w.heap.end(), std::greater<>{});
    const auto [key, u] = w.heap.back();
    w.heap.pop_back();
    if (w.closed[u] == w.stamp || key != w.key[u])
      continue;
    w.closed[u] = w.stamp;
    ++expanded;
    if (u == to)
      break;
    const double gu = w.g[u];
    for (const auto& arc : g.arcs(u))
    {
      if (arc.radius < min_radius)
        continue;
      const double ng = gu + arc.length;
      if (w.seen[arc.to] != w.stamp || ng < w.g[arc.to])
        open(arc.to, ng, u, arc.edge);
    }
  }
  return expanded;
}

template std::size_t best_first<true>(const SearchGraph&, int, int, double, Workspace&);
template std::size_t best_first<false>(const SearchGraph&, int, int, double, Workspace&);

std::size_t maximin(const SearchGraph& g, int from, int to, Workspace& w)
{
  // key = -bottleneck, so the widest label pops first.
  w.seen[from] = w.stamp;
  w.g[from] = infinity;
  w.pred_node[from] = -1;
  w.pred_edge[from] = -1;
  w.key[from] = -infinity;
  w.heap.push_back({-infinity, from});

  std::size_t expanded = 0;
  while (!w.heap.empty())
  {
    std::pop_heap(w.heap.begin(), w.heap.end(), std::greater<>{});
    const auto [key, u] = w.heap.back();
    w.heap.pop_back();
    if (w.closed[u] == w.stamp || key != w.key[u])
      continue;
    w.closed[u] = w.stamp;
    ++expanded;
    if (u == to)
      break;
    for (const auto& arc : g.arcs(u))
    {
      const double nb = std::min(w.g[u], arc.radius);
      const int v = arc.to;
      if (w.closed[v] == w.stamp)
        continue;
      if (w.seen[v] != w.stamp || nb > w.g[v])
      {
        w.seen[v] = w.stamp;
        w.g[v] = nb;
        w.pred_node[v] = u;
        w.pred_edge[v] = arc.edge;
        w.key[v] = -nb;
        w.heap.push_back({-nb, v});
        std::push_heap(w.heap.begin(), w.heap.end(), std::greater<>{});
      }
    }
  }
  return expanded;
}

PathResult assemble(const SearchGraph& g, std::vector<int> nodes, std::vector<int> edges)
{
  PathResult r;
  r.reachable = true;
  r.nodes = std::move(nodes);
  r.edges = std::move(edges);
  const auto& graph = g.graph();
  for (const int e : r.edges)
    r.arc_length += graph.edges[e].arc_length;
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i)
  {
    Vec3 step = g.position(r.nodes[i + 1]) - g.position(r.nodes[i]);
    if (step.squared_norm() == 0.0)
    {
      const auto& e = graph.edges[r.edges[i]];
      step = e.a == r.nodes[i] ? e.polyline[1] - e.polyline[0]
        : e.polyline[e.polyline.size() - 2] - e.polyline.back();
    }
    r.directions.push_back(step.normalized());
  }
  r.total_cost = r.arc_length;
  return r;
}

PathResult trace(const SearchGraph& g, const Workspace& w, int to)
{
  std::vector<int> nodes;
  std::vector<int> edges;
  for (int v = to; v >= 0; v = w.pred_node[v])
  {
    nodes.push_back(v);
    if (w.pred_edge[v] >= 0)
      edges.push_back(w.pred_edge[v]);
  }
  std::reverse(nodes.begin(), nodes.end());
  std::reverse(edges.begin(), edges.end());
  return assemble(g, std::move(nodes), std::move(edges));
}

} // namespace detail

namespace {

PathResult unreachable()
{
  return PathResult{};
}

bool same_component(const SearchGraph& g, int a, int b)
{
  const auto& c = g.graph().component_of;
  return c[a] == c[b];
}

template <bool UseHeuristic>
PathResult shortest(const SearchGraph& g, int from, int to)
{
  g.require_node(from);
  g.require_node(to);
  if (!same_component(g, from, to))
    return unreachable();
  auto& w = detail::workspace(g.node_count());
  const std::size_t expanded = detail::best_first<UseHeuristic>(g, from, to, 0.0, w);
  PathResult r = detail::trace(g, w, to);
  r.nodes_expanded = expanded;
  return r;
}

} // anonymous namespace

//==============================================================================
PathResult astar_path(const SearchGraph& g, int from, int to)
{
  return shortest<true>(g, from, to);
}

PathResult dijkstra_path(const SearchGraph& g, int from, int to)
{
  return shortest<false>(g, from, to);
}

//==============================================================================
PathResult widest_path(const SearchGraph& g, int from, int to)
{
  g.require_node(from);
  g.require_node(to);
  if (!same_component(g, from, to))
    return unreachable();
  if (from == to)
  {
    PathResult r = detail::assemble(g, {from}, {});
    r.total_cost = infinity;
    return r;
  }

  // Best achievable bottleneck, then the shortest path using only edges at
  // least that wide.
  auto& w = detail::workspace(g.node_count());
  std::size_t expanded = detail::maximin(g, from, to, w);
  const double bottleneck = w.g[to];

  auto& w2 = detail::workspace(g.node_count());
  expanded += detail::best_first<true>(g, from, to, bottleneck, w2);
  PathResult r = detail::trace(g, w2, to);
  r.total_cost = 2.0 * bottleneck;
  r.nodes_expanded = expanded;
  return r;
}

} // namespace angio::search
