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

#ifndef ANGIO__SEARCH_HPP
#define ANGIO__SEARCH_HPP

#include <angio/model.hpp>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace angio::search {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class Criterion { shortest_path, widest_path };

std::string to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);

//==============================================================================
/// Compressed adjacency over an immutable skeleton graph. Self-loops are
/// left out since no optimal path uses them.
class SearchGraph
{
public:
  struct Arc
  {
    int to = 0;
    int edge = 0;
    double length = 0.0;
    double radius = 0.0;
  };

  explicit SearchGraph(std::shared_ptr<const model::SkeletonGraph> graph);
  explicit SearchGraph(model::SkeletonGraph graph);

  const model::SkeletonGraph& graph() const { return *_graph; }
  const std::shared_ptr<const model::SkeletonGraph>& shared() const { return _graph; }
  std::size_t node_count() const { return _graph->nodes.size(); }
  const Vec3& position(int node) const { return _graph->nodes[node].position; }

  std::span<const Arc> arcs(int node) const
  {
    return {_arcs.data() + _offsets[node], _arcs.data() + _offsets[node + 1]};
  }

  /// Throws ValidationError for ids outside the graph.
  void require_node(int node) const;

private:
  std::shared_ptr<const model::SkeletonGraph> _graph;
  std::vector<std::size_t> _offsets;
  std::vector<Arc> _arcs;
};

//==============================================================================
struct PathResult
{
  /// False when the end points lie in different components.
  bool reachable = false;
  std::vector<int> nodes;
  std::vector<int> edges;
  /// Arc length (mm) for shortest paths; bottleneck diameter (mm) for
  /// widest paths, +infinity for a single-node widest path.
  double total_cost = infinity;
  double arc_length = 0.0;
  /// Unit vector from each path node to the next.
  std::vector<Vec3> directions;
  std::size_t nodes_expanded = 0;
};

/// Arc-length optimal path; A* with the straight-line distance to `to` as
/// heuristic. Ties are broken by smaller node id.
PathResult astar_path(const SearchGraph& g, int from, int to);

/// Same contract as astar_path without the heuristic.
PathResult dijkstra_path(const SearchGraph& g, int from, int to);

/// Path maximising the smallest edge min_radius; among those, the shortest.
PathResult widest_path(const SearchGraph& g, int from, int to);

//==============================================================================
/// How a shortest-path cache computes its costs.
enum class CacheStrategy
{
  /// One A* query from the root to every node.
  astar,
  /// One early-exit Dijkstra query from the root to every node.
  dijkstra,
};

struct NodeRecord
{
  /// Path length (mm) or bottleneck diameter (mm) from the component root.
  double cost = infinity;
  int predecessor_node = -1;
  int predecessor_edge = -1;
  bool reachable = false;
  /// Root or quasi-root this record is measured from.
  int root = -1;
};

struct CacheStats
{
  std::size_t nodes_expanded = 0;
  double wall_time_ms = 0.0;
};

/// Per-node optimal costs and predecessors from a root, with one quasi-root
/// for every other component. Immutable once built.
class SearchCache
{
public:
  int root() const { return _root; }
  Criterion criterion() const { return _criterion; }
  const SearchGraph& graph() const { return *_graph; }
  const NodeRecord& record(int node) const;
  std::span<const NodeRecord> records() const { return _records; }
  /// Root of every component, indexed like SkeletonGraph::components; the
  /// root's own component maps to the root itself.
  std::span<const int> component_roots() const { return _component_roots; }
  int root_component() const { return _graph->graph().component_of[_root]; }
  const CacheStats& stats() const { return _stats; }

private:
  friend SearchCache build_cache(std::shared_ptr<const SearchGraph>, int, Criterion, CacheStrategy);

  std::shared_ptr<const SearchGraph> _graph;
  int _root = 0;
  Criterion _criterion = Criterion::shortest_path;
  std::vector<NodeRecord> _records;
  std::vector<int> _component_roots;
  CacheStats _stats;
};

SearchCache build_cache(std::shared_ptr<const SearchGraph> g, int root,
  Criterion criterion = Criterion::shortest_path, CacheStrategy strategy = CacheStrategy::astar);

/// The node in `component` closest (straight line) to any node of
/// `target_component`; ties go to the smaller id.
int quasi_root(const model::SkeletonGraph& g, int component, int target_component);

/// Walk cached predecessors from the (quasi-)root of `to`'s component. With
/// `root_component_only`, nodes outside the root's component are reported
/// unreachable. Throws ValidationError for unknown ids.
PathResult path_from_cache(const SearchCache& c, int to, bool root_component_only = false);

//==============================================================================
struct VisibleEdge
{
  int edge = 0;
  /// Share of the arc length within reach, in (0, 1].
  double fraction = 1.0;
  /// Visible end the fraction is measured from (lower cost end).
  int anchor = 0;
};

struct VisibleSet
{
  std::vector<int> nodes;
  std::vector<VisibleEdge> edges;
};

/// Nodes and edges of the root's component within geodesic distance `d_max`.
/// Requires a shortest-path cache; throws ValidationError for negative or
/// NaN distances.
VisibleSet geodesic_visible_set(const SearchCache& c, double d_max);

//==============================================================================
struct ProximityHit
{
  int node = 0;
  double cost_a = 0.0;
  double cost_b = 0.0;
};

struct ProximityParams
{
  double band = 10.0;
  double ceiling = 60.0;
};

/// Nodes whose path lengths from the two roots differ by at most `band`,
/// with both lengths finite, measured from the roots themselves, and below
/// `ceiling`.
std::vector<ProximityHit> dual_root_proximity(std::shared_ptr<const SearchGraph> g,
  int root_a, int root_b, const ProximityParams& params = {});

/// As above from two finished shortest-path caches over the same graph.
std::vector<ProximityHit> dual_root_proximity(const SearchCache& a, const SearchCache& b,
  const ProximityParams& params = {});

//==============================================================================
struct EdgeDirection
{
  int edge = 0;
  int neighbour = 0;
  /// Unit tangent leaving the node along the edge.
  Vec3 direction;
  /// The edge leads to the lower-cost side (the cached predecessor edge, or
  /// a non-tree edge whose far end has lower cost).
  bool toward_root = false;
};

/// Tangents are taken over the first `lookahead_mm` of each edge (at most
/// half its length). Throws Error for unreachable nodes.
std::vector<EdgeDirection> edge_directions(const SearchCache& c, int node,
  double lookahead_mm = 3.0);

//==============================================================================
/// Seeded vessel-like test graph: geometric random trees (one per component)
/// plus a few loop edges, polylines bent at their midpoint.
model::SkeletonGraph random_vessel_graph(int nodes, std::uint64_t seed, int components = 1);

} // namespace angio::search

#endif // ANGIO__SEARCH_HPP
