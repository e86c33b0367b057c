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

#ifndef ANGIO__SEARCH__WORKSPACE_HPP
#define ANGIO__SEARCH__WORKSPACE_HPP

#include <angio/search.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace angio::search::detail {

/// Per-thread scratch arrays, reset in O(1) by bumping `stamp`.
struct Workspace
{
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> key;
  std::vector<int> pred_node;
  std::vector<int> pred_edge;
  std::vector<std::uint32_t> seen;
  std::vector<std::uint32_t> closed;
  std::uint32_t stamp = 0;
  std::vector<std::pair<double, int>> heap;
};

/// The calling thread's workspace, sized for `n` nodes and cleared.
Workspace& workspace(std::size_t n);

/// A* (or Dijkstra without the heuristic) from `from` until `to` is settled,
/// over arcs with radius >= min_radius. Returns the expansion count.
template <bool UseHeuristic>
std::size_t best_first(const SearchGraph& g, int from, int to, double min_radius, Workspace& w);

/// Maximin label-setting from `from` until `to` is settled; w.g holds
/// bottleneck radii.
std::size_t maximin(const SearchGraph& g, int from, int to, Workspace& w);

PathResult assemble(const SearchGraph& g, std::vector<int> nodes, std::vector<int> edges);
PathResult trace(const SearchGraph& g, const Workspace& w, int to);

} // namespace angio::search::detail

#endif // ANGIO__SEARCH__WORKSPACE_HPP
