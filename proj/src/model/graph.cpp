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

#include <angio/model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace angio::model {

namespace {

/// Working node/edge records while the graph is assembled.
struct RawNode
{
  std::vector<std::size_t> voxels;
  Vec3 position;
  double radius = 0.0;
  bool alive = true;
};

struct RawEdge
{
  int a = 0;
  int b = 0;
  /// Interior points, a to b, with their voxel and radius.
  std::vector<std::size_t> voxels;
  std::vector<Vec3> points;
  std::vector<double> radii;
  bool alive = true;
};

void reverse(RawEdge& e)
{
  std::swap(e.a, e.b);
  std::reverse(e.voxels.begin(), e.voxels.end());
  std::reverse(e.points.begin(), e.points.end());
  std::reverse(e.radii.begin(), e.radii.end());
}

GraphEdge finish_edge(const RawEdge& r, const std::vector<RawNode>& nodes)
{
  GraphEdge e;
  e.a = r.a;
  e.b = r.b;
  e.voxels = r.voxels;
  e.polyline.reserve(r.points.size() + 2);
  e.polyline.push_back(nodes[r.a].position);
  e.polyline.insert(e.polyline.end(), r.points.begin(), r.points.end());
  e.polyline.push_back(nodes[r.b].position);
  for (std::size_t i = 1; i < e.polyline.size(); ++i)
    e.arc_length += distance(e.polyline[i - 1], e.polyline[i]);

  if (r.radii.empty())
  {
    e.min_radius = std::min(nodes[r.a].radius, nodes[r.b].radius);
    e.mean_radius = 0.5 * (nodes[r.a].radius + nodes[r.b].radius);
  }
  else
  {
    e.min_radius = *std::min_element(r.radii.begin(), r.radii.end());
    e.mean_radius = std::accumulate(r.radii.begin(), r.radii.end(), 0.0)
      / static_cast<double>(r.radii.size());
    e.mean_radius = std::max(e.mean_radius, e.min_radius);
  }
  return e;
}

bool near(const Vec3& a, const Vec3& b)
{
  return distance(a, b) <= 1e-6 * std::max(1.0, a.norm());
}

} // anonymous namespace

//==============================================================================
void SkeletonGraph::validate() const
{
  auto fail = [](const std::string& what) { throw ValidationError("graph: " + what); };
  const auto n = static_cast<int>(nodes.size());

  std::vector<int> degree(nodes.size(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i)
  {
    const GraphEdge& e = edges[i];
    const std::string tag = "edge " + std::to_string(i);
    if (e.id != static_cast<int>(i))
      fail(tag + ": id does not match its position");
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
      fail(tag + ": end node out of range");
    ++degree[e.a];
    ++degree[e.b];
    if (e.polyline.size() < 2)
      fail(tag + ": polyline needs at least two points");
    if (!near(e.polyline.front(), nodes[e.a].position) || !near(e.polyline.back(), nodes[e.b].position))
      fail(tag + ": polyline must start and end at its nodes");
    double arc = 0.0;
    for (std::size_t k = 1; k < e.polyline.size(); ++k)
      arc += distance(e.polyline[k - 1], e.polyline[k]);
    if (!(std::abs(arc - e.arc_length) <= 1e-9 * std::max(1.0, arc)))
      fail(tag + ": arc_length differs from polyline length");
    if (e.arc_length + 1e-9 < distance(nodes[e.a].position, nodes[e.b].position))
      fail(tag + ": arc_length shorter than the node distance");
    if (!(e.min_radius > 0.0))
      fail(tag + ": radii must be positive");
    if (!(e.min_radius <= e.mean_radius))
      fail(tag + ": min_radius exceeds mean_radius");
  }

  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    const std::string tag = "node " + std::to_string(i);
    if (nodes[i].id != static_cast<int>(i))
      fail(tag + ": id does not match its position");
    if (!(nodes[i].radius > 0.0))
      fail(tag + ": radius must be positive");
    if (nodes[i].degree != degree[i])
      fail(tag + ": degree does not match incident edges");
  }

  if (component_of.size() != nodes.size())
    fail("component index missing");
  std::size_t covered = 0;
  for (std::size_t c = 0; c < components.size(); ++c)
    for (const int id : components[c])
    {
      if (id < 0 || id >= n || component_of[id] != static_cast<int>(c))
        fail("components do not partition the nodes");
      ++covered;
    }
  if (covered != nodes.size())
    fail("components do not partition the nodes");
  for (const GraphEdge& e : edges)
    if (component_of[e.a] != component_of[e.b])
      fail("edge " + std::to_string(e.id) + " joins two components");
  if (nodes.empty() ? main_component != -1
      : (main_component < 0 || main_component >= static_cast<int>(components.size())))
    fail("main component out of range");
}

//==============================================================================
SkeletonGraph make_graph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
{
  SkeletonGraph g;
  g.nodes = std::move(nodes);
  g.edges = std::move(edges);
  const std::size_t n = g.nodes.size();

  for (auto& node : g.nodes)
    node.degree = 0;
  std::vector<std::vector<int>> adjacent(n);
  for (const GraphEdge& e : g.edges)
  {
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.a) >= n || static_cast<std::size_t>(e.b) >= n)
      throw ValidationError("graph: edge " + std::to_string(e.id) + ": end node out of range");
    ++g.nodes[e.a].degree;
    ++g.nodes[e.b].degree;
    adjacent[e.a].push_back(e.b);
    adjacent[e.b].push_back(e.a);
  }

  g.component_of.assign(n, -1);
  for (std::size_t s = 0; s < n; ++s)
  {
    if (g.component_of[s] >= 0)
      continue;
    const int c = static_cast<int>(g.components.size());
    std::vector<int> members{static_cast<int>(s)};
    g.component_of[s] = c;
    for (std::size_t k = 0; k < members.size(); ++k)
      for (const int v : adjacent[members[k]])
        if (g.component_of[v] < 0)
        {
          g.component_of[v] = c;
          members.push_back(v);
        }
    std::sort(members.begin(), members.end());
    g.components.push_back(std::move(members));
  }

  std::vector<double> length(g.components.size(), 0.0);
  for (const GraphEdge& e : g.edges)
    length[g.component_of[e.a]] += e.arc_length;
  for (std::size_t c = 0; c < g.components.size(); ++c)
  {
    if (g.main_component < 0)
    {
      g.main_component = static_cast<int>(c);
      continue;
    }
    const auto m = static_cast<std::size_t>(g.main_component);
    if (g.components[c].size() > g.components[m].size()
        || (g.components[c].size() == g.components[m].size() && length[c] > length[m]))
      g.main_component = static_cast<int>(c);
  }

  g.validate();
  return g;
}

//==============================================================================
SkeletonGraph build_graph(const BinaryMask& skeleton, const Volume& radius)
{
  require_same_geometry(skeleton.geometry(), radius.geometry(), "skeleton radius map");
  const Geometry& geo = skeleton.geometry();
  const Dims& d = geo.dims;
  const auto s = skeleton.data();

  std::vector<std::size_t> voxels;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i])
      voxels.push_back(i);
  if (voxels.empty())
    return make_graph({}, {});

  // slot[i]: position of voxel i in `voxels`, or -1.
  std::vector<std::int64_t> slot(s.size(), -1);
  for (std::size_t k = 0; k < voxels.size(); ++k)
    slot[voxels[k]] = static_cast<std::int64_t>(k);

  std::vector<std::vector<std::size_t>> nbrs(voxels.size());
  for (std::size_t k = 0; k < voxels.size(); ++k)
  {
    const Index3 p = d.unravel(voxels[k]);
    for (const auto& o : neighbours26())
    {
      const std::int64_t z = p.z + o[0], y = p.y + o[1], x = p.x + o[2];
      if (d.contains(z, y, x) && s[d.linear(z, y, x)])
        nbrs[k].push_back(static_cast<std::size_t>(slot[d.linear(z, y, x)]));
    }
    std::sort(nbrs[k].begin(), nbrs[k].end());
  }
  auto is_node_voxel = [&](std::size_t k) { return nbrs[k].size() != 2; };
  auto voxel_radius = [&](std::size_t k) { return static_cast<double>(radius.data()[voxels[k]]); };

  // Touching node voxels form one node.
  std::vector<RawNode> nodes;
  std::vector<int> node_of(voxels.size(), -1);
  for (std::size_t k = 0; k < voxels.size(); ++k)
  {
    if (!is_node_voxel(k) || node_of[k] >= 0)
      continue;
    const int id = static_cast<int>(nodes.size());
    std::vector<std::size_t> members{k};
    node_of[k] = id;
    for (std::size_t m = 0; m < members.size(); ++m)
      for (const std::size_t q : nbrs[members[m]])
        if (is_node_voxel(q) && node_of[q] < 0)
        {
          node_of[q] = id;
          members.push_back(q);
        }
    std::sort(members.begin(), members.end());
    RawNode node;
    for (const std::size_t m : members)
    {
      node.voxels.push_back(voxels[m]);
      node.position += geo.position(voxels[m]);
      node.radius = std::max(node.radius, voxel_radius(m));
    }
    node.position = node.position / static_cast<double>(members.size());
    nodes.push_back(std::move(node));
  }

  // Chains of degree-2 voxels between nodes.
  std::vector<RawEdge> edges;
  std::vector<char> visited(voxels.size(), 0);
  auto walk = [&](int from, std::size_t prev, std::size_t cur, RawEdge& e)
  {
    e.a = from;
    while (true)
    {
      visited[cur] = 1;
      e.voxels.push_back(voxels[cur]);
      e.points.push_back(geo.position(voxels[cur]));
      e.radii.push_back(voxel_radius(cur));
      const std::size_t next = nbrs[cur][0] == prev ? nbrs[cur][1] : nbrs[cur][0];
      prev = cur;
      cur = next;
      if (is_node_voxel(cur))
      {
        e.b = node_of[cur];
        return;
      }
      if (visited[cur])
      {
        // Closed loop back to the start voxel of an anchor-less cycle.
        e.b = from;
        return;
      }
    }
  };

  for (std::size_t n = 0; n < nodes.size(); ++n)
    for (const std::size_t v : nodes[n].voxels)
    {
      const auto k = static_cast<std::size_t>(slot[v]);
      for (const std::size_t q : nbrs[k])
      {
        if (is_node_voxel(q) || visited[q])
          continue;
        RawEdge e;
        walk(static_cast<int>(n), k, q, e);
        edges.push_back(std::move(e));
      }
    }

  // Isolated cycles: anchor at their first voxel.
  for (std::size_t k = 0; k < voxels.size(); ++k)
  {
    if (is_node_voxel(k) || visited[k])
      continue;
    visited[k] = 1;
    const int id = static_cast<int>(nodes.size());
    RawNode anchor;
    anchor.voxels = {voxels[k]};
    anchor.position = geo.position(voxels[k]);
    anchor.radius = voxel_radius(k);
    nodes.push_back(std::move(anchor));
    node_of[k] = id;

    RawEdge e;
    e.a = id;
    std::size_t prev = k;
    std::size_t cur = nbrs[k][0];
    while (cur != k)
    {
      visited[cur] = 1;
      e.voxels.push_back(voxels[cur]);
      e.points.push_back(geo.position(voxels[cur]));
      e.radii.push_back(voxel_radius(cur));
      const std::size_t next = nbrs[cur][0] == prev ? nbrs[cur][1] : nbrs[cur][0];
      prev = cur;
      cur = next;
    }
    e.b = id;
    edges.push_back(std::move(e));
  }

  // Merge degree-2 nodes into their two edges.
  std::vector<std::vector<int>> incident(nodes.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
  {
    incident[edges[i].a].push_back(static_cast<int>(i));
    incident[edges[i].b].push_back(static_cast<int>(i));
  }
  for (std::size_t n = 0; n < nodes.size(); ++n)
  {
    auto& inc = incident[n];
    if (inc.size() != 2 || inc[0] == inc[1])
      continue;
    RawEdge first = edges[inc[0]];
    RawEdge second = edges[inc[1]];
    if (first.b != static_cast<int>(n))
      reverse(first);
    if (second.a != static_cast<int>(n))
      reverse(second);

    RawEdge merged;
    merged.a = first.a;
    merged.b = second.b;
    merged.voxels = first.voxels;
    merged.points = first.points;
    merged.radii = first.radii;
    merged.voxels.insert(merged.voxels.end(), nodes[n].voxels.begin(), nodes[n].voxels.end());
    merged.points.push_back(nodes[n].position);
    for (const std::size_t v : nodes[n].voxels)
      merged.radii.push_back(radius.data()[v]);
    merged.voxels.insert(merged.voxels.end(), second.voxels.begin(), second.voxels.end());
    merged.points.insert(merged.points.end(), second.points.begin(), second.points.end());
    merged.radii.insert(merged.radii.end(), second.radii.begin(), second.radii.end());

    edges[inc[0]].alive = false;
    edges[inc[1]].alive = false;
    nodes[n].alive = false;
    const int id = static_cast<int>(edges.size());
    for (const int end : {merged.a, merged.b})
    {
      auto& list = incident[end];
      std::erase(list, inc[0]);
      std::erase(list, inc[1]);
    }
    incident[merged.a].push_back(id);
    incident[merged.b].push_back(id);
    inc.clear();
    edges.push_back(std::move(merged));
  }

  // Dense renumbering: nodes by first voxel, edges by (end nodes, first voxel).
  std::vector<int> order;
  for (std::size_t n = 0; n < nodes.size(); ++n)
    if (nodes[n].alive)
      order.push_back(static_cast<int>(n));
  std::sort(order.begin(), order.end(), [&](int p, int q)
  {
    return nodes[p].voxels.front() < nodes[q].voxels.front();
  });
  std::vector<int> new_id(nodes.size(), -1);
  std::vector<RawNode> kept;
  for (std::size_t i = 0; i < order.size(); ++i)
  {
    new_id[order[i]] = static_cast<int>(i);
    kept.push_back(nodes[order[i]]);
  }

  std::vector<RawEdge> kept_edges;
  for (RawEdge& e : edges)
  {
    if (!e.alive)
      continue;
    e.a = new_id[e.a];
    e.b = new_id[e.b];
    if (e.a > e.b)
      reverse(e);
    kept_edges.push_back(std::move(e));
  }
  auto first_voxel = [](const RawEdge& e)
  {
    return e.voxels.empty() ? std::numeric_limits<std::size_t>::max() : e.voxels.front();
  };
  std::sort(kept_edges.begin(), kept_edges.end(), [&](const RawEdge& p, const RawEdge& q)
  {
    if (p.a != q.a)
      return p.a < q.a;
    if (p.b != q.b)
      return p.b < q.b;
    return first_voxel(p) < first_voxel(q);
  });

  std::vector<GraphNode> out_nodes(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i)
  {
    out_nodes[i].id = static_cast<int>(i);
    out_nodes[i].position = kept[i].position;
    out_nodes[i].radius = kept[i].radius;
    out_nodes[i].voxels = kept[i].voxels;
  }
  std::vector<GraphEdge> out_edges;
  for (std::size_t i = 0; i < kept_edges.size(); ++i)
  {
    out_edges.push_back(finish_edge(kept_edges[i], kept));
    out_edges.back().id = static_cast<int>(i);
  }
  return make_graph(std::move(out_nodes), std::move(out_edges));
}

} // namespace angio::model
