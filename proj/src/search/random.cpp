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

#include <cmath>
#include <random>
#include <set>

namespace angio::search {

namespace {

Vec3 random_unit(std::mt19937_64& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  while (true)
  {
    const Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-9)
      return v.normalized();
  }
}

} // anonymous namespace

model::SkeletonGraph random_vessel_graph(int nodes, std::uint64_t seed, int components)
{
  if (components < 1 || nodes < components)
    throw ValidationError("random graph: need at least one node per component");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<model::GraphNode> out_nodes;
  std::vector<std::pair<int, int>> links;
  std::set<std::pair<int, int>> linked;
  auto link = [&](int a, int b)
  {
    links.push_back({a, b});
    linked.insert({std::min(a, b), std::max(a, b)});
  };

  int first = 0;
  for (int c = 0; c < components; ++c)
  {
    const int count = nodes / components + (c < nodes % components ? 1 : 0);
    const Vec3 origin(0.0, 0.0, 400.0 * c);
    for (int i = 0; i < count; ++i)
    {
      model::GraphNode n;
      n.id = first + i;
      n.radius = uniform(0.5, 3.0);
      if (i == 0)
        n.position = origin;
      else
      {
        const int parent = first + static_cast<int>(unit(rng) * i);
        n.position = out_nodes[parent].position + random_unit(rng) * uniform(2.0, 8.0);
        link(parent, n.id);
      }
      out_nodes.push_back(n);
    }

    // Loop edges to the nearest node not yet linked.
    const int loops = count / 8;
    for (int l = 0; l < loops; ++l)
    {
      const int u = first + static_cast<int>(unit(rng) * count);
      int best = -1;
      double best_d = infinity;
      for (int v = first; v < first + count; ++v)
      {
        if (v == u || linked.count({std::min(u, v), std::max(u, v)}))
          continue;
        const double d = distance(out_nodes[u].position, out_nodes[v].position);
        if (d < best_d)
        {
          best_d = d;
          best = v;
        }
      }
      if (best >= 0)
        link(u, best);
    }
    first += count;
  }

  std::vector<model::GraphEdge> edges;
  for (const auto& [a, b] : links)
  {
    model::GraphEdge e;
    e.id = static_cast<int>(edges.size());
    e.a = a;
    e.b = b;
    const Vec3 pa = out_nodes[a].position;
    const Vec3 pb = out_nodes[b].position;
    const Vec3 chord = pb - pa;
    Vec3 side = random_unit(rng);
    side = side - chord.normalized() * side.dot(chord.normalized());
    const Vec3 mid = (pa + pb) * 0.5 + side.normalized() * (uniform(0.0, 0.25) * chord.norm());
    e.polyline = {pa, mid, pb};
    e.arc_length = distance(pa, mid) + distance(mid, pb);
    e.min_radius = uniform(0.4, 3.0);
    e.mean_radius = e.min_radius + uniform(0.0, 0.8);
    edges.push_back(std::move(e));
  }
  return model::make_graph(std::move(out_nodes), std::move(edges));
}

} // namespace angio::search
