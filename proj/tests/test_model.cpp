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
#include <angio/phantom.hpp>
#include <angio/pipeline.hpp>

#include "support.hpp"

#include <doctest.h>

#include <map>
#include <numbers>
#include <sstream>

using namespace angio;
using namespace angio::model;

namespace {

BinaryMask torus_mask(double big_r, double small_r)
{
  const Dims d{9, 21, 21};
  return test::mask_from(d, [&](auto z, auto y, auto x)
  {
    const double dy = static_cast<double>(y) - 10.0, dx = static_cast<double>(x) - 10.0;
    const double rho = std::hypot(dy, dx) - big_r;
    const double dz = static_cast<double>(z) - 4.0;
    return rho * rho + dz * dz <= small_r * small_r;
  });
}

/// Tube along z between voxel rows z0 and z1 through (10, 10).
BinaryMask tube_mask(std::int64_t z0, std::int64_t z1, double r)
{
  return test::mask_from({30, 21, 21}, [&](auto z, auto y, auto x)
  {
    const double dy = static_cast<double>(y) - 10.0, dx = static_cast<double>(x) - 10.0;
    return z >= z0 && z <= z1 && dy * dy + dx * dx <= r * r;
  });
}

std::size_t cycle_rank(const SkeletonGraph& g)
{
  return g.edges.size() + g.components.size() - g.nodes.size();
}

/// Brute-force distance from each set voxel to the nearest background voxel,
/// the grid border being surrounded by background.
double brute_radius(const BinaryMask& m, const Index3& p)
{
  const Dims& d = m.dims();
  const Vec3& s = m.spacing();
  double best = test::inf;
  for (std::int64_t z = -1; z <= d.z; ++z)
    for (std::int64_t y = -1; y <= d.y; ++y)
      for (std::int64_t x = -1; x <= d.x; ++x)
      {
        if (d.contains(z, y, x) && m.at(z, y, x))
          continue;
        const double dz = static_cast<double>(z - p.z) * s.z;
        const double dy = static_cast<double>(y - p.y) * s.y;
        const double dx = static_cast<double>(x - p.x) * s.x;
        best = std::min(best, dz * dz + dy * dy + dx * dx);
      }
  return std::sqrt(best);
}

/// Unit square between a set voxel and a 6-adjacent background voxel (or
/// the outside of the grid), in voxel units.
struct BoundaryFace
{
  Vec3 centre;
  int axis = 0;

  double distance(const Vec3& p) const
  {
    const double d[3] = {p.z - centre.z, p.y - centre.y, p.x - centre.x};
    double s = d[axis] * d[axis];
    for (int a = 0; a < 3; ++a)
      if (a != axis)
      {
        const double e = std::max(0.0, std::abs(d[a]) - 0.5);
        s += e * e;
      }
    return std::sqrt(s);
  }
};

std::vector<BoundaryFace> boundary_faces(const BinaryMask& m)
{
  const Dims& d = m.dims();
  auto set = [&](std::int64_t z, std::int64_t y, std::int64_t x)
  {
    return d.contains(z, y, x) && m.at(z, y, x) != 0;
  };
  std::vector<BoundaryFace> out;
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
      {
        if (!set(z, y, x))
          continue;
        for (int axis = 0; axis < 3; ++axis)
          for (const int step : {-1, 1})
          {
            const std::int64_t dz = axis == 0 ? step : 0, dy = axis == 1 ? step : 0, dx = axis == 2 ? step : 0;
            if (!set(z + dz, y + dy, x + dx))
              out.push_back({{z + 0.5 * dz, y + 0.5 * dy, x + 0.5 * dx}, axis});
          }
      }
  return out;
}

/// Every directed edge is matched by as many reversed copies: the surface is
/// closed and consistently oriented. Edge-adjacent voxels make the surface
/// touch itself, so an edge may be shared by more than two triangles.
void check_closed_and_oriented(const SurfaceMesh& mesh)
{
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
    {
      REQUIRE(t[k] < mesh.vertices.size());
      REQUIRE(t[k] != t[(k + 1) % 3]);
      ++directed[{t[k], t[(k + 1) % 3]}];
    }
  for (const auto& [e, n] : directed)
  {
    const auto it = directed.find({e.second, e.first});
    CHECK((it != directed.end() && it->second == n));
  }
}

void check_graph_invariants(const SkeletonGraph& g)
{
  CHECK_NOTHROW(g.validate());
  for (const auto& e : g.edges)
  {
    CHECK(e.min_radius > 0.0);
    CHECK(e.min_radius <= e.mean_radius);
    CHECK(e.arc_length + 1e-9 >= distance(g.nodes[e.a].position, g.nodes[e.b].position));
    CHECK(e.a <= e.b);
  }
  const auto label = test::naive_components(g);
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
      CHECK((label[i] == label[j]) == (g.component_of[i] == g.component_of[j]));
}

std::size_t accounted_voxels(const SkeletonGraph& g)
{
  std::size_t n = 0;
  for (const auto& node : g.nodes)
    n += node.voxels.size();
  for (const auto& e : g.edges)
    n += e.voxels.size();
  return n;
}

} // anonymous namespace

TEST_SUITE("model")
{

//------------------------------------------------------------------------------
TEST_CASE("simple point classification")
{
  const std::uint32_t centre = 1u << 13;
  auto bit = [](int dz, int dy, int dx) { return 1u << ((dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)); };
  CHECK_FALSE(is_simple(0));
  CHECK(is_simple(bit(0, 0, 1)));
  CHECK(is_simple(bit(1, 1, 1)));
  CHECK_FALSE(is_simple(bit(0, 0, 1) | bit(0, 0, -1)));
  CHECK(is_simple(bit(0, 0, 1) | bit(0, 1, 1)));
  // Full neighbourhood: removing the centre opens a cavity.
  CHECK_FALSE(is_simple(0x7ffffffu & ~centre));
  // Half space: boundary voxel of a solid.
  std::uint32_t half = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 0; ++dx)
        half |= bit(dz, dy, dx);
  CHECK(is_simple(half & ~centre));
}

TEST_CASE("radius map matches brute force, spacing included")
{
  for (std::uint64_t seed = 0; seed < 3; ++seed)
  {
    const BinaryMask m = test::random_mask({7, 8, 9}, 0.7, seed, {1.0, 0.6, 0.8});
    const Volume r = radius_map(m);
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      if (!m[i])
      {
        CHECK(r[i] == 0.0f);
        continue;
      }
      CHECK(r[i] == doctest::Approx(brute_radius(m, m.dims().unravel(i))).epsilon(1e-6));
    }
  }
}

TEST_CASE("skeleton of a single voxel is that voxel")
{
  BinaryMask m(Geometry{{5, 5, 5}});
  m.at(2, 3, 1) = 1;
  const Skeleton s = skeletonize(m);
  CHECK(s.voxels == m);
  CHECK(s.radius.at(2, 3, 1) == doctest::Approx(1.0));
  const SkeletonGraph g = build_graph(s.voxels, s.radius);
  CHECK(g.nodes.size() == 1);
  CHECK(g.edges.empty());
  CHECK(g.nodes[0].degree == 0);
}

TEST_CASE("skeleton of an empty mask is an error")
{
  CHECK_THROWS_WITH_AS(skeletonize(BinaryMask(Geometry{{4, 4, 4}})), "empty mask", ValidationError);
}

TEST_CASE("straight tube skeletonises to its axis")
{
  const BinaryMask m = tube_mask(3, 26, 2.0);
  const Skeleton s = skeletonize(m);
  CHECK(is_subset(s.voxels, m));
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.voxels.size(); ++i)
  {
    if (!s.voxels[i])
      continue;
    ++n;
    const Index3 p = m.dims().unravel(i);
    CHECK(std::abs(p.y - 10) <= 1);
    CHECK(std::abs(p.x - 10) <= 1);
    if (p.z >= 6 && p.z <= 23)
      CHECK(std::abs(s.radius.at(p) - 2.0) <= 1.0);
  }
  CHECK(n >= 18);

  const SkeletonGraph g = build_graph(s.voxels, s.radius);
  check_graph_invariants(g);
  CHECK(g.nodes.size() == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.nodes[0].degree == 1);
  CHECK(g.edges[0].arc_length >= 15.0);
  CHECK(accounted_voxels(g) == n);
}

TEST_CASE("torus skeleton keeps exactly one cycle")
{
  const BinaryMask m = torus_mask(6.0, 2.0);
  const Skeleton s = skeletonize(m);
  CHECK(count_components(s.voxels) == 1);
  const SkeletonGraph g = build_graph(s.voxels, s.radius);
  check_graph_invariants(g);
  CHECK(cycle_rank(g) == 1);
  REQUIRE(g.nodes.size() == 1);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].a == g.edges[0].b);
  CHECK(g.nodes[0].degree == 2);
  CHECK(accounted_voxels(g) == count_set(s.voxels));
}

TEST_CASE("skeleton preserves the component count")
{
  BinaryMask m = torus_mask(6.0, 2.0);
  const BinaryMask ball = test::ball_mask({9, 21, 21}, 2.5);
  for (std::int64_t z = 0; z < 9; ++z)
    for (std::int64_t y = 0; y < 21; ++y)
      for (std::int64_t x = 0; x < 21; ++x)
        if (ball.at(z, y, x))
          m.at(z, y, x) = 1;
  m.at(0, 0, 0) = 1;
  m.at(8, 20, 20) = 1;
  m.at(8, 20, 19) = 1;
  const Skeleton s = skeletonize(m);
  CHECK(count_components(s.voxels) == count_components(m));
  CHECK(count_components(m) == 4);
}

TEST_CASE("Y bifurcation phantom gives one branching node")
{
  phantom::PhantomSpec spec;
  spec.dims = {40, 40, 40};
  spec.tree = {
    {{4, 20, 20}, {20, 20, 20}, 2.0, "stem", {}},
    {{20, 20, 20}, {34, 20, 8}, 1.6, "left", {}},
    {{20, 20, 20}, {34, 20, 32}, 1.6, "right", {}},
  };
  const phantom::Phantom p = phantom::render_phantom(spec, 0);
  const VesselModel mdl = build_model(p.truth.mask);
  const SkeletonGraph& g = mdl.graph;
  check_graph_invariants(g);
  std::map<int, int> degrees;
  for (const auto& n : g.nodes)
    ++degrees[n.degree];
  CHECK(degrees[3] == 1);
  CHECK(degrees[1] == 3);
  CHECK(g.nodes.size() == 4);
  CHECK(g.edges.size() == 3);
  CHECK(accounted_voxels(g) == count_set(mdl.skeleton.voxels));
}

TEST_CASE("occluded phantom model has several components and one main")
{
  const auto p = phantom::standard_cow_phantom(3, {{"MCA_L", 0.35, 0.65}}, 0.0);
  const VesselModel mdl = build_model(p.truth.mask);
  const SkeletonGraph& g = mdl.graph;
  check_graph_invariants(g);
  CHECK(g.components.size() >= 2);
  REQUIRE(g.main_component >= 0);
  for (std::size_t c = 0; c < g.components.size(); ++c)
    CHECK(g.components[c].size() <= g.components[g.main_component].size());
  CHECK(accounted_voxels(g) == count_set(mdl.skeleton.voxels));
}

TEST_CASE("intact phantom model is one tree-like component without degree-2 nodes")
{
  const auto p = phantom::standard_cow_phantom(3, {}, 0.0);
  const VesselModel mdl = build_model(p.truth.mask);
  const SkeletonGraph& g = mdl.graph;
  check_graph_invariants(g);
  CHECK(g.components.size() == 1);
  for (const auto& n : g.nodes)
    CHECK(n.degree != 2);
  check_closed_and_oriented(mdl.surface);
  CHECK(mdl.surface.volume() > 0.0);
}

TEST_CASE("graph assembly computes degrees, components and the main one")
{
  test::GraphBuilder b;
  const int a0 = b.node({0, 0, 0}), a1 = b.node({0, 0, 5}), a2 = b.node({0, 0, 9});
  const int c0 = b.node({0, 9, 0}), c1 = b.node({0, 9, 3});
  b.edge(a0, a1);
  b.edge(a1, a2);
  b.edge(c0, c1);
  b.edge(a2, a2, 1.0, {{0, 1, 10}, {0, -1, 10}});
  const SkeletonGraph g = b.build();
  CHECK(g.nodes[a2].degree == 3);
  CHECK(g.components.size() == 2);
  CHECK(g.components[0] == std::vector<int>{a0, a1, a2});
  CHECK(g.main_component == 0);
  CHECK(g.component_of[c1] == 1);

  SkeletonGraph bad = g;
  bad.edges[0].arc_length = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.edges[1].min_radius = 2.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = g;
  bad.nodes[0].degree = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("ball surface area approaches the sphere")
{
  for (const double r : {5.0, 6.0, 8.0})
  {
    CAPTURE(r);
    const auto n = static_cast<std::int64_t>(2 * r + 5);
    const SurfaceMesh mesh = build_surface(test::ball_mask({n, n, n}, r));
    const double sphere = 4.0 * std::numbers::pi * r * r;
    CHECK(std::abs(mesh.area() - sphere) / sphere < 0.10);
    check_closed_and_oriented(mesh);
    CHECK(mesh.volume() > 0.0);
  }
}

TEST_CASE("single voxel surface is closed with positive volume")
{
  BinaryMask m(Geometry{{1, 1, 1}}, 1);
  const SurfaceMesh mesh = build_surface(m);
  CHECK_FALSE(mesh.triangles.empty());
  check_closed_and_oriented(mesh);
  CHECK(mesh.volume() > 0.0);
}

TEST_CASE("tube surface vertices hug the mask boundary")
{
  const BinaryMask m = tube_mask(3, 26, 3.0);
  const SurfaceMesh mesh = build_surface(m);
  REQUIRE(mesh.vertices.size() > 0);
  check_closed_and_oriented(mesh);
  const auto faces = boundary_faces(m);
  REQUIRE_FALSE(faces.empty());
  double worst = 0.0;
  for (const Vec3& v : mesh.vertices)
  {
    double best = test::inf;
    for (const auto& f : faces)
      best = std::min(best, f.distance(v));
    worst = std::max(worst, best);
  }
  CHECK(worst <= 1.0);
}

TEST_CASE("surface honours spacing")
{
  const BinaryMask iso = test::ball_mask({17, 17, 17}, 6.0);
  BinaryMask aniso(Geometry{iso.dims(), {2.0, 1.0, 1.0}}, std::vector<std::uint8_t>(iso.data().begin(), iso.data().end()));
  CHECK(build_surface(aniso).volume() == doctest::Approx(2.0 * build_surface(iso).volume()).epsilon(1e-9));
}

TEST_CASE("surface of an empty mask is an error")
{
  CHECK_THROWS_AS(build_surface(BinaryMask(Geometry{{3, 3, 3}})), ValidationError);
}

TEST_CASE("mesh text round trip")
{
  const SurfaceMesh mesh = build_surface(test::ball_mask({9, 9, 9}, 3.0));
  std::stringstream buf;
  write_mesh(buf, mesh);
  const std::string text = buf.str();
  CHECK(text.rfind("v ", 0) == 0);
  CHECK(text.find("\nf ") != std::string::npos);
  {
    std::istringstream lines(text);
    std::string tag;
    std::uint64_t lo = ~0ull, hi = 0;
    for (std::string line; std::getline(lines, line);)
    {
      std::istringstream ls(line);
      ls >> tag;
      if (tag != "f")
        continue;
      for (std::uint64_t i; ls >> i;)
      {
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
    }
    CHECK(lo == 1);
    CHECK(hi <= mesh.vertices.size());
  }
  const SurfaceMesh back = read_mesh(buf);
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  CHECK(back.triangles == mesh.triangles);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    CHECK(distance(back.vertices[i], mesh.vertices[i]) < 1e-9);

  std::stringstream bad("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  CHECK_THROWS_AS(read_mesh(bad), ValidationError);
}

} // TEST_SUITE
