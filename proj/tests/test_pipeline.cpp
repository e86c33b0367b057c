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
#include <angio/pipeline.hpp>

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace angio;
using namespace angio::pipeline;

namespace {

const double default_scales[] = {1.0, 1.5};

Volume tube_volume(Dims dims, double radius, double noise = 0.0)
{
  return phantom::render_phantom(test::z_tube_spec(dims, radius, noise), 7).volume;
}

BinaryMask full_mask(const Geometry& g)
{
  return BinaryMask(g, 1);
}

SeedPointSet seeds_at(std::initializer_list<Index3> at)
{
  SeedPointSet s;
  for (const Index3& i : at)
    s.seeds.push_back({i, 0.0, 0});
  return s;
}

/// Accepted voxels that touch a seed-connected accepted voxel; for the
/// connectivity check.
bool every_component_has_a_seed(const BinaryMask& m, const SeedPointSet& seeds)
{
  std::vector<std::uint32_t> labels;
  const std::size_t n = label_components(m, labels);
  std::vector<char> seeded(n + 1, 0);
  for (const auto& s : seeds.seeds)
    seeded[labels[m.dims().linear(s.index)]] = 1;
  for (std::size_t c = 1; c <= n; ++c)
    if (!seeded[c])
      return false;
  return true;
}

} // anonymous namespace

TEST_SUITE("pipeline")
{

//------------------------------------------------------------------------------
TEST_CASE("vesselness peaks on the tube axis in every slice")
{
  const Dims d{24, 33, 33};
  const Volume v = tube_volume(d, 2.0);
  const Volume r = frangi_vesselness(v, default_scales);
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    std::int64_t by = 0, bx = 0;
    float best = -1.0f;
    for (std::int64_t y = 0; y < d.y; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
        if (r.at(z, y, x) > best)
        {
          best = r.at(z, y, x);
          by = y;
          bx = x;
        }
    CAPTURE(z);
    CHECK(best > 0.0f);
    CHECK(std::abs(by - 16) <= 1);
    CHECK(std::abs(bx - 16) <= 1);
  }
  for (const float x : r.data())
    CHECK(x >= 0.0f);
}

TEST_CASE("vesselness of a constant volume is zero")
{
  const Volume v(Geometry{{16, 16, 16}}, 123.0f);
  const Volume r = frangi_vesselness(v, default_scales);
  for (const float x : r.data())
    CHECK(x == 0.0f);
}

TEST_CASE("plate-like slab responds far less than a tube")
{
  const Dims d{24, 33, 33};
  const Volume tube = tube_volume(d, 2.0);
  Volume slab(Geometry{d}, 40.0f);
  for (std::int64_t z = 0; z < d.z; ++z)
    for (std::int64_t y = 14; y <= 18; ++y)
      for (std::int64_t x = 0; x < d.x; ++x)
        slab.at(z, y, x) = 300.0f;

  const Volume rt = frangi_vesselness(tube, default_scales);
  const Volume rs = frangi_vesselness(slab, default_scales);
  double tube_mean = 0.0, slab_mean = 0.0;
  std::size_t ns = 0;
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    tube_mean += rt.at(z, 16, 16);
    for (std::int64_t x = 0; x < d.x; ++x, ++ns)
      slab_mean += rs.at(z, 16, x);
  }
  tube_mean /= static_cast<double>(d.z);
  slab_mean /= static_cast<double>(ns);
  CHECK(tube_mean > 0.0);
  CHECK(slab_mean < 0.1 * tube_mean);
}

TEST_CASE("vesselness rejects bad scales and tiny volumes")
{
  const Volume v(Geometry{{16, 16, 16}});
  CHECK_THROWS_AS(frangi_vesselness(v, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(frangi_vesselness(v, std::vector<double>{1.0, -1.0}), ValidationError);
  const Volume tiny(Geometry{{4, 16, 16}});
  CHECK_THROWS_AS(frangi_vesselness(tiny, default_scales), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("atlas mask of a single voxel is the dilation box")
{
  Volume p(Geometry{{9, 9, 9}});
  p.at(4, 4, 4) = 0.7f;
  const BinaryMask m = build_atlas_mask(p, 0.005, {3, 3, 3});
  CHECK(count_set(m) == 27);
  CHECK(m.at(3, 3, 3));
  CHECK(m.at(5, 5, 5));
  CHECK_FALSE(m.at(2, 4, 4));
  CHECK(count_set(build_atlas_mask(p, 0.005, {11, 7, 7})) == 9 * 7 * 7);
}

TEST_CASE("atlas threshold at the maximum keeps only peak voxels")
{
  Volume p(Geometry{{5, 5, 5}});
  p.at(1, 1, 1) = 2.0f;
  p.at(3, 3, 3) = 2.0f;
  p.at(2, 2, 2) = 1.9f;
  const BinaryMask m = build_atlas_mask(p, 1.0, {1, 1, 1});
  CHECK(count_set(m) == 2);
  CHECK(m.at(1, 1, 1));
  CHECK(m.at(3, 3, 3));
}

TEST_CASE("atlas mask contains the thresholded support")
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Volume p(Geometry{{12, 12, 12}});
  for (auto& v : p.storage())
    v = u(rng) < 0.05f ? u(rng) : 0.0f;
  const BinaryMask m = build_atlas_mask(p, 0.3, {3, 5, 1});
  float peak = 0.0f;
  for (const float v : p.data())
    peak = std::max(peak, v);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.3f * peak)
      CHECK(m[i]);
}

TEST_CASE("atlas mask errors")
{
  const Volume zero(Geometry{{5, 5, 5}});
  try
  {
    build_atlas_mask(zero, 0.005, {3, 3, 3});
    FAIL("accepted an all-zero atlas");
  }
  catch (const ValidationError& e)
  {
    CHECK(std::string(e.what()) == "empty atlas");
  }
  Volume p(Geometry{{5, 5, 5}}, 1.0f);
  CHECK_THROWS_AS(build_atlas_mask(p, 0.005, {2, 3, 3}), ValidationError);
  p[0] = -1.0f;
  CHECK_THROWS_AS(build_atlas_mask(p, 0.005, {3, 3, 3}), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("gating keeps values above threshold inside the atlas")
{
  const Geometry g{{6, 6, 6}};
  const Volume five(g, 5.0f);
  CHECK(gate_and_threshold(five, full_mask(g), 4.0) == five);
  const Volume out = gate_and_threshold(five, BinaryMask(g), 4.0);
  for (const float v : out.data())
    CHECK(v == 0.0f);
  const Volume four(g, 4.0f);
  const Volume none = gate_and_threshold(four, full_mask(g), 4.0);
  for (const float v : none.data())
    CHECK(v == 0.0f);
}

TEST_CASE("gated support lies inside the atlas")
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  const Geometry g{{8, 8, 8}};
  Volume r(g);
  for (auto& v : r.storage())
    v = u(rng);
  const BinaryMask atlas = test::random_mask(g.dims, 0.5, 8);
  const Volume out = gate_and_threshold(r, atlas, 4.0);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    if (out[i] != 0.0f)
      CHECK(atlas[i]);
    CHECK(out[i] == ((atlas[i] && r[i] > 4.0f) ? r[i] : 0.0f));
  }
}

TEST_CASE("gating requires matching geometry")
{
  const Volume r(Geometry{{6, 6, 6}});
  CHECK_THROWS_AS(gate_and_threshold(r, BinaryMask(Geometry{{6, 6, 5}}), 4.0), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("hough finds a drawn disc")
{
  const std::int64_t n = 40;
  std::vector<float> slice(n * n, 0.0f);
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x)
      if ((y - 18) * (y - 18) + (x - 22) * (x - 22) <= 16)
        slice[y * n + x] = 100.0f;
  const auto circles = hough_circles(slice, n, n, {});
  REQUIRE_FALSE(circles.empty());
  CHECK(std::abs(circles[0].y - 18) <= 1);
  CHECK(std::abs(circles[0].x - 22) <= 1);
  CHECK(std::abs(circles[0].radius - 4) <= 1);
  for (std::size_t i = 1; i < circles.size(); ++i)
    CHECK(circles[i - 1].votes >= circles[i].votes);
}

TEST_CASE("hough seeds follow a tube orthogonal to the slices")
{
  const Dims d{24, 33, 33};
  const Volume v = tube_volume(d, 2.0);
  const Volume gated = gate_and_threshold(frangi_vesselness(v, default_scales), full_mask(v.geometry()), 4.0);
  const SeedPointSet s = hough_seed_points(gated);
  std::vector<int> per_slice(d.z, 0);
  for (const SeedPoint& p : s.seeds)
  {
    ++per_slice[p.index.z];
    CHECK(gated.at(p.index) != 0.0f);
    const double off = std::hypot(static_cast<double>(p.index.y - 16), static_cast<double>(p.index.x - 16));
    CHECK(off <= 2.0);
  }
  for (std::int64_t z = 0; z < d.z; ++z)
  {
    CAPTURE(z);
    CHECK(per_slice[z] >= 1);
  }
  CHECK(s.raw_count >= s.seeds.size());
}

TEST_CASE("hough on a zero volume finds nothing")
{
  const SeedPointSet s = hough_seed_points(Volume(Geometry{{8, 20, 20}}));
  CHECK(s.seeds.empty());
  CHECK(s.raw_count == 0);
}

TEST_CASE("hough seeds always lie on the gated support")
{
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Volume gated(Geometry{{6, 32, 32}});
  for (auto& v : gated.storage())
    v = u(rng) < 0.3f ? 20.0f * u(rng) : 0.0f;
  const SeedPointSet s = hough_seed_points(gated);
  for (const SeedPoint& p : s.seeds)
    CHECK(gated.at(p.index) != 0.0f);
  CHECK(s.raw_count > s.seeds.size());
}

TEST_CASE("hough rejects an inverted radius range")
{
  HoughParams p;
  p.min_radius = 4;
  p.max_radius = 2;
  CHECK_THROWS_AS(hough_seed_points(Volume(Geometry{{2, 16, 16}}), p), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("adaptive growing on a uniform volume takes everything connected")
{
  const Volume v(Geometry{{7, 8, 9}}, 200.0f);
  const BinaryMask m = region_grow_adaptive(v, seeds_at({{3, 3, 3}}), 0.05);
  CHECK(count_set(m) == v.size());
}

TEST_CASE("adaptive growing from a tube seed yields the tube")
{
  const phantom::Phantom p = phantom::render_phantom(test::z_tube_spec({20, 25, 25}, 2.5), 1);
  const BinaryMask m = region_grow_adaptive(p.volume, seeds_at({{10, 12, 12}}), 0.05);
  CHECK(dice(m, p.truth.mask) >= 0.95);
  CHECK(m == p.truth.mask);
}

TEST_CASE("adaptive growing uses the mean over all seeds")
{
  Volume v(Geometry{{1, 1, 5}});
  const float vals[] = {100.0f, 104.0f, 108.0f, 112.0f, 200.0f};
  for (int i = 0; i < 5; ++i)
    v[i] = vals[i];
  // Seeds 104 and 108 give a mean of 106 and a tolerance of 5.3, which
  // rejects 100; a per-seed mean of 104 would have accepted it.
  const BinaryMask m = region_grow_adaptive(v, seeds_at({{0, 0, 1}, {0, 0, 2}}), 0.05);
  CHECK(m[0] == 0);
  CHECK(m[1] == 1);
  CHECK(m[2] == 1);
  CHECK(m[3] == 0);
  CHECK(m[4] == 0);
}

TEST_CASE("adaptive growing stays inside its domain")
{
  const Volume v(Geometry{{6, 6, 6}}, 50.0f);
  const BinaryMask domain = test::mask_from({6, 6, 6}, [](auto z, auto, auto) { return z < 3; });
  const BinaryMask m = region_grow_adaptive(v, seeds_at({{1, 1, 1}}), 0.05, &domain);
  CHECK(m == domain);
}

TEST_CASE("grown regions are seed-connected and maximal")
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Volume v(Geometry{{12, 12, 12}});
  for (auto& x : v.storage())
    x = u(rng) < 0.45f ? 300.0f + 10.0f * u(rng) : 40.0f;
  const SeedPointSet seeds = seeds_at({{2, 2, 2}, {9, 9, 9}, {5, 6, 7}});
  for (const auto& s : seeds.seeds)
    v.at(s.index) = 305.0f;

  const BinaryMask a = region_grow_adaptive(v, seeds, 0.05);
  const BinaryMask w = region_grow_window(v, seeds, 130.0, 1500.0);
  for (const BinaryMask* m : {&a, &w})
  {
    CHECK(every_component_has_a_seed(*m, seeds));
    // No accepted-valued voxel is left touching the region.
    const Dims& d = m->dims();
    for (std::size_t i = 0; i < m->size(); ++i)
    {
      if ((*m)[i] || !(v[i] >= 130.0f))
        continue;
      const Index3 p = d.unravel(i);
      for (const auto& o : neighbours26())
      {
        const Index3 q{p.z + o[0], p.y + o[1], p.x + o[2]};
        if (d.contains(q))
          CHECK_FALSE((*m).at(q));
      }
    }
  }
  CHECK(is_subset(a, w));
}

TEST_CASE("growing errors")
{
  const Volume v(Geometry{{4, 4, 4}}, 200.0f);
  try
  {
    region_grow_adaptive(v, SeedPointSet{}, 0.05);
    FAIL("grew without seeds");
  }
  catch (const ValidationError& e)
  {
    CHECK(std::string(e.what()) == "no seeds");
  }
  CHECK_THROWS_WITH(region_grow_window(v, SeedPointSet{}, 130.0, 1500.0), "no seeds");
  CHECK_THROWS_WITH(region_grow_window(v, BinaryMask(v.geometry()), 130.0, 1500.0), "no seeds");
  CHECK_THROWS_AS(region_grow_adaptive(v, seeds_at({{1, 1, 1}}), 0.0), ValidationError);
  CHECK_THROWS_AS(region_grow_window(v, seeds_at({{1, 1, 1}}), 200.0, 200.0), ValidationError);
  CHECK_THROWS_AS(region_grow_adaptive(v, seeds_at({{1, 1, 9}}), 0.05), ValidationError);
}

TEST_CASE("window growing ignores seeds outside the window")
{
  Volume v(Geometry{{1, 1, 6}}, 300.0f);
  v[2] = 50.0f;
  const BinaryMask m = region_grow_window(v, seeds_at({{0, 0, 2}, {0, 0, 4}}), 130.0, 1500.0);
  CHECK(m[2] == 0);
  CHECK(m[3] == 1);
  CHECK(m[5] == 1);
  CHECK(m[0] == 0);
  CHECK(count_set(region_grow_window(v, seeds_at({{0, 0, 2}}), 130.0, 1500.0)) == 0);
}

//------------------------------------------------------------------------------
TEST_CASE("closing bridges a one-voxel gap")
{
  BinaryMask m = phantom::render_phantom(test::z_tube_spec({20, 17, 17}, 2.0), 0).truth.mask;
  for (std::int64_t y = 0; y < 17; ++y)
    for (std::int64_t x = 0; x < 17; ++x)
      m.at(10, y, x) = 0;
  CHECK(count_components(m) == 2);
  const BinaryMask c = morphological_closing(m, 1);
  CHECK(count_components(c) == 1);
  CHECK(is_subset(m, c));
}

TEST_CASE("closing is extensive and idempotent")
{
  for (std::uint64_t seed = 0; seed < 5; ++seed)
  {
    const BinaryMask m = test::random_mask({10, 11, 12}, 0.1 + 0.15 * seed, seed);
    const BinaryMask c = morphological_closing(m, 1);
    CHECK(is_subset(m, c));
    CHECK(morphological_closing(c, 1) == c);
  }
}

TEST_CASE("closing leaves a ball and an empty mask unchanged")
{
  const BinaryMask ball = test::ball_mask({15, 15, 15}, 5.0);
  CHECK(morphological_closing(ball, 1) == ball);
  const BinaryMask empty(Geometry{{5, 5, 5}});
  CHECK(morphological_closing(empty, 1) == empty);
  CHECK_THROWS_AS(morphological_closing(empty, 0), ValidationError);
}

//------------------------------------------------------------------------------
TEST_CASE("pipeline on the noise-free phantom reproduces the ground truth")
{
  const auto p = phantom::standard_cow_phantom(1, {}, 0.0);
  const PipelineResult r = run_pipeline(p.volume, p.atlas);
  CHECK(dice(r.final_mask, p.truth.mask) >= 0.95);
  CHECK(is_subset(r.stage_h, r.final_mask));
  CHECK(r.seeds.raw_count > r.seeds.seeds.size());
  CHECK(count_components(r.final_mask) == 1);
}

TEST_CASE("pipeline is deterministic")
{
  const auto p = phantom::standard_cow_phantom(2);
  const PipelineResult a = run_pipeline(p.volume, p.atlas);
  const PipelineResult b = run_pipeline(p.volume, p.atlas);
  CHECK(a.stage_h == b.stage_h);
  CHECK(a.final_mask == b.final_mask);
  CHECK(a.seeds.raw_count == b.seeds.raw_count);
  REQUIRE(a.seeds.seeds.size() == b.seeds.seeds.size());
  for (std::size_t i = 0; i < a.seeds.seeds.size(); ++i)
    CHECK(a.seeds.seeds[i].index == b.seeds.seeds[i].index);
}

TEST_CASE("occluded phantom splits the final mask")
{
  const auto p = phantom::standard_cow_phantom(3, {{"MCA_L", 0.35, 0.65}});
  const PipelineResult r = run_pipeline(p.volume, p.atlas);
  CHECK(count_components(r.final_mask) >= 2);
  CHECK(is_subset(r.stage_h, r.final_mask));
}

TEST_CASE("window growing recovers a branch outside the atlas")
{
  phantom::PhantomSpec s;
  s.dims = {24, 40, 48};
  s.noise_sigma = 5.0;
  s.tree = {
    {{2, 20, 6}, {21, 20, 24}, 2.0, "trunk", {}},
    {{21, 20, 24}, {21, 20, 42}, 1.6, "distal", {}},
  };
  const phantom::Phantom p = phantom::render_phantom(s, 5);
  const Volume atlas = phantom::atlas_probability(s, {"distal"});
  const PipelineResult r = run_pipeline(p.volume, atlas);

  const Geometry& g = p.volume.geometry();
  const Index3 probe = g.nearest_index({21, 20, 38});
  CHECK(p.truth.mask.at(probe));
  CHECK_FALSE(r.stage_h.at(probe));
  CHECK(r.final_mask.at(probe));
  CHECK(dice(r.final_mask, p.truth.mask) >= 0.95);
}

TEST_CASE("pipeline errors carry the stage letter")
{
  const auto p = phantom::standard_cow_phantom(1);
  auto stage_of = [](auto&& f) -> std::string
  {
    try
    {
      f();
    }
    catch (const StageError& e)
    {
      CHECK(std::string(e.what()).rfind("stage (" + e.stage() + "): ", 0) == 0);
      return e.stage();
    }
    return "";
  };
  PipelineConfig cfg;
  cfg.frangi_scales = {};
  CHECK(stage_of([&] { run_pipeline(p.volume, p.atlas, cfg); }) == "d");
  CHECK(stage_of([&] { run_pipeline(p.volume, Volume(p.volume.geometry())); }) == "e");
  cfg = {};
  cfg.hough.min_radius = 9;
  CHECK(stage_of([&] { run_pipeline(p.volume, p.atlas, cfg); }) == "f");
  const Volume flat(p.volume.geometry(), 40.0f);
  CHECK(stage_of([&] { run_pipeline(flat, p.atlas); }) == "h");
  cfg = {};
  cfg.closing_radius = 0;
  CHECK(stage_of([&] { run_pipeline(p.volume, p.atlas, cfg); }) == "i");
}

} // TEST_SUITE
