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

#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace angio;
using namespace angio::phantom;

TEST_SUITE("phantom")
{

TEST_CASE("straight tube voxel count matches the cylinder volume")
{
  PhantomSpec s = test::z_tube_spec({32, 40, 40}, 2.0);
  s.spacing = {0.5, 0.5, 0.5};
  // Centre the tube in mm for the finer grid.
  for (auto& seg : s.tree)
  {
    seg.start.y = seg.end.y = 9.75;
    seg.start.x = seg.end.x = 9.75;
  }
  const Phantom p = render_phantom(s, 1);
  const double measured = static_cast<double>(count_set(p.truth.mask)) * s.geometry().voxel_volume();
  const double analytic = std::numbers::pi * 2.0 * 2.0 * (32 * 0.5);
  CHECK(std::abs(measured - analytic) / analytic < 0.05);
}

TEST_CASE("noise-free tube has exact intensities")
{
  const PhantomSpec s = test::z_tube_spec({16, 17, 17}, 2.0);
  const Phantom p = render_phantom(s, 4);
  for (std::size_t i = 0; i < p.volume.size(); ++i)
    CHECK(p.volume[i] == (p.truth.mask[i] ? 300.0f : 40.0f));
}

TEST_CASE("empty segment list gives a background volume")
{
  PhantomSpec s;
  s.dims = {16, 16, 16};
  const Phantom p = render_phantom(s, 9);
  CHECK(count_set(p.truth.mask) == 0);
  for (const float v : p.volume.data())
    CHECK(v == 40.0f);
  CHECK(p.truth.centerlines.empty());
}

TEST_CASE("identical spec and seed give identical volumes")
{
  const PhantomSpec s = standard_cow_spec();
  const Phantom a = render_phantom(s, 17);
  const Phantom b = render_phantom(s, 17);
  CHECK(a.volume == b.volume);
  const Phantom c = render_phantom(s, 18);
  CHECK_FALSE(a.volume == c.volume);
  CHECK(a.truth.mask == c.truth.mask);
}

TEST_CASE("seeds change noise only")
{
  const CowPhantom a = standard_cow_phantom(1);
  const CowPhantom b = standard_cow_phantom(2);
  CHECK(a.truth.mask == b.truth.mask);
  CHECK(a.atlas == b.atlas);
  CHECK_FALSE(a.volume == b.volume);
  REQUIRE(a.chains.size() == b.chains.size());
  for (std::size_t i = 0; i < a.chains.size(); ++i)
    CHECK(a.chains[i].markers.size() == b.chains[i].markers.size());
}

TEST_CASE("visible centerline samples lie inside the mask")
{
  const CowPhantom p = standard_cow_phantom(3, {{"MCA_L", 0.4, 1.0}});
  const Geometry& g = p.truth.mask.geometry();
  std::size_t visible = 0, occluded = 0;
  for (const auto& [label, samples] : p.truth.centerlines)
    for (const CenterlineSample& s : samples)
    {
      const Index3 i = g.nearest_index(s.position);
      if (!g.dims.contains(i))
        continue;
      if (s.occluded)
      {
        ++occluded;
        continue;
      }
      ++visible;
      CHECK(p.truth.mask.at(i));
    }
  CHECK(visible > 100);
  CHECK(occluded > 10);
  CHECK(p.truth.occluded_labels == std::set<std::string>{"MCA_L"});
}

TEST_CASE("occlusion erases the span from mask and volume")
{
  const CowPhantom intact = standard_cow_phantom(3, {}, 0.0);
  const CowPhantom cut = standard_cow_phantom(3, {{"MCA_L", 0.4, 1.0}}, 0.0);
  CHECK(is_subset(cut.truth.mask, intact.truth.mask));
  CHECK(count_set(cut.truth.mask) < count_set(intact.truth.mask));
  for (const auto& s : cut.truth.centerlines.at("MCA_L"))
  {
    if (!s.occluded)
      continue;
    // Far from other vessels, the erased span is background.
    const Index3 i = cut.truth.mask.geometry().nearest_index(s.position);
    if (s.position.x < 10.0)
      CHECK(cut.volume.at(i) == 40.0f);
  }
}

TEST_CASE("standard phantom carries seven labelled vessels with marker chains")
{
  const CowPhantom p = standard_cow_phantom(5);
  REQUIRE(p.chains.size() == 7);
  std::set<labeling::Vessel> seen;
  for (const auto& c : p.chains)
  {
    seen.insert(c.vessel);
    CHECK(c.markers.size() == 12);
    CHECK(c.required_present_count == 8);
    CHECK(c.slope_enabled == (c.vessel == labeling::Vessel::MCA_L || c.vessel == labeling::Vessel::MCA_R));
    CHECK_NOTHROW(c.validate());
  }
  CHECK(seen.size() == 7);

  const auto verdicts = labeling::judge_all(p.chains, p.truth.mask);
  for (const auto& v : verdicts)
  {
    CAPTURE(labeling::to_string(v.vessel));
    CHECK(v.present);
  }
}

TEST_CASE("occluded proximal MCA is judged absent on the ground truth mask")
{
  const CowPhantom p = standard_cow_phantom(5, {{"MCA_L", 0.4, 1.0}});
  for (const auto& v : labeling::judge_all(p.chains, p.truth.mask))
  {
    CAPTURE(labeling::to_string(v.vessel));
    CHECK(v.present == (v.vessel != labeling::Vessel::MCA_L));
  }
}

TEST_CASE("atlas probability peaks on the centerlines and honours exclusions")
{
  const PhantomSpec s = test::z_tube_spec({16, 17, 17}, 2.0);
  const Volume a = atlas_probability(s);
  CHECK(a.at(8, 8, 8) == doctest::Approx(1.0));
  CHECK(a.at(8, 0, 0) < a.at(8, 8, 4));
  for (const float v : a.data())
    CHECK((v >= 0.0f && v <= 1.0f));
  const Volume none = atlas_probability(s, {"T"});
  for (const float v : none.data())
    CHECK(v == 0.0f);
}

TEST_CASE("spec validation names the offending field")
{
  auto expect = [](PhantomSpec s, const std::string& field)
  {
    CAPTURE(field);
    try
    {
      render_phantom(s, 0);
      FAIL("accepted an invalid spec");
    }
    catch (const ValidationError& e)
    {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  const PhantomSpec base = test::z_tube_spec({16, 16, 16}, 2.0);

  PhantomSpec s = base;
  s.tree[0].radius = 0.0;
  expect(s, "tree[0].radius");
  s = base;
  s.dims = {8, 16, 16};
  expect(s, "dims");
  s = base;
  s.vessel_hu = 100.0;
  expect(s, "vessel_hu");
  s = base;
  s.occlusions = {{"T", 0.6, 0.2}};
  expect(s, "occlusions[0].fraction_start");
  s = base;
  s.occlusions = {{"X", 0.1, 0.2}};
  expect(s, "occlusions[0].label");
  s = base;
  s.noise_sigma = -1.0;
  expect(s, "noise_sigma");
}

} // TEST_SUITE
