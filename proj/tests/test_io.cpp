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

#include <angio/io.hpp>

#include "support.hpp"

#include <doctest.h>

using namespace angio;
using io::json;

namespace {

template<typename F>
std::string error_of(F&& f)
{
  try
  {
    f();
  }
  catch (const ValidationError& e)
  {
    return e.what();
  }
  return "";
}

} // anonymous namespace

TEST_SUITE("io")
{

TEST_CASE("graph json round trip")
{
  const auto g = search::random_vessel_graph(60, 4, 2);
  const json j = io::to_json(g);
  CHECK(j["nodes"].size() == 60);
  CHECK(j["nodes"][0].contains("degree"));
  CHECK(j["components"].size() == 2);
  // Through text, as files carry it.
  const auto back = io::graph_from_json(json::parse(j.dump()));
  REQUIRE(back.nodes.size() == g.nodes.size());
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
  {
    CHECK(back.nodes[i].position == g.nodes[i].position);
    CHECK(back.nodes[i].degree == g.nodes[i].degree);
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i)
  {
    CHECK(back.edges[i].polyline == g.edges[i].polyline);
    CHECK(back.edges[i].arc_length == g.edges[i].arc_length);
    CHECK(back.edges[i].min_radius == g.edges[i].min_radius);
  }
  CHECK(back.components == g.components);
  CHECK(back.main_component == g.main_component);
  CHECK(io::to_json(back) == j);
}

TEST_CASE("graph json accepts the minimal schema")
{
  const json j = json::parse(R"({
    "nodes": [{"id": 1, "pos": [0, 0, 4], "radius": 1}, {"id": 0, "pos": [0, 0, 0], "radius": 1}],
    "edges": [{"id": 0, "a": 0, "b": 1, "polyline": [[0, 0, 0], [0, 0, 4]],
               "arc_length": 4, "min_radius": 0.5, "mean_radius": 0.75}]
  })");
  const auto g = io::graph_from_json(j);
  CHECK(g.nodes[1].position == Vec3{0, 0, 4});
  CHECK(g.nodes[0].degree == 1);
  CHECK(g.components.size() == 1);
}

TEST_CASE("graph json errors name the field")
{
  json j = io::to_json(search::random_vessel_graph(10, 1));
  json dup = j;
  dup["nodes"][1]["id"] = 0;
  CHECK(error_of([&] { io::graph_from_json(dup); }).find("graph.nodes[1].id") != std::string::npos);
  json missing = j;
  missing["edges"][2].erase("polyline");
  CHECK(error_of([&] { io::graph_from_json(missing); }).find("graph.edges[2]") != std::string::npos);
  json comps = j;
  comps["components"] = json::array({json::array({0, 1}), json::array({2, 3, 4, 5, 6, 7, 8, 9})});
  CHECK(error_of([&] { io::graph_from_json(comps); }).find("graph.components") != std::string::npos);
  json arc = j;
  arc["edges"][0]["arc_length"] = 0.001;
  CHECK(error_of([&] { io::graph_from_json(arc); }).find("arc_length") != std::string::npos);
  json pos = j;
  pos["nodes"][0]["pos"] = json::array({1, 2});
  CHECK(error_of([&] { io::graph_from_json(pos); }).find("graph.nodes[0].pos") != std::string::npos);
}

TEST_CASE("phantom spec json round trip and strict keys")
{
  phantom::PhantomSpec s = phantom::standard_cow_spec();
  s.occlusions = {{"MCA_L", 0.25, 0.75}};
  const auto back = io::phantom_spec_from_json(json::parse(io::to_json(s).dump()));
  CHECK(back.dims == s.dims);
  CHECK(back.spacing == s.spacing);
  REQUIRE(back.tree.size() == s.tree.size());
  for (std::size_t i = 0; i < s.tree.size(); ++i)
  {
    CHECK(back.tree[i].start == s.tree[i].start);
    CHECK(back.tree[i].control_points == s.tree[i].control_points);
    CHECK(back.tree[i].label == s.tree[i].label);
  }
  REQUIRE(back.occlusions.size() == 1);
  CHECK(back.occlusions[0].fraction_end == 0.75);
  CHECK(phantom::render_phantom(back, 3).volume == phantom::render_phantom(s, 3).volume);

  json j = io::to_json(s);
  j["colour"] = "red";
  CHECK(error_of([&] { io::phantom_spec_from_json(j); }).find("colour") != std::string::npos);
  j = io::to_json(s);
  j["tree"][2]["radius"] = -1;
  CHECK(error_of([&] { io::phantom_spec_from_json(j); }).find("tree[2].radius") != std::string::npos);
}

TEST_CASE("phantom spec defaults")
{
  const auto s = io::phantom_spec_from_json(json::parse(R"({"dims": [16, 16, 16], "tree": []})"));
  CHECK(s.background_hu == 40.0);
  CHECK(s.vessel_hu == 300.0);
  CHECK(s.spacing == Vec3{1, 1, 1});
}

TEST_CASE("marker chain json round trip")
{
  const auto chains = phantom::marker_chains_for(phantom::standard_cow_spec());
  const json j = io::chains_to_json(chains);
  REQUIRE(j.is_array());
  CHECK(j[0].contains("markers"));
  CHECK(j[0]["markers"][0].contains("max_dist"));
  for (const json& doc : {j, json{{"chains", j}}})
  {
    const auto back = io::chains_from_json(json::parse(doc.dump()));
    REQUIRE(back.size() == chains.size());
    for (std::size_t i = 0; i < chains.size(); ++i)
    {
      CHECK(back[i].vessel == chains[i].vessel);
      CHECK(back[i].required_present_count == chains[i].required_present_count);
      CHECK(back[i].slope_enabled == chains[i].slope_enabled);
      CHECK(back[i].slope_threshold == chains[i].slope_threshold);
      REQUIRE(back[i].markers.size() == chains[i].markers.size());
      for (std::size_t k = 0; k < chains[i].markers.size(); ++k)
      {
        CHECK(back[i].markers[k].position == chains[i].markers[k].position);
        CHECK(back[i].markers[k].max_allowed_distance == chains[i].markers[k].max_allowed_distance);
      }
    }
  }
  json bad = j;
  bad[0]["vessel"] = "SCA";
  CHECK(error_of([&] { io::chains_from_json(bad); }).find("vessel") != std::string::npos);
  bad = j;
  bad[1]["required_present_count"] = 50;
  CHECK_THROWS_AS(io::chains_from_json(bad), ValidationError);
}

TEST_CASE("pipeline config json round trip and strict keys")
{
  pipeline::PipelineConfig c;
  c.frangi_scales = {0.8, 1.2, 2.0};
  c.atlas_dilation = {5, 3, 3};
  c.hough.min_distance = 7.0;
  c.window_lo = 100.0;
  const auto back = io::config_from_json(json::parse(io::to_json(c).dump()));
  CHECK(back.frangi_scales == c.frangi_scales);
  CHECK(back.atlas_dilation == c.atlas_dilation);
  CHECK(back.hough.min_distance == 7.0);
  CHECK(back.window_lo == 100.0);

  const auto d = io::config_from_json(json::object());
  CHECK(d.atlas_t1 == 0.005);
  CHECK(d.t2 == 4.0);
  CHECK(d.atlas_dilation == std::array<int, 3>{11, 7, 7});
  CHECK(d.hough.canny_threshold == 10.0);
  CHECK(d.hough.accumulator_threshold == 1.0);
  CHECK(d.hough.min_distance == 5.0);
  CHECK(d.hough.min_radius == 0);
  CHECK(d.hough.max_radius == 5);
  CHECK(d.region_tolerance == 0.05);
  CHECK(d.window_lo == 130.0);
  CHECK(d.window_hi == 1500.0);
  CHECK(d.frangi_scales == std::vector<double>{1.0, 1.5});

  CHECK(error_of([] { io::config_from_json(json{{"t3", 1}}); }).find("t3") != std::string::npos);
  CHECK(error_of([] { io::config_from_json(json{{"hough", {{"votes", 1}}}}); }).find("votes") != std::string::npos);
  CHECK_THROWS_AS(io::config_from_json(json{{"t2", "four"}}), ValidationError);
}

TEST_CASE("search results serialise non-finite numbers as null")
{
  search::PathResult p;
  const json j = io::to_json(p);
  CHECK(j["reachable"] == false);
  CHECK(j["total_cost"].is_null());
  search::PathResult q;
  q.reachable = true;
  q.nodes = {3};
  q.total_cost = 0.0;
  CHECK(io::to_json(q)["total_cost"] == 0.0);
}

TEST_CASE("label document")
{
  labeling::VesselVerdict v;
  v.vessel = labeling::Vessel::MCA_L;
  v.present = false;
  v.distances = {0.0, 2.45, test::inf};
  v.slope = 2.45;
  v.reason = labeling::VerdictReason::slope_exceeded;
  labeling::VesselVerdict w;
  w.vessel = labeling::Vessel::ACA;
  w.present = true;
  w.final_marker_position = Vec3{1, 2, 3};
  w.reason = labeling::VerdictReason::enough_markers;
  const std::vector<labeling::VesselVerdict> vs{v, w};
  const json doc = io::labels_to_json(vs, {true, {labeling::Vessel::MCA_L}});
  CHECK(doc["present_count"] == 1);
  CHECK(doc["vessel_count"] == 2);
  CHECK(doc["lvo"]["lvo_positive"] == true);
  CHECK(doc["lvo"]["implicated"] == json::array({"MCA_L"}));
  CHECK(doc["verdicts"][0]["vessel"] == "MCA_L");
  CHECK(doc["verdicts"][0]["slope"] == 2.45);
  CHECK(doc["verdicts"][0]["reason"] == "slope_exceeded");
  CHECK(doc["verdicts"][0]["distances"][2].is_null());
  CHECK(doc["verdicts"][1]["final_marker_position"] == json::array({1.0, 2.0, 3.0}));
}

} // TEST_SUITE
