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

#include <cmath>
#include <fstream>
#include <set>

namespace angio::io {

namespace {

json number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

[[noreturn]] void bad(const std::string& what, const std::string& msg)
{
  throw ValidationError(what + ": " + msg);
}

const json& field(const json& j, const char* key, const std::string& what)
{
  if (!j.is_object())
    bad(what, "expected an object");
  const auto it = j.find(key);
  if (it == j.end())
    bad(what, std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const json& j, const std::string& what)
{
  if (!j.is_number())
    bad(what, "expected a number");
  return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& what)
{
  if (!j.is_number_integer())
    bad(what, "expected an integer");
  return j.get<std::int64_t>();
}

bool as_bool(const json& j, const std::string& what)
{
  if (!j.is_boolean())
    bad(what, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& what)
{
  if (!j.is_string())
    bad(what, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& what)
{
  if (!j.is_array())
    bad(what, "expected an array");
  return j;
}

std::vector<Vec3> points_from_json(const json& j, const std::string& what)
{
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < as_array(j, what).size(); ++i)
    out.push_back(vec3_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

json points_to_json(std::span<const Vec3> pts)
{
  json a = json::array();
  for (const Vec3& p : pts)
    a.push_back(to_json(p));
  return a;
}

template <class F>
void for_keys(const json& j, const std::string& what, F&& f)
{
  if (!j.is_object())
    bad(what, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!f(it.key(), it.value()))
      bad(what, "unknown key '" + it.key() + "'");
}

} // anonymous namespace

//==============================================================================
json read_json(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open " + path.string());
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot create " + path.string());
  out << doc.dump(2) << '\n';
  if (!out)
    throw Error("write failed: " + path.string());
}

json to_json(const Vec3& v)
{
  return json::array({v.z, v.y, v.x});
}

Vec3 vec3_from_json(const json& j, const std::string& what)
{
  if (!j.is_array() || j.size() != 3)
    bad(what, "expected [z, y, x]");
  return {as_number(j[0], what), as_number(j[1], what), as_number(j[2], what)};
}

//==============================================================================
json to_json(const model::SkeletonGraph& g)
{
  json nodes = json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"id", n.id}, {"pos", to_json(n.position)}, {"degree", n.degree},
      {"radius", n.radius}});
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"id", e.id}, {"a", e.a}, {"b", e.b},
      {"polyline", points_to_json(e.polyline)}, {"arc_length", e.arc_length},
      {"min_radius", e.min_radius}, {"mean_radius", e.mean_radius}});
  return {{"nodes", nodes}, {"edges", edges}, {"components", g.components},
    {"main_component", g.main_component}};
}

model::SkeletonGraph graph_from_json(const json& j)
{
  const json& jn = as_array(field(j, "nodes", "graph"), "graph.nodes");
  const json& je = as_array(field(j, "edges", "graph"), "graph.edges");

  std::vector<model::GraphNode> nodes(jn.size());
  std::vector<char> seen(jn.size(), 0);
  for (std::size_t i = 0; i < jn.size(); ++i)
  {
    const std::string what = "graph.nodes[" + std::to_string(i) + "]";
    const auto id = as_integer(field(jn[i], "id", what), what + ".id");
    if (id < 0 || static_cast<std::size_t>(id) >= jn.size() || seen[id])
      bad(what + ".id", "ids must be unique and within 0..n-1");
    seen[id] = 1;
    auto& n = nodes[id];
    n.id = static_cast<int>(id);
    n.position = vec3_from_json(field(jn[i], "pos", what), what + ".pos");
    n.radius = as_number(field(jn[i], "radius", what), what + ".radius");
  }

  std::vector<model::GraphEdge> edges(je.size());
  std::vector<char> eseen(je.size(), 0);
  for (std::size_t i = 0; i < je.size(); ++i)
  {
    const std::string what = "graph.edges[" + std::to_string(i) + "]";
    const json& x = je[i];
    const auto id = as_integer(field(x, "id", what), what + ".id");
    if (id < 0 || static_cast<std::size_t>(id) >= je.size() || eseen[id])
      bad(what + ".id", "ids must be unique and within 0..m-1");
    eseen[id] = 1;
    auto& e = edges[id];
    e.id = static_cast<int>(id);
    e.a = static_cast<int>(as_integer(field(x, "a", what), what + ".a"));
    e.b = static_cast<int>(as_integer(field(x, "b", what), what + ".b"));
    e.polyline = points_from_json(field(x, "polyline", what), what + ".polyline");
    e.arc_length = as_number(field(x, "arc_length", what), what + ".arc_length");
    e.min_radius = as_number(field(x, "min_radius", what), what + ".min_radius");
    e.mean_radius = as_number(field(x, "mean_radius", what), what + ".mean_radius");
  }

  auto g = model::make_graph(std::move(nodes), std::move(edges));
  if (const auto it = j.find("components"); it != j.end())
  {
    std::set<std::vector<int>> given;
    for (const auto& c : as_array(*it, "graph.components"))
    {
      std::vector<int> ids;
      for (const auto& id : as_array(c, "graph.components[]"))
        ids.push_back(static_cast<int>(as_integer(id, "graph.components[]")));
      std::sort(ids.begin(), ids.end());
      given.insert(ids);
    }
    const std::set<std::vector<int>> actual(g.components.begin(), g.components.end());
    if (given != actual)
      bad("graph.components", "does not match the edge connectivity");
  }
  return g;
}

//==============================================================================
json to_json(const phantom::PhantomSpec& spec)
{
  json tree = json::array();
  for (const auto& s : spec.tree)
    tree.push_back({{"start", to_json(s.start)}, {"end", to_json(s.end)}, {"radius", s.radius},
      {"label", s.label}, {"control_points", points_to_json(s.control_points)}});
  json occ = json::array();
  for (const auto& o : spec.occlusions)
    occ.push_back({{"label", o.label}, {"fraction_start", o.fraction_start},
      {"fraction_end", o.fraction_end}});
  return {{"tree", tree}, {"background_hu", spec.background_hu}, {"vessel_hu", spec.vessel_hu},
    {"noise_sigma", spec.noise_sigma}, {"occlusions", occ},
    {"dims", {spec.dims.z, spec.dims.y, spec.dims.x}}, {"spacing", to_json(spec.spacing)},
    {"origin", to_json(spec.origin)}};
}

phantom::Occlusion occlusion_from_json(const json& j)
{
  phantom::Occlusion o;
  for_keys(j, "occlusion", [&](const std::string& k, const json& v)
  {
    if (k == "label")
      o.label = as_string(v, "occlusion.label");
    else if (k == "fraction_start")
      o.fraction_start = as_number(v, "occlusion.fraction_start");
    else if (k == "fraction_end")
      o.fraction_end = as_number(v, "occlusion.fraction_end");
    else
      return false;
    return true;
  });
  if (o.label.empty())
    bad("occlusion.label", "missing");
  return o;
}

phantom::PhantomSpec phantom_spec_from_json(const json& j)
{
  phantom::PhantomSpec spec;
  for_keys(j, "phantom", [&](const std::string& k, const json& v)
  {
    if (k == "tree")
    {
      for (std::size_t i = 0; i < as_array(v, "tree").size(); ++i)
      {
        const std::string what = "tree[" + std::to_string(i) + "]";
        phantom::Segment s;
        s.start = vec3_from_json(field(v[i], "start", what), what + ".start");
        s.end = vec3_from_json(field(v[i], "end", what), what + ".end");
        s.radius = as_number(field(v[i], "radius", what), what + ".radius");
        if (const auto it = v[i].find("label"); it != v[i].end())
          s.label = as_string(*it, what + ".label");
        if (const auto it = v[i].find("control_points"); it != v[i].end())
          s.control_points = points_from_json(*it, what + ".control_points");
        spec.tree.push_back(std::move(s));
      }
    }
    else if (k == "background_hu")
      spec.background_hu = as_number(v, k);
    else if (k == "vessel_hu")
      spec.vessel_hu = as_number(v, k);
    else if (k == "noise_sigma")
      spec.noise_sigma = as_number(v, k);
    else if (k == "occlusions")
    {
      for (const auto& o : as_array(v, k))
        spec.occlusions.push_back(occlusion_from_json(o));
    }
    else if (k == "dims")
    {
      if (!v.is_array() || v.size() != 3)
        bad("dims", "expected [z, y, x]");
      spec.dims = {as_integer(v[0], "dims"), as_integer(v[1], "dims"), as_integer(v[2], "dims")};
    }
    else if (k == "spacing")
      spec.spacing = vec3_from_json(v, "spacing");
    else if (k == "origin")
      spec.origin = vec3_from_json(v, "origin");
    else
      return false;
    return true;
  });
  spec.validate();
  return spec;
}

json to_json(const phantom::PhantomGroundTruth& truth)
{
  json lines = json::object();
  for (const auto& [label, samples] : truth.centerlines)
  {
    json a = json::array();
    for (const auto& s : samples)
      a.push_back({{"pos", to_json(s.position)}, {"radius", s.radius}, {"occluded", s.occluded}});
    lines[label] = a;
  }
  const Dims& d = truth.mask.dims();
  return {{"occluded_labels", truth.occluded_labels}, {"centerlines", lines},
    {"mask_voxels", count_set(truth.mask)}, {"dims", {d.z, d.y, d.x}},
    {"spacing", to_json(truth.mask.spacing())}};
}

//==============================================================================
json to_json(const labeling::MarkerChain& chain)
{
  json markers = json::array();
  for (const auto& m : chain.markers)
    markers.push_back({{"pos", to_json(m.position)}, {"max_dist", m.max_allowed_distance}});
  return {{"vessel", labeling::to_string(chain.vessel)}, {"markers", markers},
    {"required_present_count", chain.required_present_count},
    {"slope_enabled", chain.slope_enabled}, {"slope_threshold", chain.slope_threshold}};
}

labeling::MarkerChain chain_from_json(const json& j)
{
  labeling::MarkerChain c;
  const std::string name = as_string(field(j, "vessel", "chain"), "chain.vessel");
  const auto vessel = labeling::parse_vessel(name);
  if (!vessel)
    bad("chain.vessel", "unknown vessel '" + name + "'");
  c.vessel = *vessel;
  const std::string what = "chain " + name;
  const json& markers = as_array(field(j, "markers", what), what + ".markers");
  for (std::size_t i = 0; i < markers.size(); ++i)
  {
    const std::string mw = what + ".markers[" + std::to_string(i) + "]";
    c.markers.push_back({vec3_from_json(field(markers[i], "pos", mw), mw + ".pos"),
      as_number(field(markers[i], "max_dist", mw), mw + ".max_dist")});
  }
  c.required_present_count = static_cast<int>(
    as_integer(field(j, "required_present_count", what), what + ".required_present_count"));
  if (const auto it = j.find("slope_enabled"); it != j.end())
    c.slope_enabled = as_bool(*it, what + ".slope_enabled");
  if (const auto it = j.find("slope_threshold"); it != j.end())
    c.slope_threshold = as_number(*it, what + ".slope_threshold");
  c.validate();
  return c;
}

json chains_to_json(std::span<const labeling::MarkerChain> chains)
{
  json a = json::array();
  for (const auto& c : chains)
    a.push_back(to_json(c));
  return a;
}

std::vector<labeling::MarkerChain> chains_from_json(const json& j)
{
  const json& list = j.is_object() ? field(j, "chains", "chains file") : j;
  std::vector<labeling::MarkerChain> out;
  for (const auto& c : as_array(list, "chains"))
    out.push_back(chain_from_json(c));
  return out;
}

json to_json(const labeling::VesselVerdict& v)
{
  json distances = json::array();
  for (const double d : v.distances)
    distances.push_back(number(d));
  return {{"vessel", labeling::to_string(v.vessel)}, {"present", v.present},
    {"distances", distances}, {"markers_within", v.markers_within},
    {"final_marker_position", v.final_marker_position ? to_json(*v.final_marker_position) : json(nullptr)},
    {"slope", v.slope ? number(*v.slope) : json(nullptr)},
    {"reason", labeling::to_string(v.reason)}};
}

json to_json(const labeling::LvoVerdict& v)
{
  json implicated = json::array();
  for (const auto vessel : v.implicated)
    implicated.push_back(labeling::to_string(vessel));
  return {{"lvo_positive", v.lvo_positive}, {"implicated", implicated}};
}

json labels_to_json(std::span<const labeling::VesselVerdict> verdicts, const labeling::LvoVerdict& lvo)
{
  json a = json::array();
  int present = 0;
  for (const auto& v : verdicts)
  {
    a.push_back(to_json(v));
    present += v.present;
  }
  return {{"verdicts", a}, {"lvo", to_json(lvo)}, {"present_count", present},
    {"vessel_count", verdicts.size()}};
}

//==============================================================================
json to_json(const pipeline::PipelineConfig& cfg)
{
  const auto& h = cfg.hough;
  return {
    {"frangi_scales", cfg.frangi_scales},
    {"frangi_alpha", cfg.frangi_alpha},
    {"frangi_beta", cfg.frangi_beta},
    {"atlas_t1", cfg.atlas_t1},
    {"atlas_dilation", cfg.atlas_dilation},
    {"t2", cfg.t2},
    {"hough", {
      {"canny_threshold", h.canny_threshold},
      {"accumulator_threshold", h.accumulator_threshold},
      {"min_distance", h.min_distance},
      {"min_radius", h.min_radius},
      {"max_radius", h.max_radius}}},
    {"region_tolerance", cfg.region_tolerance},
    {"window_lo", cfg.window_lo},
    {"window_hi", cfg.window_hi},
    {"closing_radius", cfg.closing_radius}};
}

pipeline::PipelineConfig config_from_json(const json& j)
{
  pipeline::PipelineConfig cfg;
  for_keys(j, "config", [&](const std::string& k, const json& v)
  {
    const std::string what = "config." + k;
    if (k == "frangi_scales")
    {
      cfg.frangi_scales.clear();
      for (const auto& s : as_array(v, what))
        cfg.frangi_scales.push_back(as_number(s, what));
    }
    else if (k == "frangi_alpha")
      cfg.frangi_alpha = as_number(v, what);
    else if (k == "frangi_beta")
      cfg.frangi_beta = as_number(v, what);
    else if (k == "atlas_t1")
      cfg.atlas_t1 = as_number(v, what);
    else if (k == "atlas_dilation")
    {
      if (!v.is_array() || v.size() != 3)
        bad(what, "expected [z, y, x]");
      for (int a = 0; a < 3; ++a)
        cfg.atlas_dilation[a] = static_cast<int>(as_integer(v[a], what));
    }
    else if (k == "t2")
      cfg.t2 = as_number(v, what);
    else if (k == "hough")
      for_keys(v, what, [&](const std::string& hk, const json& hv)
      {
        const std::string hw = what + "." + hk;
        auto& h = cfg.hough;
        if (hk == "canny_threshold")
          h.canny_threshold = as_number(hv, hw);
        else if (hk == "accumulator_threshold")
          h.accumulator_threshold = as_number(hv, hw);
        else if (hk == "min_distance")
          h.min_distance = as_number(hv, hw);
        else if (hk == "min_radius")
          h.min_radius = static_cast<int>(as_integer(hv, hw));
        else if (hk == "max_radius")
          h.max_radius = static_cast<int>(as_integer(hv, hw));
        else
          return false;
        return true;
      });
    else if (k == "region_tolerance")
      cfg.region_tolerance = as_number(v, what);
    else if (k == "window_lo")
      cfg.window_lo = as_number(v, what);
    else if (k == "window_hi")
      cfg.window_hi = as_number(v, what);
    else if (k == "closing_radius")
      cfg.closing_radius = static_cast<int>(as_integer(v, what));
    else
      return false;
    return true;
  });
  return cfg;
}

//==============================================================================
json to_json(const search::PathResult& p)
{
  return {{"reachable", p.reachable}, {"nodes", p.nodes}, {"edges", p.edges},
    {"total_cost", number(p.total_cost)}, {"arc_length", p.arc_length},
    {"directions", points_to_json(p.directions)}, {"nodes_expanded", p.nodes_expanded}};
}

json to_json(const search::VisibleSet& v)
{
  json edges = json::array();
  for (const auto& e : v.edges)
    edges.push_back({{"edge", e.edge}, {"fraction", e.fraction}, {"anchor", e.anchor}});
  return {{"nodes", v.nodes}, {"edges", edges}};
}

json to_json(const search::CacheStats& s)
{
  return {{"nodes_expanded", s.nodes_expanded}, {"wall_time_ms", s.wall_time_ms}};
}

json to_json(std::span<const search::ProximityHit> hits)
{
  json a = json::array();
  for (const auto& h : hits)
    a.push_back({{"node", h.node}, {"cost_a", h.cost_a}, {"cost_b", h.cost_b}});
  return a;
}

json to_json(std::span<const search::EdgeDirection> dirs)
{
  json a = json::array();
  for (const auto& d : dirs)
    a.push_back({{"edge", d.edge}, {"neighbour", d.neighbour}, {"direction", to_json(d.direction)},
      {"toward_root", d.toward_root}});
  return a;
}

} // namespace angio::io
