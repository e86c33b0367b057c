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

#include <angio/service.hpp>
#include <angio/core/vvol.hpp>
#include <angio/phantom.hpp>
#include <angio/pipeline.hpp>

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace angio::service {

namespace {

/// An error carrying its HTTP status.
struct HttpError : Error
{
  HttpError(int s, const std::string& what) : Error(what), status(s) {}
  int status;
};

void reply(httplib::Response& res, int status, const io::json& body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f)
{
  return [f](const httplib::Request& req, httplib::Response& res)
  {
    try
    {
      f(req, res);
    }
    catch (const HttpError& e)
    {
      reply(res, e.status, {{"error", e.what()}});
    }
    catch (const StageError& e)
    {
      reply(res, 422, {{"error", e.what()}, {"stage", e.stage()}});
    }
    catch (const ValidationError& e)
    {
      reply(res, 422, {{"error", e.what()}});
    }
    catch (const std::exception& e)
    {
      reply(res, 500, {{"error", e.what()}});
    }
  };
}

const std::string& query(const httplib::Request& req, const char* key)
{
  const auto it = req.params.find(key);
  if (it == req.params.end())
    throw HttpError(422, std::string("missing query parameter '") + key + "'");
  return it->second;
}

int query_int(const httplib::Request& req, const char* key)
{
  const std::string& s = query(req, key);
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw HttpError(422, std::string("query parameter '") + key + "' must be an integer");
  return v;
}

double parse_double(const std::string& s, const std::string& key)
{
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(v))
    throw HttpError(422, "parameter '" + key + "' must be a number");
  return v;
}

double query_double(const httplib::Request& req, const char* key, std::optional<double> fallback = {})
{
  if (fallback && !req.has_param(key))
    return *fallback;
  return parse_double(query(req, key), key);
}

void require_node(const Session& s, int node)
{
  if (node < 0 || static_cast<std::size_t>(node) >= s.graph()->node_count())
    throw HttpError(404, "unknown node id " + std::to_string(node));
}

std::shared_ptr<const search::SearchCache> require_active(const Session& s)
{
  auto c = s.active();
  if (!c)
    throw HttpError(409, "no root selected: POST /v1/sessions/{id}/root first");
  return c;
}

io::json labels_for(const BinaryMask& stage_h, std::span<const labeling::MarkerChain> chains)
{
  const auto verdicts = labeling::judge_all(chains, stage_h);
  return io::labels_to_json(verdicts, labeling::classify_lvo(verdicts));
}

/// Accepts an inline JSON value or a path to a JSON file.
io::json inline_or_file(const io::json& v)
{
  return v.is_string() ? io::read_json(v.get<std::string>()) : v;
}

std::string mesh_to_text(const model::SurfaceMesh& m)
{
  std::ostringstream s;
  model::write_mesh(s, m);
  return s.str();
}

} // anonymous namespace

//==============================================================================
Session::Session(std::string id, model::SkeletonGraph graph,
  std::optional<model::SurfaceMesh> mesh, std::optional<io::json> labels)
: _id(std::move(id)),
  _graph(std::make_shared<const search::SearchGraph>(std::move(graph))),
  _graph_json(io::to_json(_graph->graph()).dump()),
  _labels(std::move(labels))
{
  if (mesh)
    _mesh_text = mesh_to_text(*mesh);
}

std::shared_ptr<const search::SearchCache> Session::find_cache(int root,
  search::Criterion criterion) const
{
  std::lock_guard lock(_mutex);
  const auto it = _caches.find({root, criterion});
  return it == _caches.end() ? nullptr : it->second;
}

std::shared_ptr<const search::SearchCache> Session::cache(int root, search::Criterion criterion,
  bool* built)
{
  if (built)
    *built = false;
  if (auto c = find_cache(root, criterion))
    return c;

  std::lock_guard build(_build_mutex);
  if (auto c = find_cache(root, criterion))
    return c;
  auto c = std::make_shared<const search::SearchCache>(search::build_cache(_graph, root, criterion));
  _expansions += c->stats().nodes_expanded;
  if (built)
    *built = true;
  std::lock_guard lock(_mutex);
  _caches[{root, criterion}] = c;
  return c;
}

void Session::set_active(std::shared_ptr<const search::SearchCache> cache)
{
  std::lock_guard lock(_mutex);
  _active = std::move(cache);
}

std::shared_ptr<const search::SearchCache> Session::active() const
{
  std::lock_guard lock(_mutex);
  return _active;
}

io::json Session::stats() const
{
  const auto& g = _graph->graph();
  io::json caches = io::json::array();
  io::json active = nullptr;
  {
    std::lock_guard lock(_mutex);
    for (const auto& [key, c] : _caches)
      caches.push_back({{"root", key.first}, {"criterion", search::to_string(key.second)},
        {"stats", io::to_json(c->stats())}});
    if (_active)
      active = {{"root", _active->root()}, {"criterion", search::to_string(_active->criterion())}};
  }
  return {{"id", _id}, {"nodes", g.nodes.size()}, {"edges", g.edges.size()},
    {"components", g.components.size()}, {"main_component", g.main_component},
    {"mesh_available", _mesh_text.has_value()}, {"labels_available", _labels.has_value()},
    {"expansions_total", expansions_total()}, {"caches", caches}, {"active", active}};
}

//==============================================================================
Service::Service(ServiceOptions options)
: _options(std::move(options))
{
  if (_options.model_dir)
    load_model_dir();
}

std::shared_ptr<Session> Service::find(const std::string& id) const
{
  std::shared_lock lock(_mutex);
  const auto it = _sessions.find(id);
  return it == _sessions.end() ? nullptr : it->second;
}

std::vector<std::string> Service::session_ids() const
{
  std::shared_lock lock(_mutex);
  std::vector<std::string> ids;
  for (const auto& [id, s] : _sessions)
    ids.push_back(id);
  return ids;
}

std::string Service::publish(model::SkeletonGraph graph, std::optional<model::SurfaceMesh> mesh,
  std::optional<io::json> labels)
{
  std::unique_lock lock(_mutex);
  const std::string id = "s" + std::to_string(_next_id++);
  if (_options.model_dir)
  {
    const auto dir = *_options.model_dir / id;
    std::filesystem::create_directories(dir);
    io::write_json(dir / "graph.json", io::to_json(graph));
    if (mesh)
    {
      std::ofstream out(dir / "mesh.obj");
      model::write_mesh(out, *mesh);
    }
    if (labels)
      io::write_json(dir / "labels.json", *labels);
  }
  _sessions[id] = std::make_shared<Session>(id, std::move(graph), std::move(mesh), std::move(labels));
  return id;
}

void Service::load_model_dir()
{
  const auto& root = *_options.model_dir;
  std::filesystem::create_directories(root);
  for (const auto& entry : std::filesystem::directory_iterator(root))
  {
    const auto dir = entry.path();
    if (!entry.is_directory() || !std::filesystem::exists(dir / "graph.json"))
      continue;
    const std::string id = dir.filename().string();
    auto graph = io::graph_from_json(io::read_json(dir / "graph.json"));
    std::optional<model::SurfaceMesh> mesh;
    if (std::ifstream in(dir / "mesh.obj"); in)
      mesh = model::read_mesh(in);
    std::optional<io::json> labels;
    if (std::filesystem::exists(dir / "labels.json"))
      labels = io::read_json(dir / "labels.json");
    _sessions[id] = std::make_shared<Session>(id, std::move(graph), std::move(mesh), std::move(labels));
    if (id.size() > 1 && id[0] == 's')
    {
      std::size_t n = 0;
      const auto [end, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
      if (ec == std::errc{} && end == id.data() + id.size())
        _next_id = std::max(_next_id, n + 1);
    }
  }
}

//==============================================================================
std::string Service::create_session(const io::json& req)
{
  if (!req.is_object())
    throw ValidationError("session request must be a JSON object");

  pipeline::PipelineConfig cfg;
  if (const auto it = req.find("config"); it != req.end())
    cfg = io::config_from_json(inline_or_file(*it));

  if (const auto it = req.find("phantom"); it != req.end())
  {
    const io::json& p = *it;
    if (!p.is_object())
      throw ValidationError("phantom: expected an object");
    const auto seed = p.value("seed", std::uint64_t{1});
    const double noise = p.value("noise_sigma", 10.0);
    std::vector<phantom::Occlusion> occlusions;
    if (const auto o = p.find("occlusions"); o != p.end())
    {
      if (!o->is_array())
        throw ValidationError("phantom.occlusions: expected an array");
      for (const auto& x : *o)
        occlusions.push_back(io::occlusion_from_json(x));
    }
    const auto cow = phantom::standard_cow_phantom(seed, occlusions, noise);
    const auto result = pipeline::run_pipeline(cow.volume, cow.atlas, cfg);
    auto m = model::build_model(result.final_mask);
    return publish(std::move(m.graph), std::move(m.surface), labels_for(result.stage_h, cow.chains));
  }

  if (const auto it = req.find("volume"); it != req.end())
  {
    const auto atlas_it = req.find("atlas");
    if (!it->is_string() || atlas_it == req.end() || !atlas_it->is_string())
      throw ValidationError("volume sessions need 'volume' and 'atlas' file paths");
    const Volume v = vvol::read_volume(it->get<std::string>());
    const Volume atlas = vvol::read_volume(atlas_it->get<std::string>());
    const auto result = pipeline::run_pipeline(v, atlas, cfg);
    auto m = model::build_model(result.final_mask);
    std::optional<io::json> labels;
    if (const auto c = req.find("chains"); c != req.end())
    {
      const auto chains = io::chains_from_json(inline_or_file(*c));
      labels = labels_for(result.stage_h, chains);
    }
    return publish(std::move(m.graph), std::move(m.surface), std::move(labels));
  }

  if (const auto it = req.find("mask"); it != req.end())
  {
    if (!it->is_string())
      throw ValidationError("mask: expected a file path");
    auto m = model::build_model(vvol::read_mask(it->get<std::string>()));
    return publish(std::move(m.graph), std::move(m.surface), std::nullopt);
  }

  if (const auto it = req.find("graph"); it != req.end())
    return publish(io::graph_from_json(inline_or_file(*it)), std::nullopt, std::nullopt);

  if (const auto it = req.find("random"); it != req.end())
  {
    const io::json& r = *it;
    if (!r.is_object())
      throw ValidationError("random: expected an object");
    return publish(search::random_vessel_graph(r.value("nodes", 100), r.value("seed", std::uint64_t{1}),
      r.value("components", 1)), std::nullopt, std::nullopt);
  }

  throw ValidationError("session request needs one of: phantom, volume, mask, graph, random");
}

//==============================================================================
void Service::bind(httplib::Server& server)
{
  server.set_default_headers({
    {"Access-Control-Allow-Origin", "*"},
    {"Access-Control-Allow-Headers", "Content-Type"},
    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res)
  {
    res.status = 204;
  });

  auto session = [this](const httplib::Request& req)
  {
    auto s = find(req.matches[1]);
    if (!s)
      throw HttpError(404, "unknown session '" + std::string(req.matches[1]) + "'");
    return s;
  };

  server.Get("/v1/health", guarded([](const httplib::Request&, httplib::Response& res)
  {
    reply(res, 200, {{"status", "ok"}});
  }));

  server.Get("/v1/sessions", guarded([this](const httplib::Request&, httplib::Response& res)
  {
    reply(res, 200, {{"sessions", session_ids()}});
  }));

  server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res)
  {
    io::json body;
    try
    {
      body = io::json::parse(req.body);
    }
    catch (const io::json::parse_error& e)
    {
      throw HttpError(422, std::string("request body is not valid JSON: ") + e.what());
    }
    const std::string id = create_session(body);
    reply(res, 201, find(id)->stats());
  }));

  server.Get(R"(/v1/sessions/([^/]+))", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    reply(res, 200, session(req)->stats());
  }));

  server.Get(R"(/v1/sessions/([^/]+)/stats)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    reply(res, 200, session(req)->stats());
  }));

  server.Get(R"(/v1/sessions/([^/]+)/graph)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    res.set_content(session(req)->graph_json(), "application/json");
  }));

  server.Get(R"(/v1/sessions/([^/]+)/mesh)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    if (!s->mesh_text())
      throw HttpError(404, "session has no surface mesh");
    res.set_content(*s->mesh_text(), "text/plain");
  }));

  server.Post(R"(/v1/sessions/([^/]+)/root)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    io::json body;
    try
    {
      body = io::json::parse(req.body);
    }
    catch (const io::json::parse_error&)
    {
      throw HttpError(422, "request body is not valid JSON");
    }
    if (!body.is_object() || !body.contains("node") || !body["node"].is_number_integer())
      throw HttpError(422, "body needs an integer 'node'");
    const int node = body["node"].get<int>();
    require_node(*s, node);
    auto criterion = search::Criterion::shortest_path;
    if (body.contains("criterion"))
    {
      const auto c = body["criterion"].is_string()
        ? search::parse_criterion(body["criterion"].get<std::string>()) : std::nullopt;
      if (!c)
        throw HttpError(422, "criterion must be shortest_path or widest_path");
      criterion = *c;
    }
    bool built = false;
    const auto cache = s->cache(node, criterion, &built);
    s->set_active(cache);
    reply(res, 200, {{"root", node}, {"criterion", search::to_string(criterion)}, {"built", built},
      {"stats", io::to_json(cache->stats())},
      {"component_roots", std::vector<int>(cache->component_roots().begin(), cache->component_roots().end())},
      {"expansions_total", s->expansions_total()}});
  }));

  server.Get(R"(/v1/sessions/([^/]+)/path)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    const int to = query_int(req, "to");
    const auto cache = require_active(*s);
    require_node(*s, to);
    const bool root_only = req.has_param("root_only") && req.get_param_value("root_only") != "0";
    io::json body = io::to_json(search::path_from_cache(*cache, to, root_only));
    body["root"] = cache->root();
    body["criterion"] = search::to_string(cache->criterion());
    body.erase("nodes_expanded");
    reply(res, 200, body);
  }));

  server.Get(R"(/v1/sessions/([^/]+)/suppression)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    const double d = query_double(req, "d");
    auto cache = require_active(*s);
    if (cache->criterion() != search::Criterion::shortest_path)
    {
      cache = s->find_cache(cache->root(), search::Criterion::shortest_path);
      if (!cache)
        throw HttpError(409, "suppression needs a shortest-path cache for the current root");
    }
    io::json body = io::to_json(search::geodesic_visible_set(*cache, d));
    body["root"] = cache->root();
    body["d"] = d;
    reply(res, 200, body);
  }));

  server.Get(R"(/v1/sessions/([^/]+)/labels)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    if (!s->labels())
      throw HttpError(409, "session has no labels (needs a stage-h mask and marker chains)");
    reply(res, 200, *s->labels());
  }));

  server.Get(R"(/v1/sessions/([^/]+)/dualroot)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    const int a = query_int(req, "a");
    const int b = query_int(req, "b");
    require_node(*s, a);
    require_node(*s, b);
    if (a == b)
      throw HttpError(422, "roots a and b must differ");
    search::ProximityParams params;
    params.band = query_double(req, "band", params.band);
    params.ceiling = query_double(req, "ceiling", params.ceiling);
    const auto ca = s->cache(a, search::Criterion::shortest_path);
    const auto cb = s->cache(b, search::Criterion::shortest_path);
    const auto hits = search::dual_root_proximity(*ca, *cb, params);
    reply(res, 200, {{"a", a}, {"b", b}, {"band", params.band}, {"ceiling", params.ceiling},
      {"nodes", io::to_json(hits)}});
  }));

  server.Get(R"(/v1/sessions/([^/]+)/directions)", guarded([session](const httplib::Request& req, httplib::Response& res)
  {
    const auto s = session(req);
    const int node = query_int(req, "node");
    const auto cache = require_active(*s);
    require_node(*s, node);
    reply(res, 200, {{"node", node}, {"root", cache->root()},
      {"directions", io::to_json(search::edge_directions(*cache, node))}});
  }));
}

} // namespace angio::service
