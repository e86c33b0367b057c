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

// angio: command-line front end (phantom, pipeline, model, search, label,
// serve).

#include <angio/core/vvol.hpp>
#include <angio/io.hpp>
#include <angio/labeling.hpp>
#include <angio/model.hpp>
#include <angio/phantom.hpp>
#include <angio/pipeline.hpp>
#include <angio/search.hpp>
#include <angio/service.hpp>

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

using namespace angio;

namespace {

Volume load_volume(const std::string& path)
{
  try
  {
    return vvol::read_volume(path);
  }
  catch (const ValidationError& e)
  {
    throw ValidationError(path + ": " + e.what());
  }
}

BinaryMask load_mask(const std::string& path)
{
  try
  {
    return vvol::read_mask(path);
  }
  catch (const ValidationError& e)
  {
    throw ValidationError(path + ": " + e.what());
  }
}

phantom::Occlusion parse_occlusion(const std::string& text)
{
  // LABEL:START:END
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw ValidationError("--occlude expects LABEL:START:END, got '" + text + "'");
  try
  {
    return {text.substr(0, a), std::stod(text.substr(a + 1, b - a - 1)), std::stod(text.substr(b + 1))};
  }
  catch (const std::logic_error&)
  {
    throw ValidationError("--occlude expects numeric fractions, got '" + text + "'");
  }
}

//==============================================================================
struct PhantomArgs
{
  std::string spec;
  bool standard = false;
  std::vector<std::string> occlude;
  std::uint64_t seed = 1;
  std::optional<double> noise;
  std::string out, truth, truth_mask, atlas, chains;
  std::string dtype = "float32";
};

int phantom_generate(const PhantomArgs& a)
{
  std::vector<phantom::Occlusion> occlusions;
  for (const auto& o : a.occlude)
    occlusions.push_back(parse_occlusion(o));

  phantom::PhantomSpec spec;
  Volume volume(Geometry{{1, 1, 1}});
  phantom::PhantomGroundTruth truth{BinaryMask(Geometry{{1, 1, 1}}), {}, {}};
  Volume atlas(Geometry{{1, 1, 1}});
  std::vector<labeling::MarkerChain> chains;

  if (a.spec.empty())
  {
    auto cow = phantom::standard_cow_phantom(a.seed, occlusions, a.noise.value_or(10.0));
    spec = cow.spec;
    volume = std::move(cow.volume);
    truth = std::move(cow.truth);
    atlas = std::move(cow.atlas);
    chains = std::move(cow.chains);
  }
  else
  {
    spec = io::phantom_spec_from_json(io::read_json(a.spec));
    spec.occlusions.insert(spec.occlusions.end(), occlusions.begin(), occlusions.end());
    if (a.noise)
      spec.noise_sigma = *a.noise;
    auto p = phantom::render_phantom(spec, a.seed);
    volume = std::move(p.volume);
    truth = std::move(p.truth);
    if (!a.atlas.empty())
      atlas = phantom::atlas_probability(spec);
    if (!a.chains.empty())
      chains = phantom::marker_chains_for(spec);
  }

  vvol::write(a.out, volume, a.dtype == "int16" ? vvol::DType::int16 : vvol::DType::float32);
  if (!a.truth.empty())
    io::write_json(a.truth, io::to_json(truth));
  if (!a.truth_mask.empty())
    vvol::write(a.truth_mask, truth.mask);
  if (!a.atlas.empty())
    vvol::write(a.atlas, atlas, vvol::DType::float32);
  if (!a.chains.empty())
    io::write_json(a.chains, io::chains_to_json(chains));

  std::cout << "phantom: dims " << volume.dims().z << "x" << volume.dims().y << "x"
    << volume.dims().x << ", vessel voxels " << count_set(truth.mask)
    << ", occluded " << truth.occluded_labels.size() << "\n";
  return 0;
}

//==============================================================================
struct PipelineArgs
{
  std::string in, atlas, config, out_final, out_stageh;
};

int pipeline_run(const PipelineArgs& a)
{
  const Volume v = load_volume(a.in);
  const Volume atlas = load_volume(a.atlas);
  pipeline::PipelineConfig cfg;
  if (!a.config.empty())
    cfg = io::config_from_json(io::read_json(a.config));
  const auto r = pipeline::run_pipeline(v, atlas, cfg);
  vvol::write(a.out_final, r.final_mask);
  if (!a.out_stageh.empty())
    vvol::write(a.out_stageh, r.stage_h);
  std::cout << "pipeline: hough centres " << r.seeds.raw_count << " raw, "
    << r.seeds.seeds.size() << " on support; stage h " << count_set(r.stage_h)
    << " voxels; final " << count_set(r.final_mask) << " voxels, "
    << count_components(r.final_mask) << " component(s)\n";
  return 0;
}

//==============================================================================
struct ModelArgs
{
  std::string mask, out_graph, out_mesh;
};

int model_build(const ModelArgs& a)
{
  const auto m = model::build_model(load_mask(a.mask));
  io::write_json(a.out_graph, io::to_json(m.graph));
  if (!a.out_mesh.empty())
  {
    std::ofstream out(a.out_mesh);
    if (!out)
      throw Error("cannot create " + a.out_mesh);
    model::write_mesh(out, m.surface);
  }
  std::cout << "model: " << m.graph.nodes.size() << " nodes, " << m.graph.edges.size()
    << " edges, " << m.graph.components.size() << " component(s); mesh "
    << m.surface.vertices.size() << " vertices, " << m.surface.triangles.size() << " triangles\n";
  return 0;
}

//==============================================================================
struct BenchArgs
{
  std::string graph;
  int random = 0;
  std::uint64_t seed = 1;
  int root = 0;
  int repeat = 100;
  int targets = 0;
  bool json = false;
};

int search_bench(const BenchArgs& a)
{
  if (a.repeat < 1)
    throw ValidationError("--repeat must be >= 1");
  model::SkeletonGraph graph = a.graph.empty()
    ? search::random_vessel_graph(a.random, a.seed)
    : io::graph_from_json(io::read_json(a.graph));
  const search::SearchGraph g(std::move(graph));
  g.require_node(a.root);

  // Point-to-point queries from the root to its component (optionally a
  // seeded sample), as a full cache build would issue them.
  const auto& members = g.graph().components[g.graph().component_of[a.root]];
  std::vector<int> targets;
  std::copy_if(members.begin(), members.end(), std::back_inserter(targets),
    [&](int n) { return n != a.root; });
  if (a.targets > 0 && static_cast<std::size_t>(a.targets) < targets.size())
  {
    std::mt19937_64 rng(a.seed);
    std::shuffle(targets.begin(), targets.end(), rng);
    targets.resize(a.targets);
    std::sort(targets.begin(), targets.end());
  }

  struct Row
  {
    const char* name;
    search::PathResult (*fn)(const search::SearchGraph&, int, int);
    double mean_ms = 0.0;
    std::size_t expanded = 0;
    double cost = 0.0;
  };
  Row rows[] = {{"astar", search::astar_path}, {"dijkstra", search::dijkstra_path}};
  for (Row& row : rows)
  {
    double total = 0.0;
    for (int rep = 0; rep < a.repeat; ++rep)
    {
      std::size_t expanded = 0;
      double cost = 0.0;
      const auto t0 = std::chrono::steady_clock::now();
      for (const int t : targets)
      {
        const auto p = row.fn(g, a.root, t);
        expanded += p.nodes_expanded;
        cost += p.total_cost;
      }
      total += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      row.expanded = expanded;
      row.cost = cost;
    }
    row.mean_ms = total / a.repeat;
  }

  if (a.json)
  {
    io::json out = {{"nodes", g.node_count()}, {"root", a.root}, {"targets", targets.size()},
      {"repeat", a.repeat}};
    for (const Row& row : rows)
      out[row.name] = {{"mean_ms", row.mean_ms}, {"expanded", row.expanded}, {"cost_sum", row.cost}};
    out["time_ratio"] = rows[0].mean_ms / rows[1].mean_ms;
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "graph: " << g.node_count() << " nodes, root " << a.root << ", "
    << targets.size() << " targets, " << a.repeat << " repetitions\n";
  for (const Row& row : rows)
    std::cout << row.name << ": mean " << row.mean_ms << " ms, expanded " << row.expanded
      << " nodes per run\n";
  std::cout << "astar/dijkstra time ratio: " << rows[0].mean_ms / rows[1].mean_ms << "\n";
  return 0;
}

//==============================================================================
struct LabelArgs
{
  std::string mask, chains, out;
  bool include_posterior = false;
};

int label_run(const LabelArgs& a)
{
  const BinaryMask mask = load_mask(a.mask);
  const auto chains = io::chains_from_json(io::read_json(a.chains));
  const auto verdicts = labeling::judge_all(chains, mask);
  labeling::LvoRule rule;
  rule.include_posterior = a.include_posterior;
  for (const auto& c : chains)
    rule.required.push_back(c.vessel);
  const auto lvo = labeling::classify_lvo(verdicts, rule);
  const auto doc = io::labels_to_json(verdicts, lvo);
  if (!a.out.empty())
    io::write_json(a.out, doc);

  for (const auto& v : verdicts)
  {
    std::cout << labeling::to_string(v.vessel) << ": " << (v.present ? "present" : "absent")
      << " (" << v.markers_within << "/" << v.distances.size() << " markers, "
      << labeling::to_string(v.reason);
    if (v.slope)
      std::cout << ", slope " << *v.slope;
    std::cout << ")\n";
  }
  std::cout << "vessels present: " << doc["present_count"].get<int>() << "/" << verdicts.size() << "\n";
  std::cout << "lvo_positive: " << (lvo.lvo_positive ? "true" : "false");
  for (const auto v : lvo.implicated)
    std::cout << " " << labeling::to_string(v);
  std::cout << "\n";
  return 0;
}

//==============================================================================
struct ServeArgs
{
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model_dir;
  std::vector<std::uint64_t> preload;
};

int serve(const ServeArgs& a)
{
  service::ServiceOptions options;
  if (!a.model_dir.empty())
    options.model_dir = a.model_dir;
  service::Service svc(options);
  for (const auto seed : a.preload)
  {
    const auto id = svc.create_session({{"phantom", {{"seed", seed}}}});
    std::cout << "preloaded phantom seed " << seed << " as session " << id << "\n";
  }
  httplib::Server server;
  svc.bind(server);
  std::cout << "serving on http://" << a.host << ":" << a.port << "/v1 ("
    << svc.session_ids().size() << " session(s))" << std::endl;
  if (!server.listen(a.host, a.port))
    throw Error("cannot listen on " + a.host + ":" + std::to_string(a.port));
  return 0;
}

} // anonymous namespace

//==============================================================================
int main(int argc, char** argv)
{
  CLI::App app{"angio: vessel tree segmentation, modelling and graph search"};
  app.require_subcommand(1);
  std::function<int()> run;

  auto* phantom_cmd = app.add_subcommand("phantom", "Synthetic phantoms")->require_subcommand(1);
  PhantomArgs pa;
  auto* gen = phantom_cmd->add_subcommand("generate", "Render a phantom volume with ground truth");
  auto* spec_opt = gen->add_option("--spec", pa.spec, "Phantom spec JSON")->check(CLI::ExistingFile);
  gen->add_flag("--standard", pa.standard, "Standard arterial-circle phantom (default)")->excludes(spec_opt);
  gen->add_option("--occlude", pa.occlude, "Occlusion LABEL:START:END (repeatable)");
  gen->add_option("--seed", pa.seed, "Noise seed");
  gen->add_option("--noise", pa.noise, "Noise sigma (HU)");
  gen->add_option("--out", pa.out, "Output volume (.vvol)")->required();
  gen->add_option("--truth", pa.truth, "Ground truth JSON");
  gen->add_option("--truth-mask", pa.truth_mask, "Ground truth mask (.vvol)");
  gen->add_option("--atlas", pa.atlas, "Atlas probability volume (.vvol)");
  gen->add_option("--chains", pa.chains, "Marker chains JSON");
  gen->add_option("--dtype", pa.dtype, "Voxel type")->check(CLI::IsMember({"int16", "float32"}));
  gen->callback([&] { run = [&] { return phantom_generate(pa); }; });

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Segmentation")->require_subcommand(1);
  PipelineArgs pl;
  auto* prun = pipeline_cmd->add_subcommand("run", "Segment a volume");
  prun->add_option("--in", pl.in, "Input volume (.vvol)")->required()->check(CLI::ExistingFile);
  prun->add_option("--atlas", pl.atlas, "Atlas probability (.vvol)")->required()->check(CLI::ExistingFile);
  prun->add_option("--config", pl.config, "Parameter JSON")->check(CLI::ExistingFile);
  prun->add_option("--out-final", pl.out_final, "Final mask (.vvol)")->required();
  prun->add_option("--out-stageh", pl.out_stageh, "Atlas-restricted seeded mask (.vvol)");
  prun->callback([&] { run = [&] { return pipeline_run(pl); }; });

  auto* model_cmd = app.add_subcommand("model", "Vessel models")->require_subcommand(1);
  ModelArgs ma;
  auto* mbuild = model_cmd->add_subcommand("build", "Skeleton graph and surface from a mask");
  mbuild->add_option("--mask", ma.mask, "Mask (.vvol)")->required()->check(CLI::ExistingFile);
  mbuild->add_option("--out-graph", ma.out_graph, "Graph JSON")->required();
  mbuild->add_option("--out-mesh", ma.out_mesh, "Surface mesh text");
  mbuild->callback([&] { run = [&] { return model_build(ma); }; });

  auto* search_cmd = app.add_subcommand("search", "Graph search")->require_subcommand(1);
  BenchArgs ba;
  auto* bench = search_cmd->add_subcommand("bench", "Compare A* and Dijkstra point-to-point queries");
  auto* graph_opt = bench->add_option("--graph", ba.graph, "Graph JSON")->check(CLI::ExistingFile);
  bench->add_option("--random", ba.random, "Use a random vessel graph with N nodes")
    ->excludes(graph_opt)->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "Random graph / target sample seed");
  bench->add_option("--root", ba.root, "Root node");
  bench->add_option("--repeat", ba.repeat, "Repetitions");
  bench->add_option("--targets", ba.targets, "Sample this many targets (0: whole component)");
  bench->add_flag("--json", ba.json, "Print JSON");
  bench->callback([&]
  {
    if (ba.graph.empty() && ba.random == 0)
      throw CLI::ValidationError("search bench", "needs --graph or --random");
    run = [&] { return search_bench(ba); };
  });

  auto* label_cmd = app.add_subcommand("label", "Vessel labeling")->require_subcommand(1);
  LabelArgs la;
  auto* lrun = label_cmd->add_subcommand("run", "Judge marker chains against a mask");
  lrun->add_option("--mask", la.mask, "Stage h mask (.vvol)")->required()->check(CLI::ExistingFile);
  lrun->add_option("--chains", la.chains, "Marker chains JSON")->required()->check(CLI::ExistingFile);
  lrun->add_option("--out", la.out, "Verdicts JSON");
  lrun->add_flag("--include-posterior", la.include_posterior, "Count PCA occlusions as LVO");
  lrun->callback([&] { run = [&] { return label_run(la); }; });

  ServeArgs sa;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API under /v1");
  serve_cmd->add_option("--host", sa.host, "Bind address");
  serve_cmd->add_option("--port", sa.port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--model-dir", sa.model_dir, "Session persistence directory");
  serve_cmd->add_option("--preload-phantom", sa.preload, "Build a phantom session at startup (seed)");
  serve_cmd->callback([&] { run = [&] { return serve(sa); }; });

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    return app.exit(e);
  }

  try
  {
    return run();
  }
  catch (const StageError& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  catch (const ValidationError& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
