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

// Parallel kernels against their serial reference versions, and A* against
// Dijkstra on vessel-like graphs.

#include <angio/kernels/reference.hpp>
#include <angio/phantom.hpp>
#include <angio/search.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace angio;

namespace {

Volume tube_volume(std::int64_t n)
{
  phantom::PhantomSpec s;
  s.dims = {n, n, n};
  const double c = 0.5 * static_cast<double>(n - 1);
  s.tree.push_back({{-1.0, c, c}, {static_cast<double>(n), c, c}, 2.5, "T", {}});
  s.noise_sigma = 10.0;
  return phantom::render_phantom(s, 1).volume;
}

BinaryMask sparse_mask(std::int64_t n)
{
  BinaryMask m(Geometry{{n, n, n}});
  std::mt19937_64 rng(3);
  std::bernoulli_distribution set(0.002);
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = set(rng);
  return m;
}

template<auto Fn>
void bm_hessian(benchmark::State& state)
{
  const Volume v = tube_volume(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(v, 1.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

template<auto Fn>
void bm_vesselness(benchmark::State& state)
{
  const auto h = kernels::gaussian_hessian(tube_volume(state.range(0)), 1.0);
  const kernels::VesselnessParams p;
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(h, p));
}

template<auto Fn>
void bm_dilate(benchmark::State& state)
{
  const BinaryMask m = sparse_mask(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(m, {5, 3, 3}));
}

template<auto Fn>
void bm_distance(benchmark::State& state)
{
  const BinaryMask m = sparse_mask(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(m, false));
}

template<auto Fn>
void bm_point_to_point(benchmark::State& state)
{
  const search::SearchGraph g(search::random_vessel_graph(static_cast<int>(state.range(0)), 1));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(g.node_count()) - 1);
  std::size_t expanded = 0;
  for (auto _ : state)
  {
    const auto p = Fn(g, 0, pick(rng));
    expanded += p.nodes_expanded;
    benchmark::DoNotOptimize(p.total_cost);
  }
  state.counters["expanded"] = benchmark::Counter(static_cast<double>(expanded),
    benchmark::Counter::kAvgIterations);
}

} // anonymous namespace

BENCHMARK(bm_hessian<kernels::gaussian_hessian>)->Name("hessian/parallel")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_hessian<kernels::reference::gaussian_hessian>)->Name("hessian/serial")->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_vesselness<kernels::vesselness>)->Name("vesselness/parallel")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_vesselness<kernels::reference::vesselness>)->Name("vesselness/serial")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_dilate<kernels::box_dilate>)->Name("dilate/parallel")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_dilate<kernels::reference::box_dilate>)->Name("dilate/serial")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_distance<kernels::squared_distance_to>)->Name("distance/parallel")->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_distance<kernels::reference::squared_distance_to>)->Name("distance/serial")->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_point_to_point<search::astar_path>)->Name("path/astar")->Arg(500)->Arg(2000);
BENCHMARK(bm_point_to_point<search::dijkstra_path>)->Name("path/dijkstra")->Arg(500)->Arg(2000);

BENCHMARK_MAIN();
