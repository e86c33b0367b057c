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

#include <angio/pipeline.hpp>

#include <cmath>
#include <vector>

namespace angio::pipeline {

namespace {

/// Joint 26-connected flood fill from `seeds`. A seed that fails `accept` is
/// not grown from.
template <class Accept>
BinaryMask flood(const Dims& d, const Geometry& g, const std::vector<std::size_t>& seeds,
  Accept&& accept)
{
  BinaryMask out(g, 0);
  auto data = out.data();
  std::vector<std::size_t> stack;
  for (const std::size_t s : seeds)
    if (!data[s] && accept(s))
    {
      data[s] = 1;
      stack.push_back(s);
    }

  const auto& nbr = neighbours26();
  while (!stack.empty())
  {
    const std::size_t i = stack.back();
    stack.pop_back();
    const Index3 p = d.unravel(i);
    for (const auto& o : nbr)
    {
      const std::int64_t z = p.z + o[0], y = p.y + o[1], x = p.x + o[2];
      if (!d.contains(z, y, x))
        continue;
      const std::size_t j = d.linear(z, y, x);
      if (!data[j] && accept(j))
      {
        data[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return out;
}

std::vector<std::size_t> seed_indices(const Dims& d, const SeedPointSet& seeds)
{
  if (seeds.seeds.empty())
    throw ValidationError("no seeds");
  std::vector<std::size_t> out;
  out.reserve(seeds.seeds.size());
  for (const SeedPoint& s : seeds.seeds)
  {
    if (!d.contains(s.index))
      throw ValidationError("seed point outside the volume");
    out.push_back(d.linear(s.index));
  }
  return out;
}

} // anonymous namespace

//==============================================================================
BinaryMask region_grow_adaptive(const Volume& v, const SeedPointSet& seeds,
  double rel_tol, const BinaryMask* domain)
{
  if (!(rel_tol > 0.0))
    throw ValidationError("region tolerance must be positive");
  if (domain)
    require_same_geometry(v.geometry(), domain->geometry(), "region growing domain");

  const auto idx = seed_indices(v.dims(), seeds);

  double sum = 0.0;
  for (const std::size_t i : idx)
    sum += v.data()[i];
  const double mu = sum / static_cast<double>(idx.size());
  const double tol = rel_tol * std::abs(mu);

  const auto vals = v.data();
  const std::uint8_t* dom = domain ? domain->data().data() : nullptr;
  return flood(v.dims(), v.geometry(), idx, [&](std::size_t i)
  {
    return (!dom || dom[i]) && std::abs(vals[i] - mu) <= tol;
  });
}

BinaryMask region_grow_window(const Volume& v, const SeedPointSet& seeds, double lo, double hi)
{
  if (!(lo < hi))
    throw ValidationError("window growing: require lo < hi");
  const auto vals = v.data();
  return flood(v.dims(), v.geometry(), seed_indices(v.dims(), seeds),
    [&](std::size_t i) { return vals[i] >= lo && vals[i] <= hi; });
}

BinaryMask region_grow_window(const Volume& v, const BinaryMask& seeds, double lo, double hi)
{
  require_same_geometry(v.geometry(), seeds.geometry(), "window growing seeds");
  if (!(lo < hi))
    throw ValidationError("window growing: require lo < hi");
  std::vector<std::size_t> idx;
  const auto s = seeds.data();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i])
      idx.push_back(i);
  if (idx.empty())
    throw ValidationError("no seeds");
  const auto vals = v.data();
  return flood(v.dims(), v.geometry(), idx,
    [&](std::size_t i) { return vals[i] >= lo && vals[i] <= hi; });
}

} // namespace angio::pipeline
