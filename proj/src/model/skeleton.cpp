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
#include <angio/kernels/kernels.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace angio::model {

namespace {

constexpr int centre_bit = 13;

struct Adjacency
{
  std::array<std::uint32_t, 27> n26{};
  std::array<std::uint32_t, 27> n6{};
  std::uint32_t n18_mask = 0;
  std::uint32_t face_mask = 0;
};

const Adjacency& adjacency()
{
  static const Adjacency adj = []
  {
    Adjacency a;
    auto coord = [](int p) { return std::array<int, 3>{p / 9 - 1, (p / 3) % 3 - 1, p % 3 - 1}; };
    for (int p = 0; p < 27; ++p)
    {
      if (p == centre_bit)
        continue;
      const auto cp = coord(p);
      const int l1 = std::abs(cp[0]) + std::abs(cp[1]) + std::abs(cp[2]);
      if (l1 <= 2)
        a.n18_mask |= 1u << p;
      if (l1 == 1)
        a.face_mask |= 1u << p;
      for (int q = 0; q < 27; ++q)
      {
        if (q == p || q == centre_bit)
          continue;
        const auto cq = coord(q);
        const int dz = std::abs(cp[0] - cq[0]);
        const int dy = std::abs(cp[1] - cq[1]);
        const int dx = std::abs(cp[2] - cq[2]);
        if (std::max({dz, dy, dx}) == 1)
          a.n26[p] |= 1u << q;
        if (dz + dy + dx == 1)
          a.n6[p] |= 1u << q;
      }
    }
    return a;
  }();
  return adj;
}

int count_components(std::uint32_t set, const std::array<std::uint32_t, 27>& adj,
  std::uint32_t must_touch)
{
  int count = 0;
  while (set)
  {
    const std::uint32_t seed = set & (~set + 1);
    std::uint32_t comp = seed;
    std::uint32_t frontier = seed;
    while (frontier)
    {
      const int b = std::countr_zero(frontier);
      frontier &= frontier - 1;
      const std::uint32_t fresh = adj[b] & set & ~comp;
      comp |= fresh;
      frontier |= fresh;
    }
    set &= ~comp;
    if (comp & must_touch)
      ++count;
  }
  return count;
}

std::uint32_t neighbourhood(const BinaryMask& m, const Index3& p)
{
  const Dims& d = m.dims();
  const auto data = m.data();
  std::uint32_t bits = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
      {
        const std::int64_t z = p.z + dz, y = p.y + dy, x = p.x + dx;
        if (d.contains(z, y, x) && data[d.linear(z, y, x)])
          bits |= 1u << ((dz + 1) * 9 + (dy + 1) * 3 + (dx + 1));
      }
  return bits & ~(1u << centre_bit);
}

bool deletable(std::uint32_t bits)
{
  return std::popcount(bits) > 1 && is_simple(bits);
}

/// Delete simple non-end voxels, six directional sub-passes per sweep, until
/// nothing changes.
void thin(BinaryMask& s, const std::vector<double>& edt2)
{
  static constexpr std::array<std::array<int, 3>, 6> directions{{
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};
  const Dims& d = s.dims();
  auto data = s.data();

  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i])
      live.push_back(i);

  bool changed = true;
  std::vector<std::size_t> candidates;
  while (changed)
  {
    changed = false;
    for (const auto& dir : directions)
    {
      candidates.clear();
      for (const std::size_t i : live)
      {
        if (!data[i])
          continue;
        const Index3 p = d.unravel(i);
        const std::int64_t z = p.z + dir[0], y = p.y + dir[1], x = p.x + dir[2];
        if (d.contains(z, y, x) && data[d.linear(z, y, x)])
          continue;
        if (deletable(neighbourhood(s, p)))
          candidates.push_back(i);
      }
      std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b)
      {
        return edt2[a] != edt2[b] ? edt2[a] < edt2[b] : a < b;
      });
      for (const std::size_t i : candidates)
        if (deletable(neighbourhood(s, d.unravel(i))))
        {
          data[i] = 0;
          changed = true;
        }
    }
    std::erase_if(live, [&](std::size_t i) { return !data[i]; });
  }
}

int skeleton_degree(const BinaryMask& s, std::size_t i)
{
  return std::popcount(neighbourhood(s, s.dims().unravel(i)));
}

std::vector<std::size_t> skeleton_neighbours(const BinaryMask& s, std::size_t i)
{
  const Dims& d = s.dims();
  const Index3 p = d.unravel(i);
  std::vector<std::size_t> out;
  for (const auto& o : neighbours26())
  {
    const std::int64_t z = p.z + o[0], y = p.y + o[1], x = p.x + o[2];
    if (d.contains(z, y, x) && s.data()[d.linear(z, y, x)])
      out.push_back(d.linear(z, y, x));
  }
  return out;
}

/// Remove end branches shorter than `factor` times the junction radius.
bool prune_spurs(BinaryMask& s, const Volume& radius, double factor)
{
  const Geometry& g = s.geometry();
  const auto data = s.data();
  std::vector<std::size_t> doomed;

  for (std::size_t e = 0; e < data.size(); ++e)
  {
    if (!data[e] || skeleton_degree(s, e) != 1)
      continue;
    std::vector<std::size_t> path{e};
    std::size_t prev = e;
    std::size_t cur = skeleton_neighbours(s, e).front();
    double length = distance(g.position(e), g.position(cur));
    while (skeleton_degree(s, cur) == 2 && path.size() < data.size())
    {
      path.push_back(cur);
      const auto nb = skeleton_neighbours(s, cur);
      const std::size_t next = nb[0] == prev ? nb[1] : nb[0];
      length += distance(g.position(cur), g.position(next));
      prev = cur;
      cur = next;
    }
    if (skeleton_degree(s, cur) < 3)
      continue;
    if (length < factor * radius.data()[cur])
      doomed.insert(doomed.end(), path.begin(), path.end());
  }

  for (const std::size_t i : doomed)
    data[i] = 0;
  return !doomed.empty();
}

} // anonymous namespace

//==============================================================================
bool is_simple(std::uint32_t bits)
{
  const Adjacency& a = adjacency();
  bits &= ~(1u << centre_bit);
  const std::uint32_t all = (1u << 27) - 1;
  if (count_components(bits, a.n26, all) != 1)
    return false;
  const std::uint32_t background = ~bits & a.n18_mask;
  return count_components(background, a.n6, a.face_mask) == 1;
}

//==============================================================================
Volume radius_map(const BinaryMask& mask)
{
  BinaryMask background(mask.geometry());
  const auto m = mask.data();
  auto b = background.data();
  for (std::size_t i = 0; i < m.size(); ++i)
    b[i] = !m[i];
  const auto d2 = kernels::squared_distance_to(background, true);
  Volume out(mask.geometry(), 0.0f);
  auto o = out.data();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i])
      o[i] = static_cast<float>(std::sqrt(d2[i]));
  return out;
}

//==============================================================================
Skeleton skeletonize(const BinaryMask& mask, const SkeletonParams& params)
{
  if (count_set(mask) == 0)
    throw ValidationError("empty mask");

  Skeleton out{mask, radius_map(mask)};
  std::vector<double> edt2(out.radius.size());
  for (std::size_t i = 0; i < edt2.size(); ++i)
    edt2[i] = static_cast<double>(out.radius.data()[i]) * out.radius.data()[i];

  thin(out.voxels, edt2);
  if (params.spur_factor > 0.0)
    for (int round = 0; round < 4 && prune_spurs(out.voxels, out.radius, params.spur_factor); ++round)
      thin(out.voxels, edt2);
  return out;
}

} // namespace angio::model
