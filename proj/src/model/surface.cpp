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

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace angio::model {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b)
{
  return {a.y * b.x - a.x * b.y, a.x * b.z - a.z * b.x, a.z * b.y - a.y * b.z};
}

double& component(Vec3& v, int axis)
{
  return axis == 0 ? v.z : axis == 1 ? v.y : v.x;
}

} // anonymous namespace

//==============================================================================
double SurfaceMesh::area() const
{
  double a = 0.0;
  for (const auto& t : triangles)
    a += 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]).norm();
  return a;
}

double SurfaceMesh::volume() const
{
  double v = 0.0;
  for (const auto& t : triangles)
    v += vertices[t[0]].dot(cross(vertices[t[1]], vertices[t[2]]));
  return v / 6.0;
}

//==============================================================================
SurfaceMesh build_surface(const BinaryMask& mask, int relax_iterations)
{
  if (count_set(mask) == 0)
    throw ValidationError("empty mask");

  const Geometry& geo = mask.geometry();
  const Dims& d = geo.dims;
  // Padded corner grid: one background layer on every side.
  const Dims pd{d.z + 2, d.y + 2, d.x + 2};
  auto inside = [&](std::int64_t z, std::int64_t y, std::int64_t x)
  {
    return d.contains(z - 1, y - 1, x - 1) && mask.at(z - 1, y - 1, x - 1) != 0;
  };
  // Cells are indexed by their lowest corner.
  const Dims cd{d.z + 1, d.y + 1, d.x + 1};
  std::vector<std::int32_t> vertex_of(cd.count(), -1);
  std::vector<Vec3> verts;
  std::vector<Index3> vert_cell;

  for (std::int64_t z = 0; z < cd.z; ++z)
    for (std::int64_t y = 0; y < cd.y; ++y)
      for (std::int64_t x = 0; x < cd.x; ++x)
      {
        std::array<bool, 8> c{};
        int set = 0;
        for (int k = 0; k < 8; ++k)
        {
          c[k] = inside(z + (k >> 2), y + ((k >> 1) & 1), x + (k & 1));
          set += c[k];
        }
        if (set == 0 || set == 8)
          continue;

        Vec3 sum;
        int crossings = 0;
        for (int k = 0; k < 8; ++k)
          for (const int bit : {1, 2, 4})
          {
            const int j = k | bit;
            if (j == k || c[k] == c[j])
              continue;
            const Vec3 pk(z + (k >> 2), y + ((k >> 1) & 1), x + (k & 1));
            const Vec3 pj(z + (j >> 2), y + ((j >> 1) & 1), x + (j & 1));
            sum += (pk + pj) * 0.5;
            ++crossings;
          }
        vertex_of[cd.linear(z, y, x)] = static_cast<std::int32_t>(verts.size());
        verts.push_back(sum / crossings);
        vert_cell.push_back({z, y, x});
      }

  // One quad per grid edge that crosses the surface.
  std::vector<std::array<std::uint32_t, 4>> quads;
  for (std::int64_t z = 0; z < pd.z; ++z)
    for (std::int64_t y = 0; y < pd.y; ++y)
      for (std::int64_t x = 0; x < pd.x; ++x)
      {
        const bool here = inside(z, y, x);
        for (int axis = 0; axis < 3; ++axis)
        {
          const std::int64_t z1 = z + (axis == 0), y1 = y + (axis == 1), x1 = x + (axis == 2);
          if (!pd.contains(z1, y1, x1) || inside(z1, y1, x1) == here)
            continue;
          // The two axes spanning the quad plane, and the cell ring around
          // the edge.
          const int u = (axis + 1) % 3, v = (axis + 2) % 3;
          std::array<std::uint32_t, 4> ring{};
          const int du[4] = {-1, 0, 0, -1};
          const int dv[4] = {-1, -1, 0, 0};
          for (int k = 0; k < 4; ++k)
          {
            std::int64_t cell[3] = {z, y, x};
            cell[u] += du[k];
            cell[v] += dv[k];
            ring[k] = static_cast<std::uint32_t>(vertex_of[cd.linear(cell[0], cell[1], cell[2])]);
          }
          // Ring order (u, v) is right-handed about `axis`; flip so normals
          // point from inside to outside.
          if (!here)
            std::swap(ring[1], ring[3]);
          quads.push_back(ring);
        }
      }

  // Relax towards neighbour averages while staying inside each cell.
  std::vector<std::vector<std::uint32_t>> adjacent(verts.size());
  for (const auto& q : quads)
    for (int k = 0; k < 4; ++k)
    {
      adjacent[q[k]].push_back(q[(k + 1) % 4]);
      adjacent[q[(k + 1) % 4]].push_back(q[k]);
    }
  for (auto& a : adjacent)
  {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  constexpr double margin = 0.02;
  std::vector<Vec3> next(verts.size());
  for (int it = 0; it < relax_iterations; ++it)
  {
    for (std::size_t i = 0; i < verts.size(); ++i)
    {
      Vec3 avg;
      for (const std::uint32_t j : adjacent[i])
        avg += verts[j];
      avg = avg / static_cast<double>(adjacent[i].size());
      const Index3& c = vert_cell[i];
      const double lo[3] = {double(c.z), double(c.y), double(c.x)};
      for (int a = 0; a < 3; ++a)
        component(avg, a) = std::clamp(component(avg, a), lo[a] + margin, lo[a] + 1.0 - margin);
      next[i] = avg;
    }
    verts.swap(next);
  }

  SurfaceMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const Vec3& p : verts)
    mesh.vertices.push_back({
      geo.origin.z + (p.z - 1.0) * geo.spacing.z,
      geo.origin.y + (p.y - 1.0) * geo.spacing.y,
      geo.origin.x + (p.x - 1.0) * geo.spacing.x});

  auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c)
  {
    const auto& P = verts;
    if (cross(P[b] - P[a], P[c] - P[a]).norm() > 1e-12)
      mesh.triangles.push_back({a, b, c});
  };
  // Split along the shorter diagonal in voxel units, so that the topology
  // does not depend on the spacing.
  for (const auto& q : quads)
  {
    if (distance(verts[q[0]], verts[q[2]]) <= distance(verts[q[1]], verts[q[3]]))
    {
      emit(q[0], q[1], q[2]);
      emit(q[0], q[2], q[3]);
    }
    else
    {
      emit(q[0], q[1], q[3]);
      emit(q[1], q[2], q[3]);
    }
  }
  return mesh;
}

//==============================================================================
void write_mesh(std::ostream& out, const SurfaceMesh& mesh)
{
  std::ostringstream s;
  s.precision(17);
  for (const Vec3& v : mesh.vertices)
    s << "v " << v.z << ' ' << v.y << ' ' << v.x << '\n';
  for (const auto& t : mesh.triangles)
    s << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  out << s.str();
}

SurfaceMesh read_mesh(std::istream& in)
{
  SurfaceMesh mesh;
  std::string line;
  int number = 0;
  std::vector<std::array<long long, 3>> faces;
  while (std::getline(in, line))
  {
    ++number;
    std::istringstream s(line);
    std::string tag;
    if (!(s >> tag) || tag[0] == '#')
      continue;
    if (tag == "v")
    {
      Vec3 v;
      if (!(s >> v.z >> v.y >> v.x))
        throw ValidationError("mesh line " + std::to_string(number) + ": expected 'v z y x'");
      mesh.vertices.push_back(v);
    }
    else if (tag == "f")
    {
      std::array<long long, 3> f{};
      if (!(s >> f[0] >> f[1] >> f[2]))
        throw ValidationError("mesh line " + std::to_string(number) + ": expected 'f i j k'");
      faces.push_back(f);
    }
    else
      throw ValidationError("mesh line " + std::to_string(number) + ": unknown record '" + tag + "'");
  }
  const auto n = static_cast<long long>(mesh.vertices.size());
  for (const auto& f : faces)
  {
    for (const long long i : f)
      if (i < 1 || i > n)
        throw ValidationError("mesh: face index " + std::to_string(i) + " out of range");
    mesh.triangles.push_back({static_cast<std::uint32_t>(f[0] - 1),
      static_cast<std::uint32_t>(f[1] - 1), static_cast<std::uint32_t>(f[2] - 1)});
  }
  return mesh;
}

//==============================================================================
VesselModel build_model(const BinaryMask& mask, const SkeletonParams& params)
{
  Skeleton skeleton = skeletonize(mask, params);
  SkeletonGraph graph = build_graph(skeleton.voxels, skeleton.radius);
  SurfaceMesh surface = build_surface(mask);
  return {std::move(skeleton), std::move(graph), std::move(surface)};
}

} // namespace angio::model
