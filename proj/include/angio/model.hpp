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

#ifndef ANGIO__MODEL_HPP
#define ANGIO__MODEL_HPP

#include <angio/core/volume.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace angio::model {

//==============================================================================
struct SkeletonParams
{
  /// Remove end branches shorter than `spur_factor` times the radius at the
  /// junction they hang from. Zero disables pruning.
  double spur_factor = 2.0;
};

struct Skeleton
{
  /// One-voxel-wide, topology-preserving centreline voxels.
  BinaryMask voxels;
  /// Distance (mm) to the nearest background voxel, with the grid border
  /// counted as background. Set for every voxel of the input mask.
  Volume radius;
};

/// Sequential thinning by simple-point deletion, ordered by distance to the
/// background so the skeleton stays centred. Throws ValidationError on an
/// empty mask.
Skeleton skeletonize(const BinaryMask& mask, const SkeletonParams& params = {});

/// Euclidean distance (mm) from every set voxel to the nearest background
/// voxel, the border counting as background. Zero on background voxels.
Volume radius_map(const BinaryMask& mask);

/// True when deleting the centre of a 3x3x3 neighbourhood preserves the
/// topology of the (26, 6) image. Bit (dz+1)*9 + (dy+1)*3 + (dx+1) is set for
/// foreground neighbours; the centre bit is ignored.
bool is_simple(std::uint32_t neighbourhood);

//==============================================================================
struct GraphNode
{
  int id = 0;
  Vec3 position;
  /// Number of incident edge ends; a self-loop counts twice.
  int degree = 0;
  double radius = 0.0;
  /// Skeleton voxels merged into this node (linear indices).
  std::vector<std::size_t> voxels;
};

struct GraphEdge
{
  int id = 0;
  int a = 0;
  int b = 0;
  /// Centreline from node a to node b, both end points included, mm.
  std::vector<Vec3> polyline;
  double arc_length = 0.0;
  double min_radius = 0.0;
  double mean_radius = 0.0;
  /// Interior skeleton voxels of the chain (linear indices).
  std::vector<std::size_t> voxels;

  int other(int node) const { return node == a ? b : a; }
};

/// Undirected multigraph of bifurcations and the vessel segments between
/// them. Immutable once built.
struct SkeletonGraph
{
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  /// Node ids per connected component, each list ascending; components are
  /// ordered by their smallest node id.
  std::vector<std::vector<int>> components;
  /// Component index of every node.
  std::vector<int> component_of;
  /// Largest component (node count, then total arc length, then index).
  int main_component = -1;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

/// Assemble a graph from nodes and edges whose ids equal their positions:
/// fills degrees, components and the main component, then validates.
SkeletonGraph make_graph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

/// Voxels with other than two skeleton neighbours become nodes (touching
/// node voxels merge into one node); chains between them become edges.
/// Isolated cycles get one anchor node carrying a self-loop. Remaining
/// degree-2 nodes are merged into their edges.
SkeletonGraph build_graph(const BinaryMask& skeleton, const Volume& radius);

//==============================================================================
struct SurfaceMesh
{
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  double area() const;
  /// Signed enclosed volume; positive for outward-facing triangles.
  double volume() const;
};

/// Dual (surface-nets) isosurface of the mask at 0.5, closed and oriented
/// outwards. `relax_iterations` smoothing steps keep each vertex in its cell.
/// Throws ValidationError on an empty mask.
SurfaceMesh build_surface(const BinaryMask& mask, int relax_iterations = 2);

/// Text mesh: `v z y x` and `f i j k` lines, indices 1-based.
void write_mesh(std::ostream& out, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(std::istream& in);

//==============================================================================
struct VesselModel
{
  Skeleton skeleton;
  SkeletonGraph graph;
  SurfaceMesh surface;
};

VesselModel build_model(const BinaryMask& mask, const SkeletonParams& params = {});

} // namespace angio::model

#endif // ANGIO__MODEL_HPP
