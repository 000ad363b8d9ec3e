#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fluxnet/core/state.hpp"

namespace fluxnet::fvm {

using Point = std::array<double, 2>;

inline constexpr std::int64_t kNoNeighbor = -1;

struct Cell {
  Point centroid{};
  double measure = 0.0;  ///< length (1D) or area (2D)
};

struct Face {
  double measure = 1.0;
  UnitNormal normal;  ///< points from owner to neighbor (outward on the boundary)
  Point centroid{};
  std::size_t owner = 0;
  std::int64_t neighbor = kNoNeighbor;
  std::string tag;  ///< boundary tag, empty for interior faces

  bool is_boundary() const noexcept { return neighbor == kNoNeighbor; }
};

struct Mesh {
  std::size_t dim = 1;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  /// Node coordinates and cell connectivity for 2D meshes (kept for output).
  std::vector<Point> nodes;
  std::vector<std::vector<std::size_t>> elements;

  double total_measure() const;
  /// Largest |sum_j |f_j| N_j| over cells.
  double max_closure_defect() const;
  /// Throws InvalidStateError if a mesh invariant fails.
  void validate() const;
  std::vector<std::string> boundary_tags() const;
};

/// Uniform cells on [x_lo, x_hi]; boundary faces tagged "left" / "right".
Mesh make_uniform_grid_1d(double x_lo, double x_hi, std::size_t n_cells);

/// nx x ny rectangles; boundary faces tagged "left", "right", "bottom", "top".
Mesh make_quad_mesh_rect(double x_lo, double x_hi, double y_lo, double y_hi, std::size_t nx, std::size_t ny);

/// Regular pentagon of the given circumradius centered at the origin, one
/// vertex on the positive y axis. Ring k (1..n) lies between the similar
/// pentagons of radius (k-1)R/n and kR/n, with each side split into k pieces;
/// it holds 5 (2k - 1) triangles, 5 n^2 in total. Boundary tag "boundary".
Mesh make_pentagon_tri_mesh(double circumradius, std::size_t n_rings);

/// Assigns a tag to a boundary edge from its two end points.
using BoundaryTagger = std::function<std::string(const Point&, const Point&)>;

/// Builds faces from polygonal elements (any vertex order; stored counter-clockwise).
Mesh build_mesh_2d(std::vector<Point> nodes, std::vector<std::vector<std::size_t>> elements,
                   const BoundaryTagger& tagger);

/// ASCII mesh file:
///   fluxnet-mesh 1
///   nodes N      then N lines "x y"
///   elements M   then M lines "k i_1 ... i_k" (0-based node indices)
///   boundary B   then B lines "i j tag" for tagged boundary edges
/// Untagged boundary edges get the tag "boundary".
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);
Mesh read_mesh(const std::filesystem::path& path);

}  // namespace fluxnet::fvm
