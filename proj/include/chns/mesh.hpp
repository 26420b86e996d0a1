#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace chns {

using Index = std::int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle [0,lx] x [0,ly].
struct Rectangle {
  double lx = 1.0;
  double ly = 1.0;
};

enum class Side { left, right, bottom, top, interior_cut };

struct BoundaryEdge {
  Index v0;
  Index v1;
  Side side;
};

using Triangle = std::array<Index, 3>;

/// Conforming 2D triangulation with boundary identification.
///
/// Triangles are stored counterclockwise. Boundary edges are the edges that
/// belong to exactly one triangle; their side tag is derived from the
/// bounding box of the vertex cloud. Meshes are immutable once built.
class Mesh {
public:
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }
  const std::vector<Index>& boundary_vertices() const noexcept { return boundary_vertices_; }

  Index n_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index n_triangles() const noexcept { return static_cast<Index>(triangles_.size()); }

  bool is_boundary_vertex(Index v) const { return on_boundary_[static_cast<std::size_t>(v)]; }

  /// Longest edge length over all triangles.
  double h() const noexcept { return h_; }

  /// Bounding box corners.
  Point lower() const noexcept { return lower_; }
  Point upper() const noexcept { return upper_; }
  double area() const noexcept { return area_; }

  double signed_area(Index t) const;

  /// Triangle containing p (closed), or nullopt. Tolerance 1e-12 relative to
  /// the domain size. O(1) on structured meshes, linear scan otherwise.
  std::optional<Index> locate(Point p) const;

  /// Barycentric coordinates of p in triangle t.
  std::array<double, 3> barycentric(Index t, Point p) const;

  /// Structured-grid metadata (set by build_uniform_mesh).
  struct Grid {
    Index nx;
    Index ny;
    double dx;
    double dy;
  };
  const std::optional<Grid>& grid() const noexcept { return grid_; }

private:
  friend Mesh build_uniform_mesh(Index nx, Index ny, Rectangle domain);

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<Index> boundary_vertices_;
  std::vector<bool> on_boundary_;
  Point lower_;
  Point upper_;
  double h_ = 0.0;
  double area_ = 0.0;
  std::optional<Grid> grid_;
};

/// nx x ny cells over [0,lx] x [0,ly], each split by the lower-left to
/// upper-right diagonal. Vertices are numbered row-major from the origin.
Mesh build_uniform_mesh(Index nx, Index ny, Rectangle domain = {});

/// Counts of triangles per undirected edge; used by invariant checks.
struct EdgeUsage {
  Index interior_edges = 0;
  Index boundary_edges = 0;
  Index overused_edges = 0;
};
EdgeUsage count_edge_usage(const Mesh& mesh);

}  // namespace chns
