#include "chns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "chns/error.hpp"

namespace chns {

namespace {

struct EdgeKey {
  Index a;
  Index b;
  Index tri;
};

std::vector<EdgeKey> sorted_edges(const std::vector<Triangle>& triangles) {
  std::vector<EdgeKey> edges;
  edges.reserve(3 * triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (int e = 0; e < 3; ++e) {
      Index a = tri[e];
      Index b = tri[(e + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b), static_cast<Index>(t)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeKey& l, const EdgeKey& r) {
    return std::tie(l.a, l.b, l.tri) < std::tie(r.a, r.b, r.tri);
  });
  return edges;
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) {
    throw InvalidArgument("mesh needs at least one triangle");
  }
  const Index nv = n_vertices();
  lower_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  upper_ = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& p : vertices_) {
    lower_.x = std::min(lower_.x, p.x);
    lower_.y = std::min(lower_.y, p.y);
    upper_.x = std::max(upper_.x, p.x);
    upper_.y = std::max(upper_.y, p.y);
  }

  for (Index t = 0; t < n_triangles(); ++t) {
    for (Index v : triangles_[t]) {
      if (v < 0 || v >= nv) throw InvalidArgument("triangle references unknown vertex");
    }
    const double a = signed_area(t);
    if (!(a > 0.0)) throw InvalidArgument("triangle " + std::to_string(t) + " is not counterclockwise");
    area_ += a;
    const auto& tri = triangles_[t];
    for (int e = 0; e < 3; ++e) {
      const Point& p = vertices_[tri[e]];
      const Point& q = vertices_[tri[(e + 1) % 3]];
      h_ = std::max(h_, std::hypot(q.x - p.x, q.y - p.y));
    }
  }

  const double tol = 1e-12 * std::max(upper_.x - lower_.x, upper_.y - lower_.y);
  auto side_of = [&](const Point& p, const Point& q) {
    if (std::abs(p.x - lower_.x) <= tol && std::abs(q.x - lower_.x) <= tol) return Side::left;
    if (std::abs(p.x - upper_.x) <= tol && std::abs(q.x - upper_.x) <= tol) return Side::right;
    if (std::abs(p.y - lower_.y) <= tol && std::abs(q.y - lower_.y) <= tol) return Side::bottom;
    if (std::abs(p.y - upper_.y) <= tol && std::abs(q.y - upper_.y) <= tol) return Side::top;
    return Side::interior_cut;
  };

  on_boundary_.assign(vertices_.size(), false);
  const auto edges = sorted_edges(triangles_);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].a == edges[i].a && edges[j].b == edges[i].b) ++j;
    if (j - i == 1) {
      // Keep the orientation of the owning triangle so the domain lies to the left.
      const auto& tri = triangles_[edges[i].tri];
      Index v0 = edges[i].a;
      Index v1 = edges[i].b;
      for (int e = 0; e < 3; ++e) {
        if ((tri[e] == v0 && tri[(e + 1) % 3] == v1) || (tri[e] == v1 && tri[(e + 1) % 3] == v0)) {
          v0 = tri[e];
          v1 = tri[(e + 1) % 3];
          break;
        }
      }
      boundary_edges_.push_back({v0, v1, side_of(vertices_[v0], vertices_[v1])});
      on_boundary_[v0] = true;
      on_boundary_[v1] = true;
    }
    i = j;
  }
  for (Index v = 0; v < nv; ++v) {
    if (on_boundary_[v]) boundary_vertices_.push_back(v);
  }
}

double Mesh::signed_area(Index t) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::array<double, 3> Mesh::barycentric(Index t, Point p) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
  const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<Index> Mesh::locate(Point p) const {
  const double tol = 1e-12 * std::max(upper_.x - lower_.x, upper_.y - lower_.y);
  if (p.x < lower_.x - tol || p.x > upper_.x + tol || p.y < lower_.y - tol || p.y > upper_.y + tol) {
    return std::nullopt;
  }
  if (grid_) {
    const double sx = (p.x - lower_.x) / grid_->dx;
    const double sy = (p.y - lower_.y) / grid_->dy;
    const Index i = std::clamp<Index>(static_cast<Index>(std::floor(sx)), 0, grid_->nx - 1);
    const Index j = std::clamp<Index>(static_cast<Index>(std::floor(sy)), 0, grid_->ny - 1);
    const double xi = sx - static_cast<double>(i);
    const double eta = sy - static_cast<double>(j);
    return 2 * (j * grid_->nx + i) + (eta <= xi ? 0 : 1);
  }
  const double btol = 1e-12;
  for (Index t = 0; t < n_triangles(); ++t) {
    const auto l = barycentric(t, p);
    if (l[0] >= -btol && l[1] >= -btol && l[2] >= -btol) return t;
  }
  return std::nullopt;
}

Mesh build_uniform_mesh(Index nx, Index ny, Rectangle domain) {
  if (nx < 1 || ny < 1) throw InvalidArgument("mesh needs nx >= 1 and ny >= 1");
  if (!(domain.lx > 0.0) || !(domain.ly > 0.0)) throw InvalidArgument("domain extents must be positive");

  const double dx = domain.lx / static_cast<double>(nx);
  const double dy = domain.ly / static_cast<double>(ny);
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (Index j = 0; j <= ny; ++j) {
    // Pin the last row/column to the exact extent so boundary tests are exact.
    const double y = (j == ny) ? domain.ly : static_cast<double>(j) * dy;
    for (Index i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? domain.lx : static_cast<double>(i) * dx;
      vertices.push_back({x, y});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index v00 = j * (nx + 1) + i;
      const Index v10 = v00 + 1;
      const Index v01 = v00 + (nx + 1);
      const Index v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  Mesh mesh(std::move(vertices), std::move(triangles));
  mesh.grid_ = Mesh::Grid{nx, ny, dx, dy};
  return mesh;
}

EdgeUsage count_edge_usage(const Mesh& mesh) {
  EdgeUsage usage;
  const auto edges = sorted_edges(mesh.triangles());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].a == edges[i].a && edges[j].b == edges[i].b) ++j;
    switch (j - i) {
      case 1: ++usage.boundary_edges; break;
      case 2: ++usage.interior_edges; break;
      default: ++usage.overused_edges; break;
    }
    i = j;
  }
  return usage;
}

}  // namespace chns
