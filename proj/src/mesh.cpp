#include "packbed/mesh.hpp"

#include "packbed/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace packbed {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Interior: return "interior";
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Outlet: return "outlet";
    case BoundaryTag::Wall: return "wall";
  }
  return "unknown";
}

StructuredQuadMesh::StructuredQuadMesh(double length, double half_width, int nx, int ny)
    : length_(length), half_width_(half_width), nx_(nx), ny_(ny) {
  if (!(length > 0.0 && half_width > 0.0 && nx >= 1 && ny >= 1)) {
    throw DomainError("StructuredQuadMesh: need L > 0, R > 0, nx >= 1, ny >= 1");
  }
}

double StructuredQuadMesh::vertex_x(int i) const {
  if (i >= nx_) return length_;
  return i * hx();
}

double StructuredQuadMesh::vertex_y(int j) const {
  if (j >= ny_) return half_width_;
  return -half_width_ + j * hy();
}

std::array<Vec2, 4> StructuredQuadMesh::cell_corners(int cell) const {
  const int i = cell_ix(cell), j = cell_iy(cell);
  const double x0 = vertex_x(i), x1 = vertex_x(i + 1);
  const double y0 = vertex_y(j), y1 = vertex_y(j + 1);
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

double StructuredQuadMesh::cell_area(int cell) const {
  const auto c = cell_corners(cell);
  return (c[1].x() - c[0].x()) * (c[3].y() - c[0].y());
}

std::vector<StructuredQuadMesh::BoundaryEdge> StructuredQuadMesh::boundary_edges() const {
  std::vector<BoundaryEdge> edges;
  edges.reserve(static_cast<std::size_t>(2 * nx_ + 2 * ny_));
  for (int i = 0; i < nx_; ++i)
    edges.push_back({cell_index(i, 0), BoundaryTag::Wall, 1, -1.0, Vec2(0.0, -1.0)});
  for (int i = 0; i < nx_; ++i)
    edges.push_back({cell_index(i, ny_ - 1), BoundaryTag::Wall, 1, 1.0, Vec2(0.0, 1.0)});
  for (int j = 0; j < ny_; ++j)
    edges.push_back({cell_index(0, j), BoundaryTag::Inlet, 0, -1.0, Vec2(-1.0, 0.0)});
  for (int j = 0; j < ny_; ++j)
    edges.push_back({cell_index(nx_ - 1, j), BoundaryTag::Outlet, 0, 1.0, Vec2(1.0, 0.0)});
  return edges;
}

StructuredQuadMesh build_mesh(const CaseConfig& cfg) {
  return {cfg.length, cfg.half_width, cfg.nx, cfg.ny};
}

DofMaps::DofMaps(const StructuredQuadMesh& mesh)
    : nx_(mesh.nx()), ny_(mesh.ny()), length_(mesh.length()), half_width_(mesh.half_width()) {
  tags_.assign(static_cast<std::size_t>(node_count()), BoundaryTag::Interior);
  const int mx = lattice_nx() - 1, my = lattice_ny() - 1;
  for (int j = 0; j <= my; ++j) {
    for (int i = 0; i <= mx; ++i) {
      BoundaryTag tag = BoundaryTag::Interior;
      if (i == 0) {
        tag = BoundaryTag::Inlet;
      } else if (j == 0 || j == my) {
        tag = BoundaryTag::Wall;
      } else if (i == mx) {
        tag = BoundaryTag::Outlet;
      }
      tags_[static_cast<std::size_t>(node(i, j))] = tag;
    }
  }
}

std::array<int, 9> DofMaps::cell_nodes(int cell) const {
  const int ci = cell % nx_, cj = cell / nx_;
  std::array<int, 9> out{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) out[static_cast<std::size_t>(a + 3 * b)] = node(2 * ci + a, 2 * cj + b);
  return out;
}

Vec2 DofMaps::node_position(int n) const {
  const int i = n % lattice_nx(), j = n / lattice_nx();
  const int mx = lattice_nx() - 1, my = lattice_ny() - 1;
  const double x = (i == mx) ? length_ : i * (length_ / mx);
  const double y = (j == my) ? half_width_ : -half_width_ + j * (2.0 * half_width_ / my);
  return {x, y};
}

DofMaps build_dof_maps(const StructuredQuadMesh& mesh) { return DofMaps(mesh); }

std::map<BoundaryTag, std::vector<int>> classify_boundary_nodes(const StructuredQuadMesh&,
                                                                const DofMaps& maps) {
  std::map<BoundaryTag, std::vector<int>> sets{
      {BoundaryTag::Inlet, {}}, {BoundaryTag::Outlet, {}}, {BoundaryTag::Wall, {}}};
  for (int n = 0; n < maps.node_count(); ++n) {
    const BoundaryTag tag = maps.node_tag(n);
    if (tag != BoundaryTag::Interior) sets[tag].push_back(n);
  }
  return sets;
}

PointLocation locate_point(const StructuredQuadMesh& mesh, const Vec2& p) {
  const double tol = 1e-12 * std::max(mesh.length(), 2.0 * mesh.half_width());
  if (!(p.x() >= -tol && p.x() <= mesh.length() + tol && p.y() >= -mesh.half_width() - tol &&
        p.y() <= mesh.half_width() + tol)) {
    std::ostringstream os;
    os << "locate_point: (" << p.x() << ", " << p.y() << ") outside the domain";
    throw DomainError(os.str());
  }
  // ceil(t) - 1 sends points on a shared line to the lower cell.
  auto index = [](double t, int n) {
    return std::clamp(static_cast<int>(std::ceil(t)) - 1, 0, n - 1);
  };
  const int i = index(p.x() / mesh.hx(), mesh.nx());
  const int j = index((p.y() + mesh.half_width()) / mesh.hy(), mesh.ny());
  const int cell = mesh.cell_index(i, j);
  const double x0 = mesh.vertex_x(i), y0 = mesh.vertex_y(j);
  const Vec2 ref(2.0 * (p.x() - x0) / mesh.hx() - 1.0, 2.0 * (p.y() - y0) / mesh.hy() - 1.0);
  return {cell, ref.cwiseMax(-1.0).cwiseMin(1.0)};
}

void write_mesh_dump(std::ostream& os, const StructuredQuadMesh&, const DofMaps& maps) {
  os << "# id x y tag\n";
  char buf[128];
  for (int n = 0; n < maps.node_count(); ++n) {
    const Vec2 x = maps.node_position(n);
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %s\n", n, x.x(), x.y(),
                  std::string(to_string(maps.node_tag(n))).c_str());
    os << buf;
  }
}

}  // namespace packbed
