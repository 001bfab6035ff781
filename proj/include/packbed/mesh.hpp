#ifndef PACKBED_MESH_HPP
#define PACKBED_MESH_HPP

#include "packbed/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string_view>
#include <vector>

namespace packbed {

struct CaseConfig;

enum class BoundaryTag : std::uint8_t { Interior = 0, Inlet = 1, Outlet = 2, Wall = 3 };

std::string_view to_string(BoundaryTag tag);

/// Uniform Cartesian mesh of (0, L) x (-R, R). Cells are numbered
/// lexicographically with x running fastest.
class StructuredQuadMesh {
 public:
  StructuredQuadMesh(double length, double half_width, int nx, int ny);

  double length() const { return length_; }
  double half_width() const { return half_width_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return length_ / nx_; }
  double hy() const { return 2.0 * half_width_ / ny_; }
  int cell_count() const { return nx_ * ny_; }
  int vertex_count() const { return (nx_ + 1) * (ny_ + 1); }

  int cell_index(int ix, int iy) const { return iy * nx_ + ix; }
  int cell_ix(int cell) const { return cell % nx_; }
  int cell_iy(int cell) const { return cell / nx_; }

  /// Vertex coordinates; the outermost lines are pinned to 0, L, -R, R exactly.
  double vertex_x(int i) const;
  double vertex_y(int j) const;

  /// Lower-left, lower-right, upper-right, upper-left.
  std::array<Vec2, 4> cell_corners(int cell) const;
  double cell_area(int cell) const;

  struct BoundaryEdge {
    int cell;
    BoundaryTag tag;
    /// Fixed reference coordinate of the edge: 0 -> xi, 1 -> eta.
    int fixed_axis;
    /// Value of that coordinate, -1 or +1.
    double fixed_value;
    Vec2 normal;
  };

  /// 2 nx + 2 ny edges: bottom wall, top wall, inlet, outlet.
  std::vector<BoundaryEdge> boundary_edges() const;

 private:
  double length_;
  double half_width_;
  int nx_;
  int ny_;
};

StructuredQuadMesh build_mesh(const CaseConfig& cfg);

/// Q2 velocity nodes and discontinuous P1 pressure modes.
///
/// Q2 nodes form a (2 nx + 1) x (2 ny + 1) lattice, x fastest. Velocity DOFs
/// are stored component-blocked: dof(node, c) = c * node_count + node.
/// Pressure DOFs: 3 * cell + mode, modes (1, xi, eta).
class DofMaps {
 public:
  explicit DofMaps(const StructuredQuadMesh& mesh);

  int lattice_nx() const { return 2 * nx_ + 1; }
  int lattice_ny() const { return 2 * ny_ + 1; }
  int node_count() const { return lattice_nx() * lattice_ny(); }
  int velocity_dof_count() const { return 2 * node_count(); }
  int pressure_dof_count() const { return 3 * nx_ * ny_; }
  int total_dof_count() const { return velocity_dof_count() + pressure_dof_count(); }

  int node(int i, int j) const { return j * lattice_nx() + i; }
  int velocity_dof(int node, int component) const { return component * node_count() + node; }
  int pressure_dof(int cell, int mode) const { return 3 * cell + mode; }

  /// Global Q2 node of local node k = a + 3 b.
  std::array<int, 9> cell_nodes(int cell) const;
  Vec2 node_position(int node) const;
  BoundaryTag node_tag(int node) const { return tags_[static_cast<std::size_t>(node)]; }

 private:
  int nx_;
  int ny_;
  double length_;
  double half_width_;
  std::vector<BoundaryTag> tags_;
};

DofMaps build_dof_maps(const StructuredQuadMesh& mesh);

/// Boundary Q2 nodes per tag. Corners at x = 0 go to the inlet, corners at
/// x = L to the wall, so Dirichlet data always wins over the outflow.
std::map<BoundaryTag, std::vector<int>> classify_boundary_nodes(const StructuredQuadMesh& mesh,
                                                                const DofMaps& maps);

struct PointLocation {
  int cell;
  Vec2 ref;
};

/// Throws DomainError when p lies outside the closed domain. Points on a
/// shared edge go to the lower-index cell.
PointLocation locate_point(const StructuredQuadMesh& mesh, const Vec2& p);

/// Debug dump, one Q2 node per line: `id x y tag`.
void write_mesh_dump(std::ostream& os, const StructuredQuadMesh& mesh, const DofMaps& maps);

}  // namespace packbed

#endif  // PACKBED_MESH_HPP
