#ifndef PACKBED_FEM_HPP
#define PACKBED_FEM_HPP

#include "packbed/types.hpp"

#include <array>
#include <vector>

namespace packbed {

class StructuredQuadMesh;

/// Values and reference gradients of the 9 biquadratic Lagrange functions.
/// Local node k = a + 3 b sits at (xi, eta) = (a - 1, b - 1).
struct Q2Values {
  std::array<double, 9> value{};
  std::array<Vec2, 9> grad{};
};

/// Modal discontinuous linear basis (1, xi, eta).
struct P1Values {
  std::array<double, 3> value{};
  std::array<Vec2, 3> grad{};
};

Q2Values q2_eval(const Vec2& ref);
P1Values p1disc_eval(const Vec2& ref);

/// Reference coordinates of local Q2 node k.
Vec2 q2_node(int k);

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

constexpr int kMaxGaussOrder = 10;

/// n-point Gauss-Legendre rule on [-1, 1], 1 <= n <= kMaxGaussOrder.
QuadratureRule1D gauss_rule_1d(int n);
/// Tensor rule on [-1, 1]^2, exact for degree 2n-1 per direction.
QuadratureRule gauss_rule(int n);

/// Affine map of an axis-aligned cell: x = x0 + (xi + 1) hx/2.
Vec2 map_to_physical(const StructuredQuadMesh& mesh, int cell, const Vec2& ref);

/// Diagonal Jacobian of the reference map; identical for all cells.
struct CellJacobian {
  Vec2 scale;  ///< (hx/2, hy/2)
  double det() const { return scale.x() * scale.y(); }
  /// Reference gradient -> physical gradient.
  Vec2 physical_grad(const Vec2& ref_grad) const {
    return {ref_grad.x() / scale.x(), ref_grad.y() / scale.y()};
  }
};

CellJacobian jacobian(const StructuredQuadMesh& mesh);

}  // namespace packbed

#endif  // PACKBED_FEM_HPP
