#include "packbed/fem.hpp"

#include "packbed/mesh.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace packbed {

namespace {

// Quadratic Lagrange polynomials on {-1, 0, 1} and their derivatives.
std::array<double, 3> lagrange(double t) {
  return {0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
}

std::array<double, 3> lagrange_deriv(double t) { return {t - 0.5, -2.0 * t, t + 0.5}; }

}  // namespace

Q2Values q2_eval(const Vec2& ref) {
  const auto lx = lagrange(ref.x()), ly = lagrange(ref.y());
  const auto dx = lagrange_deriv(ref.x()), dy = lagrange_deriv(ref.y());
  Q2Values out;
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      const int k = a + 3 * b;
      out.value[k] = lx[a] * ly[b];
      out.grad[k] = Vec2(dx[a] * ly[b], lx[a] * dy[b]);
    }
  }
  return out;
}

P1Values p1disc_eval(const Vec2& ref) {
  P1Values out;
  out.value = {1.0, ref.x(), ref.y()};
  out.grad = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  return out;
}

Vec2 q2_node(int k) { return {static_cast<double>(k % 3 - 1), static_cast<double>(k / 3 - 1)}; }

QuadratureRule1D gauss_rule_1d(int n) {
  if (n < 1 || n > kMaxGaussOrder) {
    throw DomainError("gauss_rule: order " + std::to_string(n) + " outside [1, 10]");
  }
  QuadratureRule1D rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double step = pn / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[static_cast<std::size_t>(i)] = -x;
    rule.points[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.points[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

QuadratureRule gauss_rule(int n) {
  const auto r = gauss_rule_1d(n);
  QuadratureRule rule;
  for (std::size_t j = 0; j < r.size(); ++j) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      rule.points.emplace_back(r.points[i], r.points[j]);
      rule.weights.push_back(r.weights[i] * r.weights[j]);
    }
  }
  return rule;
}

Vec2 map_to_physical(const StructuredQuadMesh& mesh, int cell, const Vec2& ref) {
  const double x0 = mesh.vertex_x(mesh.cell_ix(cell));
  const double y0 = mesh.vertex_y(mesh.cell_iy(cell));
  return {x0 + 0.5 * (ref.x() + 1.0) * mesh.hx(), y0 + 0.5 * (ref.y() + 1.0) * mesh.hy()};
}

CellJacobian jacobian(const StructuredQuadMesh& mesh) {
  return {Vec2(0.5 * mesh.hx(), 0.5 * mesh.hy())};
}

}  // namespace packbed
