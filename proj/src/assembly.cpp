#include "packbed/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace packbed {

namespace {

/// Quadrature of g(x, y) over the whole mesh.
template <typename F>
double integrate(const StructuredQuadMesh& mesh, int quad_order, F&& g) {
  const QuadratureRule rule = gauss_rule(quad_order);
  const double det = jacobian(mesh).det();
  double total = 0.0;
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_physical(mesh, cell, rule.points[q]);
      cell_sum += rule.weights[q] * g(x.x(), x.y());
    }
    total += det * cell_sum;
  }
  return total;
}

double convective_integrand(double eps, const VectorSample& w, const VectorSample& u,
                            const VectorSample& v) {
  return eps * v.value.dot(u.grad * w.value);
}

}  // namespace

double eval_form_a(const StructuredQuadMesh& mesh, const VectorFieldFn& u, const VectorFieldFn& v,
                   const ScalarFieldFn& eps, double re, int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    return eps(x, y).value / re * u(x, y).grad.cwiseProduct(v(x, y).grad).sum();
  });
}

double eval_form_b(const StructuredQuadMesh& mesh, const VectorFieldFn& u,
                   const std::function<double(double, double)>& q, const ScalarFieldFn& eps,
                   int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    const ScalarSample e = eps(x, y);
    const VectorSample us = u(x, y);
    return (e.value * us.grad.trace() + e.grad.dot(us.value)) * q(x, y);
  });
}

double eval_form_c(const StructuredQuadMesh& mesh, const VectorFieldFn& u, const VectorFieldFn& v,
                   const ScalarFieldFn& eps, double re, int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    return alpha_beta(eps(x, y).value).alpha / re * u(x, y).value.dot(v(x, y).value);
  });
}

double eval_form_d(const StructuredQuadMesh& mesh, const VectorFieldFn& w, const VectorFieldFn& u,
                   const VectorFieldFn& v, const ScalarFieldFn& eps, int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    return alpha_beta(eps(x, y).value).beta * w(x, y).value.norm() *
           u(x, y).value.dot(v(x, y).value);
  });
}

double eval_form_n(const StructuredQuadMesh& mesh, const VectorFieldFn& w, const VectorFieldFn& u,
                   const VectorFieldFn& v, const ScalarFieldFn& eps, int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    return convective_integrand(eps(x, y).value, w(x, y), u(x, y), v(x, y));
  });
}

double eval_form_n_magnitude(const StructuredQuadMesh& mesh, const VectorFieldFn& w,
                             const VectorFieldFn& u, const VectorFieldFn& v,
                             const ScalarFieldFn& eps, int quad_order) {
  return integrate(mesh, quad_order, [&](double x, double y) {
    const double e = eps(x, y).value;
    const VectorSample ws = w(x, y), us = u(x, y), vs = v(x, y);
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += std::abs(e * ws.value[j] * us.grad(i, j) * vs.value[i]);
    return s;
  });
}

VectorSample eval_velocity(const StructuredQuadMesh& mesh, const DofMaps& maps,
                           const Vector& coeffs, int cell, const Vec2& ref) {
  const Q2Values q2 = q2_eval(ref);
  const CellJacobian jac = jacobian(mesh);
  const auto nodes = maps.cell_nodes(cell);
  VectorSample s;
  for (int k = 0; k < 9; ++k) {
    const Vec2 g = jac.physical_grad(q2.grad[k]);
    for (int c = 0; c < 2; ++c) {
      const double coef = coeffs[maps.velocity_dof(nodes[k], c)];
      s.value[c] += coef * q2.value[k];
      s.grad.row(c) += coef * g.transpose();
    }
  }
  return s;
}

double eval_pressure(const StructuredQuadMesh&, const Vector& coeffs, int cell, const Vec2& ref) {
  return coeffs[3 * cell] + coeffs[3 * cell + 1] * ref.x() + coeffs[3 * cell + 2] * ref.y();
}

VectorFieldFn fe_velocity(const StructuredQuadMesh& mesh, const DofMaps& maps, const Vector& coeffs) {
  return [mesh, maps, coeffs](double x, double y) {
    const PointLocation loc = locate_point(mesh, Vec2(x, y));
    return eval_velocity(mesh, maps, coeffs, loc.cell, loc.ref);
  };
}

std::function<double(double, double)> fe_pressure(const StructuredQuadMesh& mesh,
                                                  const Vector& coeffs) {
  return [mesh, coeffs](double x, double y) {
    const PointLocation loc = locate_point(mesh, Vec2(x, y));
    return eval_pressure(mesh, coeffs, loc.cell, loc.ref);
  };
}

Vector interpolate_velocity(const DofMaps& maps, const VectorFn& g) {
  Vector out(maps.velocity_dof_count());
  for (int n = 0; n < maps.node_count(); ++n) {
    const Vec2 x = maps.node_position(n);
    const Vec2 v = g(x.x(), x.y());
    out[maps.velocity_dof(n, 0)] = v.x();
    out[maps.velocity_dof(n, 1)] = v.y();
  }
  return out;
}

Vector project_pressure(const StructuredQuadMesh& mesh,
                        const std::function<double(double, double)>& p, int quad_order) {
  const QuadratureRule rule = gauss_rule(quad_order);
  Vector out = Vector::Zero(3 * mesh.cell_count());
  // The modes are orthogonal on the reference cell with masses 4, 4/3, 4/3.
  const double mass[3] = {4.0, 4.0 / 3.0, 4.0 / 3.0};
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_physical(mesh, cell, rule.points[q]);
      const P1Values modes = p1disc_eval(rule.points[q]);
      const double pv = p(x.x(), x.y());
      for (int m = 0; m < 3; ++m) out[3 * cell + m] += rule.weights[q] * pv * modes.value[m] / mass[m];
    }
  }
  return out;
}

// -- SolutionFields ----------------------------------------------------------

SolutionFields::SolutionFields(StructuredQuadMesh mesh, Vector velocity, Vector pressure)
    : mesh_(mesh), dofs_(mesh), velocity_(std::move(velocity)), pressure_(std::move(pressure)) {
  if (velocity_.size() != dofs_.velocity_dof_count() ||
      pressure_.size() != dofs_.pressure_dof_count()) {
    throw std::invalid_argument("SolutionFields: coefficient vector sizes do not match the mesh");
  }
}

Vec2 SolutionFields::velocity_at(const Vec2& p) const {
  const PointLocation loc = locate_point(mesh_, p);
  return eval_velocity(mesh_, dofs_, velocity_, loc.cell, loc.ref).value;
}

Mat2 SolutionFields::velocity_gradient_at(const Vec2& p) const {
  const PointLocation loc = locate_point(mesh_, p);
  return eval_velocity(mesh_, dofs_, velocity_, loc.cell, loc.ref).grad;
}

double SolutionFields::pressure_at(const Vec2& p) const {
  const PointLocation loc = locate_point(mesh_, p);
  return eval_pressure(mesh_, pressure_, loc.cell, loc.ref);
}

bool SolutionFields::finite() const { return velocity_.allFinite() && pressure_.allFinite(); }

// -- SaddleSystem ------------------------------------------------------------

SparseMatrix SaddleSystem::velocity_block() const {
  SparseMatrix a = a_visc + c_darcy;
  if (n_conv.nonZeros() > 0) a += n_conv;
  if (d_forch.nonZeros() > 0) a += d_forch;
  return a;
}

SparseMatrix SaddleSystem::full_operator() const {
  const SparseMatrix a = velocity_block();
  const Eigen::Index nu = a.rows(), np = b.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros()));
  for (Eigen::Index k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index k = 0; k < b.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(b, k); it; ++it) {
      const int q = static_cast<int>(nu + it.row());
      const int v = static_cast<int>(it.col());
      t.emplace_back(v, q, -it.value());
      t.emplace_back(q, v, it.value());
    }
  }
  SparseMatrix m(nu + np, nu + np);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

DirichletData make_dirichlet_data(const CaseConfig& cfg) {
  return {inlet_field(cfg), wall_field(cfg), cfg.outlet_velocity};
}

Constraints dirichlet_constraints(const StructuredQuadMesh&, const DofMaps& maps,
                                  const DirichletData& data) {
  Constraints con;
  con.fixed.assign(static_cast<std::size_t>(maps.total_dof_count()), 0);
  std::vector<std::pair<int, double>> entries;
  for (int n = 0; n < maps.node_count(); ++n) {
    const VectorFn* g = nullptr;
    switch (maps.node_tag(n)) {
      case BoundaryTag::Inlet: g = &data.inlet; break;
      case BoundaryTag::Wall: g = &data.wall; break;
      case BoundaryTag::Outlet: g = data.outlet ? &data.outlet : nullptr; break;
      case BoundaryTag::Interior: break;
    }
    if (g == nullptr) continue;
    const Vec2 x = maps.node_position(n);
    const Vec2 value = (*g)(x.x(), x.y());
    for (int c = 0; c < 2; ++c) entries.emplace_back(maps.velocity_dof(n, c), value[c]);
  }
  if (data.outlet) entries.emplace_back(maps.velocity_dof_count() + maps.pressure_dof(0, 0), 0.0);

  std::sort(entries.begin(), entries.end());
  for (const auto& [dof, value] : entries) {
    if (con.is_fixed(dof)) {
      // One tag per node; only reachable if the classification is broken.
      if (con.values.back() != value) throw std::logic_error("conflicting Dirichlet values");
      continue;
    }
    con.fixed[static_cast<std::size_t>(dof)] = 1;
    con.dofs.push_back(dof);
    con.values.push_back(value);
  }
  return con;
}

ConstrainedSystem apply_dirichlet(const SaddleSystem& system, const Constraints& constraints) {
  const SparseMatrix full = system.full_operator();
  const Eigen::Index n = full.rows();
  if (static_cast<Eigen::Index>(constraints.fixed.size()) != n) {
    throw std::invalid_argument("apply_dirichlet: constraint table does not match the system size");
  }
  Vector g = Vector::Zero(n);
  for (std::size_t i = 0; i < constraints.dofs.size(); ++i) g[constraints.dofs[i]] = constraints.values[i];

  ConstrainedSystem out;
  out.rhs = Vector::Zero(n);
  out.rhs.head(system.load.size()) = system.load;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Eigen::Index k = 0; k < full.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      const int row = static_cast<int>(it.row()), col = static_cast<int>(it.col());
      if (constraints.is_fixed(row)) continue;
      if (constraints.is_fixed(col)) {
        out.rhs[row] -= it.value() * g[col];
      } else {
        t.emplace_back(row, col, it.value());
      }
    }
  }
  for (std::size_t i = 0; i < constraints.dofs.size(); ++i) {
    const int d = constraints.dofs[i];
    t.emplace_back(d, d, 1.0);
    out.rhs[d] = constraints.values[i];
  }
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(t.begin(), t.end());
  return out;
}

// -- Assembler ---------------------------------------------------------------

Assembler::Assembler(const StructuredQuadMesh& mesh, const DofMaps& maps, const CaseConfig& cfg)
    : mesh_(mesh), maps_(maps), re_(cfg.re), forcing_(forcing_field(cfg)) {
  const QuadratureRule rule = gauss_rule(cfg.quad_order);
  const CellJacobian jac = jacobian(mesh_);
  const ScalarFieldFn eps = porosity_field(cfg);

  q2_.reserve(rule.size());
  p1_.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    Q2Values v = q2_eval(rule.points[q]);
    for (auto& g : v.grad) g = jac.physical_grad(g);
    q2_.push_back(v);
    p1_.push_back(p1disc_eval(rule.points[q]));
  }

  points_.resize(static_cast<std::size_t>(mesh_.cell_count()));
  for (int cell = 0; cell < mesh_.cell_count(); ++cell) {
    auto& pts = points_[static_cast<std::size_t>(cell)];
    pts.reserve(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = map_to_physical(mesh_, cell, rule.points[q]);
      const ScalarSample e = eps(x.x(), x.y());
      const DragCoefficients ab = alpha_beta(e.value);
      pts.push_back({rule.weights[q] * jac.det(), x, e.value, e.grad, ab.alpha, ab.beta});
    }
  }
  build_linear_blocks();
}

void Assembler::build_linear_blocks() {
  const int nu = maps_.velocity_dof_count(), np = maps_.pressure_dof_count();
  const std::size_t cells = static_cast<std::size_t>(mesh_.cell_count());
  std::vector<Triplet> tv, tc, tb;
  tv.reserve(cells * 162);
  tc.reserve(cells * 162);
  tb.reserve(cells * 54);
  load_ = Vector::Zero(nu);

  for (int cell = 0; cell < mesh_.cell_count(); ++cell) {
    const auto nodes = maps_.cell_nodes(cell);
    const auto& pts = points_[static_cast<std::size_t>(cell)];
    Eigen::Matrix<double, 9, 9> kv = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 9> kc = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 3, 18> kb = Eigen::Matrix<double, 3, 18>::Zero();
    Eigen::Matrix<double, 18, 1> fl = Eigen::Matrix<double, 18, 1>::Zero();

    for (std::size_t q = 0; q < pts.size(); ++q) {
      const PointData& pd = pts[q];
      const Q2Values& b = q2_[q];
      const P1Values& pm = p1_[q];
      const double visc = pd.weight * pd.eps / re_;
      const double darcy = pd.weight * pd.alpha / re_;
      const Vec2 f = forcing_(pd.x.x(), pd.x.y());
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          kv(i, j) += visc * b.grad[i].dot(b.grad[j]);
          kc(i, j) += darcy * b.value[i] * b.value[j];
        }
        for (int c = 0; c < 2; ++c) {
          fl(c * 9 + i) += pd.weight * f[c] * b.value[i];
          // div(eps phi) for phi = N_i e_c.
          const double div_eps = pd.eps * b.grad[i][c] + pd.grad_eps[c] * b.value[i];
          for (int m = 0; m < 3; ++m) kb(m, c * 9 + i) += pd.weight * div_eps * pm.value[m];
        }
      }
    }

    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 9; ++i) {
        const int row = maps_.velocity_dof(nodes[i], c);
        load_[row] += fl(c * 9 + i);
        for (int j = 0; j < 9; ++j) {
          const int col = maps_.velocity_dof(nodes[j], c);
          tv.emplace_back(row, col, kv(i, j));
          tc.emplace_back(row, col, kc(i, j));
        }
        for (int m = 0; m < 3; ++m) tb.emplace_back(maps_.pressure_dof(cell, m), row, kb(m, c * 9 + i));
      }
    }
  }

  a_visc_.resize(nu, nu);
  a_visc_.setFromTriplets(tv.begin(), tv.end());
  c_darcy_.resize(nu, nu);
  c_darcy_.setFromTriplets(tc.begin(), tc.end());
  b_.resize(np, nu);
  b_.setFromTriplets(tb.begin(), tb.end());
}

SaddleSystem Assembler::assemble(const Vector& w, NonlinearTerms terms) const {
  const int nu = maps_.velocity_dof_count();
  if (w.size() != nu) throw std::invalid_argument("Assembler::assemble: w has the wrong size");

  SaddleSystem sys;
  sys.a_visc = a_visc_;
  sys.c_darcy = c_darcy_;
  sys.b = b_;
  sys.load = load_;
  sys.n_conv.resize(nu, nu);
  sys.d_forch.resize(nu, nu);
  if (!terms.convection && !terms.forchheimer) return sys;

  const std::size_t cells = static_cast<std::size_t>(mesh_.cell_count());
  std::vector<Triplet> tn, td;
  if (terms.convection) tn.reserve(cells * 162);
  if (terms.forchheimer) td.reserve(cells * 162);

  for (int cell = 0; cell < mesh_.cell_count(); ++cell) {
    const auto nodes = maps_.cell_nodes(cell);
    const auto& pts = points_[static_cast<std::size_t>(cell)];
    Eigen::Matrix<double, 9, 2> wl;
    for (int k = 0; k < 9; ++k)
      for (int c = 0; c < 2; ++c) wl(k, c) = w[maps_.velocity_dof(nodes[k], c)];

    Eigen::Matrix<double, 9, 9> kn = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 9> kd = Eigen::Matrix<double, 9, 9>::Zero();
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const PointData& pd = pts[q];
      const Q2Values& b = q2_[q];
      Vec2 wq = Vec2::Zero();
      for (int k = 0; k < 9; ++k) wq += b.value[k] * wl.row(k).transpose();
      const double drag = pd.weight * pd.beta * wq.norm();
      const Vec2 transport = pd.weight * pd.eps * wq;
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          kn(i, j) += transport.dot(b.grad[j]) * b.value[i];
          kd(i, j) += drag * b.value[j] * b.value[i];
        }
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 9; ++i) {
        const int row = maps_.velocity_dof(nodes[i], c);
        for (int j = 0; j < 9; ++j) {
          const int col = maps_.velocity_dof(nodes[j], c);
          if (terms.convection) tn.emplace_back(row, col, kn(i, j));
          if (terms.forchheimer) td.emplace_back(row, col, kd(i, j));
        }
      }
    }
  }
  sys.n_conv.setFromTriplets(tn.begin(), tn.end());
  sys.d_forch.setFromTriplets(td.begin(), td.end());
  return sys;
}

SaddleSystem assemble_system(const StructuredQuadMesh& mesh, const DofMaps& maps,
                             const CaseConfig& cfg, const Vector& w) {
  return Assembler(mesh, maps, cfg).assemble(w);
}

void write_matrix_coo(std::ostream& os, const SparseMatrix& m) {
  os << "# " << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[96];
  // Row-major order for readability.
  Eigen::SparseMatrix<double, Eigen::RowMajor> r = m;
  for (Eigen::Index k = 0; k < r.outerSize(); ++k) {
    for (decltype(r)::InnerIterator it(r, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      os << buf;
    }
  }
}

}  // namespace packbed
