#include "packbed/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

namespace packbed {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<Jet3, 2> seed_point(double x, double y) {
  return {Jet3::variable(x, 0), Jet3::variable(y, 1)};
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

/// Random polynomial vector field of degree <= 2 per direction.
struct RandomQ2Field {
  double c[2][3][3];

  explicit RandomQ2Field(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& comp : c)
      for (auto& row : comp)
        for (double& v : row) v = dist(rng);
  }

  VectorSample operator()(double x, double y) const {
    const double px[3] = {1.0, x, x * x}, py[3] = {1.0, y, y * y};
    const double dx[3] = {0.0, 1.0, 2.0 * x}, dy[3] = {0.0, 1.0, 2.0 * y};
    VectorSample s;
    for (int i = 0; i < 2; ++i) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          s.value[i] += c[i][a][b] * px[a] * py[b];
          s.grad(i, 0) += c[i][a][b] * dx[a] * py[b];
          s.grad(i, 1) += c[i][a][b] * px[a] * dy[b];
        }
      }
    }
    return s;
  }
};

Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Polynomial porosity used by the identity checks: (0,1) x (-1/2,1/2) -> [0.55, 0.85].
JetFn test_porosity() {
  return [](const Jet3& x, const Jet3& y) { return 0.6 + 0.2 * x + 0.1 * y; };
}

}  // namespace

ScalarFieldFn jet_scalar_field(JetFn f) {
  return [f = std::move(f)](double x, double y) {
    const auto [jx, jy] = seed_point(x, y);
    const Jet3 v = f(jx, jy);
    return ScalarSample{v.value(), Vec2(v.partial(1, 0), v.partial(0, 1))};
  };
}

ManufacturedCase ManufacturedCase::smooth() {
  ManufacturedCase mc;
  mc.name = "smooth";
  mc.stream = [](const Jet3& x, const Jet3& y) {
    const Jet3 s = sin(kPi * x), c = cos(kPi * y);
    return s * s * c * c;
  };
  mc.porosity = [](const Jet3& x, const Jet3& y) {
    return 0.7 + 0.15 * x + 0.1 * y + 0.05 * x * y;
  };
  mc.pressure = [](const Jet3& x, const Jet3& y) { return sin(kPi * x) * sin(kPi * y); };
  return mc;
}

ManufacturedCase ManufacturedCase::polynomial() {
  ManufacturedCase mc;
  mc.name = "polynomial";
  // u = (2xy + y^2 - x^2, 2xy - y^2)
  mc.stream = [](const Jet3& x, const Jet3& y) {
    return x * y * y + y * y * y / 3.0 - x * x * y;
  };
  mc.porosity = [](const Jet3&, const Jet3&) { return Jet3(1.0); };
  mc.pressure = [](const Jet3& x, const Jet3&) { return x - 0.5; };
  return mc;
}

DivFreeField::DivFreeField(JetFn stream, JetFn porosity)
    : stream_(std::move(stream)), porosity_(std::move(porosity)) {}

std::array<Jet<2>, 2> DivFreeField::jets(double x, double y) const {
  const auto [jx, jy] = seed_point(x, y);
  const Jet3 psi = stream_(jx, jy);
  const Jet<2> eps = porosity_(jx, jy).truncate<2>();
  return {psi.d(1) / eps, -psi.d(0) / eps};
}

VectorSample DivFreeField::sample(double x, double y) const {
  const auto u = jets(x, y);
  VectorSample s;
  for (int i = 0; i < 2; ++i) {
    s.value[i] = u[static_cast<std::size_t>(i)].value();
    s.grad(i, 0) = u[static_cast<std::size_t>(i)].partial(1, 0);
    s.grad(i, 1) = u[static_cast<std::size_t>(i)].partial(0, 1);
  }
  return s;
}

double DivFreeField::eps_divergence(double x, double y) const {
  const auto u = jets(x, y);
  const auto [jx, jy] = seed_point(x, y);
  const Jet<2> eps = porosity_(jx, jy).truncate<2>();
  return (eps * u[0]).d(0).value() + (eps * u[1]).d(1).value();
}

VectorFieldFn DivFreeField::field() const {
  return [self = *this](double x, double y) { return self.sample(x, y); };
}

DivFreeField make_divfree_field(JetFn stream, JetFn porosity) {
  return {std::move(stream), std::move(porosity)};
}

VectorFn mms_forcing(const ManufacturedCase& mc, double re) {
  const DivFreeField exact(mc.stream, mc.porosity);
  return [exact, mc, re](double x, double y) {
    const auto u = exact.jets(x, y);
    const auto [jx, jy] = seed_point(x, y);
    const Jet3 e = mc.porosity(jx, jy);
    const Jet3 p = mc.pressure(jx, jy);
    const double eps = e.value();
    const Vec2 grad_eps(e.partial(1, 0), e.partial(0, 1));
    const Vec2 grad_p(p.partial(1, 0), p.partial(0, 1));
    const Vec2 vel(u[0].value(), u[1].value());
    const DragCoefficients ab = alpha_beta(eps);

    Vec2 f;
    for (int i = 0; i < 2; ++i) {
      const Jet<2>& ui = u[static_cast<std::size_t>(i)];
      const Vec2 grad_ui(ui.partial(1, 0), ui.partial(0, 1));
      const double lap_ui = ui.partial(2, 0) + ui.partial(0, 2);
      const double viscous = -(eps * lap_ui + grad_eps.dot(grad_ui)) / re;
      const double convective = eps * vel.dot(grad_ui);
      f[i] = viscous + convective + eps * grad_p[i] + ab.alpha / re * vel[i] +
             ab.beta * vel.norm() * vel[i];
    }
    return f;
  };
}

CaseConfig mms_config(const ManufacturedCase& mc, int nx, int ny, double re, int quad_order) {
  CaseConfig cfg;
  cfg.length = mc.length;
  cfg.half_width = mc.half_width;
  cfg.nx = nx;
  cfg.ny = ny;
  cfg.re = re;
  cfg.quad_order = quad_order;
  cfg.ramp = mc.half_width;
  cfg.porosity = jet_scalar_field(mc.porosity);
  cfg.forcing = mms_forcing(mc, re);
  const DivFreeField exact(mc.stream, mc.porosity);
  cfg.set_dirichlet_everywhere([exact](double x, double y) { return exact.sample(x, y).value; });
  return cfg;
}

FieldErrors compute_errors(const SolutionFields& fields, const VectorFieldFn& exact_u,
                           const std::function<double(double, double)>& exact_p, int quad_order) {
  const StructuredQuadMesh& mesh = fields.mesh();
  const QuadratureRule rule = gauss_rule(quad_order);
  const double det = jacobian(mesh).det();
  double l2 = 0.0, h1 = 0.0, pl2 = 0.0;
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2& ref = rule.points[q];
      const Vec2 x = map_to_physical(mesh, cell, ref);
      const VectorSample uh = eval_velocity(mesh, fields.dofs(), fields.velocity(), cell, ref);
      const VectorSample ue = exact_u(x.x(), x.y());
      const double ph = eval_pressure(mesh, fields.pressure(), cell, ref);
      const double w = rule.weights[q] * det;
      l2 += w * (uh.value - ue.value).squaredNorm();
      h1 += w * (uh.grad - ue.grad).squaredNorm();
      const double dp = ph - exact_p(x.x(), x.y());
      pl2 += w * dp * dp;
    }
  }
  return {std::sqrt(l2), std::sqrt(h1), std::sqrt(pl2)};
}

double ConvergenceTable::order_u_l2(std::size_t k) const {
  return order(levels.at(k - 1).errors.u_l2, levels.at(k).errors.u_l2);
}
double ConvergenceTable::order_u_h1(std::size_t k) const {
  return order(levels.at(k - 1).errors.u_h1, levels.at(k).errors.u_h1);
}
double ConvergenceTable::order_p_l2(std::size_t k) const {
  return order(levels.at(k - 1).errors.p_l2, levels.at(k).errors.p_l2);
}

ConvergenceTable run_convergence_study(const ManufacturedCase& mc, const StudyOptions& opts) {
  if (opts.levels < 1 || opts.base_cells < 1) {
    throw std::invalid_argument("run_convergence_study: need levels >= 1 and base_cells >= 1");
  }
  const DivFreeField exact(mc.stream, mc.porosity);
  const VectorFieldFn exact_u = exact.field();
  const JetFn pressure = mc.pressure;
  const auto exact_p = [pressure](double x, double y) {
    return pressure(Jet3(x), Jet3(y)).value();
  };

  ConvergenceTable table;
  for (int level = 0; level < opts.levels; ++level) {
    const int nx = opts.base_cells << level;
    const int ny = std::max(1, static_cast<int>(std::lround(nx * 2.0 * mc.half_width / mc.length)));
    CaseConfig cfg = mms_config(mc, nx, ny, opts.re, opts.quad_order);
    cfg.picard = opts.picard;
    NonlinearResult result = [&] {
      try {
        return FlowProblem(cfg).solve();
      } catch (const SolverError& e) {
        throw SolverError("convergence study level " + std::to_string(level) + ": " + e.what(),
                          e.report());
      }
    }();
    if (!result.report.converged) {
      throw SolverError("convergence study level " + std::to_string(level) +
                            ": Picard iteration did not converge",
                        result.report);
    }
    ConvergenceLevel row;
    row.nx = nx;
    row.ny = ny;
    row.h = mc.length / nx;
    row.errors = compute_errors(result.fields, exact_u, exact_p,
                                std::min(opts.quad_order + 2, kMaxGaussOrder));
    row.iterations = result.report.iterations;
    table.levels.push_back(row);
  }
  return table;
}

void write_convergence_table(std::ostream& os, const ConvergenceTable& table) {
  os << "# h  err_u_L2  order  err_u_H1  order  err_p_L2  order\n";
  char buf[256];
  for (std::size_t k = 0; k < table.levels.size(); ++k) {
    const auto& e = table.levels[k].errors;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof buf, "%.6e  %.6e  %.3f  %.6e  %.3f  %.6e  %.3f\n", table.levels[k].h,
                  e.u_l2, k ? table.order_u_l2(k) : nan, e.u_h1, k ? table.order_u_h1(k) : nan,
                  e.p_l2, k ? table.order_p_l2(k) : nan);
    os << buf;
  }
}

SkewCheck check_skew_symmetry(int trials, unsigned seed, bool boundary_trace) {
  const StructuredQuadMesh mesh(1.0, 0.5, 2, 2);
  constexpr int kExactOrder = 6;  // integrands have degree <= 9 per direction
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  SkewCheck out;
  out.trials = trials;
  for (int t = 0; t < trials; ++t) {
    // Linear porosity within [0.475, 0.925] on the domain.
    const double e0 = 0.7, ex = 0.15 * unit(rng), ey = 0.15 * unit(rng);
    const JetFn porosity = [=](const Jet3& x, const Jet3& y) { return e0 + ex * x + ey * y; };
    const double c0 = unit(rng), c1 = unit(rng), c2 = unit(rng), c3 = unit(rng);
    JetFn stream;
    if (boundary_trace) {
      stream = [=](const Jet3& x, const Jet3& y) {
        return c0 * x + c1 * y * y + c2 * x * x * y + c3 * y * y * y;
      };
    } else {
      // x^2 (1-x)^2 (y+1/2)^2 (1/2-y)^2 times a random linear factor.
      stream = [=](const Jet3& x, const Jet3& y) {
        const Jet3 bx = x * (1.0 - x), by = (y + 0.5) * (0.5 - y);
        return bx * bx * by * by * (c0 + c1 * x + c2 * y);
      };
    }
    const VectorFieldFn w = make_divfree_field(stream, porosity).field();
    const ScalarFieldFn eps = jet_scalar_field(porosity);
    const RandomQ2Field uf(rng), vf(rng);
    const VectorFieldFn u = uf, v = vf;

    const double nuv = eval_form_n(mesh, w, u, v, eps, kExactOrder);
    const double nvu = eval_form_n(mesh, w, v, u, eps, kExactOrder);
    const double scale = eval_form_n_magnitude(mesh, w, u, v, eps, kExactOrder) +
                         eval_form_n_magnitude(mesh, w, v, u, eps, kExactOrder);
    out.max_violation = std::max(out.max_violation, std::abs(nuv + nvu) / scale);

    const double nuu = eval_form_n(mesh, w, u, u, eps, kExactOrder);
    const double self_scale = eval_form_n_magnitude(mesh, w, u, u, eps, kExactOrder);
    out.max_self_violation = std::max(out.max_self_violation, std::abs(nuu) / self_scale);
  }
  return out;
}

double check_matrix_free(int trials, unsigned seed) {
  CaseConfig cfg;
  cfg.length = 1.0;
  cfg.half_width = 0.5;
  cfg.nx = 3;
  cfg.ny = 2;
  cfg.re = 7.0;
  cfg.quad_order = 3;
  cfg.porosity = jet_scalar_field(test_porosity());
  const StructuredQuadMesh mesh = build_mesh(cfg);
  const DofMaps maps(mesh);
  const Assembler assembler(mesh, maps, cfg);
  const ScalarFieldFn eps = cfg.porosity;
  std::mt19937_64 rng(seed);

  auto bilinear = [](const SparseMatrix& m, const Vector& v, const Vector& u) {
    const SparseMatrix abs_m = m.cwiseAbs();
    return std::pair{v.dot(m * u), v.cwiseAbs().dot(abs_m * u.cwiseAbs())};
  };

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector u = random_vector(rng, maps.velocity_dof_count());
    const Vector v = random_vector(rng, maps.velocity_dof_count());
    const Vector w = random_vector(rng, maps.velocity_dof_count());
    const Vector q = random_vector(rng, maps.pressure_dof_count());
    const SaddleSystem sys = assembler.assemble(w);
    const auto uf = fe_velocity(mesh, maps, u), vf = fe_velocity(mesh, maps, v);
    const auto wf = fe_velocity(mesh, maps, w);
    const auto qf = fe_pressure(mesh, q);

    auto record = [&](std::pair<double, double> matrix_value, double form_value) {
      worst = std::max(worst, std::abs(matrix_value.first - form_value) / matrix_value.second);
    };
    record(bilinear(sys.a_visc, v, u), eval_form_a(mesh, uf, vf, eps, cfg.re, cfg.quad_order));
    record(bilinear(sys.c_darcy, v, u), eval_form_c(mesh, uf, vf, eps, cfg.re, cfg.quad_order));
    record(bilinear(sys.n_conv, v, u), eval_form_n(mesh, wf, uf, vf, eps, cfg.quad_order));
    record(bilinear(sys.d_forch, v, u), eval_form_d(mesh, wf, uf, vf, eps, cfg.quad_order));
    record(bilinear(sys.b, q, u), eval_form_b(mesh, uf, qf, eps, cfg.quad_order));
  }
  return worst;
}

ContinuityBounds check_form_continuity(int trials, unsigned seed) {
  CaseConfig cfg;
  cfg.length = 1.0;
  cfg.half_width = 0.5;
  cfg.nx = 4;
  cfg.ny = 4;
  cfg.quad_order = 3;
  cfg.porosity = jet_scalar_field(test_porosity());
  const StructuredQuadMesh mesh = build_mesh(cfg);
  const DofMaps maps(mesh);
  const Assembler assembler(mesh, maps, cfg);
  const Vector zero_p = Vector::Zero(maps.pressure_dof_count());
  const VectorFieldFn zero_u = [](double, double) { return VectorSample{}; };
  const auto zero_p_fn = [](double, double) { return 0.0; };
  std::mt19937_64 rng(seed);

  auto unit_h1 = [&](Vector c) {
    const FieldErrors e =
        compute_errors(SolutionFields(mesh, c, zero_p), zero_u, zero_p_fn, cfg.quad_order + 2);
    return Vector(c / std::hypot(e.u_l2, e.u_h1));
  };

  ContinuityBounds out;
  for (int t = 0; t < trials; ++t) {
    const Vector u = unit_h1(random_vector(rng, maps.velocity_dof_count()));
    const Vector v = unit_h1(random_vector(rng, maps.velocity_dof_count()));
    const Vector w = unit_h1(random_vector(rng, maps.velocity_dof_count()));
    const SaddleSystem sys = assembler.assemble(w);
    out.max_n = std::max(out.max_n, std::abs(v.dot(sys.n_conv * u)));
    out.max_d = std::max(out.max_d, std::abs(v.dot(sys.d_forch * u)));
  }
  return out;
}

FluxReport check_global_flux(const SolutionFields& fields, const CaseConfig& cfg) {
  const StructuredQuadMesh& mesh = fields.mesh();
  const ScalarFieldFn eps = porosity_field(cfg);
  const QuadratureRule1D rule = gauss_rule_1d(std::min(cfg.quad_order + 2, kMaxGaussOrder));
  FluxReport out;
  for (const auto& edge : mesh.boundary_edges()) {
    const double half_length = edge.fixed_axis == 0 ? 0.5 * mesh.hy() : 0.5 * mesh.hx();
    double flux = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec2 ref;
      ref[edge.fixed_axis] = edge.fixed_value;
      ref[1 - edge.fixed_axis] = rule.points[q];
      const Vec2 x = map_to_physical(mesh, edge.cell, ref);
      const Vec2 u = eval_velocity(mesh, fields.dofs(), fields.velocity(), edge.cell, ref).value;
      flux += rule.weights[q] * half_length * eps(x.x(), x.y()).value * u.dot(edge.normal);
    }
    switch (edge.tag) {
      case BoundaryTag::Inlet: out.inflow += flux; break;
      case BoundaryTag::Outlet: out.outflow += flux; break;
      default: (edge.normal.y() < 0.0 ? out.wall_bottom : out.wall_top) += flux; break;
    }
  }
  return out;
}

}  // namespace packbed
