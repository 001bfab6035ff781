#include "packbed/solver.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>

using namespace packbed;
using namespace packbed::testing;

namespace {

CaseConfig coarse_reactor(double re = 50.0) {
  CaseConfig cfg = CaseConfig::reactor(re);
  cfg.nx = 24;
  cfg.ny = 16;
  return cfg;
}

CaseConfig poiseuille(int nx, int ny) {
  CaseConfig cfg;
  cfg.nx = nx;
  cfg.ny = ny;
  cfg.porosity = constant_eps(1.0);
  const double r = cfg.half_width;
  cfg.inlet_velocity = [r](double, double y) { return Vec2(1.0 - (y / r) * (y / r), 0.0); };
  return cfg;
}

/// Residual from the unconstrained blocks: free rows carry the weak
/// equations, fixed rows the boundary data.
Vector block_residual(const FlowProblem& problem, const SolutionFields& f) {
  const SaddleSystem sys = problem.assembler().assemble(f.velocity());
  const Vector& u = f.velocity();
  Vector p = f.pressure();
  const int nu = problem.dofs().velocity_dof_count();
  if (problem.config().enclosed()) {
    const double shift = p[0];
    for (Eigen::Index c = 0; c < p.size(); c += 3) p[c] -= shift;
  }
  Vector r(nu + p.size());
  r.head(nu) = sys.velocity_block() * u - SparseMatrix(sys.b.transpose()) * p - sys.load;
  r.tail(p.size()) = sys.b * u;
  const Constraints& c = problem.constraints();
  for (std::size_t k = 0; k < c.dofs.size(); ++k) {
    const int d = c.dofs[k];
    r[d] = (d < nu ? u[d] : p[d - nu]) - c.values[k];
  }
  return r;
}

}  // namespace

TEST_CASE("identity system returns its right-hand side") {
  SparseMatrix eye(5, 5);
  eye.setIdentity();
  const Vector rhs = (Vector(5) << 1.0, -2.0, 3.5, 0.0, 1e-3).finished();
  CHECK(solve_linear(eye, rhs) == rhs);
}

TEST_CASE("sparse solve agrees with a dense LU oracle") {
  CaseConfig cfg = unit_square(2, 2);
  cfg.porosity = constant_eps(1.0);
  cfg.forcing_constant = Vec2(1.0, -0.5);
  cfg.set_dirichlet_everywhere([](double, double) { return Vec2::Zero(); });
  const FlowProblem problem(cfg);
  const ConstrainedSystem sys = problem.linear_system(Vector::Zero(problem.dofs().velocity_dof_count()), {false, false});
  const Vector sparse = solve_linear(sys);
  const Eigen::MatrixXd dense(sys.matrix);
  const Vector oracle = dense.partialPivLu().solve(sys.rhs);
  CHECK((sparse - oracle).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + oracle.lpNorm<Eigen::Infinity>()));
  const Vector r = sys.rhs - sys.matrix * sparse;
  CHECK(r.norm() <= 1e-10 * (sys.rhs.norm() + dense.cwiseAbs().maxCoeff() * sparse.norm()));
}

TEST_CASE("solution is invariant under DOF permutation") {
  const FlowProblem problem(coarse_reactor());
  const ConstrainedSystem sys = problem.linear_system(Vector::Zero(problem.dofs().velocity_dof_count()));
  const Eigen::Index n = sys.matrix.rows();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(21);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm.indices()[i] = order[static_cast<std::size_t>(i)];
  const SparseMatrix permuted = perm * sys.matrix * perm.transpose();
  const Vector x = solve_linear(sys);
  const Vector y = perm.inverse() * solve_linear(permuted, perm * sys.rhs);
  CHECK((x - y).lpNorm<Eigen::Infinity>() <= 1e-9 * x.lpNorm<Eigen::Infinity>());
}

TEST_CASE("singular systems are reported") {
  SparseMatrix zero(3, 3);
  zero.insert(0, 0) = 1.0;
  zero.makeCompressed();
  CHECK_THROWS_AS(solve_linear(zero, Vector::Ones(3)), SolverError);
  CHECK_THROWS_AS(solve_linear(zero, Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("zero data gives the zero solution in one solve") {
  CaseConfig cfg = unit_square(3, 3);
  cfg.set_dirichlet_everywhere([](double, double) { return Vec2::Zero(); });
  const NonlinearResult r = solve_nonlinear(cfg);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK(r.fields.velocity().lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(r.fields.pressure().lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("Poiseuille flow is reproduced exactly") {
  const CaseConfig cfg = poiseuille(8, 8);
  const NonlinearResult r = solve_nonlinear(cfg);
  REQUIRE(r.report.converged);
  const DofMaps& maps = r.fields.dofs();
  const double L = cfg.length, R = cfg.half_width;
  double err_u = 0.0, err_p = 0.0;
  for (int n = 0; n < maps.node_count(); ++n) {
    const Vec2 x = maps.node_position(n);
    const Vec2 u(r.fields.velocity()[maps.velocity_dof(n, 0)], r.fields.velocity()[maps.velocity_dof(n, 1)]);
    err_u = std::max(err_u, (u - Vec2(1.0 - (x.y() / R) * (x.y() / R), 0.0)).lpNorm<Eigen::Infinity>());
    err_p = std::max(err_p, std::abs(r.fields.pressure_at(x) - 2.0 * (L - x.x()) / (cfg.re * R * R)));
  }
  CHECK(err_u <= 1e-8);
  CHECK(err_p <= 1e-8);
}

TEST_CASE("Stokes-Darcy initial guess") {
  CaseConfig cfg = poiseuille(4, 4);
  const FlowProblem problem(cfg);
  const SolutionFields a = problem.solve_stokes_darcy();
  const SolutionFields b = solve_stokes_darcy(cfg);
  CHECK(a.velocity() == b.velocity());
  CHECK(a.pressure() == b.pressure());

  // With eps = 1 (beta = 0) one Picard step from w = 0 is the Stokes solve.
  const SolutionFields step = problem.picard_step(problem.zero_fields());
  CHECK((step.velocity() - a.velocity()).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((step.pressure() - a.pressure()).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("Picard fixed point and report invariants") {
  const CaseConfig cfg = coarse_reactor();
  const FlowProblem problem(cfg);
  const NonlinearResult r = problem.solve();
  REQUIRE(r.report.converged);
  CHECK(r.report.iterations <= cfg.picard.max_iter + 1);
  CHECK(r.report.iterations == static_cast<int>(r.report.residuals.size()));
  const double r0 = r.report.residuals.front();
  CHECK(r.report.residuals.back() <= std::max(cfg.picard.tol_rel * r0, cfg.picard.tol_abs));
  CHECK(r.report.constraint_residual <= 10.0 * cfg.picard.tol_abs);
  CHECK(r.report.relaxation_events.size() <= 1);

  const double res = problem.residual(r.fields);
  CHECK(res == doctest::Approx(r.report.residuals.back()).epsilon(1e-6));
  const SolutionFields next = problem.picard_step(r.fields);
  CHECK(problem.residual(next) <= std::max(cfg.picard.tol_rel * r0, cfg.picard.tol_abs));
  CHECK(nonlinear_residual(r.fields, cfg) == doctest::Approx(res).epsilon(1e-12));
}

TEST_CASE("residual matches the block re-assembly oracle") {
  for (bool enclosed : {false, true}) {
    CaseConfig cfg = coarse_reactor();
    cfg.nx = 8;
    cfg.ny = 6;
    if (enclosed) {
      cfg = unit_square(3, 3);
      cfg.set_dirichlet_everywhere([](double, double) { return Vec2::Zero(); });
      cfg.forcing_constant = Vec2(0.3, 1.0);
    }
    const FlowProblem problem(cfg);
    std::mt19937_64 rng(22);
    SolutionFields f(problem.mesh(), random_vector(rng, problem.dofs().velocity_dof_count()),
                     random_vector(rng, problem.dofs().pressure_dof_count()));
    const Constraints& c = problem.constraints();
    for (std::size_t k = 0; k < c.dofs.size(); ++k)
      if (c.dofs[k] < f.velocity().size()) f.velocity()[c.dofs[k]] = c.values[k];
    const Vector oracle = block_residual(problem, f);
    const Vector r = problem.residual_vector(f);
    CHECK((r - oracle).norm() <= 1e-12 * oracle.norm());
  }
}

TEST_CASE("residual of zero fields is the free load") {
  CaseConfig cfg = unit_square(3, 2);
  cfg.set_dirichlet_everywhere([](double, double) { return Vec2::Zero(); });
  cfg.forcing_constant = Vec2(2.0, -1.0);
  const FlowProblem problem(cfg);
  Vector load = problem.assembler().load();
  for (int d : problem.constraints().dofs)
    if (d < load.size()) load[d] = 0.0;
  CHECK(problem.residual(problem.zero_fields()) == doctest::Approx(load.norm()).epsilon(1e-14));
}

TEST_CASE("Picard contracts at small data") {
  CaseConfig cfg = coarse_reactor();
  cfg.u_in = 1e-2;
  const FlowProblem problem(cfg);
  const SolutionFields u0 = problem.solve_stokes_darcy();
  const SolutionFields u1 = problem.picard_step(u0);
  const SolutionFields u2 = problem.picard_step(u1);
  CHECK((u2.velocity() - u1.velocity()).norm() < (u1.velocity() - u0.velocity()).norm());
}

TEST_CASE("residual decreases monotonically after at most one relaxation") {
  for (double re : {5.0, 50.0, 200.0}) {
    CaseConfig cfg = coarse_reactor(re);
    cfg.nx = 30;
    cfg.ny = 20;
    const NonlinearResult r = solve_nonlinear(cfg);
    REQUIRE(r.report.converged);
    REQUIRE(r.report.relaxation_events.size() <= 1);
    const auto& res = r.report.residuals;
    const std::size_t from = r.report.relaxation_events.empty() ? 1 : r.report.relaxation_events.front();
    for (std::size_t k = from; k < res.size(); ++k) CHECK(res[k] < res[k - 1]);
  }
}

TEST_CASE("a third residual increase is reported as divergence") {
  CaseConfig cfg = unit_square(8, 8);
  cfg.porosity = constant_eps(1.0);
  cfg.re = 1e4;
  cfg.set_dirichlet_everywhere([](double x, double y) {
    return y > 0.5 - 1e-12 ? Vec2(16.0 * x * x * (1.0 - x) * (1.0 - x), 0.0) : Vec2(0.0, 0.0);
  });
  try {
    solve_nonlinear(cfg);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    REQUIRE(e.report().has_value());
    const NonlinearReport& rep = *e.report();
    CHECK(rep.relaxation_events.size() == 2);
    CHECK(rep.final_relaxation == doctest::Approx(0.49));
    CHECK_FALSE(rep.converged);
    const auto& res = rep.residuals;
    CHECK(res.back() > res[res.size() - 2]);
    CHECK(std::string(e.what()).find("after 2 relaxation reductions") != std::string::npos);
  }
}

TEST_CASE("non-convergence returns the best iterate") {
  CaseConfig cfg = coarse_reactor(200.0);
  cfg.picard.max_iter = 2;
  const NonlinearResult r = solve_nonlinear(cfg);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 3);
  CHECK(r.fields.finite());
  const double best = *std::min_element(r.report.residuals.begin(), r.report.residuals.end());
  CHECK(nonlinear_residual(r.fields, cfg) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("invalid configurations are rejected before solving") {
  CaseConfig cfg = coarse_reactor();
  cfg.re = -1.0;
  CHECK_THROWS_AS(FlowProblem{cfg}, ConfigError);
}

TEST_CASE("small-data solutions do not depend on the initial guess") {
  CaseConfig cfg = coarse_reactor();
  cfg.u_in = 1e-2;
  cfg.picard.tol_rel = 1e-10;
  cfg.picard.tol_abs = 1e-14;
  const FlowProblem problem(cfg);
  const NonlinearResult a = problem.solve();
  std::mt19937_64 rng(23);
  SolutionFields guess = problem.zero_fields();
  guess.velocity() = 1e-2 * random_vector(rng, guess.velocity().size());
  const NonlinearResult b = problem.solve(guess);
  REQUIRE(a.report.converged);
  REQUIRE(b.report.converged);
  CHECK((a.fields.velocity() - b.fields.velocity()).norm() <= 1e-6 * a.fields.velocity().norm());
}
