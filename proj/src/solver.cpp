#include "packbed/solver.hpp"

#include <cmath>
#include <limits>

#ifdef PACKBED_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

namespace packbed {

namespace {

#ifdef PACKBED_HAVE_UMFPACK
using SparseLUSolver = Eigen::UmfPackLU<SparseMatrix>;
#else
using SparseLUSolver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif

constexpr double kDivergenceFactor = 1e6;
constexpr double kRelaxationFactor = 0.7;
constexpr int kMaxRelaxationEvents = 2;

CaseConfig validated(CaseConfig cfg) {
  ensure_valid(cfg);
  return cfg;
}

}  // namespace

Vector solve_linear(const SparseMatrix& matrix, const Vector& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) {
    throw std::invalid_argument("solve_linear: inconsistent dimensions");
  }
  SparseMatrix m = matrix;
  m.makeCompressed();
  SparseLUSolver lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) {
    throw SolverError(
        "sparse LU factorization failed: singular saddle-point system "
        "(no outflow boundary and no pressure gauge, or inconsistent boundary conditions)");
  }
  Vector x = lu.solve(rhs);
  // One step of iterative refinement.
  const Vector r = rhs - m * x;
  x += lu.solve(r);
  if (!x.allFinite()) {
    throw SolverError("sparse LU solve produced non-finite values: singular saddle-point system");
  }
  return x;
}

Vector solve_linear(const ConstrainedSystem& system) {
  return solve_linear(system.matrix, system.rhs);
}

FlowProblem::FlowProblem(CaseConfig cfg)
    : cfg_(validated(std::move(cfg))),
      mesh_(build_mesh(cfg_)),
      dofs_(mesh_),
      assembler_(mesh_, dofs_, cfg_),
      constraints_(dirichlet_constraints(mesh_, dofs_, make_dirichlet_data(cfg_))) {}

SolutionFields FlowProblem::zero_fields() const {
  return {mesh_, Vector::Zero(dofs_.velocity_dof_count()), Vector::Zero(dofs_.pressure_dof_count())};
}

ConstrainedSystem FlowProblem::linear_system(const Vector& w, NonlinearTerms terms) const {
  return apply_dirichlet(assembler_.assemble(w, terms), constraints_);
}

SolutionFields FlowProblem::from_solution(const Vector& x) const {
  const int nu = dofs_.velocity_dof_count();
  SolutionFields f(mesh_, x.head(nu), x.tail(dofs_.pressure_dof_count()));
  for (std::size_t i = 0; i < constraints_.dofs.size(); ++i) {
    const int d = constraints_.dofs[i];
    if (d < nu) f.velocity()[d] = constraints_.values[i];
  }
  return f;
}

Vector FlowProblem::stacked(const SolutionFields& fields) const {
  Vector x(dofs_.total_dof_count());
  x << fields.velocity(), fields.pressure();
  return x;
}

void FlowProblem::normalize_pressure(SolutionFields& fields) const {
  if (!cfg_.enclosed()) return;
  // Only the constant mode has nonzero mean on a cell.
  Vector& p = fields.pressure();
  double integral = 0.0, area = 0.0;
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    integral += p[3 * c] * mesh_.cell_area(c);
    area += mesh_.cell_area(c);
  }
  const double mean = integral / area;
  for (int c = 0; c < mesh_.cell_count(); ++c) p[3 * c] -= mean;
}

SolutionFields FlowProblem::solve_stokes_darcy() const {
  const Vector w = Vector::Zero(dofs_.velocity_dof_count());
  SolutionFields f = from_solution(solve_linear(linear_system(w, {false, false})));
  normalize_pressure(f);
  return f;
}

SolutionFields FlowProblem::picard_step(const SolutionFields& w, double omega) const {
  SolutionFields next = from_solution(solve_linear(linear_system(w.velocity())));
  if (omega != 1.0) {
    next.velocity() = (1.0 - omega) * w.velocity() + omega * next.velocity();
    next.pressure() = (1.0 - omega) * w.pressure() + omega * next.pressure();
  }
  normalize_pressure(next);
  return next;
}

Vector FlowProblem::residual_vector(const SolutionFields& fields) const {
  Vector x = stacked(fields);
  if (cfg_.enclosed()) {
    // Evaluate in the gauge used by the solve: pinned pressure DOF 0 = 0.
    const int nu = dofs_.velocity_dof_count();
    const double shift = x[nu];
    for (int c = 0; c < mesh_.cell_count(); ++c) x[nu + 3 * c] -= shift;
  }
  const ConstrainedSystem sys = linear_system(fields.velocity());
  return sys.matrix * x - sys.rhs;
}

double FlowProblem::residual(const SolutionFields& fields) const {
  return residual_vector(fields).norm();
}

double FlowProblem::constraint_residual(const SolutionFields& fields) const {
  return residual_vector(fields).tail(dofs_.pressure_dof_count()).norm();
}

NonlinearResult FlowProblem::solve(const std::optional<SolutionFields>& initial) const {
  const PicardConfig& pc = cfg_.picard;
  NonlinearReport report;
  SolutionFields current = initial ? *initial : solve_stokes_darcy();
  if (initial) normalize_pressure(current);
  report.iterations = initial ? 0 : 1;

  const double r0 = residual(current);
  report.residuals.push_back(r0);
  const double target = std::max(pc.tol_rel * r0, pc.tol_abs);
  double omega = pc.relaxation;
  double previous = r0;
  SolutionFields best = current;
  double best_residual = r0;
  report.converged = r0 <= pc.tol_abs;

  for (int step = 0; step < pc.max_iter && !report.converged; ++step) {
    SolutionFields next = picard_step(current, omega);
    ++report.iterations;
    const double r = residual(next);
    report.residuals.push_back(r);
    if (!std::isfinite(r) || r > kDivergenceFactor * std::max(r0, pc.tol_abs)) {
      report.final_relaxation = omega;
      throw SolverError("Picard iteration diverged: residual " + std::to_string(r) +
                            " exceeds 1e6 x initial " + std::to_string(r0),
                        report);
    }
    if (r > previous) {
      if (static_cast<int>(report.relaxation_events.size()) == kMaxRelaxationEvents) {
        report.final_relaxation = omega;
        throw SolverError("Picard iteration diverged: residual increased at iteration " +
                              std::to_string(report.iterations) + " after " +
                              std::to_string(kMaxRelaxationEvents) + " relaxation reductions",
                          report);
      }
      omega *= kRelaxationFactor;
      report.relaxation_events.push_back(report.iterations);
    }
    previous = r;
    current = std::move(next);
    if (r < best_residual) {
      best_residual = r;
      best = current;
    }
    report.converged = r <= target;
  }

  report.final_relaxation = omega;
  SolutionFields& out = report.converged ? current : best;
  report.constraint_residual = constraint_residual(out);
  return {out, report};
}

SolutionFields solve_stokes_darcy(const CaseConfig& cfg) {
  return FlowProblem(cfg).solve_stokes_darcy();
}

SolutionFields picard_step(const SolutionFields& w, const CaseConfig& cfg, double omega) {
  return FlowProblem(cfg).picard_step(w, omega);
}

NonlinearResult solve_nonlinear(const CaseConfig& cfg) { return FlowProblem(cfg).solve(); }

double nonlinear_residual(const SolutionFields& fields, const CaseConfig& cfg) {
  return FlowProblem(cfg).residual(fields);
}

}  // namespace packbed
