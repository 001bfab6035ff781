#ifndef PACKBED_SOLVER_HPP
#define PACKBED_SOLVER_HPP

#include "packbed/assembly.hpp"
#include "packbed/mesh.hpp"
#include "packbed/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace packbed {

struct NonlinearReport {
  /// Linear solves performed, the initial Stokes-Darcy solve included.
  int iterations = 0;
  /// Algebraic residual 2-norm of every iterate, initial guess first.
  std::vector<double> residuals;
  bool converged = false;
  /// Iterations at which the relaxation factor was reduced.
  std::vector<int> relaxation_events;
  double final_relaxation = 1.0;
  /// Constraint-block residual of the returned iterate.
  double constraint_residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, std::optional<NonlinearReport> report = {})
      : std::runtime_error(what), report_(std::move(report)) {}
  const std::optional<NonlinearReport>& report() const { return report_; }

 private:
  std::optional<NonlinearReport> report_;
};

/// Direct sparse LU solve with one step of iterative refinement.
/// Throws SolverError if the factorization fails.
Vector solve_linear(const SparseMatrix& matrix, const Vector& rhs);
Vector solve_linear(const ConstrainedSystem& system);

struct NonlinearResult {
  SolutionFields fields;
  NonlinearReport report;
};

/// Discretized case: mesh, DOF maps, constraints and the cached
/// w-independent blocks. Immutable after construction.
class FlowProblem {
 public:
  explicit FlowProblem(CaseConfig cfg);

  const CaseConfig& config() const { return cfg_; }
  const StructuredQuadMesh& mesh() const { return mesh_; }
  const DofMaps& dofs() const { return dofs_; }
  const Assembler& assembler() const { return assembler_; }
  const Constraints& constraints() const { return constraints_; }

  SolutionFields zero_fields() const;
  ConstrainedSystem linear_system(const Vector& w, NonlinearTerms terms = {}) const;

  /// Drops n and d; used as the Picard initial guess.
  SolutionFields solve_stokes_darcy() const;
  /// One frozen-coefficient solve, relaxed: u <- (1 - omega) w + omega u_new.
  SolutionFields picard_step(const SolutionFields& w, double omega = 1.0) const;
  /// Picard loop from the Stokes-Darcy guess (or `initial`). Returns the best
  /// iterate with converged = false when max_iter is reached; throws
  /// SolverError when the residual exceeds 1e6 times the initial one.
  NonlinearResult solve(const std::optional<SolutionFields>& initial = std::nullopt) const;

  /// Residual of the re-assembled system at w = fields, all rows.
  Vector residual_vector(const SolutionFields& fields) const;
  double residual(const SolutionFields& fields) const;
  /// 2-norm of the pressure (constraint) rows of the residual.
  double constraint_residual(const SolutionFields& fields) const;

  /// Enclosed flow only: shift the pressure to zero mean. No-op otherwise.
  void normalize_pressure(SolutionFields& fields) const;

 private:
  SolutionFields from_solution(const Vector& x) const;
  Vector stacked(const SolutionFields& fields) const;

  CaseConfig cfg_;
  StructuredQuadMesh mesh_;
  DofMaps dofs_;
  Assembler assembler_;
  Constraints constraints_;
};

SolutionFields solve_stokes_darcy(const CaseConfig& cfg);
SolutionFields picard_step(const SolutionFields& w, const CaseConfig& cfg, double omega = 1.0);
NonlinearResult solve_nonlinear(const CaseConfig& cfg);
double nonlinear_residual(const SolutionFields& fields, const CaseConfig& cfg);

}  // namespace packbed

#endif  // PACKBED_SOLVER_HPP
