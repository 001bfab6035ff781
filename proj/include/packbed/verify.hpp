#ifndef PACKBED_VERIFY_HPP
#define PACKBED_VERIFY_HPP

/**
 * @file verify.hpp
 * @brief Manufactured solutions, structural identities and flux balance.
 *
 * Exactly constrained velocities come from a stream function psi,
 * u = eps^-1 curl psi = eps^-1 (d psi/dy, -d psi/dx), so div(eps u) = 0
 * holds identically for any porosity.
 */

#include "packbed/assembly.hpp"
#include "packbed/jet.hpp"
#include "packbed/model.hpp"
#include "packbed/solver.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace packbed {

using Jet3 = Jet<3>;
using JetFn = std::function<Jet3(const Jet3& x, const Jet3& y)>;

ScalarFieldFn jet_scalar_field(JetFn f);

struct ManufacturedCase {
  std::string name;
  double length = 1.0;
  double half_width = 0.5;
  JetFn stream;    ///< psi
  JetFn porosity;  ///< eps, must stay in (0, 1]
  JetFn pressure;  ///< p*, zero mean over the domain

  /// psi = sin^2(pi x) cos^2(pi y) on (0,1) x (-1/2,1/2), polynomial porosity,
  /// p* = sin(pi x) sin(pi y). Velocity vanishes on the boundary.
  static ManufacturedCase smooth();
  /// Cubic psi, eps = 1, linear p*: reproduced exactly by Q2/P1-disc.
  static ManufacturedCase polynomial();
};

/// u = eps^-1 curl psi with exact first and second derivatives.
class DivFreeField {
 public:
  DivFreeField(JetFn stream, JetFn porosity);

  /// Velocity components as second-order jets at (x, y).
  std::array<Jet<2>, 2> jets(double x, double y) const;
  VectorSample sample(double x, double y) const;
  /// div(eps u) from the jets; zero up to rounding.
  double eps_divergence(double x, double y) const;
  VectorFieldFn field() const;

 private:
  JetFn stream_;
  JetFn porosity_;
};

DivFreeField make_divfree_field(JetFn stream, JetFn porosity);

/// f = -div((eps/Re) grad u) + (eps u . grad) u + eps grad p + (alpha/Re) u + beta |u| u.
/// The convective term equals div(eps u (x) u) because div(eps u) = 0.
VectorFn mms_forcing(const ManufacturedCase& mc, double re);

/// Enclosed-flow configuration for a manufactured case on an nx x ny mesh.
CaseConfig mms_config(const ManufacturedCase& mc, int nx, int ny, double re, int quad_order = 3);

struct FieldErrors {
  double u_l2 = 0.0;
  double u_h1 = 0.0;  ///< H1 seminorm
  double p_l2 = 0.0;
};

FieldErrors compute_errors(const SolutionFields& fields, const VectorFieldFn& exact_u,
                           const std::function<double(double, double)>& exact_p, int quad_order);

struct ConvergenceLevel {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  FieldErrors errors;
  int iterations = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceLevel> levels;

  /// log2(e_{k-1} / e_k) for level k >= 1.
  double order_u_l2(std::size_t k) const;
  double order_u_h1(std::size_t k) const;
  double order_p_l2(std::size_t k) const;
};

struct StudyOptions {
  int levels = 4;
  int base_cells = 4;  ///< cells along x on the coarsest level
  double re = 10.0;
  int quad_order = 3;
  PicardConfig picard;
};

/// Solves on h, h/2, h/4, ...; errors use quadrature two orders above assembly.
/// Throws SolverError annotated with the failing level.
ConvergenceTable run_convergence_study(const ManufacturedCase& mc, const StudyOptions& opts);

/// Columns `h  err_u_L2  order  err_u_H1  order  err_p_L2  order`.
void write_convergence_table(std::ostream& os, const ConvergenceTable& table);

struct SkewCheck {
  int trials = 0;
  double max_violation = 0.0;       ///< max |n(w,u,v) + n(w,v,u)| / magnitude
  double max_self_violation = 0.0;  ///< max |n(w,u,u)| / magnitude
};

/// Randomized check of n(w,u,v) = -n(w,v,u) with w = eps^-1 curl psi, psi
/// vanishing to second order on the boundary, polynomial eps in [0.4, 1] and
/// polynomial u, v. With `boundary_trace` set, psi does not vanish on the
/// boundary and the identity must fail.
SkewCheck check_skew_symmetry(int trials, unsigned seed = 2024, bool boundary_trace = false);

/// max over trials of |v^T M u - form(u, v)| / scale for the assembled
/// blocks a, b, c, d, n against direct evaluation of the forms.
double check_matrix_free(int trials, unsigned seed = 7);

struct ContinuityBounds {
  double max_n = 0.0;
  double max_d = 0.0;
};

/// |n(w,u,v)| and |d(w;u,v)| over random FE triples normalized to unit H1 norm.
ContinuityBounds check_form_continuity(int trials, unsigned seed = 11);

struct FluxReport {
  double inflow = 0.0;       ///< integral of eps u.n over x = 0 (negative for inflow)
  double outflow = 0.0;      ///< over x = L
  double wall_bottom = 0.0;  ///< over y = -R
  double wall_top = 0.0;     ///< over y = R
  double net() const { return inflow + outflow + wall_bottom + wall_top; }
};

FluxReport check_global_flux(const SolutionFields& fields, const CaseConfig& cfg);

}  // namespace packbed

#endif  // PACKBED_VERIFY_HPP
