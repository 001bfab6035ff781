#ifndef PACKBED_MODEL_HPP
#define PACKBED_MODEL_HPP

/**
 * @file model.hpp
 * @brief Porosity, Ergun drag coefficients and case configuration.
 *
 * Dimensionless momentum and mass balance solved by the library:
 *
 *   -div((eps/Re) grad u - eps u (x) u) + eps grad p + (alpha/Re) u + beta |u| u = f
 *   div(eps u) = 0
 *
 * with kappa = (1 - eps)/eps, alpha = 150 kappa^2 and beta = 1.75 kappa.
 */

#include "packbed/types.hpp"

#include <string>
#include <vector>

namespace packbed {

/// (1 - eps)/eps. Throws DomainError unless 0 < eps <= 1.
double kappa(double eps);

struct DragCoefficients {
  double alpha = 0.0;  ///< Darcy coefficient, 150 kappa^2
  double beta = 0.0;   ///< Forchheimer coefficient, 1.75 kappa
};

DragCoefficients alpha_beta(double eps);

/// Dimensional fluid and packing data. Only used to derive Re and for unit checks.
struct PhysicalParams {
  double reference_speed = 1.0;      ///< U0 [m/s]
  double pellet_diameter = 1.0;      ///< d_p [m]
  double kinematic_viscosity = 1.0;  ///< nu [m^2/s]
  double density = 1.0;              ///< rho [kg/m^3]
};

/// Re = U0 d_p / nu.
double reynolds(const PhysicalParams& phys);

/// Dimensional Ergun friction force density per unit mass.
Vec2 ergun_sigma(const Vec2& u, double eps, const PhysicalParams& phys);

/// Wall-channelling porosity of a packed bed of spheres,
/// eps(y) = eps_inf (1 + (1 - eps_inf)/eps_inf exp(-decay (R - |y|))).
class PorosityModel {
 public:
  PorosityModel(double eps_inf, double decay, double half_width);

  double eps_inf() const { return eps_inf_; }
  double decay() const { return decay_; }
  double half_width() const { return half_width_; }

  /// Unchecked evaluation; callers guarantee |y| <= R.
  double value(double y) const;
  /// d eps / dy, using sign(0) = 0 at the centreline.
  double derivative(double y) const;

 private:
  double eps_inf_;
  double decay_;
  double half_width_;
};

/// Checked evaluation; throws DomainError for |y| > R.
double porosity_at(double y, const PorosityModel& model);

struct PicardConfig {
  double tol_rel = 1e-8;
  double tol_abs = 1e-10;
  int max_iter = 50;
  double relaxation = 1.0;
};

/// Single source of truth for one run. Lengths are in pellet diameters.
///
/// The function-valued members are verification hooks: when empty the
/// packed-bed reactor defaults apply (wall-channelling porosity, trapezoidal
/// plug flow at the inlet, wall injection (0, +-u_w), natural outflow).
/// Setting outlet_velocity switches the run to enclosed flow, where every
/// boundary is Dirichlet and the pressure is fixed to zero mean.
struct CaseConfig {
  double length = 60.0;
  double half_width = 5.0;
  int nx = 120;
  int ny = 40;
  double re = 50.0;
  double eps_inf = 0.45;
  double decay = 6.0;
  double u_in = 1.0;
  double u_w = 0.0;
  double ramp = 1.0;
  Vec2 forcing_constant = Vec2::Zero();
  int quad_order = 3;
  PicardConfig picard;

  VectorFn forcing;             ///< overrides forcing_constant
  ScalarFieldFn porosity;       ///< overrides the wall-channelling profile
  VectorFn inlet_velocity;      ///< overrides the trapezoidal plug flow
  VectorFn wall_velocity;       ///< overrides (0, +-u_w)
  VectorFn outlet_velocity;     ///< set => Dirichlet outlet (enclosed flow)

  /// Packed-bed reactor: L=60, R=5, eps_inf=0.45, u_in=1, u_w=0, quadrature order 4.
  static CaseConfig reactor(double re = 50.0);

  bool enclosed() const { return static_cast<bool>(outlet_velocity); }
  /// Prescribe g on the whole boundary (enclosed flow).
  void set_dirichlet_everywhere(const VectorFn& g);

  PorosityModel porosity_model() const;
};

/// Resolved field callables, with the defaults above filled in.
ScalarFieldFn porosity_field(const CaseConfig& cfg);
VectorFn forcing_field(const CaseConfig& cfg);
VectorFn inlet_field(const CaseConfig& cfg);
VectorFn wall_field(const CaseConfig& cfg);

/// Plug-flow profile: 0 at |y| = R, 1 for |y| <= R - ramp, linear between.
double trapezoid(double y, double half_width, double ramp);

/// Net eps-weighted boundary flux of the prescribed data, by edge quadrature.
/// Only meaningful in enclosed mode.
double boundary_flux_of_data(const CaseConfig& cfg);

/// All violated invariants, one message per issue naming the field. Empty if valid.
std::vector<std::string> validate_config(const CaseConfig& cfg);

/// Throws ConfigError listing every issue.
void ensure_valid(const CaseConfig& cfg);

}  // namespace packbed

#endif  // PACKBED_MODEL_HPP
