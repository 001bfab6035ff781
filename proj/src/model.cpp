#include "packbed/model.hpp"

#include "packbed/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace packbed {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid configuration";
  for (const auto& issue : issues) os << "\n  " << issue;
  return os.str();
}

void check_porosity(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << "porosity " << eps << " outside (0, 1]";
    throw DomainError(os.str());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

double kappa(double eps) {
  check_porosity(eps);
  return (1.0 - eps) / eps;
}

DragCoefficients alpha_beta(double eps) {
  const double k = kappa(eps);
  return {150.0 * k * k, 1.75 * k};
}

double reynolds(const PhysicalParams& phys) {
  if (!(phys.reference_speed > 0.0 && phys.pellet_diameter > 0.0 &&
        phys.kinematic_viscosity > 0.0)) {
    throw DomainError("reynolds: U0, d_p and nu must be positive");
  }
  return phys.reference_speed * phys.pellet_diameter / phys.kinematic_viscosity;
}

Vec2 ergun_sigma(const Vec2& u, double eps, const PhysicalParams& phys) {
  check_porosity(eps);
  if (!(phys.pellet_diameter > 0.0)) throw DomainError("ergun_sigma: d_p must be positive");
  const double solid = 1.0 - eps;
  const double dp = phys.pellet_diameter;
  const double darcy = 150.0 * phys.kinematic_viscosity * solid * solid / (eps * eps * dp * dp);
  const double forchheimer = 1.75 * solid / (eps * dp);
  return darcy * u + forchheimer * u.norm() * u;
}

PorosityModel::PorosityModel(double eps_inf, double decay, double half_width)
    : eps_inf_(eps_inf), decay_(decay), half_width_(half_width) {}

double PorosityModel::value(double y) const {
  const double wall_distance = half_width_ - std::abs(y);
  return eps_inf_ + (1.0 - eps_inf_) * std::exp(-decay_ * wall_distance);
}

double PorosityModel::derivative(double y) const {
  const double sign = (y > 0.0) - (y < 0.0);
  const double wall_distance = half_width_ - std::abs(y);
  return sign * decay_ * (1.0 - eps_inf_) * std::exp(-decay_ * wall_distance);
}

double porosity_at(double y, const PorosityModel& model) {
  if (std::abs(y) > model.half_width()) {
    std::ostringstream os;
    os << "porosity_at: |y| = " << std::abs(y) << " exceeds R = " << model.half_width();
    throw DomainError(os.str());
  }
  return model.value(y);
}

CaseConfig CaseConfig::reactor(double re) {
  CaseConfig cfg;
  cfg.re = re;
  cfg.quad_order = 4;
  return cfg;
}

void CaseConfig::set_dirichlet_everywhere(const VectorFn& g) {
  inlet_velocity = g;
  wall_velocity = g;
  outlet_velocity = g;
}

PorosityModel CaseConfig::porosity_model() const { return {eps_inf, decay, half_width}; }

ScalarFieldFn porosity_field(const CaseConfig& cfg) {
  if (cfg.porosity) return cfg.porosity;
  const PorosityModel model = cfg.porosity_model();
  const double r = cfg.half_width;
  return [model, r](double, double y) {
    // Quadrature and node coordinates may overshoot the wall by rounding.
    const double yc = std::clamp(y, -r, r);
    return ScalarSample{model.value(yc), Vec2(0.0, model.derivative(yc))};
  };
}

VectorFn forcing_field(const CaseConfig& cfg) {
  if (cfg.forcing) return cfg.forcing;
  const Vec2 f = cfg.forcing_constant;
  return [f](double, double) { return f; };
}

double trapezoid(double y, double half_width, double ramp) {
  const double wall_distance = half_width - std::abs(y);
  if (wall_distance >= ramp) return 1.0;
  return std::max(wall_distance, 0.0) / ramp;
}

VectorFn inlet_field(const CaseConfig& cfg) {
  if (cfg.inlet_velocity) return cfg.inlet_velocity;
  const double r = cfg.half_width, ramp = cfg.ramp, u_in = cfg.u_in;
  return [=](double, double y) { return Vec2(u_in * trapezoid(y, r, ramp), 0.0); };
}

VectorFn wall_field(const CaseConfig& cfg) {
  if (cfg.wall_velocity) return cfg.wall_velocity;
  const double u_w = cfg.u_w;
  // Injection through both membranes points into the channel.
  return [u_w](double, double y) { return Vec2(0.0, y < 0.0 ? u_w : -u_w); };
}

double boundary_flux_of_data(const CaseConfig& cfg) {
  const auto eps = porosity_field(cfg);
  const auto inlet = inlet_field(cfg);
  const auto wall = wall_field(cfg);
  const VectorFn outlet = cfg.outlet_velocity;
  const auto rule = gauss_rule_1d(5);
  const double l = cfg.length, r = cfg.half_width;
  const double hx = l / cfg.nx, hy = 2.0 * r / cfg.ny;

  double flux = 0.0;
  auto side = [&](int cells, double h, auto point, const VectorFn& g, const Vec2& n) {
    for (int c = 0; c < cells; ++c) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = (c + 0.5 * (rule.points[q] + 1.0)) * h;
        const Vec2 x = point(s);
        flux += 0.5 * h * rule.weights[q] * eps(x.x(), x.y()).value * g(x.x(), x.y()).dot(n);
      }
    }
  };
  side(cfg.ny, hy, [&](double s) { return Vec2(0.0, -r + s); }, inlet, Vec2(-1.0, 0.0));
  if (outlet) side(cfg.ny, hy, [&](double s) { return Vec2(l, -r + s); }, outlet, Vec2(1.0, 0.0));
  side(cfg.nx, hx, [&](double s) { return Vec2(s, -r); }, wall, Vec2(0.0, -1.0));
  side(cfg.nx, hx, [&](double s) { return Vec2(s, r); }, wall, Vec2(0.0, 1.0));
  return flux;
}

std::vector<std::string> validate_config(const CaseConfig& cfg) {
  std::vector<std::string> issues;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };

  require(std::isfinite(cfg.length) && cfg.length > 0.0, "length must be > 0");
  require(std::isfinite(cfg.half_width) && cfg.half_width > 0.0, "half_width must be > 0");
  require(cfg.nx >= 1, "nx must be >= 1");
  require(cfg.ny >= 1, "ny must be >= 1");
  require(std::isfinite(cfg.re) && cfg.re > 0.0, "re must be > 0");
  require(cfg.quad_order >= 1 && cfg.quad_order <= kMaxGaussOrder, "quad_order must be in [1, 10]");
  require(std::isfinite(cfg.forcing_constant.x()) && std::isfinite(cfg.forcing_constant.y()),
          "forcing must be finite");

  const PicardConfig& pc = cfg.picard;
  require(pc.tol_rel > 0.0, "picard_tol_rel must be > 0");
  require(pc.tol_abs > 0.0, "picard_tol_abs must be > 0");
  require(pc.max_iter >= 1, "picard_max_iter must be >= 1");
  require(pc.relaxation > 0.0 && pc.relaxation <= 1.0, "picard_relaxation must be in (0, 1]");

  if (!cfg.porosity) {
    require(cfg.eps_inf > 0.0 && cfg.eps_inf <= 1.0, "eps_inf must be in (0, 1]");
    require(std::isfinite(cfg.decay) && cfg.decay > 0.0, "decay must be > 0");
  }
  if (!cfg.inlet_velocity) {
    require(std::isfinite(cfg.u_in) && cfg.u_in >= 0.0, "u_in must be >= 0");
    require(cfg.ramp > 0.0 && cfg.ramp <= cfg.half_width, "ramp must be in (0, half_width]");
  }
  if (!cfg.wall_velocity) require(std::isfinite(cfg.u_w), "u_w must be finite");

  if (!issues.empty()) return issues;

  // User porosity: sample on the Q2 node lattice.
  if (cfg.porosity) {
    const int mx = 2 * cfg.nx, my = 2 * cfg.ny;
    double lo = 1.0, hi = 0.0;
    for (int j = 0; j <= my; ++j) {
      for (int i = 0; i <= mx; ++i) {
        const double x = cfg.length * i / mx;
        const double y = -cfg.half_width + 2.0 * cfg.half_width * j / my;
        const double e = cfg.porosity(x, y).value;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
    }
    require(lo > 0.0 && hi <= 1.0, "porosity must lie in (0, 1] on the domain");
  }

  if (cfg.enclosed()) {
    const double flux = boundary_flux_of_data(cfg);
    if (!(std::abs(flux) <= 1e-10)) {
      std::ostringstream os;
      os << "boundary data incompatible: net eps-weighted flux " << flux
         << " (enclosed flow needs 0)";
      issues.push_back(os.str());
    }
  }
  return issues;
}

void ensure_valid(const CaseConfig& cfg) {
  auto issues = validate_config(cfg);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace packbed
