#include "packbed/io.hpp"

#include "packbed/verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace packbed {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = bool (*)(CaseConfig&, std::string_view);

template <auto Member>
bool set_double(CaseConfig& cfg, std::string_view v) {
  return parse_number(v, cfg.*Member);
}

template <auto Member>
bool set_int(CaseConfig& cfg, std::string_view v) {
  return parse_number(v, cfg.*Member);
}

template <auto Member>
bool set_picard_double(CaseConfig& cfg, std::string_view v) {
  return parse_number(v, cfg.picard.*Member);
}

bool set_forcing(CaseConfig& cfg, std::string_view v) {
  const auto comma = v.find(',');
  if (comma == std::string_view::npos) return false;
  double fx = 0.0, fy = 0.0;
  if (!parse_number(v.substr(0, comma), fx) || !parse_number(v.substr(comma + 1), fy)) return false;
  cfg.forcing_constant = Vec2(fx, fy);
  return true;
}

bool set_max_iter(CaseConfig& cfg, std::string_view v) { return parse_number(v, cfg.picard.max_iter); }

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"length", &set_double<&CaseConfig::length>},
      {"half_width", &set_double<&CaseConfig::half_width>},
      {"nx", &set_int<&CaseConfig::nx>},
      {"ny", &set_int<&CaseConfig::ny>},
      {"re", &set_double<&CaseConfig::re>},
      {"eps_inf", &set_double<&CaseConfig::eps_inf>},
      {"decay", &set_double<&CaseConfig::decay>},
      {"u_in", &set_double<&CaseConfig::u_in>},
      {"u_w", &set_double<&CaseConfig::u_w>},
      {"ramp", &set_double<&CaseConfig::ramp>},
      {"forcing", &set_forcing},
      {"quad_order", &set_int<&CaseConfig::quad_order>},
      {"picard_tol_rel", &set_picard_double<&PicardConfig::tol_rel>},
      {"picard_tol_abs", &set_picard_double<&PicardConfig::tol_abs>},
      {"picard_max_iter", &set_max_iter},
      {"picard_relaxation", &set_picard_double<&PicardConfig::relaxation>},
  };
  return table;
}

double profile_value(const VectorSample& u, double p, ProfileQuantity q) {
  switch (q) {
    case ProfileQuantity::Speed: return u.value.norm();
    case ProfileQuantity::U: return u.value.x();
    case ProfileQuantity::V: return u.value.y();
    case ProfileQuantity::Pressure: return p;
  }
  return 0.0;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

const std::vector<std::string>& required_config_keys() {
  static const std::vector<std::string> keys{"length", "half_width", "nx",  "ny",
                                             "re",     "eps_inf",    "u_in", "u_w"};
  return keys;
}

CaseConfig parse_config(std::istream& is, const std::string& source) {
  CaseConfig cfg;
  std::vector<std::string> issues;
  std::set<std::string, std::less<>> seen;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back(where + "expected 'name = value'");
      continue;
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      issues.push_back(where + "unknown key '" + key + "'");
    } else if (!seen.insert(key).second) {
      issues.push_back(where + "duplicate key '" + key + "'");
    } else if (!it->second(cfg, value)) {
      issues.push_back(where + "malformed value for key '" + key + "': '" + std::string(value) + "'");
    }
  }
  for (const auto& key : required_config_keys()) {
    if (!seen.contains(key)) issues.push_back(source + ": missing required key '" + key + "'");
  }
  if (issues.empty()) {
    for (const auto& issue : validate_config(cfg)) issues.push_back(source + ": " + issue);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

CaseConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string() + ": cannot open config file");
  return parse_config(is, path.string());
}

void write_config(std::ostream& os, const CaseConfig& cfg) {
  os << "length = " << fmt(cfg.length) << "\n"
     << "half_width = " << fmt(cfg.half_width) << "\n"
     << "nx = " << cfg.nx << "\n"
     << "ny = " << cfg.ny << "\n"
     << "re = " << fmt(cfg.re) << "\n"
     << "eps_inf = " << fmt(cfg.eps_inf) << "\n"
     << "decay = " << fmt(cfg.decay) << "\n"
     << "u_in = " << fmt(cfg.u_in) << "\n"
     << "u_w = " << fmt(cfg.u_w) << "\n"
     << "ramp = " << fmt(cfg.ramp) << "\n"
     << "forcing = " << fmt(cfg.forcing_constant.x()) << ", " << fmt(cfg.forcing_constant.y())
     << "\n"
     << "quad_order = " << cfg.quad_order << "\n"
     << "picard_tol_rel = " << fmt(cfg.picard.tol_rel) << "\n"
     << "picard_tol_abs = " << fmt(cfg.picard.tol_abs) << "\n"
     << "picard_max_iter = " << cfg.picard.max_iter << "\n"
     << "picard_relaxation = " << fmt(cfg.picard.relaxation) << "\n";
}

ProfileQuantity parse_quantity(std::string_view name) {
  if (name == "speed" || name == "magnitude" || name == "|u|") return ProfileQuantity::Speed;
  if (name == "u") return ProfileQuantity::U;
  if (name == "v") return ProfileQuantity::V;
  if (name == "p") return ProfileQuantity::Pressure;
  throw std::invalid_argument("unknown profile quantity '" + std::string(name) +
                              "' (expected speed, u, v or p)");
}

std::string_view to_string(ProfileQuantity q) {
  switch (q) {
    case ProfileQuantity::Speed: return "speed";
    case ProfileQuantity::U: return "u";
    case ProfileQuantity::V: return "v";
    case ProfileQuantity::Pressure: return "p";
  }
  return "speed";
}

std::vector<ProfilePoint> sample_profile(const SolutionFields& fields, double x, int n,
                                         ProfileQuantity quantity) {
  const StructuredQuadMesh& mesh = fields.mesh();
  if (!(x >= 0.0 && x <= mesh.length())) {
    throw DomainError("profile station x = " + fmt(x) + " outside [0, " + fmt(mesh.length()) + "]");
  }
  if (n < 2) throw DomainError("profile sample count must be >= 2");
  const double r = mesh.half_width();
  std::vector<ProfilePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double y = (k == n - 1) ? r : -r + 2.0 * r * k / (n - 1);
    const PointLocation loc = locate_point(mesh, Vec2(x, y));
    const VectorSample u = eval_velocity(mesh, fields.dofs(), fields.velocity(), loc.cell, loc.ref);
    const double p = eval_pressure(mesh, fields.pressure(), loc.cell, loc.ref);
    out.push_back({y, profile_value(u, p, quantity)});
  }
  return out;
}

std::string profile_filename(double x, ProfileQuantity quantity) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  std::string name = std::string("profile_x") + buf;
  if (quantity != ProfileQuantity::Speed) name += "_" + std::string(to_string(quantity));
  return name + ".dat";
}

ChannellingFeatures analyze_channelling(const std::vector<ProfilePoint>& profile) {
  if (profile.size() < 2) throw std::invalid_argument("analyze_channelling: need >= 2 samples");
  ChannellingFeatures f;
  f.max_value = -std::numeric_limits<double>::infinity();
  f.lower_peak = f.upper_peak = -std::numeric_limits<double>::infinity();
  for (const auto& pt : profile) {
    f.max_value = std::max(f.max_value, pt.value);
    if (pt.y < 0.0 && pt.value > f.lower_peak) {
      f.lower_peak = pt.value;
      f.lower_peak_y = pt.y;
    }
    if (pt.y > 0.0 && pt.value > f.upper_peak) {
      f.upper_peak = pt.value;
      f.upper_peak_y = pt.y;
    }
  }
  // Centre value by linear interpolation at y = 0.
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const auto& a = profile[k];
    const auto& b = profile[k + 1];
    if (a.y <= 0.0 && b.y >= 0.0) {
      const double t = b.y > a.y ? -a.y / (b.y - a.y) : 0.0;
      f.centre_value = a.value + t * (b.value - a.value);
      break;
    }
  }
  for (std::size_t k = 0; k < profile.size(); ++k) {
    f.asymmetry = std::max(f.asymmetry,
                           std::abs(profile[k].value - profile[profile.size() - 1 - k].value));
  }
  return f;
}

void write_profile(std::ostream& os, const std::vector<ProfilePoint>& profile, double x,
                   ProfileQuantity quantity) {
  os << "# x = " << fmt(x) << "\n# y " << to_string(quantity) << "\n";
  for (const auto& pt : profile) os << fmt(pt.y) << " " << fmt(pt.value) << "\n";
}

void write_fields(std::ostream& os, const SolutionFields& fields) {
  const StructuredQuadMesh& mesh = fields.mesh();
  const DofMaps& maps = fields.dofs();
  os << "# x y u v p\n";
  for (int n = 0; n < maps.node_count(); ++n) {
    const Vec2 x = maps.node_position(n);
    const PointLocation loc = locate_point(mesh, x);
    const double p = eval_pressure(mesh, fields.pressure(), loc.cell, loc.ref);
    os << fmt(x.x()) << " " << fmt(x.y()) << " " << fmt(fields.velocity()[maps.velocity_dof(n, 0)])
       << " " << fmt(fields.velocity()[maps.velocity_dof(n, 1)]) << " " << fmt(p) << "\n";
  }
}

void write_porosity(std::ostream& os, const CaseConfig& cfg, int samples) {
  const ScalarFieldFn eps = porosity_field(cfg);
  const double r = cfg.half_width, x = 0.5 * cfg.length;
  os << "# y eps\n";
  for (int k = 0; k < samples; ++k) {
    const double y = (k == samples - 1) ? r : -r + 2.0 * r * k / (samples - 1);
    os << fmt(y) << " " << fmt(eps(x, y).value) << "\n";
  }
}

void write_report(std::ostream& os, const NonlinearReport& report, const CaseConfig& cfg) {
  os << "# packbed solver report\n"
     << "converged " << (report.converged ? 1 : 0) << "\n"
     << "iterations " << report.iterations << "\n"
     << "final_relaxation " << fmt(report.final_relaxation) << "\n"
     << "relaxation_events " << report.relaxation_events.size() << "\n"
     << "constraint_residual " << fmt(report.constraint_residual) << "\n"
     << "re " << fmt(cfg.re) << "\n"
     << "nx " << cfg.nx << "\n"
     << "ny " << cfg.ny << "\n";
  for (std::size_t k = 0; k < report.residuals.size(); ++k) {
    os << "residual_" << k << " " << fmt(report.residuals[k]) << "\n";
  }
}

void write_solution(std::ostream& os, const SolutionFields& fields) {
  os << "# velocity " << fields.velocity().size() << " pressure " << fields.pressure().size()
     << "\n";
  for (Eigen::Index i = 0; i < fields.velocity().size(); ++i) os << fmt(fields.velocity()[i]) << "\n";
  for (Eigen::Index i = 0; i < fields.pressure().size(); ++i) os << fmt(fields.pressure()[i]) << "\n";
}

SolutionFields read_solution(std::istream& is, const StructuredQuadMesh& mesh) {
  const DofMaps maps(mesh);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string hash, vel, pres;
  long nu = -1, np = -1;
  hs >> hash >> vel >> nu >> pres >> np;
  if (hash != "#" || nu != maps.velocity_dof_count() || np != maps.pressure_dof_count()) {
    throw std::runtime_error("solution file does not match the mesh");
  }
  Vector u(nu), p(np);
  std::string line;
  auto next = [&](double& v) {
    if (!std::getline(is, line) || !parse_number(line, v)) {
      throw std::runtime_error("solution file truncated or malformed");
    }
  };
  for (long i = 0; i < nu; ++i) next(u[i]);
  for (long i = 0; i < np; ++i) next(p[i]);
  return {mesh, u, p};
}

double default_station(const CaseConfig& cfg) {
  return cfg.length >= 50.0 ? 50.0 : 0.5 * cfg.length;
}

void write_run_artifacts(const std::filesystem::path& dir, const CaseConfig& cfg,
                         const NonlinearResult& result) {
  std::filesystem::create_directories(dir);
  {
    auto os = open_output(dir / "config.txt");
    write_config(os, cfg);
  }
  {
    auto os = open_output(dir / "solution.dat");
    write_solution(os, result.fields);
  }
  {
    auto os = open_output(dir / "fields.dat");
    write_fields(os, result.fields);
  }
  {
    auto os = open_output(dir / "porosity.dat");
    write_porosity(os, cfg);
  }
  {
    auto os = open_output(dir / "report.txt");
    write_report(os, result.report, cfg);
    const FluxReport flux = check_global_flux(result.fields, cfg);
    os << "flux_inflow " << fmt(flux.inflow) << "\n"
       << "flux_outflow " << fmt(flux.outflow) << "\n"
       << "flux_walls " << fmt(flux.wall_bottom + flux.wall_top) << "\n"
       << "flux_net " << fmt(flux.net()) << "\n";
  }
  const double x = default_station(cfg);
  auto os = open_output(dir / profile_filename(x, ProfileQuantity::Speed));
  write_profile(os, sample_profile(result.fields, x, 201, ProfileQuantity::Speed), x,
                ProfileQuantity::Speed);
}

LoadedRun load_run(const std::filesystem::path& dir) {
  CaseConfig cfg = load_config(dir / "config.txt");
  std::ifstream is(dir / "solution.dat");
  if (!is) throw std::runtime_error("cannot open " + (dir / "solution.dat").string());
  SolutionFields fields = read_solution(is, build_mesh(cfg));
  return {std::move(cfg), std::move(fields)};
}

}  // namespace packbed
