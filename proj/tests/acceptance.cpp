// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]

#include "packbed/cli.hpp"
#include "packbed/io.hpp"
#include "packbed/model.hpp"
#include "packbed/solver.hpp"
#include "packbed/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

using namespace packbed;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

// Reactor solves shared by criteria 6, 7 and 8.
std::map<double, NonlinearResult> reactor_runs;

const NonlinearResult& reactor(double re) {
  auto it = reactor_runs.find(re);
  if (it == reactor_runs.end()) it = reactor_runs.emplace(re, solve_nonlinear(CaseConfig::reactor(re))).first;
  return it->second;
}

Outcome coefficients() {
  const DragCoefficients ab = alpha_beta(0.5);
  const double dk = std::abs(kappa(0.45) - 11.0 / 9.0);
  const double da = std::abs(ab.alpha - 150.0);
  const double db = std::abs(ab.beta - 1.75);
  return {std::max({dk, da, db}) <= 1e-14, "|kappa(0.45) - 11/9| = " + sci(dk) + ", |alpha(0.5) - 150| = " +
                                               sci(da) + ", |beta(0.5) - 1.75| = " + sci(db)};
}

Outcome porosity_endpoints() {
  const PorosityModel model = CaseConfig::reactor().porosity_model();
  const double lo = porosity_at(-5.0, model), hi = porosity_at(5.0, model);
  const double centre = porosity_at(0.0, model) - 0.45;
  return {lo == 1.0 && hi == 1.0 && std::abs(centre) <= 1e-12,
          "eps(-R) = " + fmt("%.17g", lo) + ", eps(R) = " + fmt("%.17g", hi) + ", eps(0) - 0.45 = " + sci(centre)};
}

Outcome skew_symmetry() {
  const SkewCheck skew = check_skew_symmetry(50);
  const SkewCheck control = check_skew_symmetry(50, 2024, true);
  return {skew.max_violation <= 1e-11 && control.max_violation >= 1e-3,
          "max violation " + sci(skew.max_violation) + " over 50 trials, negative control " +
              sci(control.max_violation)};
}

Outcome poiseuille() {
  CaseConfig cfg;
  cfg.nx = 8;
  cfg.ny = 8;
  cfg.porosity = [](double, double) { return ScalarSample{1.0, Vec2::Zero()}; };
  const double R = cfg.half_width, L = cfg.length;
  cfg.inlet_velocity = [R](double, double y) { return Vec2(1.0 - (y / R) * (y / R), 0.0); };
  const NonlinearResult r = solve_nonlinear(cfg);
  const DofMaps& maps = r.fields.dofs();
  double err_u = 0.0, err_p = 0.0;
  for (int n = 0; n < maps.node_count(); ++n) {
    const Vec2 x = maps.node_position(n);
    const Vec2 u(r.fields.velocity()[maps.velocity_dof(n, 0)], r.fields.velocity()[maps.velocity_dof(n, 1)]);
    err_u = std::max(err_u, (u - Vec2(1.0 - (x.y() / R) * (x.y() / R), 0.0)).lpNorm<Eigen::Infinity>());
    err_p = std::max(err_p, std::abs(r.fields.pressure_at(x) - 2.0 * (L - x.x()) / (cfg.re * R * R)));
  }
  return {r.report.converged && err_u <= 1e-8 && err_p <= 1e-8,
          "max nodal error u " + sci(err_u) + ", p " + sci(err_p)};
}

Outcome mms() {
  StudyOptions opts;
  opts.levels = 4;
  const ConvergenceTable table = run_convergence_study(ManufacturedCase::smooth(), opts);
  std::ostringstream os;
  write_convergence_table(os, table);
  std::cout << os.str();
  const std::size_t k = table.levels.size() - 1;
  const double ou = table.order_u_l2(k), oh = table.order_u_h1(k), op = table.order_p_l2(k);
  return {ou >= 2.7 && oh >= 1.8 && op >= 1.8,
          "orders u L2 " + fmt("%.3f", ou) + ", u H1 " + fmt("%.3f", oh) + ", p L2 " + fmt("%.3f", op)};
}

Outcome constraint_and_flux() {
  const CaseConfig cfg = CaseConfig::reactor(50.0);
  const NonlinearResult& r = reactor(50.0);
  const FluxReport flux = check_global_flux(r.fields, cfg);
  const double rel = std::abs(flux.net()) / std::abs(flux.inflow);
  return {r.report.converged && r.report.constraint_residual <= 1e-7 && rel <= 1e-6,
          "converged " + std::to_string(r.report.converged) + " in " + std::to_string(r.report.iterations) +
              " solves, constraint residual " + sci(r.report.constraint_residual) + ", flux imbalance " +
              sci(rel) + " x inflow"};
}

ChannellingFeatures station_profile(double re) {
  return analyze_channelling(sample_profile(reactor(re).fields, 50.0, 201, ProfileQuantity::Speed));
}

Outcome wall_channelling() {
  Outcome o{true, ""};
  const double R = CaseConfig::reactor().half_width;
  for (double re : {5.0, 50.0, 200.0}) {
    const ChannellingFeatures f = station_profile(re);
    const bool ok = reactor(re).report.converged && f.lower_peak_y <= -R + 1.0 && f.upper_peak_y >= R - 1.0 &&
                    std::min(f.lower_peak, f.upper_peak) > f.centre_value;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + fmt("Re %g: ", re) + "peaks " + fmt("%.4f", f.lower_peak) +
                fmt(" at y=%.2f", f.lower_peak_y) + ", " + fmt("%.4f", f.upper_peak) +
                fmt(" at y=%.2f", f.upper_peak_y) + ", centre " + fmt("%.4f", f.centre_value);
  }
  return o;
}

Outcome reynolds_monotonicity() {
  std::vector<double> maxima;
  std::string detail = "max|u|";
  for (double re : {5.0, 50.0, 200.0}) {
    maxima.push_back(station_profile(re).max_value);
    detail += fmt(" %.6f", maxima.back()) + fmt(" (Re %g)", re);
  }
  return {maxima[0] > maxima[1] && maxima[1] > maxima[2], detail};
}

Outcome small_data_uniqueness() {
  CaseConfig cfg = CaseConfig::reactor(50.0);
  cfg.u_in *= 1e-2;
  cfg.picard.tol_rel = 1e-10;
  cfg.picard.tol_abs = 1e-13;
  const FlowProblem problem(cfg);
  const NonlinearResult a = problem.solve();
  SolutionFields guess = problem.zero_fields();
  guess.velocity().setConstant(0.5);
  const NonlinearResult b = problem.solve(guess);
  const auto reference = [&b](double x, double y) {
    const Vec2 p(x, y);
    return VectorSample{b.fields.velocity_at(p), b.fields.velocity_gradient_at(p)};
  };
  const auto zero_p = [](double, double) { return 0.0; };
  const FieldErrors diff = compute_errors(a.fields, reference, zero_p, 6);
  const FieldErrors norm = compute_errors(problem.zero_fields(), reference, zero_p, 6);
  const double rel = std::hypot(diff.u_l2, diff.u_h1) / std::hypot(norm.u_l2, norm.u_h1);
  return {a.report.converged && b.report.converged && rel <= 1e-6,
          "relative H1 difference " + sci(rel) + " (" + std::to_string(a.report.iterations) + " and " +
              std::to_string(b.report.iterations) + " solves)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "packbed_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "reactor.cfg");
    write_config(os, CaseConfig::reactor(50.0));
  }
  std::ostringstream out, err;
  const int s1 = cli::cmd_solve(dir / "reactor.cfg", dir / "a", out, err);
  const int s2 = cli::cmd_solve(dir / "reactor.cfg", dir / "b", out, err);
  const std::string pa = slurp(dir / "a" / "profile_x50.dat"), pb = slurp(dir / "b" / "profile_x50.dat");
  const bool same = !pa.empty() && pa == pb;
  fs::remove_all(dir);
  return {s1 == cli::kSuccess && s2 == cli::kSuccess && same,
          "exit codes " + std::to_string(s1) + "/" + std::to_string(s2) + ", profile files " +
              (same ? "identical" : "differ") + " (" + std::to_string(pa.size()) + " bytes)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "coefficient laws", coefficients},
      {2, "porosity endpoints", porosity_endpoints},
      {3, "skew-symmetry of the convective form", skew_symmetry},
      {4, "Poiseuille exactness", poiseuille},
      {5, "manufactured-solution convergence orders", mms},
      {6, "discrete constraint and global flux", constraint_and_flux},
      {7, "wall channelling at x=50", wall_channelling},
      {8, "max|u| decreasing in Re", reynolds_monotonicity},
      {9, "small-data uniqueness", small_data_uniqueness},
      {10, "deterministic solve output", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail
              << fmt(" [%.1f s]", secs) << std::endl;
    failures += !o.pass;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing)" << std::endl;
  return failures ? 1 : 0;
}
