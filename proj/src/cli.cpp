#include "packbed/cli.hpp"

#include "packbed/io.hpp"
#include "packbed/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace packbed::cli {

namespace {

std::string fmt(double v, const char* spec = "%.6e") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void print_issues(std::ostream& err, const ConfigError& e) {
  err << "config error:\n";
  for (const auto& issue : e.issues()) err << "  " << issue << "\n";
}

struct CheckList {
  std::ostream& out;
  bool ok = true;

  void check(bool pass, const std::string& name, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    ok = ok && pass;
  }
  int status() const { return ok ? kSuccess : kVerificationFailed; }
};

int verify_forms(std::ostream& out) {
  CheckList checks{out};
  const SkewCheck skew = check_skew_symmetry(50);
  checks.check(skew.max_violation <= 1e-11, "skew-symmetry n(w,u,v) = -n(w,v,u)",
               "max relative violation " + fmt(skew.max_violation) + " over 50 trials");
  checks.check(skew.max_self_violation <= 1e-11, "n(w,u,u) = 0",
               "max relative violation " + fmt(skew.max_self_violation));
  const SkewCheck control = check_skew_symmetry(50, 2024, true);
  checks.check(control.max_violation >= 1e-3, "negative control (nonzero boundary trace)",
               "max relative violation " + fmt(control.max_violation));
  const double mf = check_matrix_free(10);
  checks.check(mf <= 1e-12, "assembled blocks against direct form evaluation",
               "max relative mismatch " + fmt(mf));
  return checks.status();
}

int verify_mms(const VerifyOptions& opts, std::ostream& out) {
  CheckList checks{out};
  StudyOptions so;
  so.levels = opts.levels;
  const ConvergenceTable table = run_convergence_study(ManufacturedCase::smooth(), so);
  write_convergence_table(out, table);
  if (table.levels.size() >= 2) {
    const std::size_t k = table.levels.size() - 1;
    checks.check(table.order_u_l2(k) >= 2.7, "velocity L2 order", fmt(table.order_u_l2(k), "%.3f"));
    checks.check(table.order_u_h1(k) >= 1.8, "velocity H1 order", fmt(table.order_u_h1(k), "%.3f"));
    checks.check(table.order_p_l2(k) >= 1.8, "pressure L2 order", fmt(table.order_p_l2(k), "%.3f"));
  }
  StudyOptions exact;
  exact.levels = 1;
  exact.base_cells = 2;
  exact.picard.tol_rel = 1e-14;
  exact.picard.tol_abs = 1e-13;
  const ConvergenceTable poly = run_convergence_study(ManufacturedCase::polynomial(), exact);
  const FieldErrors& e = poly.levels.front().errors;
  checks.check(std::max({e.u_l2, e.u_h1, e.p_l2}) <= 1e-9, "polynomial solution reproduced",
               "errors " + fmt(e.u_l2) + " " + fmt(e.u_h1) + " " + fmt(e.p_l2));
  return checks.status();
}

CaseConfig base_case(const VerifyOptions& opts) {
  return opts.config.empty() ? CaseConfig::reactor() : load_config(opts.config);
}

int verify_flux(const VerifyOptions& opts, std::ostream& out) {
  CheckList checks{out};
  const CaseConfig cfg = base_case(opts);
  const NonlinearResult result = FlowProblem(cfg).solve();
  if (!result.report.converged) {
    out << "Picard iteration did not converge in " << result.report.iterations << " solves\n";
    return kNotConverged;
  }
  checks.check(result.report.constraint_residual <= 1e-7, "constraint residual",
               fmt(result.report.constraint_residual));
  const FluxReport flux = check_global_flux(result.fields, cfg);
  const double rel = std::abs(flux.net()) / std::abs(flux.inflow);
  checks.check(rel <= 1e-6, "global eps-weighted flux balance",
               "net " + fmt(flux.net()) + ", inflow " + fmt(flux.inflow) + ", relative " + fmt(rel));
  return checks.status();
}

int verify_sweep(const VerifyOptions& opts, std::ostream& out) {
  const CaseConfig base = base_case(opts);
  const double x = default_station(base);
  std::ostringstream table;
  table << "# Re  max|u|  iterations\n";
  std::vector<double> maxima;
  int status = kSuccess;
  for (double re : opts.reynolds) {
    CaseConfig cfg = base;
    cfg.re = re;
    const NonlinearResult result = FlowProblem(cfg).solve();
    if (!result.report.converged) status = kNotConverged;
    const auto profile = sample_profile(result.fields, x, 201, ProfileQuantity::Speed);
    const double m = analyze_channelling(profile).max_value;
    maxima.push_back(m);
    table << fmt(re, "%.17g") << " " << fmt(m, "%.17g") << " " << result.report.iterations << "\n";
  }
  out << table.str();
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream(opts.out_dir / "sweep.dat") << table.str();
  }
  if (status != kSuccess) {
    out << "FAIL at least one Reynolds number did not converge\n";
    return status;
  }
  CheckList checks{out};
  bool decreasing = true;
  for (std::size_t k = 1; k < maxima.size(); ++k) decreasing = decreasing && maxima[k] < maxima[k - 1];
  checks.check(decreasing, "max|u| strictly decreasing with Re", "x = " + fmt(x, "%g"));
  return checks.status();
}

}  // namespace

int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err) {
  CaseConfig cfg;
  try {
    cfg = load_config(config);
    const NonlinearResult result = FlowProblem(cfg).solve();
    write_run_artifacts(out_dir, cfg, result);
    out << "iterations " << result.report.iterations << ", final residual "
        << fmt(result.report.residuals.back()) << ", constraint residual "
        << fmt(result.report.constraint_residual) << "\n";
    if (!result.report.converged) {
      err << "Picard iteration did not converge; see " << (out_dir / "report.txt").string() << "\n";
      return kNotConverged;
    }
    return kSuccess;
  } catch (const ConfigError& e) {
    print_issues(err, e);
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    if (e.report()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream os(out_dir / "report.txt");
      write_report(os, *e.report(), cfg);
      err << "report written to " << (out_dir / "report.txt").string() << "\n";
    }
    return kNotConverged;
  }
}

int cmd_profile(const std::filesystem::path& run_dir, double x, int samples,
                const std::string& quantity, std::ostream& out, std::ostream& err) {
  try {
    const ProfileQuantity q = parse_quantity(quantity);
    const LoadedRun run = load_run(run_dir);
    const auto profile = sample_profile(run.fields, x, samples, q);
    const std::filesystem::path path = run_dir / profile_filename(x, q);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_profile(os, profile, x, q);
    out << path.string() << "\n";
    return kSuccess;
  } catch (const ConfigError& e) {
    print_issues(err, e);
    return kConfigError;
  } catch (const std::exception& e) {
    err << "profile error: " << e.what() << "\n";
    return kConfigError;
  }
}

int cmd_verify(const std::string& suite, const VerifyOptions& opts, std::ostream& out,
               std::ostream& err) {
  try {
    if (suite == "forms") return verify_forms(out);
    if (suite == "mms") return verify_mms(opts, out);
    if (suite == "flux") return verify_flux(opts, out);
    if (suite == "sweep") return verify_sweep(opts, out);
    err << "unknown suite '" << suite << "' (expected mms, forms, flux or sweep)\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    print_issues(err, e);
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kNotConverged;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Porous-media channel flow solver (Q2/P1-disc mixed finite elements)", "packbed"};
  app.require_subcommand(1);

  std::string config, out_dir;
  bool dump_mesh = false, dump_matrix = false;
  auto* solve = app.add_subcommand("solve", "Solve a case and write run artifacts");
  solve->add_option("--config", config, "Config file")->required();
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_flag("--dump-mesh", dump_mesh, "Also write mesh.txt (Q2 nodes with tags)");
  solve->add_flag("--dump-matrix", dump_matrix, "Also write matrix.coo (final system matrix)");

  std::string in_dir, quantity = "speed";
  std::optional<double> station;
  int samples = 201;
  auto* profile = app.add_subcommand("profile", "Sample a profile across the channel");
  profile->add_option("--in", in_dir, "Run directory")->required();
  profile->add_option("--x", station, "Station (default 50, or L/2 for short channels)");
  profile->add_option("--n", samples, "Sample count")->capture_default_str();
  profile->add_option("--quantity", quantity, "speed, u, v or p")->capture_default_str();

  std::string suite;
  VerifyOptions vopts;
  std::string vconfig, vout;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "mms, forms, flux or sweep")->required();
  verify->add_option("--levels", vopts.levels, "MMS mesh levels")->capture_default_str();
  verify->add_option("--re", vopts.reynolds, "Reynolds numbers for sweep")->delimiter(',');
  verify->add_option("--config", vconfig, "Base case for flux and sweep");
  verify->add_option("--out", vout, "Directory for the sweep summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  if (*solve) {
    const int status = cmd_solve(config, out_dir, out, err);
    if (status == kConfigError || !(dump_mesh || dump_matrix)) return status;
    const CaseConfig cfg = load_config(config);
    const FlowProblem problem(cfg);
    if (dump_mesh) {
      std::ofstream os(std::filesystem::path(out_dir) / "mesh.txt");
      write_mesh_dump(os, problem.mesh(), problem.dofs());
    }
    if (dump_matrix) {
      const LoadedRun run = load_run(out_dir);
      std::ofstream os(std::filesystem::path(out_dir) / "matrix.coo");
      write_matrix_coo(os, problem.linear_system(run.fields.velocity()).matrix);
    }
    return status;
  }
  if (*profile) {
    double x = station.value_or(0.0);
    if (!station) {
      try {
        x = default_station(load_config(std::filesystem::path(in_dir) / "config.txt"));
      } catch (const ConfigError& e) {
        print_issues(err, e);
        return kConfigError;
      }
    }
    return cmd_profile(in_dir, x, samples, quantity, out, err);
  }
  vopts.config = vconfig;
  vopts.out_dir = vout;
  return cmd_verify(suite, vopts, out, err);
}

}  // namespace packbed::cli
