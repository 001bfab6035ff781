#include "packbed/io.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

using namespace packbed;
using namespace packbed::testing;

namespace {

const char* kMinimal =
    "# reactor\n"
    "length = 60\n"
    "half_width = 5\n"
    "nx = 12   # cells along x\n"
    "ny = 8\n"
    "re = 50\n"
    "eps_inf = 0.45\n"
    "u_in = 1\n"
    "u_w = 0\n";

CaseConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "test.cfg");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
};

}  // namespace

TEST_CASE("minimal config") {
  const CaseConfig cfg = parse(kMinimal);
  CHECK(cfg.length == 60.0);
  CHECK(cfg.nx == 12);
  CHECK(cfg.ny == 8);
  CHECK(cfg.eps_inf == 0.45);
  CHECK(cfg.decay == 6.0);
  CHECK(cfg.ramp == 1.0);
  CHECK(cfg.quad_order == 3);
  CHECK(cfg.picard.max_iter == 50);
}

TEST_CASE("optional keys") {
  const CaseConfig cfg = parse(std::string(kMinimal) +
                               "decay = 4.5\nramp=0.5\nforcing = 1.5, -2\nquad_order = 4\n"
                               "picard_tol_rel = 1e-9\npicard_tol_abs = 1e-12\n"
                               "picard_max_iter = 80\npicard_relaxation = 0.8\n");
  CHECK(cfg.decay == 4.5);
  CHECK(cfg.ramp == 0.5);
  CHECK(cfg.forcing_constant == Vec2(1.5, -2.0));
  CHECK(cfg.quad_order == 4);
  CHECK(cfg.picard.tol_rel == 1e-9);
  CHECK(cfg.picard.tol_abs == 1e-12);
  CHECK(cfg.picard.max_iter == 80);
  CHECK(cfg.picard.relaxation == 0.8);
}

TEST_CASE("config errors name the key") {
  std::string text = kMinimal;
  text.replace(text.find("re = 50\n"), 8, "");
  CHECK(config_error(text).find("missing required key 're'") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "colour = red\n").find("unknown key 'colour'") !=
        std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "nx = 3\n").find("duplicate key 'nx'") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "decay = fast\n").find("malformed value for key 'decay'") !=
        std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "ramp = 1.0x\n").find("'ramp'") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "quad_order = 2.5\n").find("'quad_order'") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "just words\n").find("test.cfg:10") != std::string::npos);

  text = kMinimal;
  text.replace(text.find("nx = 12"), 7, "nx = 0");
  CHECK(config_error(text).find("nx must be >= 1") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/packbed.cfg"), ConfigError);
}

TEST_CASE("config parsing ignores the global locale") {
  const std::locale previous = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  const CaseConfig cfg = parse(kMinimal);
  std::locale::global(previous);
  CHECK(cfg.eps_inf == 0.45);
}

TEST_CASE("config round trip") {
  CaseConfig cfg = CaseConfig::reactor(123.456);
  cfg.u_w = 0.1 / 3.0;
  cfg.forcing_constant = Vec2(1e-3, -0.7);
  cfg.picard.relaxation = 0.9;
  std::ostringstream os;
  write_config(os, cfg);
  const CaseConfig back = parse(os.str());
  CHECK(back.re == cfg.re);
  CHECK(back.u_w == cfg.u_w);
  CHECK(back.forcing_constant == cfg.forcing_constant);
  CHECK(back.quad_order == 4);
  CHECK(back.picard.relaxation == 0.9);
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == os.str());
}

TEST_CASE("profile quantities and names") {
  CHECK(parse_quantity("speed") == ProfileQuantity::Speed);
  CHECK(parse_quantity("|u|") == ProfileQuantity::Speed);
  CHECK(parse_quantity("magnitude") == ProfileQuantity::Speed);
  CHECK(parse_quantity("u") == ProfileQuantity::U);
  CHECK(parse_quantity("v") == ProfileQuantity::V);
  CHECK(parse_quantity("p") == ProfileQuantity::Pressure);
  CHECK_THROWS_AS(parse_quantity("w"), std::invalid_argument);
  CHECK(profile_filename(50.0, ProfileQuantity::Speed) == "profile_x50.dat");
  CHECK(profile_filename(12.5, ProfileQuantity::U) == "profile_x12.5_u.dat");
  CHECK(profile_filename(50.0, ProfileQuantity::Pressure) == "profile_x50_p.dat");
}

TEST_CASE("profile sampling") {
  const StructuredQuadMesh mesh(4.0, 1.0, 4, 4);
  const DofMaps maps(mesh);
  const Vector u = interpolate_velocity(maps, [](double x, double y) { return Vec2(1.0 - y * y, 0.25 * x); });
  const Vector p = project_pressure(mesh, [](double x, double) { return 4.0 - x; }, 3);
  const SolutionFields fields(mesh, u, p);

  const auto prof = sample_profile(fields, 2.0, 5, ProfileQuantity::U);
  REQUIRE(prof.size() == 5);
  CHECK(prof.front().y == -1.0);
  CHECK(prof.back().y == 1.0);
  CHECK(prof[0].value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(prof[2].value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prof[1].value == doctest::Approx(0.75).epsilon(1e-14));
  const auto speed = sample_profile(fields, 2.0, 3, ProfileQuantity::Speed);
  CHECK(speed[1].value == doctest::Approx(std::hypot(1.0, 0.5)).epsilon(1e-14));
  CHECK(sample_profile(fields, 1.0, 2, ProfileQuantity::V)[0].value == doctest::Approx(0.25));
  CHECK(sample_profile(fields, 1.0, 2, ProfileQuantity::Pressure)[1].value == doctest::Approx(3.0));
  CHECK_THROWS_AS(sample_profile(fields, 4.5, 5, ProfileQuantity::U), DomainError);
  CHECK_THROWS_AS(sample_profile(fields, 1.0, 1, ProfileQuantity::U), DomainError);
}

TEST_CASE("channelling features") {
  std::vector<ProfilePoint> prof;
  for (int k = 0; k <= 20; ++k) {
    const double y = -1.0 + 0.1 * k;
    const double s = 0.5 + 2.0 * std::exp(-100.0 * (std::abs(y) - 0.8) * (std::abs(y) - 0.8));
    prof.push_back({y, s});
  }
  const ChannellingFeatures f = analyze_channelling(prof);
  CHECK(f.centre_value == doctest::Approx(0.5 + 2.0 * std::exp(-64.0)));
  CHECK(f.lower_peak_y == doctest::Approx(-0.8));
  CHECK(f.upper_peak_y == doctest::Approx(0.8));
  CHECK(f.lower_peak == doctest::Approx(2.5));
  CHECK(f.lower_peak_y == doctest::Approx(-f.upper_peak_y));
  CHECK(f.max_value == std::max(f.lower_peak, f.upper_peak));
  CHECK(f.asymmetry <= 1e-12);
}

TEST_CASE("solution files round trip bit for bit") {
  const StructuredQuadMesh mesh(2.0, 1.0, 3, 2);
  const DofMaps maps(mesh);
  std::mt19937_64 rng(41);
  const SolutionFields fields(mesh, random_vector(rng, maps.velocity_dof_count()) / 3.0,
                              random_vector(rng, maps.pressure_dof_count()) * 1e-7);
  std::stringstream ss;
  write_solution(ss, fields);
  const SolutionFields back = read_solution(ss, mesh);
  CHECK(back.velocity() == fields.velocity());
  CHECK(back.pressure() == fields.pressure());
  std::stringstream wrong;
  write_solution(wrong, fields);
  CHECK_THROWS(read_solution(wrong, StructuredQuadMesh(2.0, 1.0, 2, 2)));
}

TEST_CASE("columnar writers") {
  const StructuredQuadMesh mesh(2.0, 1.0, 2, 1);
  const DofMaps maps(mesh);
  const SolutionFields fields(mesh, interpolate_velocity(maps, [](double x, double) { return Vec2(x, 1.0); }),
                              project_pressure(mesh, [](double x, double y) { return x + y; }, 3));
  std::ostringstream os;
  write_fields(os, fields);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# x y u v p");
  int rows = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    double x, y, u, v, p;
    REQUIRE(static_cast<bool>(ls >> x >> y >> u >> v >> p));
    CHECK(u == doctest::Approx(x));
    CHECK(v == 1.0);
    CHECK(p == doctest::Approx(x + y).epsilon(1e-13));
    ++rows;
  }
  CHECK(rows == maps.node_count());

  std::ostringstream po;
  write_porosity(po, CaseConfig::reactor());
  std::istringstream ps(po.str());
  std::getline(ps, line);
  CHECK(line == "# y eps");
  std::vector<std::pair<double, double>> samples;
  while (std::getline(ps, line)) {
    std::istringstream ls(line);
    double y, e;
    REQUIRE(static_cast<bool>(ls >> y >> e));
    samples.emplace_back(y, e);
  }
  REQUIRE(samples.size() == 201);
  CHECK(samples.front() == std::pair{-5.0, 1.0});
  CHECK(samples.back() == std::pair{5.0, 1.0});
  CHECK(samples[100].second == doctest::Approx(0.45));
}

TEST_CASE("run artifacts") {
  CaseConfig cfg = CaseConfig::reactor();
  cfg.nx = 12;
  cfg.ny = 8;
  const NonlinearResult result = solve_nonlinear(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "packbed_test_io_run";
  std::filesystem::remove_all(dir);
  write_run_artifacts(dir, cfg, result);
  for (const char* name : {"config.txt", "solution.dat", "fields.dat", "porosity.dat", "report.txt",
                           "profile_x50.dat"})
    CHECK(std::filesystem::exists(dir / name));
  const LoadedRun run = load_run(dir);
  CHECK(run.config.nx == 12);
  CHECK(run.config.quad_order == 4);
  CHECK(run.fields.velocity() == result.fields.velocity());
  std::ifstream report(dir / "report.txt");
  std::string text((std::istreambuf_iterator<char>(report)), std::istreambuf_iterator<char>());
  CHECK(text.find("converged 1") != std::string::npos);
  CHECK(text.find("flux_net") != std::string::npos);
  CHECK(default_station(cfg) == 50.0);
  cfg.length = 20.0;
  CHECK(default_station(cfg) == 10.0);
  std::filesystem::remove_all(dir);
}
