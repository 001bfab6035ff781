#ifndef PACKBED_IO_HPP
#define PACKBED_IO_HPP

// Config files, run artifacts and velocity profiles.
//
// Config format: one `name = value` per line, `#` starts a comment. Keys are
// the CaseConfig fields in lower snake case; `forcing` takes two comma
// separated components. Numbers are parsed independently of the locale.

#include "packbed/assembly.hpp"
#include "packbed/model.hpp"
#include "packbed/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace packbed {

/// Keys that must be present in every config file.
const std::vector<std::string>& required_config_keys();

/// Throws ConfigError naming the source and key for missing, unknown,
/// duplicate or malformed entries, and for violated invariants.
CaseConfig parse_config(std::istream& is, const std::string& source = "<config>");
CaseConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const CaseConfig& cfg);

enum class ProfileQuantity { Speed, U, V, Pressure };

/// Accepts `speed`, `magnitude`, `|u|`, `u`, `v`, `p`.
ProfileQuantity parse_quantity(std::string_view name);
std::string_view to_string(ProfileQuantity q);

struct ProfilePoint {
  double y;
  double value;
};

/// n samples uniformly spaced on [-R, R] along the vertical line x.
std::vector<ProfilePoint> sample_profile(const SolutionFields& fields, double x, int n,
                                         ProfileQuantity quantity);

/// `profile_x50.dat` for the speed, `profile_x50_u.dat` etc. otherwise.
std::string profile_filename(double x, ProfileQuantity quantity);

/// Shape of a speed profile across the channel.
struct ChannellingFeatures {
  double max_value = 0.0;
  double centre_value = 0.0;
  double lower_peak_y = 0.0;  ///< location of the maximum on y < 0
  double upper_peak_y = 0.0;  ///< location of the maximum on y > 0
  double lower_peak = 0.0;
  double upper_peak = 0.0;
  double asymmetry = 0.0;     ///< max |s(y) - s(-y)|
};

ChannellingFeatures analyze_channelling(const std::vector<ProfilePoint>& profile);

/// Columnar writers; header lines start with '#'. Numbers use %.17g.
void write_profile(std::ostream& os, const std::vector<ProfilePoint>& profile, double x,
                   ProfileQuantity quantity);
void write_fields(std::ostream& os, const SolutionFields& fields);
void write_porosity(std::ostream& os, const CaseConfig& cfg, int samples = 201);
void write_report(std::ostream& os, const NonlinearReport& report, const CaseConfig& cfg);
void write_solution(std::ostream& os, const SolutionFields& fields);
SolutionFields read_solution(std::istream& is, const StructuredQuadMesh& mesh);

/// Default profile station: x = 50 when the channel is long enough, else L/2.
double default_station(const CaseConfig& cfg);

/// config.txt, solution.dat, fields.dat, porosity.dat, report.txt and the
/// default speed profile.
void write_run_artifacts(const std::filesystem::path& dir, const CaseConfig& cfg,
                         const NonlinearResult& result);

struct LoadedRun {
  CaseConfig config;
  SolutionFields fields;
};

LoadedRun load_run(const std::filesystem::path& dir);

}  // namespace packbed

#endif  // PACKBED_IO_HPP
