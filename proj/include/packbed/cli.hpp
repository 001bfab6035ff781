#ifndef PACKBED_CLI_HPP
#define PACKBED_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace packbed::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kNotConverged = 2,
  kVerificationFailed = 3,
};

int cmd_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);

int cmd_profile(const std::filesystem::path& run_dir, double x, int samples,
                const std::string& quantity, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  int levels = 4;
  std::vector<double> reynolds = {5.0, 50.0, 200.0};
  std::filesystem::path config;   ///< sweep base case; reactor defaults when empty
  std::filesystem::path out_dir;  ///< sweep summary destination, optional
};

/// Suites: mms, forms, flux, sweep.
int cmd_verify(const std::string& suite, const VerifyOptions& opts, std::ostream& out,
               std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace packbed::cli

#endif  // PACKBED_CLI_HPP
