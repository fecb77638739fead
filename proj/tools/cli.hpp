#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "couette/common.hpp"

namespace couette::cli {

inline const std::vector<std::string> kExperiments{"verify-operator", "linear-run",    "kelvin-check", "nonlinear-run",
                                                   "threshold-sweep", "inequalities", "calibrate"};

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2, kInconclusive = 3 };

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "COUETTE_LAB_OUT";

struct RunConfig {
  std::string experiment;
  int n = 64;
  int K = 32;
  Real Lx = 100.0;
  Real nu = 1e-3;
  Real m = 2.0;
  Real eps = 0.08;
  std::optional<Real> A;  // theorem-norm amplitude; overrides eps0
  Real eps0 = 0.01;       // amplitude eps0 * nu^{1/2} when A is unset
  Real dt = 0.0;          // 0: experiment default
  Real t_end = 0.0;       // 0: experiment default
  std::uint64_t seed = 1;
  std::vector<Real> nus;  // threshold-sweep / calibrate viscosity list
  std::string out;        // empty: $COUETTE_LAB_OUT/<experiment> or ./couette-out/<experiment>
  int threads = 1;

  Real amplitude() const;
  /// Throws ConfigError naming the violated constraint.
  void validate() const;
  std::filesystem::path output_dir() const;
};

/// Parses flags and an optional `--config` key = value file (flags win).
/// Returns the exit code when parsing ends the run (help, usage errors);
/// std::nullopt when `cfg` is ready.
std::optional<int> parse_config(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                                std::ostream& err);

/// Runs the experiment and writes CSV/JSON plus manifest.json into the
/// output directory. Returns the process exit code.
int dispatch(const RunConfig& cfg, std::ostream& log);

/// parse_config + dispatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace couette::cli
