#pragma once

#include <functional>
#include <string>
#include <vector>

#include "couette/diagnostics.hpp"

namespace couette {

enum class Verdict {
  stable,         // sup E <= 10 E(0) and E(T) <= E(0)
  unstable,       // sup E > 10 E(0), or non-finite values
  not_recovered,  // bounded growth but E(T) > E(0); sits on the unstable side of a bracket
  inconclusive,   // CFL violated at this resolution
};

std::string verdict_name(Verdict v);

struct ProbeResult {
  Real A = 0.0;
  Verdict verdict = Verdict::inconclusive;
  Real peak_ratio = 0.0;   // sup E / E(0)
  Real final_ratio = 0.0;  // E(T) / E(0)
  Real runtime_seconds = 0.0;
  std::string note;
};

struct ProbeConfig {
  int n = 64;
  int K = 32;
  Real Lx = 100.0;
  Real dt = 0.01;
  Real t_end = 0.0;  // <= 0: default_horizon(nu)
  int diag_every = 20;
  WeightSet weights;  // nu is overwritten per probe
  InitConfig init;    // amplitude is overwritten per probe
};

/// max(10, 3 nu^{-1/3}).
Real default_horizon(Real nu);

/// Runs the nonlinear flow from init_perturbation(A) and classifies it.
/// The run stops as soon as E exceeds 10 E(0).
ProbeResult stability_probe(Real nu, Real A, const ProbeConfig& config);

using ProbeFn = std::function<ProbeResult(Real A)>;

struct SweepOptions {
  Real start_factor = 0.01;  // first probe at start_factor * nu^{1/2}
  int max_doublings = 1000;
  Real tolerance = 0.05;  // final hi / lo - 1
};

struct SweepResult {
  Real nu = 0.0;
  bool found = false;  // false: "no instability found"
  Real A_star = 0.0;   // geometric mean of the final bracket (0 when !found)
  Real A_lo = 0.0;     // largest stable amplitude
  Real A_hi = 0.0;     // smallest non-stable amplitude
  Real bisection_tol = 0.0;
  std::vector<ProbeResult> verdicts;
  /// Set by threshold_sweep when a probe was inconclusive; verdicts then
  /// holds the probes run so far.
  bool aborted = false;
  std::string abort_reason;
};

/// Doubling search for a bracket, then geometric bisection. An inconclusive
/// probe aborts with InconclusiveError.
SweepResult bisect_threshold(Real nu, const ProbeFn& probe, const SweepOptions& options = {});

/// Runs bisect_threshold for every nu on up to `threads` workers. Results
/// are returned in input order and do not depend on `threads`. Inconclusive
/// sweeps come back with `aborted` set; other errors are rethrown.
std::vector<SweepResult> threshold_sweep(const std::vector<Real>& nus, const ProbeConfig& config,
                                         const SweepOptions& options = {}, int threads = 1);

struct ScalingFit {
  Real gamma = 0.0;  // slope of log A_star against log nu
  Real intercept = 0.0;
  Real r_squared = 0.0;
  Real std_error = 0.0;
  Real ci_low = 0.0;  // 95% interval for gamma
  Real ci_high = 0.0;
  std::vector<Real> residuals;
  int points = 0;
};

/// Least squares over results with found == true. Throws ConfigError for
/// fewer than 3 such points.
ScalingFit scaling_fit(const std::vector<SweepResult>& results);

}  // namespace couette
