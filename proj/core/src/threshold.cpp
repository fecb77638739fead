#include "couette/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace couette {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::not_recovered: return "not_recovered";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Real default_horizon(Real nu) { return std::max(10.0, 3.0 / std::cbrt(nu)); }

ProbeResult stability_probe(Real nu, Real A, const ProbeConfig& config) {
  if (!(A >= 0.0) || !std::isfinite(A)) throw ConfigError("stability_probe: A must be finite and non-negative");
  ProbeResult out;
  out.A = A;
  if (A == 0.0) {
    out.verdict = Verdict::stable;
    out.note = "zero data";
    return out;
  }
  const auto start = std::chrono::steady_clock::now();
  WeightSet w = config.weights;
  w.nu = nu;
  w.validate();
  InitConfig init = config.init;
  init.amplitude = A;
  init.m = w.m;
  init.eps = w.eps;

  const ChebGrid grid(config.n);
  const OperatorCache cache(grid, config.Lx, config.K);
  const FlowState s0 = init_perturbation(grid, config.Lx, config.K, nu, init);
  RunOptions opt;
  opt.t_end = config.t_end > 0.0 ? config.t_end : default_horizon(nu);
  opt.dt = config.dt;
  opt.diag_every = config.diag_every;
  opt.stop_ratio = 10.0;

  try {
    const RunResult run = run_flow(grid, s0, w, cache, opt);
    const Real e0 = run.history.front().E;
    for (const auto& r : run.history) out.peak_ratio = std::max(out.peak_ratio, r.E / e0);
    out.final_ratio = run.history.back().E / e0;
    if (run.nonfinite) {
      out.verdict = Verdict::unstable;
      out.peak_ratio = std::numeric_limits<Real>::infinity();
      out.note = "non-finite energy at t = " + std::to_string(run.history.back().t);
    } else if (run.stopped_early) {
      out.verdict = Verdict::unstable;
      out.note = "E exceeded 10 E(0) at t = " + std::to_string(run.history.back().t);
    } else if (out.final_ratio <= 1.0) {
      out.verdict = Verdict::stable;
    } else {
      out.verdict = Verdict::not_recovered;
    }
  } catch (const InconclusiveError& e) {
    out.verdict = Verdict::inconclusive;
    out.note = e.what();
  }
  out.runtime_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

// Fills `res` as it goes so callers keep the probes of an aborted sweep.
void bisect_into(Real nu, const ProbeFn& probe, const SweepOptions& options, SweepResult& res) {
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("ν must lie in (0, 1)");
  if (!(options.start_factor > 0.0) || options.max_doublings < 1 || !(options.tolerance > 0.0)) {
    throw ConfigError("bisect_threshold: invalid sweep options");
  }
  res = SweepResult{};
  res.nu = nu;
  auto run = [&](Real A) {
    ProbeResult p = probe(A);
    p.A = A;
    res.verdicts.push_back(p);
    if (p.verdict == Verdict::inconclusive) {
      throw InconclusiveError("probe at A = " + std::to_string(A) + " is inconclusive (" + p.note +
                              "); increase K or decrease dt");
    }
    return p.verdict == Verdict::stable;
  };

  Real A = options.start_factor * std::sqrt(nu);
  Real lo = 0.0, hi = 0.0;
  if (run(A)) {
    lo = A;
    for (int i = 0; i < options.max_doublings && hi == 0.0; ++i) {
      A *= 2.0;
      if (run(A)) {
        lo = A;
      } else {
        hi = A;
      }
    }
    if (hi == 0.0) {
      res.A_lo = lo;
      return;  // no instability found
    }
  } else {
    hi = A;
    for (int i = 0; i < options.max_doublings && lo == 0.0; ++i) {
      A *= 0.5;
      if (run(A)) {
        lo = A;
      } else {
        hi = A;
      }
    }
    if (lo == 0.0) throw NumericalError("bisect_threshold: no stable amplitude found below the start value");
  }

  while (hi / lo - 1.0 > options.tolerance) {
    const Real mid = std::sqrt(lo * hi);
    if (run(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.found = true;
  res.A_lo = lo;
  res.A_hi = hi;
  res.A_star = std::sqrt(lo * hi);
  res.bisection_tol = hi / lo - 1.0;
}

}  // namespace

SweepResult bisect_threshold(Real nu, const ProbeFn& probe, const SweepOptions& options) {
  SweepResult res;
  bisect_into(nu, probe, options, res);
  return res;
}

std::vector<SweepResult> threshold_sweep(const std::vector<Real>& nus, const ProbeConfig& config,
                                         const SweepOptions& options, int threads) {
  std::vector<SweepResult> out(nus.size());
  std::vector<std::exception_ptr> errors(nus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < nus.size(); i = next++) {
      const Real nu = nus[i];
      try {
        bisect_into(
            nu, [&](Real A) { return stability_probe(nu, A, config); }, options, out[i]);
      } catch (const InconclusiveError& e) {
        out[i].aborted = true;
        out[i].abort_reason = e.what();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(nus.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ScalingFit scaling_fit(const std::vector<SweepResult>& results) {
  std::vector<Real> x, y;
  for (const auto& r : results) {
    if (!r.found) continue;
    if (!(r.A_star > 0.0) || !(r.nu > 0.0)) throw ConfigError("scaling_fit: A_star and nu must be positive");
    x.push_back(std::log(r.nu));
    y.push_back(std::log(r.A_star));
  }
  if (x.size() < 3) throw ConfigError("scaling_fit: need at least 3 viscosities with a finite A_star");
  const Real N = static_cast<Real>(x.size());
  Real mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / N;
    my += y[i] / N;
  }
  Real sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("scaling_fit: viscosities must be distinct");
  ScalingFit f;
  f.points = static_cast<int>(x.size());
  f.gamma = sxy / sxx;
  f.intercept = my - f.gamma * mx;
  Real ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Real r = y[i] - (f.intercept + f.gamma * x[i]);
    f.residuals.push_back(r);
    ssr += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.std_error = std::sqrt(ssr / (N - 2.0) / sxx);
  const boost::math::students_t dist(N - 2.0);
  const Real t = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.ci_low = f.gamma - t * f.std_error;
  f.ci_high = f.gamma + t * f.std_error;
  return f;
}

}  // namespace couette
