// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance            run all
//   acceptance --only 4   run one (repeatable)

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "couette/diagnostics.hpp"
#include "couette/elliptic.hpp"
#include "couette/threshold.hpp"
#include "kelvin_ode.hpp"

using namespace couette;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator()(const char* key, const T& value) {
    os_ << (first_ ? "" : ", ") << key << " " << value;
    first_ = false;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

std::vector<Real> log_grid(Real lo, Real hi, int points) {
  std::vector<Real> out;
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<Real>(i) / (points - 1)));
  return out;
}

Real rel_change(Real a, Real b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

ModeField smooth_random(const ChebGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<Real> nd;
  Complex c[5];
  for (auto& v : c) v = Complex(nd(rng), nd(rng));
  return sample(g, [&](Real y) {
    Complex s = 0.0;
    for (int p = 0; p < 5; ++p) s += c[p] * std::cos(p * kPi * y / 2.0 + 0.3 * p);
    return s;
  });
}

Outcome elliptic_consistency() {
  const ChebGrid g(64);
  std::mt19937_64 rng(101);
  Real worst = 0.0;
  for (Real k : {0.01, 0.5, 1.0, 4.0, 20.0}) {
    const GreensMatrix gm = assemble_greens(g, k);
    for (int t = 0; t < 20; ++t) {
      const ModeField f = smooth_random(g, rng);
      const ModeField a = apply_greens(gm, g, f);
      const ModeField b = helmholtz_solve(g, k, f);
      worst = std::max(worst, std::sqrt(g.norm_sq(a - b) / g.norm_sq(b)));
    }
  }
  return {worst <= 1e-5, Detail()("max relative L2 error", worst).str()};
}

Outcome operator_norm_envelope() {
  const ChebGrid coarse(64), fine(128);
  Real sup = 0.0, drift = 0.0;
  for (Real k : log_grid(1e-3, 1e3, 25)) {
    const Real a = operator_norm(assemble_j(coarse, k), coarse);
    const Real b = operator_norm(assemble_j(fine, k), fine);
    sup = std::max(sup, b);
    drift = std::max(drift, rel_change(a, b));
  }
  return {std::isfinite(sup) && sup <= 10.0 && drift < 0.05,
          Detail()("sup norm n=128", sup)("max change n=64 to 128", drift).str()};
}

Outcome commutator_and_adjoint() {
  const ChebGrid coarse(64), fine(128);
  Real sup_comm = 0.0, comm_drift = 0.0, worst_adj = 0.0, worst_imag = 0.0;
  bool decreasing = true;
  for (Real k : log_grid(1e-3, 1e3, 25)) {
    const SingularOperator ja = assemble_j(coarse, k), jb = assemble_j(fine, k);
    if (k >= 0.1 - 1e-12 && k <= 100.0 + 1e-9) {
      const Real ca = commutator_norm(ja, coarse), cb = commutator_norm(jb, fine);
      sup_comm = std::max({sup_comm, ca, cb});
      comm_drift = std::max(comm_drift, rel_change(ca, cb));
    }
    const AdjointDefect da = adjoint_defect(ja, coarse), db = adjoint_defect(jb, fine);
    const Real ra = da.self_adjoint / operator_norm(ja, coarse);
    const Real rb = db.self_adjoint / operator_norm(jb, fine);
    worst_adj = std::max({worst_adj, ra, rb});
    decreasing = decreasing && rb < ra;
    worst_imag = std::max({worst_imag, da.real_part / ja.mat.cwiseAbs().maxCoeff(),
                           db.real_part / jb.mat.cwiseAbs().maxCoeff()});
  }
  const bool pass = sup_comm <= 50.0 && comm_drift <= 0.10 && worst_adj <= 1e-3 && decreasing && worst_imag <= 1e-10;
  return {pass, Detail()("sup commutator", sup_comm)("commutator change", comm_drift)("adjoint defect", worst_adj)(
                    "decreasing", decreasing ? "yes" : "no")("imaginary-entry defect", worst_imag)
                    .str()};
}

Outcome kelvin_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<Real> uk(0.1, 4.0), uxi(-5.0, 5.0), us(0.0, 5.0), ulognu(-4.0, -2.0);
  Real worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Real k = uk(rng), xi = uxi(rng), nu = std::pow(10.0, ulognu(rng)), t = us(rng) / std::cbrt(nu);
    const Complex a = kelvin_exact(k, xi, t, nu, kelvin_default_spectrum);
    const Complex b = oracle::kelvin_characteristic(k, xi, t, nu, kelvin_default_spectrum);
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  const std::vector<Real> ts = kelvin_time_grid();
  const Real ed = enhanced_dissipation_check(kKelvinK, ts, kKelvinNu).sup_ratio;
  const Real id = inviscid_damping_check(kKelvinK, ts, kKelvinNu, kelvin_default_spectrum, 20.0).sup_ratio;
  const Real id2 = inviscid_damping_check(kKelvinK, ts, kKelvinNu, kelvin_default_spectrum, 40.0).sup_ratio;
  const Real change = rel_change(id, id2);
  const bool pass = worst <= 1e-8 && ed <= std::exp(4.0 / 3.0) + 1e-6 && std::isfinite(id) && change < 0.05;
  return {pass, Detail()("closed form vs characteristics", worst)("enhanced dissipation sup", ed)(
                    "inviscid damping sup", id)("change under xi doubling", change)
                    .str()};
}

Outcome lyapunov_after_calibration() {
  const ChebGrid g(64);
  const std::vector<Real> nus{1e-3, 1e-4};
  const auto ensemble = calibration_ensemble(g, 10, 7);
  const CalibrationResult cal = calibrate_constants(g, nus, {0.5, 1.0, 2.0, 4.0, 0.0}, ensemble);
  // recomputed from full trajectories, not from the stored forms; a second
  // ensemble is reported but not required
  const auto held_out = calibration_ensemble(g, 10, 8);
  Real worst = 0.0, worst_held_out = 0.0;
  for (Real nu : nus) {
    WeightSet w = cal.weights;
    w.nu = nu;
    for (Real k : {0.5, 1.0, 2.0, 4.0, nu}) {
      const SingularOperator j = assemble_j(g, k);
      const Real t_end = calibration_horizon(k, nu), dt = default_linear_dt(k);
      for (const auto& datum : ensemble) {
        worst = std::max(worst, lyapunov_monitor(evolve_linear(g, k, nu, datum, t_end, dt, w, &j), w).relative);
      }
      for (const auto& datum : held_out) {
        worst_held_out =
            std::max(worst_held_out, lyapunov_monitor(evolve_linear(g, k, nu, datum, t_end, dt, w, &j), w).relative);
      }
    }
  }
  return {cal.worst_relative <= 1e-2 && worst <= 1e-2,
          Detail()("c0", cal.weights.c0)("c_alpha", cal.weights.c_alpha)("c_beta", cal.weights.c_beta)(
              "c_tau", cal.weights.c_tau)("max residual / max D", worst)("held-out data", worst_held_out)
              .str()};
}

Outcome enhanced_dissipation_scaling() {
  const ChebGrid g(256);
  const ModeField datum = calibration_ensemble(g, 1, 3).front();
  const Real nus[] = {1e-3, 1e-4, 1e-5};
  Real lo = 1e300, hi = 0.0, slope_lo = 0.0, slope_hi = -1.0;
  for (Real k : {1.0, 2.0, 4.0}) {
    Real x[3], y[3];
    for (int i = 0; i < 3; ++i) {
      const DecayMeasurement d = measure_decay(g, k, nus[i], datum);
      lo = std::min(lo, d.efold / d.timescale);
      hi = std::max(hi, d.efold / d.timescale);
      x[i] = std::log(nus[i]);
      y[i] = std::log(d.efold);
    }
    const Real mx = (x[0] + x[1] + x[2]) / 3.0, my = (y[0] + y[1] + y[2]) / 3.0;
    Real sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < 3; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    slope_lo = std::min(slope_lo, sxy / sxx);
    slope_hi = std::max(slope_hi, sxy / sxx);
  }
  // one prefactor C with every ratio in [0.75 C, 1.25 C]
  const Real prefactor = 0.5 * (lo + hi);
  const Real spread = (hi - lo) / (hi + lo);
  const bool pass = spread <= 0.25 && slope_lo >= -0.42 && slope_hi <= -0.25;
  return {pass, Detail()("prefactor", prefactor)("spread", spread)("slopes from", slope_lo)("to", slope_hi).str()};
}

Real state_distance(const ChebGrid& g, const FlowState& a, const FlowState& b) {
  Real num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.modes.size(); ++j) {
    num += g.norm_sq(a.modes[j] - b.modes[j]);
    den += g.norm_sq(b.modes[j]);
  }
  return std::sqrt(num / den);
}

Outcome linearization_consistency() {
  const ChebGrid g(64);
  const Real Lx = 100.0, nu = 1e-3, dt = 0.01;
  const int K = 32;
  Real worst_lin = 0.0;
  for (int j0 : {1, 3, 8}) {
    FlowState s = FlowState::zeros(g, Lx, K, nu);
    const ModeField datum = 1e-8 * calibration_ensemble(g, 1, 40 + static_cast<unsigned>(j0)).front();
    s.mode(j0) = datum;
    s.mode(-j0) = datum.conjugate();
    FlowState lin = s;
    NonlinearSolver solver(g, Lx, K, nu, dt);
    NonlinearSolver linear(g, Lx, K, nu, dt);
    for (int i = 0; i < 100; ++i) {
      solver.step(s);
      linear.step(lin, true);
    }
    worst_lin = std::max(worst_lin, state_distance(g, s, lin));
  }

  const ChebGrid small(32);
  std::mt19937_64 rng(5);
  std::normal_distribution<Real> nd;
  Real worst_conv = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    FlowState s = FlowState::zeros(small, 50.0, 5, nu);
    for (int j = 1; j <= 5; ++j) {
      const Complex a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
      s.mode(j) = sample(small, [&](Real y) {
        return a * std::sin(j * kPi * (y + 1) / 2) + b * std::sin((j + 1) * kPi * (y + 1) / 2) * y;
      });
      s.mode(j)[0] = s.mode(j)[small.n()] = 0.0;
      s.mode(-j) = s.mode(j).conjugate();
    }
    const auto fast = nonlinear_term(small, s);
    const auto slow = nonlinear_term_direct(small, s);
    Real scale = 0.0, err = 0.0;
    for (std::size_t j = 0; j < fast.size(); ++j) {
      scale = std::max(scale, slow[j].cwiseAbs().maxCoeff());
      err = std::max(err, (fast[j] - slow[j]).cwiseAbs().maxCoeff());
    }
    worst_conv = std::max(worst_conv, err / scale);
  }
  return {worst_lin <= 1e-4 && worst_conv <= 1e-10,
          Detail()("nonlinear vs linear at t=1", worst_lin)("pseudospectral vs convolution", worst_conv).str()};
}

struct StabilityRun {
  Real sup_ratio = 0.0, final_ratio = 0.0, intd4_ratio = 0.0;
};

StabilityRun stability_run(Real nu, Real Lx, int K, Spectrum spectrum) {
  const ChebGrid g(64);
  const WeightSet w = [&] {
    WeightSet v;
    v.nu = nu;
    return v;
  }();
  const OperatorCache cache(g, Lx, K);
  InitConfig init;
  init.amplitude = 0.01 * std::sqrt(nu);
  init.spectrum = spectrum;
  init.max_mode = std::min(K, init.max_mode * K / 32);
  RunOptions opt;
  opt.t_end = 3.0 / std::cbrt(nu);
  opt.dt = 0.01;
  opt.diag_every = 20;
  const RunResult r = run_flow(g, init_perturbation(g, Lx, K, nu, init), w, cache, opt);
  StabilityRun out;
  const Real e0 = r.history.front().E;
  for (const auto& rep : r.history) out.sup_ratio = std::max(out.sup_ratio, rep.E / e0);
  out.final_ratio = r.history.back().E / e0;
  out.intd4_ratio = r.history.back().intD4 / e0;
  if (r.nonfinite) out.sup_ratio = INFINITY;
  return out;
}

Outcome desk_scale_stability() {
  bool pass = true;
  Detail d;
  for (Real nu : {1e-3, 1e-4}) {
    const StabilityRun r = stability_run(nu, 100.0, 32, Spectrum::random);
    pass = pass && r.sup_ratio <= 10.0 && r.final_ratio <= 1.0;
    Real lo = 1e300, hi = 0.0;
    for (Real Lx : {50.0, 100.0, 200.0}) {
      const StabilityRun s = stability_run(nu, Lx, static_cast<int>(32 * Lx / 100.0), Spectrum::smooth);
      lo = std::min(lo, s.intd4_ratio);
      hi = std::max(hi, s.intd4_ratio);
    }
    const Real drift = (hi - lo) / lo;
    pass = pass && drift < 0.15;
    const std::string tag = nu == 1e-3 ? "nu=1e-3 " : "nu=1e-4 ";
    d((tag + "sup E/E0").c_str(), r.sup_ratio)((tag + "E(T)/E0").c_str(), r.final_ratio)(
        (tag + "int D4/E0").c_str(), r.intd4_ratio)((tag + "Lx drift").c_str(), drift);
  }
  return {pass, d.str()};
}

Outcome inequality_harness_check() {
  const Real nu = 1e-3, Lx = 100.0, dt = 0.01;
  WeightSet w;
  w.nu = nu;
  const int levels[2][2] = {{64, 32}, {96, 48}};
  std::vector<InequalitySample> samples[2];
  Real worst_c1 = 0.0;
  bool stable = true;
  for (int l = 0; l < 2; ++l) {
    const ChebGrid g(levels[l][0]);
    const int K = levels[l][1];
    const OperatorCache cache(g, Lx, K);
    NonlinearSolver solver(g, Lx, K, nu, dt);
    InitConfig init;
    init.amplitude = 0.01 * std::sqrt(nu);
    for (int i = 0; i < 50; ++i) {
      init.seed = 1000 + static_cast<std::uint64_t>(i);
      samples[l].push_back(inequality_sample(g, init_perturbation(g, Lx, K, nu, init), w, cache, solver));
    }
    for (int tr = 0; tr < 2; ++tr) {
      init.seed = 2000 + static_cast<std::uint64_t>(tr);
      RunOptions opt;
      opt.t_end = 3.0 / std::cbrt(nu);
      opt.dt = dt;
      opt.diag_every = 50;
      opt.on_report = [&](const FlowState& s, NonlinearSolver& sol) {
        samples[l].push_back(inequality_sample(g, s, w, cache, sol));
      };
      const RunResult run = run_flow(g, init_perturbation(g, Lx, K, nu, init), w, cache, opt);
      const BootstrapVerdict b = bootstrap_monitor(run.history, nu, 0.01);
      stable = stable && b.stable;
      if (b.stable) worst_c1 = std::max(worst_c1, b.c1);
    }
  }
  const auto verdicts = inequality_harness(samples[0], samples[1]);
  bool bounded = true;
  Real worst_change = 0.0;
  std::string worst_name;
  for (int i = 0; i < kInequalityCount; ++i) {
    const auto& v = verdicts[static_cast<std::size_t>(i)];
    bounded = bounded && v.bounded;
    if (v.change >= worst_change) {
      worst_change = v.change;
      worst_name = inequality_name(static_cast<Inequality>(i));
    }
  }
  return {bounded && stable && worst_c1 <= 20.0,
          Detail()("all bounded", bounded ? "yes" : "no")("largest change", worst_change)("at", worst_name)(
              "trajectories stable", stable ? "yes" : "no")("smallest C1", worst_c1)
              .str()};
}

Outcome threshold_sweep_check() {
  const std::vector<Real> nus{std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)};
  const std::vector<SweepResult> results = threshold_sweep(nus, ProbeConfig{});
  Detail d;
  bool recorded = true;
  int found = 0;
  for (const auto& r : results) {
    std::ostringstream key;
    key << "nu=" << r.nu;
    if (r.aborted) {
      recorded = false;
      d(key.str().c_str(), "aborted (" + r.abort_reason + ")");
    } else if (r.found) {
      ++found;
      d(key.str().c_str(), r.A_star);
    } else {
      d(key.str().c_str(), "no instability found");
    }
  }
  bool slope_ok = true;
  if (found >= 3) {
    const ScalingFit f = scaling_fit(results);
    slope_ok = f.gamma >= 0.35 && f.gamma <= 0.70;
    d("gamma", f.gamma)("ci low", f.ci_low)("ci high", f.ci_high);
  } else if (found > 0) {
    slope_ok = false;  // a partial set of thresholds gives no exponent
    d("gamma", "unavailable");
  }
  return {recorded && slope_ok, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

const std::vector<Criterion> kCriteria{
    {1, "elliptic_consistency", elliptic_consistency},
    {2, "operator_norm_envelope", operator_norm_envelope},
    {3, "commutator_and_adjoint", commutator_and_adjoint},
    {4, "kelvin_oracle", kelvin_oracle},
    {5, "lyapunov_after_calibration", lyapunov_after_calibration},
    {6, "enhanced_dissipation_scaling", enhanced_dissipation_scaling},
    {7, "linearization_consistency", linearization_consistency},
    {8, "desk_scale_stability", desk_scale_stability},
    {9, "inequality_harness", inequality_harness_check},
    {10, "threshold_sweep", threshold_sweep_check},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "criterion number (repeatable)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const Real secs = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2d %-30s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
