#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "couette/diagnostics.hpp"
#include "couette/threshold.hpp"

#ifndef COUETTE_VERSION
#define COUETTE_VERSION "unknown"
#endif

namespace couette::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Real RunConfig::amplitude() const { return A ? *A : eps0 * std::sqrt(nu); }

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  WeightSet w;
  w.nu = nu;
  w.m = m;
  w.eps = eps;
  w.validate();
  for (Real v : nus) require(v > 0.0 && v < 1.0, "ν must lie in (0, 1)");
  const bool operator_work = experiment != "kelvin-check";
  require(!operator_work || n >= 32, "n must be at least 32 for operator work");
  require(n >= 8, "n must be at least 8");
  require(K >= 1, "K must be at least 1");
  require(std::isfinite(Lx) && Lx >= 50.0, "Lx must be at least 50");
  require(!A || (std::isfinite(*A) && *A >= 0.0), "A must be non-negative");
  require(std::isfinite(eps0) && eps0 > 0.0, "eps0 must be positive");
  require(std::isfinite(dt) && dt >= 0.0, "dt must be non-negative (0 selects the default)");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be non-negative (0 selects the default)");
  require(threads >= 1, "threads must be at least 1");
}

fs::path RunConfig::output_dir() const {
  if (!out.empty()) return out;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "couette-out") / experiment;
}

std::optional<int> parse_config(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                                std::ostream& err) {
  CLI::App app{"Spectral laboratory for the stability of Couette flow in a channel"};
  app.set_config("--config", "", "key = value configuration file; flags override its values");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string experiments;
  for (const auto& e : kExperiments) experiments += (experiments.empty() ? "" : ", ") + e;
  app.add_option("experiment", cfg.experiment, "one of: " + experiments)
      ->required()
      ->check(CLI::IsMember(kExperiments));
  app.add_option("--nu", cfg.nu, "viscosity");
  app.add_option("--n", cfg.n, "Chebyshev degree");
  app.add_option("--K", cfg.K, "largest x-mode index");
  app.add_option("--Lx", cfg.Lx, "box length in x");
  app.add_option("--m", cfg.m, "Sobolev index m > 1");
  app.add_option("--eps", cfg.eps, "low-frequency index in (0, 1/12)");
  Real a_value = 0.0;
  auto* a_opt = app.add_option("--A", a_value, "initial amplitude in the theorem norm");
  auto* eps0_opt = app.add_option("--eps0", cfg.eps0, "amplitude eps0 * nu^(1/2) when --A is not given");
  a_opt->excludes(eps0_opt);
  app.add_option("--dt", cfg.dt, "time step (0: experiment default)");
  app.add_option("--t-end,--t_end", cfg.t_end, "final time (0: experiment default)");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--nus", cfg.nus, "viscosity list for threshold-sweep and calibrate")->delimiter(',');
  app.add_option("--out", cfg.out, std::string("output directory (default $") + kOutputRootEnv + "/<experiment>)");
  app.add_option("--threads", cfg.threads, "worker threads for threshold-sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }
  if (a_opt->count() > 0) cfg.A = a_value;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return std::nullopt;
}

namespace {

std::string num(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string cell(Real v) { return num(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }
std::string cell(const std::string& v) { return v; }
std::string cell(const char* v) { return v; }

Json json_num(Real v) { return std::isfinite(v) ? Json(v) : Json(num(v)); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) throw NumericalError("cannot open " + path.string() + " for writing");
    write(header);
  }

  template <class... T>
  void row(const T&... values) {
    write({cell(values)...});
  }

 private:
  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
    if (!os_) throw NumericalError("write failed");
  }
  std::ofstream os_;
};

// Files written by an experiment; listed in the manifest.
struct Artifacts {
  fs::path dir;
  std::vector<std::string> files;
  bool partial = false;

  fs::path add(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

WeightSet weights_for(const RunConfig& cfg) {
  WeightSet w;
  w.nu = cfg.nu;
  w.m = cfg.m;
  w.eps = cfg.eps;
  return w;
}

Json weights_json(const WeightSet& w) {
  return Json{{"c_alpha", w.c_alpha}, {"c_beta", w.c_beta}, {"c_tau", w.c_tau},
              {"c0", w.c0},           {"c", w.c},           {"cross_term_sign", kCrossTermSign}};
}

Json config_json(const RunConfig& cfg) {
  Json j{{"experiment", cfg.experiment},
         {"n", cfg.n},
         {"K", cfg.K},
         {"Lx", cfg.Lx},
         {"nu", cfg.nu},
         {"m", cfg.m},
         {"eps", cfg.eps},
         {"A", cfg.A ? Json(*cfg.A) : Json(nullptr)},
         {"eps0", cfg.eps0},
         {"amplitude", cfg.amplitude()},
         {"dt", cfg.dt},
         {"t_end", cfg.t_end},
         {"seed", cfg.seed},
         {"nus", cfg.nus},
         {"threads", cfg.threads}};
  return j;
}

std::vector<Real> log_grid(Real lo, Real hi, int points) {
  std::vector<Real> out;
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi / lo)) * i / (points - 1)));
  return out;
}

Json verify_operator(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const ChebGrid grid(cfg.n);
  CsvWriter csv(art.add("operator.csv"),
                {"k", "n", "norm", "commutator_ratio", "adjoint_defect", "imaginary_entry_defect"});
  Real sup_norm = 0.0, sup_comm = 0.0, max_defect = 0.0, max_real = 0.0;
  for (Real k : log_grid(1e-3, 1e3, 25)) {
    const SingularOperator j = assemble_j(grid, k);
    const Real norm = operator_norm(j, grid);
    const Real comm = commutator_norm(j, grid);
    const AdjointDefect d = adjoint_defect(j, grid);
    const Real rel = norm > 0.0 ? d.self_adjoint / norm : 0.0;
    const Real re = d.real_part / std::max(j.mat.cwiseAbs().maxCoeff(), 1e-300);
    csv.row(k, cfg.n, norm, comm, rel, re);
    sup_norm = std::max(sup_norm, norm);
    if (k >= 0.1 && k <= 100.0) sup_comm = std::max(sup_comm, comm);
    max_defect = std::max(max_defect, rel);
    max_real = std::max(max_real, re);
  }
  log << "sup norm " << sup_norm << ", sup commutator ratio on [0.1, 100] " << sup_comm << "\n";
  return Json{{"sup_norm", sup_norm},
              {"sup_commutator_ratio", sup_comm},
              {"max_adjoint_defect", max_defect},
              {"max_imaginary_entry_defect", max_real}};
}

Json linear_run(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const ChebGrid grid(cfg.n);
  const WeightSet w = weights_for(cfg);
  const ModeField datum = calibration_ensemble(grid, 1, static_cast<unsigned>(cfg.seed)).front();
  CsvWriter csv(art.add("linear_run.csv"),
                {"k", "t", "E", "Dis1", "Dis2", "Dis3", "Dis4", "Dis5", "D", "residual"});
  Json modes = Json::array();
  for (Real k : {cfg.nu, 0.5, 1.0, 2.0, 4.0}) {
    const SingularOperator j = assemble_j(grid, k);
    const Real t_end = cfg.t_end > 0.0 ? cfg.t_end : calibration_horizon(k, cfg.nu);
    const Real dt = cfg.dt > 0.0 ? cfg.dt : default_linear_dt(k);
    const ModeTrajectory tr = evolve_linear(grid, k, cfg.nu, datum, t_end, dt, w, &j);
    const LyapunovReport rep = lyapunov_monitor(tr, w);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const Dissipation& d = tr.dissipations[i];
      const bool interior = i > 0 && i + 1 < tr.times.size();
      csv.row(k, tr.times[i], tr.energies[i], d.dis[0], d.dis[1], d.dis[2], d.dis[3], d.dis[4], d.total,
              interior ? num(rep.residuals[i - 1]) : std::string());
    }
    log << "k = " << k << ": residual / max D = " << rep.relative << "\n";
    modes.push_back(Json{{"k", k},
                         {"t_end", t_end},
                         {"dt", dt},
                         {"relative_residual", rep.relative},
                         {"gronwall_ok", rep.gronwall_ok}});
  }
  return Json{{"modes", modes}};
}

Json kelvin_check(const RunConfig&, Artifacts& art, std::ostream& log) {
  const std::vector<Real> ts = kelvin_time_grid();
  const KelvinReport ed = enhanced_dissipation_check(kKelvinK, ts, kKelvinNu);
  const KelvinReport id = inviscid_damping_check(kKelvinK, ts, kKelvinNu, kelvin_default_spectrum, 20.0);
  const KelvinReport id2 = inviscid_damping_check(kKelvinK, ts, kKelvinNu, kelvin_default_spectrum, 40.0);
  CsvWriter csv(art.add("kelvin.csv"), {"check", "sup_ratio", "at_k", "at_nu", "at_t", "at_xi"});
  csv.row("enhanced_dissipation", ed.sup_ratio, ed.at_k, ed.at_nu, ed.at_t, ed.at_xi);
  csv.row("inviscid_damping", id.sup_ratio, id.at_k, id.at_nu, id.at_t, id.at_xi);
  csv.row("inviscid_damping_refined", id2.sup_ratio, id2.at_k, id2.at_nu, id2.at_t, id2.at_xi);
  const Real change = std::abs(id2.sup_ratio / id.sup_ratio - 1.0);
  log << "enhanced dissipation sup " << ed.sup_ratio << ", inviscid damping sup " << id.sup_ratio << " (refined "
      << id2.sup_ratio << ")\n";
  return Json{{"enhanced_dissipation_sup", ed.sup_ratio},
              {"enhanced_dissipation_bound", std::exp(4.0 / 3.0)},
              {"inviscid_damping_sup", id.sup_ratio},
              {"inviscid_damping_sup_refined", id2.sup_ratio},
              {"inviscid_damping_refinement_change", change}};
}

Json nonlinear_run(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const ChebGrid grid(cfg.n);
  const WeightSet w = weights_for(cfg);
  const OperatorCache cache(grid, cfg.Lx, cfg.K);
  InitConfig init;
  init.amplitude = cfg.amplitude();
  init.seed = cfg.seed;
  init.m = cfg.m;
  init.eps = cfg.eps;
  const FlowState s0 = init_perturbation(grid, cfg.Lx, cfg.K, cfg.nu, init);
  RunOptions opt;
  opt.t_end = cfg.t_end > 0.0 ? cfg.t_end : 3.0 / std::cbrt(cfg.nu);
  opt.dt = cfg.dt > 0.0 ? cfg.dt : 0.01;
  opt.diag_every = 10;
  const RunResult run = run_flow(grid, s0, w, cache, opt);

  CsvWriter csv(art.add("diagnostics.csv"), {"t", "E", "D", "D1", "D2", "D3", "D4", "D5", "n1", "n2", "n3", "E_total",
                                             "theorem_norm", "intD4"});
  Real sup_e = 0.0;
  for (const auto& r : run.history) {
    csv.row(r.t, r.E, r.D, r.D_parts[0], r.D_parts[1], r.D_parts[2], r.D_parts[3], r.D_parts[4], r.n.n1, r.n.n2,
            r.n.n3, r.E_total, r.theorem_norm, r.intD4);
    sup_e = std::max(sup_e, r.E);
  }
  save_checkpoint(art.add("final.chk"), run.final_state, cfg.n);

  const Real eps0 = init.amplitude / std::sqrt(cfg.nu);
  const BootstrapVerdict b = bootstrap_monitor(run.history, cfg.nu, eps0 > 0.0 ? eps0 : 1.0);
  const EnergyReport& first = run.history.front();
  const EnergyReport& last = run.history.back();
  const Real e0 = first.E > 0.0 ? first.E : 1.0;
  log << "sup E / E(0) = " << sup_e / e0 << ", E(T) / E(0) = " << last.E / e0 << ", C1 = " << b.c1 << "\n";
  return Json{{"t_end", opt.t_end},
              {"dt", opt.dt},
              {"E0", first.E},
              {"sup_E_ratio", json_num(sup_e / e0)},
              {"final_E_ratio", json_num(last.E / e0)},
              {"intD4_over_E0", json_num(last.intD4 / e0)},
              {"nonfinite", run.nonfinite},
              {"bootstrap",
               Json{{"c1", json_num(b.c1)},
                    {"c_eps0", json_num(b.c_eps0)},
                    {"peak_ratio", json_num(b.peak_ratio)},
                    {"stable", b.stable}}}};
}

Json threshold_sweep_experiment(const RunConfig& cfg, Artifacts& art, std::ostream& log, bool& inconclusive) {
  const std::vector<Real> nus =
      cfg.nus.empty() ? std::vector<Real>{std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5)} : cfg.nus;
  ProbeConfig pc;
  pc.n = cfg.n;
  pc.K = cfg.K;
  pc.Lx = cfg.Lx;
  pc.dt = cfg.dt > 0.0 ? cfg.dt : 0.01;
  pc.t_end = cfg.t_end;
  pc.weights = weights_for(cfg);
  pc.init.seed = cfg.seed;
  const std::vector<SweepResult> results = threshold_sweep(nus, pc, SweepOptions{}, cfg.threads);

  CsvWriter csv(art.add("thresholds.csv"), {"nu", "A", "verdict", "peak_ratio", "runtime_seconds"});
  Json per_nu = Json::array();
  for (const auto& r : results) {
    for (const auto& p : r.verdicts) csv.row(r.nu, p.A, verdict_name(p.verdict), p.peak_ratio, p.runtime_seconds);
    std::string record = r.aborted ? "aborted: " + r.abort_reason
                         : r.found ? "threshold bracketed"
                                   : "no instability found";
    log << "nu = " << r.nu << ": " << record;
    if (r.found) log << ", A_star = " << r.A_star;
    log << "\n";
    per_nu.push_back(Json{{"nu", r.nu},
                          {"record", record},
                          {"found", r.found},
                          {"A_star", r.A_star},
                          {"A_star_over_sqrt_nu", r.A_star / std::sqrt(r.nu)},
                          {"A_lo", r.A_lo},
                          {"A_hi", r.A_hi},
                          {"bisection_tol", r.bisection_tol},
                          {"probes", r.verdicts.size()}});
    inconclusive = inconclusive || r.aborted;
  }
  Json summary{{"sweeps", per_nu}};
  int found = 0;
  for (const auto& r : results) found += r.found ? 1 : 0;
  if (found >= 3) {
    const ScalingFit f = scaling_fit(results);
    summary["fit"] = Json{{"gamma", f.gamma},       {"intercept", f.intercept}, {"r_squared", f.r_squared},
                          {"std_error", f.std_error}, {"ci95_low", f.ci_low},     {"ci95_high", f.ci_high},
                          {"residuals", f.residuals}, {"points", f.points}};
    log << "gamma = " << f.gamma << " [" << f.ci_low << ", " << f.ci_high << "]\n";
  } else {
    summary["fit"] = nullptr;
  }
  std::ofstream(art.add("threshold_summary.json")) << summary.dump(2) << "\n";
  art.partial = inconclusive;
  return summary;
}

Json inequalities(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const WeightSet w = weights_for(cfg);
  const Real t_end = cfg.t_end > 0.0 ? cfg.t_end : 3.0 / std::cbrt(cfg.nu);
  const Real dt = cfg.dt > 0.0 ? cfg.dt : 0.01;
  struct Level {
    const char* name;
    int n, K;
  };
  const Level levels[2] = {{"coarse", cfg.n, cfg.K}, {"fine", cfg.n * 3 / 2, cfg.K * 3 / 2}};
  std::vector<InequalitySample> samples[2];
  CsvWriter boot(art.add("bootstrap.csv"), {"level", "n", "K", "trajectory", "c1", "peak_ratio", "stable"});
  Real worst_c1 = 0.0;
  for (int l = 0; l < 2; ++l) {
    const ChebGrid grid(levels[l].n);
    const OperatorCache cache(grid, cfg.Lx, levels[l].K);
    NonlinearSolver solver(grid, cfg.Lx, levels[l].K, cfg.nu, dt);
    InitConfig init;
    init.amplitude = cfg.amplitude();
    init.m = cfg.m;
    init.eps = cfg.eps;
    for (int i = 0; i < 50; ++i) {
      init.seed = cfg.seed + static_cast<std::uint64_t>(i);
      samples[l].push_back(inequality_sample(grid, init_perturbation(grid, cfg.Lx, levels[l].K, cfg.nu, init), w,
                                             cache, solver));
    }
    for (int tr = 0; tr < 2; ++tr) {
      init.seed = cfg.seed + 100 + static_cast<std::uint64_t>(tr);
      RunOptions opt;
      opt.t_end = t_end;
      opt.dt = dt;
      opt.diag_every = 50;
      opt.on_report = [&](const FlowState& s, NonlinearSolver& sol) {
        samples[l].push_back(inequality_sample(grid, s, w, cache, sol));
      };
      const RunResult run =
          run_flow(grid, init_perturbation(grid, cfg.Lx, levels[l].K, cfg.nu, init), w, cache, opt);
      const BootstrapVerdict b = bootstrap_monitor(run.history, cfg.nu, cfg.amplitude() / std::sqrt(cfg.nu));
      boot.row(std::string(levels[l].name), levels[l].n, levels[l].K, tr, b.c1, b.peak_ratio, b.stable);
      worst_c1 = std::max(worst_c1, b.c1);
    }
    log << levels[l].name << " level done (" << samples[l].size() << " samples)\n";
  }
  const auto stats_c = ratio_statistics(samples[0]);
  const auto stats_f = ratio_statistics(samples[1]);
  const auto verdicts = inequality_harness(samples[0], samples[1]);
  CsvWriter csv(art.add("inequalities.csv"),
                {"inequality", "coarse_max", "coarse_median", "fine_max", "fine_median", "change", "bounded"});
  bool all_bounded = true;
  for (int i = 0; i < kInequalityCount; ++i) {
    const auto& v = verdicts[static_cast<std::size_t>(i)];
    csv.row(inequality_name(static_cast<Inequality>(i)), v.coarse_max, stats_c[static_cast<std::size_t>(i)].median,
            v.fine_max, stats_f[static_cast<std::size_t>(i)].median, v.change, v.bounded);
    all_bounded = all_bounded && v.bounded;
  }
  const ChebGrid grid(cfg.n);
  const Real gn = gagliardo_nirenberg_ratio(
      grid, sample(grid, [](Real y) { return Complex(std::sin(kPi * (y + 1.0) / 2.0)); }), 1.0);
  log << "all bounded: " << (all_bounded ? "yes" : "no") << ", worst C1 " << worst_c1 << "\n";
  return Json{{"all_bounded", all_bounded},
              {"worst_c1", worst_c1},
              {"gagliardo_nirenberg_ratio", gn},
              {"samples_per_level", samples[0].size()}};
}

Json calibrate(const RunConfig& cfg, Artifacts& art, std::ostream& log, WeightSet& calibrated) {
  const ChebGrid grid(cfg.n);
  const std::vector<Real> nus = cfg.nus.empty() ? std::vector<Real>{1e-3, 1e-4} : cfg.nus;
  const auto ens = calibration_ensemble(grid, 10, static_cast<unsigned>(cfg.seed));
  const CalibrationResult r = calibrate_constants(grid, nus, {0.5, 1.0, 2.0, 4.0, 0.0}, ens, weights_for(cfg));
  CsvWriter csv(art.add("calibration.csv"), {"c_alpha", "c_beta", "c_tau", "c0", "worst_relative", "feasible"});
  for (const auto& c : r.table) csv.row(c.c_alpha, c.c_beta, c.c_tau, c.c0, c.worst_relative, c.feasible);
  calibrated = r.weights;
  log << "c0 = " << r.weights.c0 << ", worst residual " << r.worst_relative << "\n";
  return Json{{"worst_relative", r.worst_relative}, {"weights", weights_json(r.weights)}};
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Artifacts art;
  art.dir = cfg.output_dir();
  std::error_code ec;
  fs::create_directories(art.dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << art.dir << ": " << ec.message() << "\n";
    return kUsageError;
  }

  WeightSet w = weights_for(cfg);
  Json manifest{{"experiment", cfg.experiment}, {"code_version", COUETTE_VERSION}, {"config", config_json(cfg)}};
  Json results;
  int code = kSuccess;
  Json error = nullptr;
  auto fail = [&](int c, const char* type, const std::exception& e) {
    code = c;
    error = Json{{"type", type}, {"message", e.what()}};
    log << "error (" << type << "): " << e.what() << "\n";
  };
  try {
    bool inconclusive = false;
    if (cfg.experiment == "verify-operator") results = verify_operator(cfg, art, log);
    else if (cfg.experiment == "linear-run") results = linear_run(cfg, art, log);
    else if (cfg.experiment == "kelvin-check") results = kelvin_check(cfg, art, log);
    else if (cfg.experiment == "nonlinear-run") results = nonlinear_run(cfg, art, log);
    else if (cfg.experiment == "threshold-sweep") results = threshold_sweep_experiment(cfg, art, log, inconclusive);
    else if (cfg.experiment == "inequalities") results = inequalities(cfg, art, log);
    else if (cfg.experiment == "calibrate") results = calibrate(cfg, art, log, w);
    else throw ConfigError("unknown experiment " + cfg.experiment);
    if (inconclusive) {
      code = kInconclusive;
      error = Json{{"type", "inconclusive"}, {"message", "at least one sweep aborted on an inconclusive probe"}};
    }
  } catch (const InconclusiveError& e) {
    fail(kInconclusive, "inconclusive", e);
  } catch (const ConfigError& e) {
    fail(kUsageError, "usage", e);
  } catch (const NumericalError& e) {
    fail(kNumericalFailure, "numerical", e);
  } catch (const std::exception& e) {
    fail(kNumericalFailure, "numerical", e);
  }
  if (code != kSuccess) art.partial = art.partial || !art.files.empty();

  manifest["weights"] = weights_json(w);
  manifest["status"] = code == kSuccess ? "ok" : code == kInconclusive ? "inconclusive" : "failed";
  manifest["exit_code"] = code;
  manifest["error"] = error;
  Json outputs = Json::array();
  for (const auto& f : art.files) outputs.push_back(Json{{"file", f}, {"partial", art.partial}});
  manifest["outputs"] = outputs;
  manifest["results"] = results;
  manifest["wall_time_seconds"] = std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(art.dir / "manifest.json") << manifest.dump(2) << "\n";
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const auto code = parse_config(argc, argv, cfg, out, err)) return *code;
  return dispatch(cfg, out);
}

}  // namespace couette::cli
