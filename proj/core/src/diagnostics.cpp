#include "couette/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace couette {

OperatorCache::OperatorCache(const ChebGrid& grid, Real Lx, int K) : Lx_(Lx), K_(K) {
  if (!(Lx > 0.0) || !std::isfinite(Lx)) throw ConfigError("operator cache: Lx must be positive");
  if (K < 1) throw ConfigError("operator cache: K must be at least 1");
  ops_.resize(static_cast<std::size_t>(2 * K + 1));
  const Real dk = 2.0 * kPi / Lx;
  for (int j = 1; j <= K; ++j) {
    SingularOperator& pos = ops_[static_cast<std::size_t>(K + j)];
    pos = assemble_j(grid, dk * j);
    SingularOperator& neg = ops_[static_cast<std::size_t>(K - j)];
    neg.k = -pos.k;
    neg.mat = -pos.mat;
  }
}

const SingularOperator& OperatorCache::at(int j) const {
  if (!contains(j)) throw ConfigError("operator cache: no entry for mode index " + std::to_string(j));
  return ops_[static_cast<std::size_t>(j + K_)];
}

void OperatorCache::check_covers(const FlowState& s) const {
  if (s.K > K_ || std::abs(s.Lx - Lx_) > 1e-12 * Lx_) {
    throw ConfigError("operator cache does not cover the state's modes");
  }
}

Real mode_weight(Real k, Real t, const WeightSet& w) {
  const ModeWeights mw = mode_weights(k, w.nu);
  return std::exp(2.0 * w.c * mw.lambda * t) * aniso_weight(k, w.m, w.eps);
}

namespace {

std::vector<ModeField> solve_streams(const ChebGrid& grid, const FlowState& s) {
  std::vector<ModeField> phi;
  phi.reserve(s.modes.size());
  for (int j = -s.K; j <= s.K; ++j) {
    phi.push_back(j == 0 ? ModeField::Zero(grid.size()) : helmholtz_solve(grid, s.wavenumber(j), s.mode(j)));
  }
  return phi;
}

Real linf(const ModeField& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

GlobalFunctionals global_energy(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                                const OperatorCache& cache, const std::vector<ModeField>& phi_in) {
  cache.check_covers(s);
  if (!phi_in.empty() && phi_in.size() != s.modes.size()) throw ConfigError("global_energy: stream function count");
  const std::vector<ModeField> phi = phi_in.empty() ? solve_streams(grid, s) : phi_in;
  GlobalFunctionals g;
  for (int j = -s.K; j <= s.K; ++j) {
    if (j == 0) continue;
    const Real k = s.wavenumber(j);
    const ModeWeights mw = mode_weights(k, w.nu);
    const Real W = mode_weight(k, s.t, w);
    const ModeField& om = s.mode(j);
    g.E += W * combine_energy(energy_forms(grid, cache.at(j), k, om), w, mw);
    const Dissipation d =
        combine_dissipation(dissipation_forms(grid, om, phi[static_cast<std::size_t>(j + s.K)]), w, mw, k);
    for (int i = 0; i < 5; ++i) g.D_parts[i] += W * d.dis[i];
  }
  const Real dk = s.dk();
  g.E *= dk;
  for (Real& v : g.D_parts) {
    v *= dk;
    g.D += v;
  }
  return g;
}

NonlinearTerms nonlinear_terms(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                               const OperatorCache& cache, const std::vector<ModeField>& nl) {
  cache.check_covers(s);
  if (nl.size() != s.modes.size()) throw ConfigError("nonlinear_terms: forcing does not match state");
  NonlinearTerms out;
  for (int j = -s.K; j <= s.K; ++j) {
    if (j == 0) continue;
    const Real k = s.wavenumber(j);
    const ModeWeights mw = mode_weights(k, w.nu);
    const Real W = mode_weight(k, s.t, w);
    const SingularOperator& J = cache.at(j);
    const ModeField& om = s.mode(j);
    const ModeField& n = nl[static_cast<std::size_t>(j + s.K)];
    grid.check_length(n, "nonlinear_terms");

    out.n1 += W * grid.inner(om, n + w.c_tau * J.apply(n)).real();

    const ModeField dw = grid.differentiate(om, 1);
    const ModeField inner = grid.differentiate(dw + w.c_tau * J.apply(dw), 1);
    out.n2 -= W * w.c_alpha * mw.alpha * grid.inner(inner, n).real();

    if (mw.upper) {
      const Complex ik(0.0, k);
      const Real pair = grid.inner(ik * n, dw).real() + grid.inner(ik * om, grid.differentiate(n, 1)).real();
      out.n3 += W * kCrossTermSign * w.c_beta * mw.beta * pair;
    }
  }
  const Real dk = s.dk();
  out.n1 *= 2.0 * dk;
  out.n2 *= 2.0 * dk;
  out.n3 *= dk;
  return out;
}

EnergyReport snapshot(const ChebGrid& grid, const FlowState& s, const WeightSet& w, const OperatorCache& cache,
                      NonlinearSolver* solver) {
  EnergyReport r;
  r.t = s.t;
  const std::vector<ModeField> phi = solver ? solver->stream_functions(s) : solve_streams(grid, s);
  const GlobalFunctionals g = global_energy(grid, s, w, cache, phi);
  r.E = g.E;
  r.D = g.D;
  r.D_parts = g.D_parts;
  if (solver) r.n = nonlinear_terms(grid, s, w, cache, solver->nonlinear_term(s));
  r.theorem_norm = theorem_norm(grid, s, w.m, w.eps);
  return r;
}

RunResult run_flow(const ChebGrid& grid, const FlowState& s0, const WeightSet& w, const OperatorCache& cache,
                   const RunOptions& opt) {
  if (!(opt.t_end >= 0.0) || !(opt.dt > 0.0)) throw ConfigError("run_flow: need t_end >= 0 and dt > 0");
  if (opt.diag_every < 1) throw ConfigError("run_flow: diag_every must be at least 1");
  cache.check_covers(s0);
  const long steps = std::max(1L, static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-9)));
  const Real h = opt.t_end > 0.0 ? opt.t_end / static_cast<Real>(steps) : opt.dt;
  const long total = opt.t_end > 0.0 ? steps : 0;

  NonlinearSolver solver(grid, s0.Lx, s0.K, s0.nu, h);
  RunResult res;
  res.final_state = s0;
  FlowState& s = res.final_state;

  Real sup_e = 0.0, int_d = 0.0, int_d4 = 0.0;
  auto record = [&](bool first) {
    EnergyReport r = snapshot(grid, s, w, cache, opt.linear_only ? nullptr : &solver);
    if (!first) {
      const EnergyReport& prev = res.history.back();
      const Real span = r.t - prev.t;
      int_d += 0.5 * span * (prev.D + r.D);
      int_d4 += 0.5 * span * (prev.D_parts[3] + r.D_parts[3]);
    }
    sup_e = std::max(sup_e, r.E);
    r.E_total = sup_e + int_d;
    r.intD4 = int_d4;
    const bool finite = std::isfinite(r.E) && std::isfinite(r.D);
    res.history.push_back(r);
    if (opt.on_report) opt.on_report(s, solver);
    if (!finite) {
      res.nonfinite = true;
      return false;
    }
    if (opt.stop_ratio > 0.0 && r.E > opt.stop_ratio * res.history.front().E) {
      res.stopped_early = true;
      return false;
    }
    return true;
  };

  if (!record(true)) return res;
  for (long step = 1; step <= total; ++step) {
    solver.step(s, opt.linear_only);
    if (step == total) s.t = opt.t_end;  // no drift from repeated addition
    if (step % opt.diag_every == 0 || step == total) {
      if (!record(false)) return res;
    }
  }
  return res;
}

BudgetCheck budget_closure(const ChebGrid& grid, const FlowState& s, const WeightSet& w, const OperatorCache& cache,
                           Real dt) {
  if (!(dt > 0.0)) throw ConfigError("budget_closure: dt must be positive");
  NonlinearSolver full(grid, s.Lx, s.K, s.nu, dt);
  NonlinearSolver linear(grid, s.Lx, s.K, s.nu, dt);
  BudgetCheck b;
  const EnergyReport r = snapshot(grid, s, w, cache, &full);
  b.predicted = r.n.sum();
  b.scale = r.D;
  FlowState a = s, l = s;
  full.step(a);
  linear.step(l, true);
  b.measured = (global_energy(grid, a, w, cache).E - global_energy(grid, l, w, cache).E) / dt;
  return b;
}

std::string inequality_name(Inequality which) {
  switch (which) {
    case Inequality::dphi_linf_l1: return "dphi_linf_l1";
    case Inequality::kphi_linf_l1: return "kphi_linf_l1";
    case Inequality::dw_l1: return "dw_l1";
    case Inequality::w_l1: return "w_l1";
    case Inequality::w_linf_l1: return "w_linf_l1";
    case Inequality::alpha_k2_w: return "alpha_k2_w";
    case Inequality::k23_w: return "k23_w";
    case Inequality::nu_k16_w: return "nu_k16_w";
    case Inequality::k12_w: return "k12_w";
    case Inequality::k76_dphi_linf: return "k76_dphi_linf";
    case Inequality::d2phi_linf_l1: return "d2phi_linf_l1";
    case Inequality::nu_k23_d2phi: return "nu_k23_d2phi";
    case Inequality::n1_bound: return "n1_bound";
    case Inequality::n2_bound: return "n2_bound";
    case Inequality::n3_bound: return "n3_bound";
    case Inequality::count: break;
  }
  throw ConfigError("inequality_name: invalid inequality");
}

InequalitySample inequality_sample(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                                   const OperatorCache& cache, NonlinearSolver& solver) {
  const std::vector<ModeField> phi = solver.stream_functions(s);
  const GlobalFunctionals g = global_energy(grid, s, w, cache, phi);
  const NonlinearTerms n = nonlinear_terms(grid, s, w, cache, solver.nonlinear_term(s));
  const Real nu = w.nu;
  const Real dk = s.dk();

  std::array<Real, kInequalityCount> sum{};
  auto add = [&](Inequality i, Real v) { sum[static_cast<std::size_t>(i)] += v; };
  for (int j = -s.K; j <= s.K; ++j) {
    if (j == 0) continue;
    const Real k = s.wavenumber(j);
    const Real ak = std::abs(k);
    const Real W = mode_weight(k, s.t, w);
    const ModeWeights mw = mode_weights(k, nu);
    const ModeField& om = s.mode(j);
    const ModeField& p = phi[static_cast<std::size_t>(j + s.K)];
    const ModeField dp = grid.differentiate(p, 1);
    const ModeField d2p = grid.differentiate(dp, 1);
    const Real w2 = grid.norm_sq(om);
    const Real dpl = linf(dp);
    const Real d2pl = linf(d2p);

    add(Inequality::dphi_linf_l1, dpl);
    add(Inequality::kphi_linf_l1, ak * linf(p));
    add(Inequality::dw_l1, std::sqrt(grid.norm_sq(grid.differentiate(om, 1)) / ak));
    add(Inequality::w_l1, std::pow(1.0 + 1.0 / (k * k), 0.25) * std::sqrt(w2));
    add(Inequality::w_linf_l1, linf(om));
    add(Inequality::alpha_k2_w, W * mw.alpha * k * k * w2);
    add(Inequality::nu_k23_d2phi, std::cbrt(nu * nu) * std::pow(ak, 4.0 / 3.0) * aniso_weight(k, w.m, w.eps) * d2pl * d2pl);
    add(Inequality::d2phi_linf_l1, d2pl);
    if (ak >= nu) {
      add(Inequality::k23_w, W * std::cbrt(ak * ak) * w2);
      add(Inequality::nu_k16_w, std::pow(nu, 1.0 / 6.0) * std::cbrt(ak) * W * w2);
      add(Inequality::k12_w, W * ak * w2);
      add(Inequality::k76_dphi_linf, W * std::pow(ak, 7.0 / 3.0) * dpl * dpl);
    }
  }
  for (Real& v : sum) v *= dk;

  const Real E = g.E;
  const Real D1 = g.D_parts[0], D2 = g.D_parts[1], D3 = g.D_parts[2], D4 = g.D_parts[3], D5 = g.D_parts[4];
  const Real inv_sqrt_nu = 1.0 / std::sqrt(nu);
  auto P = [](Real x, Real e) { return std::pow(std::max(x, 0.0), e); };

  InequalitySample out;
  auto set = [&](Inequality i, Real lhs, Real rhs) {
    out.lhs[static_cast<std::size_t>(i)] = lhs;
    out.rhs[static_cast<std::size_t>(i)] = rhs;
  };
  auto S = [&](Inequality i) { return sum[static_cast<std::size_t>(i)]; };
  set(Inequality::dphi_linf_l1, S(Inequality::dphi_linf_l1), P(E, 0.5));
  set(Inequality::kphi_linf_l1, S(Inequality::kphi_linf_l1), P(D4, 0.5));
  set(Inequality::dw_l1, S(Inequality::dw_l1), inv_sqrt_nu * P(D1, 0.5));
  set(Inequality::w_l1, S(Inequality::w_l1), P(E, 0.5));
  set(Inequality::w_linf_l1, S(Inequality::w_linf_l1), inv_sqrt_nu * P(D1, 0.5));
  set(Inequality::alpha_k2_w, S(Inequality::alpha_k2_w), P(D1, 0.5) * P(D3, 0.5));
  set(Inequality::k23_w, S(Inequality::k23_w), P(nu, -1.0 / 3.0) * P(E, 0.5) * P(D1, 0.25) * P(D3, 0.25));
  set(Inequality::nu_k16_w, P(S(Inequality::nu_k16_w), 0.5), P(E, 0.25) * P(D3, 0.25));
  set(Inequality::k12_w, P(S(Inequality::k12_w), 0.5), P(nu, -0.25) * P(D1, 0.125) * P(D3, 0.375));
  set(Inequality::k76_dphi_linf, S(Inequality::k76_dphi_linf), P(nu, -2.0 / 3.0) * D5);
  set(Inequality::d2phi_linf_l1, S(Inequality::d2phi_linf_l1), P(nu, -0.25) * P(E, 0.25) * P(D1, 0.25));
  set(Inequality::nu_k23_d2phi, P(S(Inequality::nu_k23_d2phi), 0.5), P(nu, -0.25) * P(D2, 0.25) * P(D5, 0.25));

  const Real pre = inv_sqrt_nu * P(E, 0.5);
  set(Inequality::n1_bound, std::abs(n.n1),
      pre * (P(D1, 0.5) * P(D4, 0.5) + P(D1, 0.5) * P(D3, 0.5) + P(D1, 0.25) * P(D3, 0.75)));
  set(Inequality::n2_bound, std::abs(n.n2), pre * P(D2, 0.5) * (P(D4, 0.5) + P(D1, 0.25) * P(D3, 0.25) + P(D5, 0.25)));
  set(Inequality::n3_bound, std::abs(n.n3),
      pre * (P(D1, 0.375) * P(D3, 0.625) + P(D1, 0.5) * P(D3, 0.5) + P(D1, 0.5) * P(D4, 0.25) +
             P(D1, 0.75) * P(D3, 0.25) + P(D1, 0.125) * P(D2, 0.25) * P(D3, 0.375) * P(D5, 0.25) +
             P(D1, 0.25) * P(D2, 0.25) * P(D3, 0.5)));
  return out;
}

std::array<RatioStats, kInequalityCount> ratio_statistics(const std::vector<InequalitySample>& samples) {
  if (samples.empty()) throw ConfigError("inequality harness: empty sample set");
  std::array<RatioStats, kInequalityCount> out{};
  for (int i = 0; i < kInequalityCount; ++i) {
    std::vector<Real> ratios;
    for (const auto& s : samples) {
      const Real l = s.lhs[static_cast<std::size_t>(i)];
      const Real r = s.rhs[static_cast<std::size_t>(i)];
      if (std::abs(l) <= 1e-14 && std::abs(r) <= 1e-14) continue;
      ratios.push_back(r > 0.0 ? l / r : std::numeric_limits<Real>::infinity());
    }
    RatioStats& st = out[static_cast<std::size_t>(i)];
    st.count = static_cast<int>(ratios.size());
    if (ratios.empty()) continue;
    std::sort(ratios.begin(), ratios.end());
    st.max = ratios.back();
    const std::size_t mid = ratios.size() / 2;
    st.median = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  }
  return out;
}

std::array<RefinementVerdict, kInequalityCount> inequality_harness(const std::vector<InequalitySample>& coarse,
                                                                   const std::vector<InequalitySample>& fine,
                                                                   Real tol) {
  const auto c = ratio_statistics(coarse);
  const auto f = ratio_statistics(fine);
  std::array<RefinementVerdict, kInequalityCount> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    RefinementVerdict& v = out[i];
    v.coarse_max = c[i].max;
    v.fine_max = f[i].max;
    const bool finite = std::isfinite(v.coarse_max) && std::isfinite(v.fine_max) && v.coarse_max > 0.0;
    v.change = finite ? std::abs(v.fine_max / v.coarse_max - 1.0) : std::numeric_limits<Real>::infinity();
    v.bounded = finite && v.change < tol;
  }
  return out;
}

Real gagliardo_nirenberg_ratio(const ChebGrid& grid, const ModeField& f, Real ell) {
  if (ell == 0.0 || !std::isfinite(ell)) throw ConfigError("gagliardo_nirenberg_ratio: l must be finite and nonzero");
  grid.check_length(f, "gagliardo_nirenberg_ratio");
  const Real grad = std::sqrt(grid.norm_sq(grid.differentiate(f, 1)) + ell * ell * grid.norm_sq(f));
  return linf(f) / (grad / std::sqrt(std::abs(ell)));
}

BootstrapVerdict bootstrap_monitor(const std::vector<EnergyReport>& history, Real nu, Real eps0) {
  if (history.empty()) throw ConfigError("bootstrap_monitor: empty history");
  if (!(nu > 0.0) || !(eps0 > 0.0)) throw ConfigError("bootstrap_monitor: nu and eps0 must be positive");
  BootstrapVerdict v;
  const Real e0 = history.front().E_total;
  for (const auto& r : history) {
    const Real et = r.E_total;
    v.e_total.push_back(et);
    const Real denom = e0 + std::pow(et, 1.5) / std::sqrt(nu);
    if (denom > 0.0) v.c1 = std::max(v.c1, et / denom);
    if (e0 > 0.0) v.peak_ratio = std::max(v.peak_ratio, et / e0);
    if (!std::isfinite(et)) v.peak_ratio = std::numeric_limits<Real>::infinity();
  }
  v.c_eps0 = *std::max_element(v.e_total.begin(), v.e_total.end()) / (eps0 * nu);
  v.stable = v.peak_ratio <= 10.0;
  return v;
}

}  // namespace couette
