#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "couette/nls2d.hpp"
#include "couette/weights.hpp"

namespace couette {

/// J_{k_j} for j = -K..K, j != 0. Negative modes reuse the odd symmetry
/// J_{-k} = -J_k.
class OperatorCache {
 public:
  OperatorCache(const ChebGrid& grid, Real Lx, int K);

  Real Lx() const { return Lx_; }
  int K() const { return K_; }
  bool contains(int j) const { return j != 0 && j >= -K_ && j <= K_; }
  /// Throws ConfigError for j == 0 or |j| > K.
  const SingularOperator& at(int j) const;
  /// Throws ConfigError unless the cache covers every nonzero mode of `s`.
  void check_covers(const FlowState& s) const;

 private:
  Real Lx_;
  int K_;
  std::vector<SingularOperator> ops_;  // index j + K; j = 0 left empty
};

/// e^{2c lambda_k t} <k>^{2m} <1/k>^{2eps}.
Real mode_weight(Real k, Real t, const WeightSet& w);

struct GlobalFunctionals {
  Real E = 0.0;
  Real D = 0.0;
  std::array<Real, 5> D_parts{};
};

/// Riemann sums dk * sum_{j != 0} W_j E_{k_j}, and the same for D and D_i.
/// `phi` may be empty (solved here) or hold the stream functions for j = -K..K.
GlobalFunctionals global_energy(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                                const OperatorCache& cache, const std::vector<ModeField>& phi = {});

struct NonlinearTerms {
  Real n1 = 0.0, n2 = 0.0, n3 = 0.0;
  Real sum() const { return n1 + n2 + n3; }
};

/// Contributions of the forcing `nl` (n_k for j = -K..K) to dE/dt:
///   n1 = 2 dk sum W Re<w, (1 + c_tau J) n>
///   n2 = -2 c_alpha dk sum W alpha Re<dy (1 + c_tau J) dy w, n>
///   n3 = s c_beta dk sum_{|k| >= nu} W beta (Re<ik n, dy w> + Re<ik w, dy n>)
/// with s = kCrossTermSign. n2 is the integrated-by-parts form; n vanishes
/// at the walls, so no boundary term is dropped.
NonlinearTerms nonlinear_terms(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                               const OperatorCache& cache, const std::vector<ModeField>& nl);

struct EnergyReport {
  Real t = 0.0;
  Real E = 0.0;
  Real D = 0.0;
  std::array<Real, 5> D_parts{};
  NonlinearTerms n;
  Real E_total = 0.0;  // sup E + int D
  Real theorem_norm = 0.0;
  Real intD4 = 0.0;  // int D_4
};

/// Instantaneous report; E_total and intD4 are left for the caller to
/// accumulate. `solver == nullptr` leaves n at zero.
EnergyReport snapshot(const ChebGrid& grid, const FlowState& s, const WeightSet& w, const OperatorCache& cache,
                      NonlinearSolver* solver);

struct RunOptions {
  Real t_end = 1.0;
  Real dt = 0.01;
  int diag_every = 10;
  bool linear_only = false;
  /// Stop as soon as E exceeds this multiple of E(0); <= 0 disables.
  Real stop_ratio = 0.0;
  /// Called with the state at every report.
  std::function<void(const FlowState&, NonlinearSolver&)> on_report;
};

struct RunResult {
  FlowState final_state;
  std::vector<EnergyReport> history;
  bool stopped_early = false;  // stop_ratio exceeded
  bool nonfinite = false;
};

/// Integrates from `s0` to t_end with step t_end / ceil(t_end / dt).
/// Reports at step 0, every diag_every steps and at the final step; the
/// time integrals use the trapezoidal rule on the report times.
/// CFL violations propagate as InconclusiveError.
RunResult run_flow(const ChebGrid& grid, const FlowState& s0, const WeightSet& w, const OperatorCache& cache,
                   const RunOptions& opt);

struct BudgetCheck {
  Real measured = 0.0;   // (E(nonlinear step) - E(linear step)) / dt
  Real predicted = 0.0;  // n1 + n2 + n3 at the start state
  Real scale = 0.0;      // D at the start state
  Real relative() const { return std::abs(measured - predicted) / scale; }
};

/// One-step operator-splitting check of the energy budget from state `s`.
BudgetCheck budget_closure(const ChebGrid& grid, const FlowState& s, const WeightSet& w, const OperatorCache& cache,
                           Real dt);

/// Functional inequalities checked empirically, as LHS <= C * RHS.
enum class Inequality {
  dphi_linf_l1,     // || ||dy phi||_inf ||_{L1} vs E^{1/2}
  kphi_linf_l1,     // || |l| ||phi||_inf ||_{L1} vs D4^{1/2}
  dw_l1,            // || |k|^{-1/2} ||dy w|| ||_{L1} vs nu^{-1/2} D1^{1/2}
  w_l1,             // || <1/k>^{1/2} ||w|| ||_{L1} vs E^{1/2}
  w_linf_l1,        // || ||w||_inf ||_{L1} vs nu^{-1/2} D1^{1/2}
  alpha_k2_w,       // sum W alpha k^2 ||w||^2 vs D1^{1/2} D3^{1/2}
  k23_w,            // sum_{|k|>=nu} W |k|^{2/3} ||w||^2 vs nu^{-1/3} E^{1/2} D1^{1/4} D3^{1/4}
  nu_k16_w,         // (sum_{|k|>=nu} nu^{1/6} |k|^{1/3} W ||w||^2)^{1/2} vs E^{1/4} D3^{1/4}
  k12_w,            // (sum_{|k|>=nu} W |k| ||w||^2)^{1/2} vs nu^{-1/4} D1^{1/8} D3^{3/8}
  k76_dphi_linf,    // sum_{|l|>=nu} W |l|^{7/3} ||dy phi||_inf^2 vs nu^{-2/3} D5
  d2phi_linf_l1,    // || ||dy^2 phi||_inf ||_{L1} vs nu^{-1/4} E^{1/4} D1^{1/4}
  nu_k23_d2phi,     // (sum nu^{2/3} |l|^{4/3} <l>^{2m} <1/l>^{2eps} ||dy^2 phi||_inf^2)^{1/2} vs nu^{-1/4} D2^{1/4} D5^{1/4}
  n1_bound,         // |n1| vs nu^{-1/2} E^{1/2} (D1^{1/2} D4^{1/2} + D1^{1/2} D3^{1/2} + D1^{1/4} D3^{3/4})
  n2_bound,         // |n2| vs nu^{-1/2} E^{1/2} D2^{1/2} (D4^{1/2} + D1^{1/4} D3^{1/4} + D5^{1/4})
  n3_bound,         // |n3| vs nu^{-1/2} E^{1/2} (six products of D1..D5)
  count
};

inline constexpr int kInequalityCount = static_cast<int>(Inequality::count);

std::string inequality_name(Inequality which);

struct InequalitySample {
  std::array<Real, kInequalityCount> lhs{};
  std::array<Real, kInequalityCount> rhs{};
};

/// LHS and RHS (C = 1) of every inequality for one state. L^inf norms are
/// the maximum over the collocation nodes.
InequalitySample inequality_sample(const ChebGrid& grid, const FlowState& s, const WeightSet& w,
                                   const OperatorCache& cache, NonlinearSolver& solver);

struct RatioStats {
  Real max = 0.0;
  Real median = 0.0;
  int count = 0;  // samples that passed the degenerate filter
};

/// Ratio statistics per inequality. A sample is skipped for an inequality
/// when both sides are <= 1e-14; LHS > 0 with RHS = 0 gives an infinite max.
/// Throws ConfigError on an empty sample set.
std::array<RatioStats, kInequalityCount> ratio_statistics(const std::vector<InequalitySample>& samples);

struct RefinementVerdict {
  Real coarse_max = 0.0;
  Real fine_max = 0.0;
  Real change = 0.0;  // |fine / coarse - 1|
  bool bounded = false;
};

/// "Bounded" means finite maxima that agree within `tol` relative.
std::array<RefinementVerdict, kInequalityCount> inequality_harness(const std::vector<InequalitySample>& coarse,
                                                                   const std::vector<InequalitySample>& fine,
                                                                   Real tol = 0.15);

/// max_y |f| / (|l|^{-1/2} ||(il, dy) f||).
Real gagliardo_nirenberg_ratio(const ChebGrid& grid, const ModeField& f, Real ell);

struct BootstrapVerdict {
  std::vector<Real> e_total;
  /// Smallest C1 with E_total(t) <= C1 (E_total(0) + nu^{-1/2} E_total(t)^{3/2}).
  Real c1 = 0.0;
  /// max_t E_total(t) / (eps0 nu).
  Real c_eps0 = 0.0;
  Real peak_ratio = 0.0;  // max_t E_total(t) / E_total(0)
  bool stable = false;    // peak_ratio <= 10
};

/// Throws ConfigError on an empty history.
BootstrapVerdict bootstrap_monitor(const std::vector<EnergyReport>& history, Real nu, Real eps0);

}  // namespace couette
