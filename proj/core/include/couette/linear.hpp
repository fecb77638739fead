#pragma once

#include <functional>
#include <vector>

#include "couette/weights.hpp"

namespace couette {

/// CNAB2 integrator for one x-mode:
///   w_t = -ik y w + nu (d2 - k^2) w + N,   w(+-1) = 0.
/// Diffusion is Crank–Nicolson; -iky w and any extra forcing N are
/// Adams–Bashforth 2 (forward Euler on the first step).
class LinearStepper {
 public:
  LinearStepper(const ChebGrid& grid, Real k, Real nu, Real dt);

  Real k() const { return k_; }
  Real dt() const { return dt_; }

  /// Advances omega by dt. `forcing` is the extra explicit term evaluated at
  /// the current state (pass an empty vector for the linear problem).
  ModeField step(const ModeField& omega, const ModeField& forcing = ModeField());

  /// Forgets the previous explicit term (next step is Euler again).
  void restart() { have_previous_ = false; }

 private:
  const ChebGrid* grid_;
  Real k_;
  Real nu_;
  Real dt_;
  RealMatrix propagate_;  // A^-1 B with boundary rows masked
  RealMatrix solve_;      // A^-1
  ModeField previous_;
  bool have_previous_ = false;
};

/// One Euler-started CNAB2 step of the linear mode equation.
ModeField step_linear(const ChebGrid& grid, Real k, Real nu, const ModeField& omega, Real dt);

/// Default time step: min(0.01, 0.2/|k|).
Real default_linear_dt(Real k);

struct ModeTrajectory {
  Real k = 0.0;
  Real nu = 0.0;
  ModeWeights mw;
  std::vector<Real> times;
  std::vector<ModeField> states;
  /// Filled when k != 0.
  std::vector<Real> energies;
  std::vector<Dissipation> dissipations;
  std::vector<EnergyForms> energy_forms;
  std::vector<DissipationForms> dissipation_forms;
};

/// Runs the linear mode equation to t_end, recording every `record_every`
/// steps. For k != 0 the trajectory carries E_k and D_k under `w` (which
/// must have w.nu == nu); `j` may be passed to reuse an assembled operator.
ModeTrajectory evolve_linear(const ChebGrid& grid, Real k, Real nu, const ModeField& omega_in, Real t_end, Real dt,
                             const WeightSet& w, const SingularOperator* j = nullptr, int record_every = 1);

struct LyapunovReport {
  std::vector<Real> residuals;  // at interior recorded times
  Real max_residual = 0.0;
  Real max_dissipation = 0.0;
  /// max_residual / max_dissipation (0 for zero data).
  Real relative = 0.0;
  /// E(t) <= E(0) exp(-c0 lambda t (1 - 0.1)) at every recorded time.
  bool gronwall_ok = true;
};

/// dE/dt (central differences) + c0 D_k + c0 lambda_k E_k along `traj`.
LyapunovReport lyapunov_monitor(const ModeTrajectory& traj, const WeightSet& w);

/// Same residual computed from stored quadratic forms under other constants.
LyapunovReport lyapunov_from_forms(const ModeTrajectory& traj, const WeightSet& w);

struct CalibrationResult {
  WeightSet weights;
  Real worst_relative = 0.0;
  struct Candidate {
    Real c_alpha, c_beta, c_tau, c0;
    Real worst_relative;
    bool feasible;
  };
  std::vector<Candidate> table;
};

inline const std::vector<Real> kCalibrationConstants{0.02, 0.05, 0.1};
inline const std::vector<Real> kCalibrationC0{0.01, 0.02, 0.05, 0.1};

/// Seeded ensemble of `count` boundary-vanishing data
/// sum_{p<=6} c_p sin(p pi (y+1)/2), c_p complex normal / sqrt 2.
std::vector<ModeField> calibration_ensemble(const ChebGrid& grid, int count, unsigned seed);

/// Horizon used per (k, nu): min(3 / lambda_k, 100).
Real calibration_horizon(Real k, Real nu);

/// Grid search over (c_alpha, c_beta, c_tau) and c0 for the largest c0 whose
/// Lyapunov residual stays within 1e-2 max D_k on every (nu, k, datum);
/// ties go to the smaller c_tau, then the smaller residual. An entry k equal
/// to 0 in k_list stands for k = nu. Throws NumericalError if nothing is
/// feasible. `base` provides m and eps.
CalibrationResult calibrate_constants(const ChebGrid& grid, const std::vector<Real>& nu_list,
                                      const std::vector<Real>& k_list, const std::vector<ModeField>& ensemble,
                                      const WeightSet& base = WeightSet{});

using SpectrumFn = std::function<Complex(Real, Real)>;

/// Free-space Kelvin solution of the linearised problem in Fourier variables.
Complex kelvin_exact(Real k, Real xi, Real t, Real nu, const SpectrumFn& omega_hat_in);

/// Default grids for the two Kelvin checks: k in {0.5, 1, 2, 4},
/// nu in {1e-2, 1e-3, 1e-4}, t in [0, 5] nu^{-1/3} at 101 points.
inline const std::vector<Real> kKelvinK{0.5, 1.0, 2.0, 4.0};
inline const std::vector<Real> kKelvinNu{1e-2, 1e-3, 1e-4};
std::vector<Real> kelvin_time_grid(int points = 101);

/// Smooth default datum (1 + k^2 + xi^2)^{-4}.
Complex kelvin_default_spectrum(Real k, Real xi);

struct KelvinReport {
  Real sup_ratio = 0.0;
  Real at_k = 0.0, at_nu = 0.0, at_t = 0.0, at_xi = 0.0;
};

/// sup over the grids (and over xi) of exp(-nu int_0^t (k^2 + (xi + k(t-s))^2) ds)
/// / exp(-nu^{1/3} |k|^{2/3} t). `t_scaled` lists t in units of nu^{-1/3}.
KelvinReport enhanced_dissipation_check(const std::vector<Real>& k_grid, const std::vector<Real>& t_scaled,
                                        const std::vector<Real>& nu_grid);

/// sup of |phi_hat| over the inviscid-damping envelope. `xi_density` sets the
/// xi sampling (points per unit length); doubling it is the refinement check.
KelvinReport inviscid_damping_check(const std::vector<Real>& k_grid, const std::vector<Real>& t_scaled,
                                    const std::vector<Real>& nu_grid, const SpectrumFn& omega_hat_in,
                                    Real xi_density = 20.0);

struct DecayMeasurement {
  Real k = 0.0, nu = 0.0;
  Real timescale = 0.0;  // nu^{-1/3} |k|^{-2/3}
  Real efold = 0.0;      // fitted e-folding time of ||w|| over [T, 5T]
};

/// Evolves omega_in with w_t = -iky w + nu Delta_k w to 5T and fits log ||w||.
DecayMeasurement measure_decay(const ChebGrid& grid, Real k, Real nu, const ModeField& omega_in);

}  // namespace couette
