#include "couette/linear.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <tuple>

#include "couette/elliptic.hpp"

namespace couette {

namespace {

ModeField apply_real(const RealMatrix& a, const ModeField& v) {
  const RealVector re = a * v.real();
  const RealVector im = a * v.imag();
  ModeField out(v.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

void require_finite(const ModeField& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + ": non-finite state");
}

}  // namespace

LinearStepper::LinearStepper(const ChebGrid& grid, Real k, Real nu, Real dt) : grid_(&grid), k_(k), nu_(nu), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("ν must be non-negative");
  if (!std::isfinite(k)) throw ConfigError("wavenumber must be finite");
  const int m = grid.size();
  const RealMatrix lap = grid.d2() - k * k * RealMatrix::Identity(m, m);
  RealMatrix a = RealMatrix::Identity(m, m) - 0.5 * dt * nu * lap;
  RealMatrix b = RealMatrix::Identity(m, m) + 0.5 * dt * nu * lap;
  a.row(0).setZero();
  a(0, 0) = 1.0;
  a.row(m - 1).setZero();
  a(m - 1, m - 1) = 1.0;
  b.row(0).setZero();
  b.row(m - 1).setZero();
  Eigen::PartialPivLU<RealMatrix> lu(a);
  const RealMatrix inv = lu.inverse();
  if (!inv.allFinite()) throw NumericalError("singular implicit diffusion matrix");
  propagate_ = inv * b;
  solve_ = inv;
}

ModeField LinearStepper::step(const ModeField& omega, const ModeField& forcing) {
  grid_->check_length(omega, "LinearStepper::step");
  ModeField ex = Complex(0.0, -k_) * grid_->nodes().cast<Complex>().cwiseProduct(omega);
  if (forcing.size() != 0) {
    grid_->check_length(forcing, "LinearStepper::step");
    ex += forcing;
  }
  ModeField rhs = have_previous_ ? ModeField(1.5 * ex - 0.5 * previous_) : ex;
  previous_ = ex;
  have_previous_ = true;
  rhs *= dt_;
  rhs[0] = 0.0;
  rhs[rhs.size() - 1] = 0.0;
  ModeField next = apply_real(propagate_, omega) + apply_real(solve_, rhs);
  next[0] = 0.0;
  next[next.size() - 1] = 0.0;
  require_finite(next, "step_linear");
  return next;
}

ModeField step_linear(const ChebGrid& grid, Real k, Real nu, const ModeField& omega, Real dt) {
  LinearStepper s(grid, k, nu, dt);
  return s.step(omega);
}

Real default_linear_dt(Real k) { return k == 0.0 ? 0.01 : std::min(0.01, 0.2 / std::abs(k)); }

ModeTrajectory evolve_linear(const ChebGrid& grid, Real k, Real nu, const ModeField& omega_in, Real t_end, Real dt,
                             const WeightSet& w, const SingularOperator* j, int record_every) {
  grid.check_length(omega_in, "evolve_linear");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");

  ModeTrajectory traj;
  traj.k = k;
  traj.nu = nu;
  const int steps = t_end == 0.0 ? 0 : static_cast<int>(std::ceil(t_end / dt - 1e-9));
  const Real h = steps ? t_end / steps : dt;

  const bool measure = k != 0.0;
  SingularOperator owned;
  std::unique_ptr<HelmholtzSolver> helmholtz;
  if (measure) {
    traj.mw = mode_weights(k, nu);
    if (j == nullptr) {
      owned = assemble_j(grid, k);
      j = &owned;
    }
    helmholtz = std::make_unique<HelmholtzSolver>(grid, k);
  }
  auto record = [&](Real t, const ModeField& omega) {
    traj.times.push_back(t);
    traj.states.push_back(omega);
    if (!measure) return;
    const EnergyForms ef = energy_forms(grid, *j, k, omega);
    const DissipationForms df = dissipation_forms(grid, omega, helmholtz->solve(omega));
    traj.energy_forms.push_back(ef);
    traj.dissipation_forms.push_back(df);
    traj.energies.push_back(combine_energy(ef, w, traj.mw));
    traj.dissipations.push_back(combine_dissipation(df, w, traj.mw, k));
  };

  ModeField omega = omega_in;
  omega[0] = 0.0;
  omega[omega.size() - 1] = 0.0;
  record(0.0, omega);
  LinearStepper stepper(grid, k, nu, h);
  for (int s = 1; s <= steps; ++s) {
    omega = stepper.step(omega);
    if (s % record_every == 0 || s == steps) record(s * h, omega);
  }
  return traj;
}

namespace {

LyapunovReport monitor(const std::vector<Real>& t, const std::vector<Real>& e, const std::vector<Real>& d, Real lambda,
                       Real c0) {
  if (t.size() < 3) throw ConfigError("lyapunov_monitor: need at least three recorded states");
  LyapunovReport r;
  r.max_residual = -INFINITY;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const Real de = (e[i + 1] - e[i - 1]) / (t[i + 1] - t[i - 1]);
    const Real res = de + c0 * d[i] + c0 * lambda * e[i];
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
  }
  r.max_dissipation = *std::max_element(d.begin(), d.end());
  r.relative = r.max_dissipation > 0.0 ? r.max_residual / r.max_dissipation : 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Real bound = e[0] * std::exp(-c0 * lambda * t[i] * 0.9);
    if (e[i] > bound * (1.0 + 1e-12) + 1e-300) r.gronwall_ok = false;
  }
  return r;
}

}  // namespace

LyapunovReport lyapunov_monitor(const ModeTrajectory& traj, const WeightSet& w) {
  if (traj.energies.size() != traj.times.size()) throw ConfigError("lyapunov_monitor: trajectory has no energies");
  std::vector<Real> d;
  d.reserve(traj.dissipations.size());
  for (const auto& x : traj.dissipations) d.push_back(x.total);
  return monitor(traj.times, traj.energies, d, traj.mw.lambda, w.c0);
}

LyapunovReport lyapunov_from_forms(const ModeTrajectory& traj, const WeightSet& w) {
  if (traj.energy_forms.size() != traj.times.size()) throw ConfigError("lyapunov_from_forms: no stored forms");
  std::vector<Real> e, d;
  e.reserve(traj.times.size());
  d.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    e.push_back(combine_energy(traj.energy_forms[i], w, traj.mw));
    d.push_back(combine_dissipation(traj.dissipation_forms[i], w, traj.mw, traj.k).total);
  }
  return monitor(traj.times, e, d, traj.mw.lambda, w.c0);
}

std::vector<ModeField> calibration_ensemble(const ChebGrid& grid, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal;
  std::vector<ModeField> out;
  for (int d = 0; d < count; ++d) {
    Complex c[6];
    for (auto& v : c) {
      const Real re = normal(rng);
      const Real im = normal(rng);
      v = Complex(re, im) / std::sqrt(2.0);
    }
    ModeField f = sample(grid, [&](Real y) {
      Complex s = 0.0;
      for (int p = 1; p <= 6; ++p) s += c[p - 1] * std::sin(p * kPi * (y + 1.0) / 2.0);
      return s;
    });
    f[0] = 0.0;
    f[f.size() - 1] = 0.0;
    out.push_back(std::move(f));
  }
  return out;
}

Real calibration_horizon(Real k, Real nu) { return std::min(3.0 / mode_weights(k, nu).lambda, 100.0); }

CalibrationResult calibrate_constants(const ChebGrid& grid, const std::vector<Real>& nu_list,
                                      const std::vector<Real>& k_list, const std::vector<ModeField>& ensemble,
                                      const WeightSet& base) {
  if (nu_list.empty() || k_list.empty()) throw ConfigError("calibrate_constants: empty ν or k list");
  if (ensemble.size() < 10) throw ConfigError("calibrate_constants: ensemble needs at least 10 data");

  std::vector<ModeTrajectory> runs;
  for (Real nu : nu_list) {
    for (Real k0 : k_list) {
      const Real k = k0 == 0.0 ? nu : k0;
      const SingularOperator j = assemble_j(grid, k);
      WeightSet w = base;
      w.nu = nu;
      for (const ModeField& d : ensemble) {
        ModeTrajectory t = evolve_linear(grid, k, nu, d, calibration_horizon(k, nu), default_linear_dt(k), w, &j);
        t.states.clear();
        t.states.shrink_to_fit();
        runs.push_back(std::move(t));
      }
    }
  }

  CalibrationResult result;
  bool found = false;
  std::tuple<Real, Real, Real> best_key{-1.0, 0.0, 0.0};
  for (Real ca : kCalibrationConstants) {
    for (Real cb : kCalibrationConstants) {
      for (Real ct : kCalibrationConstants) {
        for (Real c0 : kCalibrationC0) {
          WeightSet w = base;
          w.c_alpha = ca;
          w.c_beta = cb;
          w.c_tau = ct;
          w.c0 = c0;
          w.c = c0 / 4.0;
          const bool coercive = w.coercivity_loss() < 0.5;
          Real worst = -INFINITY;
          for (const auto& t : runs) {
            w.nu = t.nu;
            worst = std::max(worst, lyapunov_from_forms(t, w).relative);
          }
          const bool feasible = coercive && worst <= 1e-2;
          result.table.push_back({ca, cb, ct, c0, worst, feasible});
          if (!feasible) continue;
          // larger c0 first, then smaller c_tau, then smaller residual
          const std::tuple<Real, Real, Real> key{c0, -ct, -worst};
          if (!found || key > best_key) {
            found = true;
            best_key = key;
            result.weights = w;
            result.weights.nu = base.nu;
            result.worst_relative = worst;
          }
        }
      }
    }
  }
  if (!found) throw NumericalError("calibrate_constants: no feasible constants in the search grid");
  return result;
}

namespace {

// nu * int_0^t (k^2 + (xi + k(t - s))^2) ds, written without the cubic
// difference so it stays accurate for large |xi| and works at k = 0.
Real damping_exponent(Real k, Real xi, Real t, Real nu) {
  return nu * t * (k * k + xi * xi + xi * k * t + k * k * t * t / 3.0);
}

void check_finite_args(std::initializer_list<Real> xs) {
  for (Real x : xs) {
    if (!std::isfinite(x)) throw ConfigError("kelvin: non-finite input");
  }
}

}  // namespace

Complex kelvin_exact(Real k, Real xi, Real t, Real nu, const SpectrumFn& omega_hat_in) {
  check_finite_args({k, xi, t, nu});
  return omega_hat_in(k, xi + k * t) * std::exp(-damping_exponent(k, xi, t, nu));
}

KelvinReport enhanced_dissipation_check(const std::vector<Real>& k_grid, const std::vector<Real>& t_scaled,
                                        const std::vector<Real>& nu_grid) {
  if (k_grid.empty() || t_scaled.empty() || nu_grid.empty()) throw ConfigError("enhanced_dissipation_check: empty grid");
  KelvinReport r;
  for (Real k : k_grid) {
    if (k == 0.0) throw ConfigError("enhanced_dissipation_check: k must be nonzero");
    for (Real nu : nu_grid) {
      for (Real s : t_scaled) {
        const Real t = s / std::cbrt(nu);
        const Real rate = std::cbrt(nu * k * k) * t;
        for (int q = -50; q <= 50; ++q) {
          const Real xi = -0.5 * k * t + 0.1 * q;
          const Real ratio = std::exp(rate - damping_exponent(k, xi, t, nu));
          if (ratio > r.sup_ratio) r = {ratio, k, nu, t, xi};
        }
      }
    }
  }
  return r;
}

KelvinReport inviscid_damping_check(const std::vector<Real>& k_grid, const std::vector<Real>& t_scaled,
                                    const std::vector<Real>& nu_grid, const SpectrumFn& omega_hat_in,
                                    Real xi_density) {
  if (k_grid.empty() || t_scaled.empty() || nu_grid.empty()) throw ConfigError("inviscid_damping_check: empty grid");
  if (!(xi_density > 0.0)) throw ConfigError("inviscid_damping_check: xi density must be positive");
  KelvinReport r;
  for (Real k : k_grid) {
    if (k == 0.0) throw ConfigError("inviscid_damping_check: k must be nonzero");
    const Real ak = std::abs(k);
    for (Real nu : nu_grid) {
      for (Real s : t_scaled) {
        const Real t = s / std::cbrt(nu);
        const Real pad = 10.0 * (1.0 + ak);
        const Real lo = std::min(0.0, -k * t) - pad;
        const Real hi = std::max(0.0, -k * t) + pad;
        const int count = static_cast<int>(std::ceil((hi - lo) * xi_density));
        for (int q = 0; q <= count; ++q) {
          const Real xi = lo + (hi - lo) * q / count;
          const Real shifted = xi + k * t;
          const Complex w0 = omega_hat_in(k, shifted);
          if (std::abs(w0) < 1e-300) continue;
          const Real phi = std::abs(kelvin_exact(k, xi, t, nu, omega_hat_in)) / (k * k + xi * xi);
          const Real envelope = (1.0 + k * k + shifted * shifted) / ((1.0 + t * t) * k * k * k * k) * std::abs(w0) *
                                std::exp(-0.5 * std::cbrt(nu * k * k) * t);
          const Real ratio = phi / envelope;
          if (ratio > r.sup_ratio) r = {ratio, k, nu, t, xi};
        }
      }
    }
  }
  return r;
}

DecayMeasurement measure_decay(const ChebGrid& grid, Real k, Real nu, const ModeField& omega_in) {
  if (k == 0.0) throw ConfigError("measure_decay: k must be nonzero");
  DecayMeasurement out;
  out.k = k;
  out.nu = nu;
  out.timescale = 1.0 / std::cbrt(nu * k * k);
  const Real dt = default_linear_dt(k);
  const int steps = static_cast<int>(std::ceil(5.0 * out.timescale / dt));
  LinearStepper stepper(grid, k, nu, dt);
  ModeField omega = omega_in;
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int s = 1; s <= steps; ++s) {
    omega = stepper.step(omega);
    const Real t = s * dt;
    if (t < out.timescale || t > 5.0 * out.timescale) continue;
    const Real y = 0.5 * std::log(grid.norm_sq(omega));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++count;
  }
  if (count < 2) throw NumericalError("measure_decay: fit window too short");
  const Real slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (!(slope < 0.0)) throw NumericalError("measure_decay: norm is not decaying");
  out.efold = -1.0 / slope;
  return out;
}

std::vector<Real> kelvin_time_grid(int points) {
  if (points < 2) throw ConfigError("kelvin_time_grid: need at least two points");
  std::vector<Real> ts;
  for (int i = 0; i < points; ++i) ts.push_back(5.0 * i / (points - 1));
  return ts;
}

Complex kelvin_default_spectrum(Real k, Real xi) { return Complex(std::pow(1.0 + k * k + xi * xi, -4.0), 0.0); }

}  // namespace couette
