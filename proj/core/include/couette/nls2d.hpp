#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "couette/linear.hpp"

namespace couette {

/// Perturbation vorticity on a periodic box of length Lx, stored as samples
/// of the continuous x-transform, w(x, y) = int f(k, y) e^{ikx} dk, at
/// k_j = 2 pi j / Lx, j = -K..K. Physical values are dk * sum_j f_j e^{ik_j x}.
struct FlowState {
  Real Lx = 100.0;
  int K = 32;
  Real nu = 1e-3;
  Real t = 0.0;
  std::vector<ModeField> modes;  // index j + K

  Real dk() const { return 2.0 * kPi / Lx; }
  Real wavenumber(int j) const { return dk() * j; }
  ModeField& mode(int j) { return modes[static_cast<std::size_t>(j + K)]; }
  const ModeField& mode(int j) const { return modes[static_cast<std::size_t>(j + K)]; }

  /// Zero state with all modes sized for `grid`.
  static FlowState zeros(const ChebGrid& grid, Real Lx, int K, Real nu);

  /// Throws ConfigError if reality or wall conditions fail.
  void check_invariants(const ChebGrid& grid, Real tol = 1e-8) const;
};

enum class Spectrum {
  random,  // i.i.d. a_{j,p} per mode index
  smooth,  // smooth in physical k, so the field does not depend on Lx
};

struct InitConfig {
  Real amplitude = 0.0;
  std::uint64_t seed = 1;
  int max_mode = 8;        // |j| <= max_mode (random spectrum)
  int max_profile = 6;     // p <= max_profile
  Spectrum spectrum = Spectrum::random;
  Real smooth_scale = 0.25;  // k-width of the smooth envelope
  Real m = 2.0;
  Real eps = 0.08;
};

/// Norm of the initial-data condition:
///   sum_{i=0,1} || (nu^{1/3} dy)^i <dx>^{m-i} <dx^{-1}>^eps w ||_{L^2_{x,y}}
/// with Plancherel (factor 2 pi) and the j = 0 mode left out.
Real theorem_norm(const ChebGrid& grid, const FlowState& s, Real m, Real eps);

/// Random boundary-vanishing data rescaled so that theorem_norm == amplitude.
/// The j = 0 mode is left at zero.
FlowState init_perturbation(const ChebGrid& grid, Real Lx, int K, Real nu, const InitConfig& cfg);

struct Velocity {
  std::vector<ModeField> u1;  // dy phi
  std::vector<ModeField> u2;  // -ik phi
};

Velocity velocity_from_vorticity(const ChebGrid& grid, const FlowState& s);

/// Smallest power of two >= 3K + 1 (2/3-rule dealiasing for |j| <= K).
int dealiased_points(int K);

/// n_k = -(u . grad w)_k by direct summation over triads:
///   dk * sum_l (i l phi_l dy w_{k-l} - dy phi_l i (k-l) w_{k-l}),
/// truncated to |j| <= K. O(K^2 n); used as an oracle.
std::vector<ModeField> nonlinear_term_direct(const ChebGrid& grid, const FlowState& s);

/// Pseudospectral nonlinear term with cached FFT plans and elliptic solves.
class NonlinearSolver {
 public:
  NonlinearSolver(const ChebGrid& grid, Real Lx, int K, Real nu, Real dt);
  ~NonlinearSolver();
  NonlinearSolver(const NonlinearSolver&) = delete;
  NonlinearSolver& operator=(const NonlinearSolver&) = delete;

  int x_points() const { return nx_; }
  Real dt() const { return dt_; }

  /// Stream functions phi_j for j = -K..K.
  std::vector<ModeField> stream_functions(const FlowState& s) const;

  /// n_k for j = -K..K; also records max |u1 + y| over the physical grid.
  std::vector<ModeField> nonlinear_term(const FlowState& s);
  Real last_max_speed() const { return max_speed_; }

  /// Largest dt allowed by 0.5 dx / max|u1 + y| for the state.
  Real cfl_limit(const FlowState& s);

  /// One CNAB2 step. Throws InconclusiveError on CFL violation and
  /// NumericalError on non-finite values. `linear_only` drops n_k.
  void step(FlowState& s, bool linear_only = false);

 private:
  struct Fft;
  const ChebGrid* grid_;
  Real Lx_;
  int K_;
  Real nu_;
  Real dt_;
  int nx_;
  Real max_speed_ = 0.0;
  std::vector<LinearStepper> steppers_;  // j = 0..K
  std::vector<HelmholtzSolver> elliptic_;  // j = 0..K
  std::unique_ptr<Fft> fft_;
};

/// Convenience wrappers over a temporary NonlinearSolver.
std::vector<ModeField> nonlinear_term(const ChebGrid& grid, const FlowState& s);
FlowState step_nonlinear(const ChebGrid& grid, const FlowState& s, Real dt);

/// Binary checkpoint, little-endian:
///   char[4] "CFLW", uint32 version (1), float64 Lx, int32 K, int32 n,
///   float64 nu, float64 t, then for j = -K..K and node i = 0..n the pair
///   (float64 re, float64 im).
void save_checkpoint(const std::filesystem::path& path, const FlowState& s, int n);
FlowState load_checkpoint(const std::filesystem::path& path, int* n_out = nullptr);

}  // namespace couette
