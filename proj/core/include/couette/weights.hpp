#pragma once

#include <array>

#include "couette/jop.hpp"

namespace couette {

/// Upper envelope for the resolved operator norm of J_k over all k; the
/// coercivity margin of a WeightSet is checked against it.
inline constexpr Real kOperatorNormCap = 0.6;

/// Sign in front of c_beta * beta * Re<ik w, dy w> inside E_k.
///
/// Under the advection -iky, d/dt Re<ik w, dy w> = -k^2 ||w||^2, so only the
/// + sign turns the cross term into the lambda_k ||w||^2 dissipation the
/// Lyapunov inequality needs. With the opposite sign no constant in the
/// calibration grid is feasible.
inline constexpr Real kCrossTermSign = 1.0;

struct WeightSet {
  Real nu = 1e-3;
  Real m = 2.0;
  Real eps = 0.08;
  Real c_alpha = 0.1;
  Real c_beta = 0.1;
  Real c_tau = 0.1;
  Real c0 = 0.02;
  Real c = 0.005;

  /// Throws ConfigError naming the first violated constraint.
  void validate(Real operator_cap = kOperatorNormCap) const;

  /// c_tau * C_J + c_beta / 2; must stay below 1/2.
  Real coercivity_loss(Real operator_cap = kOperatorNormCap) const { return c_tau * operator_cap + 0.5 * c_beta; }
};

struct ModeWeights {
  Real alpha = 1.0;
  Real beta = 0.0;
  Real lambda = 0.0;
  /// True when |k| >= nu, i.e. the cross term and beta are active.
  bool upper = false;
};

ModeWeights mode_weights(Real k, Real nu);

/// <k>^{2m} <1/k>^{2 eps} with <x> = sqrt(1 + x^2).
Real aniso_weight(Real k, Real m, Real eps);

/// The five quadratic forms E_k is built from. Keeping them separate lets
/// the calibration recombine E_k for any constants without re-running.
struct EnergyForms {
  Real w2 = 0.0;     // ||w||^2
  Real dw2 = 0.0;    // ||dy w||^2
  Real cross = 0.0;  // Re<ik w, dy w>
  Real jw = 0.0;     // Re<w, J w>
  Real jdw = 0.0;    // Re<J dy w, dy w>
  // Im parts of the two J forms; zero for an exactly self-adjoint J.
  Real jw_imag = 0.0;
  Real jdw_imag = 0.0;
};

EnergyForms energy_forms(const ChebGrid& grid, const SingularOperator& j, Real k, const ModeField& omega);
Real combine_energy(const EnergyForms& f, const WeightSet& w, const ModeWeights& mw);

/// Imaginary part E_k would carry if the J forms were not taken as real.
Real energy_imaginary_part(const EnergyForms& f, const WeightSet& w, const ModeWeights& mw);

/// E_k[w]. Requires omega(+-1) = 0 to 1e-10 ||omega||.
Real mode_energy(const ChebGrid& grid, const SingularOperator& j, const WeightSet& w, const ModeWeights& mw, Real k,
                 const ModeField& omega);

struct DissipationForms {
  Real w2 = 0.0, dw2 = 0.0, d2w = 0.0;
  Real phi2 = 0.0, dphi2 = 0.0, d2phi2 = 0.0;
};

struct Dissipation {
  std::array<Real, 5> dis{};
  Real total = 0.0;
};

DissipationForms dissipation_forms(const ChebGrid& grid, const ModeField& omega, const ModeField& phi);
Dissipation combine_dissipation(const DissipationForms& f, const WeightSet& w, const ModeWeights& mw, Real k);

/// Dis_1..Dis_5 and D_k. phi must solve Delta_k phi = omega; the residual
/// is checked at interior nodes (1e-6 relative).
Dissipation mode_dissipation(const ChebGrid& grid, const WeightSet& w, const ModeWeights& mw, Real k,
                             const ModeField& omega, const ModeField& phi);

}  // namespace couette
