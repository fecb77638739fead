#include "couette/weights.hpp"

#include <cmath>
#include <string>

namespace couette {

void WeightSet::validate(Real operator_cap) const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(std::isfinite(nu) && nu > 0.0 && nu < 1.0, "ν must lie in (0, 1)");
  require(std::isfinite(m) && m > 1.0, "m must exceed 1");
  require(std::isfinite(eps) && eps > 0.0 && eps < 1.0 / 12.0, "ε must lie in (0, 1/12)");
  require(c_alpha > 0.0 && c_beta > 0.0 && c_tau > 0.0, "c_alpha, c_beta, c_tau must be positive");
  require(c0 > 0.0, "c0 must be positive");
  require(c > 0.0 && c <= c0 / 4.0, "c must lie in (0, c0/4]");
  require(coercivity_loss(operator_cap) < 0.5, "coercivity margin violated: c_tau*C_J + c_beta/2 must be < 1/2");
}

ModeWeights mode_weights(Real k, Real nu) {
  if (k == 0.0 || !std::isfinite(k)) throw ConfigError("mode_weights: k must be finite and nonzero");
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("mode_weights: ν must lie in (0, 1)");
  const Real ak = std::abs(k);
  ModeWeights w;
  if (ak >= nu) {
    w.alpha = std::cbrt(nu * nu / (ak * ak));
    w.beta = std::cbrt(nu / (ak * ak * ak * ak));
    w.lambda = std::cbrt(nu * ak * ak);
    w.upper = true;
  } else {
    w.alpha = 1.0;
    w.beta = 0.0;
    w.lambda = nu;
  }
  return w;
}

Real aniso_weight(Real k, Real m, Real eps) {
  if (k == 0.0 || !std::isfinite(k)) throw ConfigError("aniso_weight: k must be finite and nonzero");
  return std::pow(1.0 + k * k, m) * std::pow(1.0 + 1.0 / (k * k), eps);
}

namespace {

void check_boundary(const ModeField& omega, Real tol, const char* what) {
  const Real scale = omega.size() ? omega.cwiseAbs().maxCoeff() : 0.0;
  if (std::abs(omega[0]) > tol * scale || std::abs(omega[omega.size() - 1]) > tol * scale) {
    throw ConfigError(std::string(what) + ": field must vanish at y = ±1");
  }
}

}  // namespace

EnergyForms energy_forms(const ChebGrid& grid, const SingularOperator& j, Real k, const ModeField& omega) {
  grid.check_length(omega, "energy_forms");
  if (j.mat.rows() != grid.size()) throw ConfigError("energy_forms: operator does not match grid");
  const ModeField dw = grid.differentiate(omega, 1);
  EnergyForms f;
  f.w2 = grid.norm_sq(omega);
  f.dw2 = grid.norm_sq(dw);
  f.cross = grid.inner(Complex(0.0, k) * omega, dw).real();
  const Complex jw = grid.inner(omega, j.apply(omega));
  const Complex jdw = grid.inner(j.apply(dw), dw);
  f.jw = jw.real();
  f.jdw = jdw.real();
  f.jw_imag = jw.imag();
  f.jdw_imag = jdw.imag();
  return f;
}

Real energy_imaginary_part(const EnergyForms& f, const WeightSet& w, const ModeWeights& mw) {
  return w.c_tau * f.jw_imag + w.c_tau * w.c_alpha * mw.alpha * f.jdw_imag;
}

Real combine_energy(const EnergyForms& f, const WeightSet& w, const ModeWeights& mw) {
  Real e = f.w2 + w.c_alpha * mw.alpha * f.dw2 + w.c_tau * f.jw + w.c_tau * w.c_alpha * mw.alpha * f.jdw;
  if (mw.upper) e += kCrossTermSign * w.c_beta * mw.beta * f.cross;
  return e;
}

Real mode_energy(const ChebGrid& grid, const SingularOperator& j, const WeightSet& w, const ModeWeights& mw, Real k,
                 const ModeField& omega) {
  grid.check_length(omega, "mode_energy");
  check_boundary(omega, 1e-10, "mode_energy");
  return combine_energy(energy_forms(grid, j, k, omega), w, mw);
}

DissipationForms dissipation_forms(const ChebGrid& grid, const ModeField& omega, const ModeField& phi) {
  grid.check_length(omega, "dissipation_forms");
  grid.check_length(phi, "dissipation_forms");
  DissipationForms f;
  const ModeField dw = grid.d1().cast<Complex>() * omega;
  const ModeField dphi = grid.d1().cast<Complex>() * phi;
  f.w2 = grid.norm_sq(omega);
  f.dw2 = grid.norm_sq(dw);
  f.d2w = grid.norm_sq(grid.d1().cast<Complex>() * dw);
  f.phi2 = grid.norm_sq(phi);
  f.dphi2 = grid.norm_sq(dphi);
  f.d2phi2 = grid.norm_sq(grid.d1().cast<Complex>() * dphi);
  return f;
}

Dissipation combine_dissipation(const DissipationForms& f, const WeightSet& w, const ModeWeights& mw, Real k) {
  const Real k2 = k * k;
  Dissipation d;
  d.dis[0] = w.nu * (k2 * f.w2 + f.dw2);
  d.dis[1] = w.nu * mw.alpha * (k2 * f.dw2 + f.d2w);
  d.dis[2] = mw.lambda * f.w2;
  d.dis[3] = k2 * (k2 * f.phi2 + f.dphi2);
  d.dis[4] = mw.alpha * k2 * (k2 * f.dphi2 + f.d2phi2);
  for (Real v : d.dis) d.total += v;
  return d;
}

Dissipation mode_dissipation(const ChebGrid& grid, const WeightSet& w, const ModeWeights& mw, Real k,
                             const ModeField& omega, const ModeField& phi) {
  grid.check_length(omega, "mode_dissipation");
  grid.check_length(phi, "mode_dissipation");
  ModeField residual = grid.d2().cast<Complex>() * phi - (k * k) * phi - omega;
  residual[0] = 0.0;
  residual[residual.size() - 1] = 0.0;
  const Real ref = grid.norm_sq(omega);
  if (grid.norm_sq(residual) > 1e-12 * ref || std::abs(phi[0]) + std::abs(phi[phi.size() - 1]) > 1e-12) {
    throw ConfigError("mode_dissipation: phi is not the Dirichlet stream function of omega");
  }
  return combine_dissipation(dissipation_forms(grid, omega, phi), w, mw, k);
}

}  // namespace couette
