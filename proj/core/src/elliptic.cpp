#include "couette/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "couette/quadrature.hpp"

namespace couette {

Real greens_function(Real k, Real y, Real yp) {
  const Real lo = std::min(y, yp);
  const Real hi = std::max(y, yp);
  const Real ak = std::abs(k);
  if (ak < kSmallWavenumber) return -0.5 * (1.0 - hi) * (1.0 + lo);
  const Real a = ak * (1.0 - hi);
  const Real b = ak * (1.0 + lo);
  // sinh(a) sinh(b) / sinh(2|k|) with a + b <= 2|k|.
  const Real ratio = std::exp(a + b - 2.0 * ak) * (-std::expm1(-2.0 * a)) * (-std::expm1(-2.0 * b)) /
                     (2.0 * (-std::expm1(-4.0 * ak)));
  return -ratio / ak;
}

GreensMatrix assemble_greens(const ChebGrid& grid, Real k) {
  if (!std::isfinite(k)) throw ConfigError("assemble_greens: wavenumber must be finite");
  if (k == 0.0) throw ConfigError("assemble_greens: k = 0 is not admissible");

  const int m = grid.size();
  const RealVector& y = grid.nodes();
  GreensMatrix g;
  g.k = k;
  g.values = RealMatrix::Zero(m, m);
  g.weights = RealMatrix::Zero(m, m);

  for (int i = 1; i < m - 1; ++i) {
    for (int j = 1; j < m - 1; ++j) g.values(i, j) = greens_function(k, y[i], y[j]);
  }

  const QuadratureRule base = gauss_legendre(grid.n() + 40);
  for (int i = 1; i < m - 1; ++i) {
    const Real yi = y[i];
    for (const auto& [a, b] : {std::pair{-1.0, yi}, std::pair{yi, 1.0}}) {
      const QuadratureRule rule = anchored_rule(base, a, b, yi, k);
      const RealMatrix interp = grid.interpolation_matrix(rule.nodes);
      RealVector kernel(static_cast<Eigen::Index>(rule.nodes.size()));
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        kernel[static_cast<Eigen::Index>(q)] = rule.weights[q] * greens_function(k, yi, rule.nodes[q]);
      }
      g.weights.row(i) += kernel.transpose() * interp;
    }
  }
  return g;
}

ModeField apply_greens(const GreensMatrix& g, const ChebGrid& grid, const ModeField& f) {
  grid.check_length(f, "apply_greens");
  if (g.weights.rows() != grid.size()) throw ConfigError("apply_greens: Green's matrix does not match grid");
  ModeField phi = g.weights.cast<Complex>() * f;
  phi[0] = 0.0;
  phi[phi.size() - 1] = 0.0;
  return phi;
}

Real greens_delta_defect(const ChebGrid& grid, Real k, int modes) {
  const GreensMatrix g = assemble_greens(grid, k);
  const int m = grid.size();
  const RealMatrix basis = resolved_basis(grid, modes).real();
  const RealMatrix lap = grid.d2() - k * k * RealMatrix::Identity(m, m);
  RealMatrix defect = lap * (g.values * grid.qw().asDiagonal() * basis) - basis;
  defect.row(0).setZero();
  defect.row(m - 1).setZero();
  const RealMatrix weighted = grid.qw().array().sqrt().matrix().asDiagonal() * defect;
  Eigen::JacobiSVD<RealMatrix> svd(weighted);
  return svd.singularValues()[0];
}

}  // namespace couette
