#include "couette/jop.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "couette/elliptic.hpp"
#include "couette/quadrature.hpp"

namespace couette {

namespace {

void check_operator(const SingularOperator& j, const ChebGrid& grid) {
  if (j.mat.rows() != grid.size() || j.mat.cols() != grid.size()) {
    throw ConfigError("singular operator does not match grid size");
  }
}

Real spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()[0];
}

}  // namespace

SingularOperator assemble_j(const ChebGrid& grid, Real k) {
  if (!std::isfinite(k)) throw ConfigError("assemble_j: wavenumber must be finite");
  if (k == 0.0) throw ConfigError("assemble_j: k = 0 is not admissible");
  if (grid.n() < 32) throw ConfigError("assemble_j: operator work needs n >= 32");

  const int m = grid.size();
  const RealVector& y = grid.nodes();
  RealMatrix rows = RealMatrix::Zero(m, m);
  const QuadratureRule base = gauss_legendre(grid.n() + 40);

  for (int i = 1; i < m - 1; ++i) {
    const Real yi = y[i];
    const Real gii = greens_function(k, yi, yi);
    for (const auto& [a, b] : {std::pair{-1.0, yi}, std::pair{yi, 1.0}}) {
      const QuadratureRule rule = anchored_rule(base, a, b, yi, k);
      const RealMatrix interp = grid.interpolation_matrix(rule.nodes);
      RealVector kernel(static_cast<Eigen::Index>(rule.nodes.size()));
      Real singular_mass = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Real inv = 1.0 / (yi - rule.nodes[q]);
        kernel[static_cast<Eigen::Index>(q)] = rule.weights[q] * greens_function(k, yi, rule.nodes[q]) * inv;
        singular_mass += rule.weights[q] * inv;
      }
      rows.row(i) += kernel.transpose() * interp;
      rows(i, i) -= gii * singular_mass;
    }
    rows(i, i) += gii * std::log((1.0 + yi) / (1.0 - yi));
  }

  SingularOperator op;
  op.k = k;
  // k / (2i) = -i k / 2
  op.mat = Complex(0.0, -0.5 * k) * rows.cast<Complex>();
  return op;
}

Real operator_norm(const SingularOperator& j, const ChebGrid& grid, int modes) {
  check_operator(j, grid);
  const ComplexMatrix basis = resolved_basis(grid, modes);
  const RealVector sq = grid.qw().array().sqrt();
  return spectral_norm(sq.cast<Complex>().asDiagonal() * (j.mat * basis));
}

Real commutator_norm(const SingularOperator& j, const ChebGrid& grid, int modes) {
  check_operator(j, grid);
  if (j.k == 0.0) return 0.0;
  const ComplexMatrix basis = resolved_basis(grid, modes);
  const ComplexMatrix d1 = grid.d1().cast<Complex>();
  const ComplexMatrix comm = d1 * (j.mat * basis) - j.mat * (d1 * basis);
  const RealVector sq = grid.qw().array().sqrt();
  return spectral_norm(sq.cast<Complex>().asDiagonal() * comm) / std::abs(j.k);
}

AdjointDefect adjoint_defect(const SingularOperator& j, const ChebGrid& grid, int modes) {
  check_operator(j, grid);
  const ComplexMatrix basis = resolved_basis(grid, modes);
  const ComplexMatrix form = basis.adjoint() * grid.qw().cast<Complex>().asDiagonal() * (j.mat * basis);
  AdjointDefect d;
  d.self_adjoint = spectral_norm(form - form.adjoint());
  d.real_part = j.mat.size() ? j.mat.real().cwiseAbs().maxCoeff() : 0.0;
  return d;
}

}  // namespace couette
