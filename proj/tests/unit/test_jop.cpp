#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "couette/elliptic.hpp"
#include "couette/jop.hpp"
#include "couette/quadrature.hpp"

using namespace couette;

TEST(SingularOperator, RejectsBadInput) {
  const ChebGrid g = build_grid(32);
  EXPECT_THROW(assemble_j(g, 0.0), ConfigError);
  EXPECT_THROW(assemble_j(g, NAN), ConfigError);
  EXPECT_THROW(assemble_j(build_grid(16), 1.0), ConfigError);
}

TEST(SingularOperator, ImaginaryAndOddInK) {
  const ChebGrid g = build_grid(64);
  for (Real k : {0.01, 1.0, 30.0}) {
    const SingularOperator jp = assemble_j(g, k);
    const SingularOperator jm = assemble_j(g, -k);
    const Real scale = jp.mat.cwiseAbs().maxCoeff();
    EXPECT_LE(jp.mat.real().cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LT((jp.mat + jm.mat).cwiseAbs().maxCoeff(), 1e-12 * std::max(scale, 1.0));
    EXPECT_TRUE(jp.apply(ModeField::Zero(65)).isZero(0.0));
    EXPECT_TRUE(jp.mat.row(0).isZero(0.0));
    EXPECT_TRUE(jp.mat.row(64).isZero(0.0));
  }
}

// Independent oracle: adaptive Gauss–Kronrod style bisection on the
// subtracted integrand with the exact f, split at the target node.
namespace {

template <class F>
Real adaptive(F&& f, Real a, Real b, Real tol, int depth = 0) {
  static const QuadratureRule gl = gauss_legendre(20);
  auto rule = [&](Real lo, Real hi) {
    Real s = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      s += 0.5 * (hi - lo) * gl.weights[q] * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[q]);
    }
    return s;
  };
  const Real m = 0.5 * (a + b);
  const Real whole = rule(a, b);
  const Real halves = rule(a, m) + rule(m, b);
  if (std::abs(whole - halves) < tol || depth > 40) return halves;
  return adaptive(f, a, m, tol / 2, depth + 1) + adaptive(f, m, b, tol / 2, depth + 1);
}

}  // namespace

TEST(SingularOperator, RowMatchesAdaptiveQuadrature) {
  const ChebGrid g = build_grid(128);
  const Real k = 1.0;
  const SingularOperator j = assemble_j(g, k);
  auto f = [](Real y) { return std::cos(1.3 * y) + y * y * y; };
  const ModeField fv = sample(g, f);
  for (int i : {20, 45, 64, 101}) {
    const Real yi = g.nodes()[i];
    const Real gii = greens_function(k, yi, yi);
    auto integrand = [&](Real t) { return (greens_function(k, yi, t) * f(t) - gii * f(yi)) / (yi - t); };
    const Real pv = adaptive(integrand, -1.0, yi, 1e-14) + adaptive(integrand, yi, 1.0, 1e-14) +
                    gii * f(yi) * std::log((1 + yi) / (1 - yi));
    const Complex ref = Complex(0.0, -0.5 * k) * pv;
    const Complex got = j.apply(fv)[i];
    EXPECT_LT(std::abs(got - ref), 1e-4 * std::abs(ref)) << "row " << i;
  }
}

TEST(SingularOperator, MetricsOfZeroOperator) {
  const ChebGrid g = build_grid(64);
  SingularOperator z{1.0, ComplexMatrix::Zero(65, 65)};
  EXPECT_EQ(operator_norm(z, g), 0.0);
  EXPECT_EQ(commutator_norm(z, g), 0.0);
  EXPECT_EQ(adjoint_defect(z, g).value(), 0.0);
}

TEST(SingularOperator, DefectOfConstructedMatrix) {
  const ChebGrid g = build_grid(64);
  // i * (symmetric real in the qw form) is anti-Hermitian: a defect must show.
  const ComplexMatrix basis = resolved_basis(g);
  SingularOperator h{1.0, Complex(0.0, 1.0) * ComplexMatrix::Identity(65, 65)};
  EXPECT_GT(adjoint_defect(h, g).self_adjoint, 1.0);
  EXPECT_EQ(adjoint_defect(h, g).real_part, 0.0);
  SingularOperator r{1.0, ComplexMatrix::Identity(65, 65)};
  EXPECT_LT(adjoint_defect(r, g).self_adjoint, 1e-12);
  EXPECT_EQ(adjoint_defect(r, g).real_part, 1.0);
  // resolved basis is qw-orthonormal
  const ComplexMatrix gram = basis.adjoint() * g.qw().cast<Complex>().asDiagonal() * basis;
  EXPECT_LT((gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SingularOperator, RefinementConsistency) {
  const ChebGrid g64 = build_grid(64);
  const ChebGrid g128 = build_grid(128);
  const SingularOperator a = assemble_j(g64, 1.0);
  const SingularOperator b = assemble_j(g128, 1.0);
  const Real na = operator_norm(a, g64), nb = operator_norm(b, g128);
  EXPECT_LT(std::abs(na - nb), 0.05 * nb);
  const Real ca = commutator_norm(a, g64), cb = commutator_norm(b, g128);
  EXPECT_LT(std::abs(ca - cb), 0.10 * cb);
  EXPECT_LT(adjoint_defect(a, g64).value(), 1e-3 * na);

  const AdjointDefect d64 = adjoint_defect(assemble_j(g64, 10.0), g64);
  const AdjointDefect d128 = adjoint_defect(assemble_j(g128, 10.0), g128);
  EXPECT_LE(d128.value(), d64.value());
}

TEST(SingularOperator, QuadraticFormIsReal) {
  const ChebGrid g = build_grid(64);
  const SingularOperator j = assemble_j(g, 2.0);
  const ComplexMatrix basis = resolved_basis(g);
  std::mt19937_64 rng(3);
  std::normal_distribution<Real> nd;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXcd c(basis.cols());
    for (int p = 0; p < c.size(); ++p) c[p] = Complex(nd(rng), nd(rng)) / (1.0 + p);
    const ModeField f = basis * c;
    EXPECT_LE(std::abs(g.inner(f, j.apply(f)).imag()), 1e-6 * g.norm_sq(f));
  }
}
