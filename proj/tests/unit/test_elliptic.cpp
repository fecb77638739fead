#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "couette/elliptic.hpp"

using namespace couette;

namespace {

ModeField smooth_random(const ChebGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<Real> nd;
  Complex c[5];
  for (auto& v : c) v = Complex(nd(rng), nd(rng));
  return sample(g, [&](Real y) {
    Complex s = 0.0;
    for (int p = 0; p < 5; ++p) s += c[p] * std::cos(p * kPi * y / 2.0 + 0.3 * p);
    return s;
  });
}

}  // namespace

TEST(Greens, BoundaryAndLimits) {
  for (Real k : {1e-6, 0.3, 1.0, 50.0, 800.0}) {
    for (Real yp : {-0.7, 0.0, 0.4}) {
      EXPECT_EQ(greens_function(k, 1.0, yp), 0.0);
      EXPECT_EQ(greens_function(k, -1.0, yp), 0.0);
      EXPECT_LE(greens_function(k, 0.2, yp), 0.0);
      EXPECT_TRUE(std::isfinite(greens_function(k, 0.2, yp)));
    }
  }
  const Real y = -0.3, yp = 0.5;
  const Real limit = -(1.0 - yp) * (1.0 + y) / 2.0;
  EXPECT_NEAR(greens_function(1e-6, y, yp), limit, 1e-6 * std::abs(limit));
  // just above the cutoff the exponential form must agree with the limit too
  EXPECT_NEAR(greens_function(2e-4, y, yp), limit, 1e-6);
  // closed form with sinh
  const Real k = 0.8;
  const Real ref = -std::sinh(k * (1 - yp)) * std::sinh(k * (1 + y)) / (k * std::sinh(2 * k));
  EXPECT_NEAR(greens_function(k, y, yp), ref, 1e-14);
  EXPECT_EQ(greens_function(-k, y, yp), greens_function(k, y, yp));
}

TEST(Greens, MatrixInvariants) {
  const ChebGrid g = build_grid(64);
  const GreensMatrix gm = assemble_greens(g, 2.0);
  EXPECT_TRUE(gm.values.row(0).isZero(0.0));
  EXPECT_TRUE(gm.values.row(64).isZero(0.0));
  EXPECT_LT((gm.values - gm.values.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(gm.values.maxCoeff(), 0.0);
  EXPECT_THROW(assemble_greens(g, 0.0), ConfigError);
  EXPECT_THROW(assemble_greens(g, INFINITY), ConfigError);
}

TEST(Greens, MatchesCollocationSolve) {
  const ChebGrid g = build_grid(64);
  const ModeField s = sample(g, [](Real y) { return std::sin(kPi * y); });
  const GreensMatrix g1 = assemble_greens(g, 1.0);
  EXPECT_LT((apply_greens(g1, g, -(1.0 + kPi * kPi) * s) - s).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(apply_greens(g1, g, ModeField::Zero(65)).isZero(0.0));

  std::mt19937_64 rng(7);
  for (Real k : {0.01, 0.5, 1.0, 4.0, 20.0}) {
    const GreensMatrix gm = assemble_greens(g, k);
    for (int t = 0; t < 20; ++t) {
      const ModeField f = smooth_random(g, rng);
      const ModeField a = apply_greens(gm, g, f);
      const ModeField b = helmholtz_solve(g, k, f);
      EXPECT_EQ(a[0], Complex(0.0));
      EXPECT_EQ(a[64], Complex(0.0));
      EXPECT_LT(std::sqrt(g.norm_sq(a - b) / g.norm_sq(b)), 1e-5) << "k=" << k;
    }
  }
}

TEST(Greens, SelfAdjointApply) {
  const ChebGrid g = build_grid(64);
  const GreensMatrix gm = assemble_greens(g, 3.0);
  std::mt19937_64 rng(11);
  const ModeField f = smooth_random(g, rng);
  const ModeField h = smooth_random(g, rng);
  const Complex lhs = g.inner(f, apply_greens(gm, g, h));
  const Complex rhs = g.inner(apply_greens(gm, g, f), h);
  EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(lhs));
}

TEST(Greens, DiscreteDeltaShrinksUnderRefinement) {
  const Real d32 = greens_delta_defect(build_grid(32), 1.5);
  const Real d64 = greens_delta_defect(build_grid(64), 1.5);
  const Real d128 = greens_delta_defect(build_grid(128), 1.5);
  EXPECT_LT(d64, 0.5 * d32);
  EXPECT_LT(d128, 0.5 * d64);
}
