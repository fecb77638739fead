#include "couette/cheb.hpp"

#include <cmath>
#include <string>

namespace couette {

namespace {

RealVector clenshaw_curtis_weights(int n) {
  RealVector w = RealVector::Zero(n + 1);
  const Real nn = static_cast<Real>(n);
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (nn * nn - 1.0);
  } else {
    w[0] = w[n] = 1.0 / (nn * nn);
  }
  for (int i = 1; i < n; ++i) {
    const Real theta = kPi * i / nn;
    Real v = 1.0;
    if (n % 2 == 0) {
      for (int k = 1; k < n / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
      v -= std::cos(nn * theta) / (nn * nn - 1.0);
    } else {
      for (int k = 1; k <= (n - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    w[i] = 2.0 * v / nn;
  }
  return w;
}

}  // namespace

ChebGrid::ChebGrid(int n, GridCheck check) : n_(n) {
  if (check == GridCheck::strict) {
    if (n < 8 || n % 2 != 0) {
      throw ConfigError("Chebyshev grid requires an even node count n >= 8, got " + std::to_string(n));
    }
  } else if (n < 2) {
    throw ConfigError("Chebyshev grid requires n >= 2, got " + std::to_string(n));
  }

  const int m = n + 1;
  nodes_.resize(m);
  for (int j = 0; j < m; ++j) nodes_[j] = std::cos(kPi * j / n);
  // Symmetric placement: exact +-1 ends, exact 0 in the middle for even n.
  nodes_[0] = 1.0;
  nodes_[n] = -1.0;
  if (n % 2 == 0) nodes_[n / 2] = 0.0;
  for (int j = 1; j < n / 2 + (n % 2); ++j) nodes_[n - j] = -nodes_[j];

  auto c = [n](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
  d1_ = RealMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      // x_i - x_j written with sines to avoid cancellation near the ends.
      const Real diff = -2.0 * std::sin(kPi * (i + j) / (2.0 * n)) * std::sin(kPi * (i - j) / (2.0 * n));
      const Real sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d1_(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  // Negative-sum trick: rows annihilate constants exactly.
  for (int i = 0; i < m; ++i) d1_(i, i) = -(d1_.row(i).sum() - d1_(i, i));

  d2_ = d1_ * d1_;
  qw_ = clenshaw_curtis_weights(n);

  bary_.resize(m);
  for (int j = 0; j < m; ++j) bary_[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
}

ChebGrid build_grid(int n) { return ChebGrid(n); }

void ChebGrid::check_length(const ModeField& f, const char* what) const {
  if (f.size() != size()) {
    throw ConfigError(std::string(what) + ": field length " + std::to_string(f.size()) +
                      " does not match grid size " + std::to_string(size()));
  }
}

ModeField ChebGrid::differentiate(const ModeField& f, int order) const {
  check_length(f, "differentiate");
  if (order == 1) return d1_ * f;
  if (order == 2) return d2_ * f;
  throw ConfigError("differentiate: order must be 1 or 2");
}

Complex ChebGrid::quad(const ModeField& f) const {
  check_length(f, "quad");
  return (qw_.cast<Complex>().array() * f.array()).sum();
}

Complex ChebGrid::inner(const ModeField& f, const ModeField& g) const {
  check_length(f, "inner");
  check_length(g, "inner");
  Complex s{0.0, 0.0};
  for (int j = 0; j < size(); ++j) s += qw_[j] * std::conj(f[j]) * g[j];
  return s;
}

Real ChebGrid::norm_sq(const ModeField& f) const {
  check_length(f, "norm_sq");
  return (qw_.array() * f.array().abs2()).sum();
}

RealMatrix ChebGrid::interpolation_matrix(std::span<const Real> targets) const {
  const int m = size();
  RealMatrix out = RealMatrix::Zero(static_cast<Eigen::Index>(targets.size()), m);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const Real t = targets[r];
    int hit = -1;
    Real denom = 0.0;
    for (int j = 0; j < m; ++j) {
      const Real d = t - nodes_[j];
      if (d == 0.0) {
        hit = j;
        break;
      }
      const Real q = bary_[j] / d;
      out(static_cast<Eigen::Index>(r), j) = q;
      denom += q;
    }
    if (hit >= 0) {
      out.row(static_cast<Eigen::Index>(r)).setZero();
      out(static_cast<Eigen::Index>(r), hit) = 1.0;
    } else {
      out.row(static_cast<Eigen::Index>(r)) /= denom;
    }
  }
  return out;
}

ComplexMatrix resolved_basis(const ChebGrid& grid, int modes) {
  if (modes < 1 || modes > grid.n() / 2) throw ConfigError("resolved_basis: mode count out of range");
  const int m = grid.size();
  const RealVector sq = grid.qw().array().sqrt();
  RealMatrix b(m, modes);
  for (int p = 1; p <= modes; ++p) {
    for (int i = 0; i < m; ++i) b(i, p - 1) = sq[i] * std::sin(p * kPi * (grid.nodes()[i] + 1.0) / 2.0);
  }
  Eigen::HouseholderQR<RealMatrix> qr(b);
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(m, modes);
  for (int i = 0; i < m; ++i) q.row(i) /= sq[i];
  return q.cast<Complex>();
}

HelmholtzSolver::HelmholtzSolver(const ChebGrid& grid, Real k) : grid_(&grid), k_(k) {
  if (!std::isfinite(k)) throw ConfigError("helmholtz_solve: wavenumber must be finite");
  const int m = grid.size();
  RealMatrix a = grid.d2() - k * k * RealMatrix::Identity(m, m);
  a.row(0).setZero();
  a(0, 0) = 1.0;
  a.row(m - 1).setZero();
  a(m - 1, m - 1) = 1.0;
  lu_.compute(a);
  if (!std::isfinite(lu_.rcond()) || lu_.rcond() < 1e-14) {
    throw NumericalError("helmholtz_solve: singular Dirichlet collocation matrix");
  }
}

ModeField HelmholtzSolver::solve(const ModeField& omega) const {
  grid_->check_length(omega, "helmholtz_solve");
  ModeField rhs = omega;
  rhs[0] = 0.0;
  rhs[rhs.size() - 1] = 0.0;
  ModeField phi = lu_.solve(rhs.real()).cast<Complex>() + kI * lu_.solve(rhs.imag()).cast<Complex>();
  phi[0] = 0.0;
  phi[phi.size() - 1] = 0.0;
  return phi;
}

ModeField HelmholtzSolver::apply_operator(const ModeField& f) const {
  grid_->check_length(f, "apply_operator");
  ModeField out = grid_->d2() * f - (k_ * k_) * f;
  out[0] = 0.0;
  out[out.size() - 1] = 0.0;
  return out;
}

ModeField helmholtz_solve(const ChebGrid& grid, Real k, const ModeField& omega) {
  return HelmholtzSolver(grid, k).solve(omega);
}

}  // namespace couette
