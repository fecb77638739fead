#pragma once

#include <span>

#include <Eigen/LU>

#include "couette/common.hpp"

namespace couette {

enum class GridCheck { strict, relaxed };

/// Chebyshev–Gauss–Lobatto collocation grid on [-1, 1].
///
/// Nodes are y_j = cos(pi j / n), j = 0..n, so they run from +1 down to -1.
/// d1 uses the closed-form entries with the diagonal fixed by the
/// negative-sum rule; d2 is d1 * d1. Quadrature weights are Clenshaw–Curtis,
/// and every inner product in the library is taken with them.
class ChebGrid {
 public:
  /// Throws ConfigError unless n >= 8 and even (relaxed: n >= 2).
  explicit ChebGrid(int n, GridCheck check = GridCheck::strict);

  int n() const { return n_; }
  int size() const { return n_ + 1; }

  const RealVector& nodes() const { return nodes_; }
  const RealMatrix& d1() const { return d1_; }
  const RealMatrix& d2() const { return d2_; }
  const RealVector& qw() const { return qw_; }

  /// Barycentric weights for polynomial interpolation through the nodes.
  const RealVector& barycentric_weights() const { return bary_; }

  ModeField differentiate(const ModeField& f, int order) const;
  Complex quad(const ModeField& f) const;

  /// <f, g> = sum_j qw_j conj(f_j) g_j.
  Complex inner(const ModeField& f, const ModeField& g) const;
  /// ||f||^2 in the quadrature inner product.
  Real norm_sq(const ModeField& f) const;

  /// Rows evaluate the degree-n interpolant at the given points.
  RealMatrix interpolation_matrix(std::span<const Real> targets) const;

  void check_length(const ModeField& f, const char* what) const;

 private:
  int n_;
  RealVector nodes_;
  RealMatrix d1_;
  RealMatrix d2_;
  RealVector qw_;
  RealVector bary_;
};

ChebGrid build_grid(int n);

/// Default number of Dirichlet sine modes in the resolved test subspace.
inline constexpr int kResolvedModes = 16;

/// qw-orthonormal basis of sin(p pi (y + 1) / 2), p = 1..modes, sampled on
/// the grid. Operator measurements are taken on this subspace: the full
/// nodal matrix is dominated by grid-scale vectors the quadrature does not
/// resolve, so its raw singular values drift with n.
ComplexMatrix resolved_basis(const ChebGrid& grid, int modes = kResolvedModes);

/// Samples a function of y on the grid nodes.
template <class F>
ModeField sample(const ChebGrid& grid, F&& f) {
  ModeField out(grid.size());
  for (int j = 0; j < grid.size(); ++j) out[j] = f(grid.nodes()[j]);
  return out;
}

/// Dirichlet solver for (-k^2 + d^2/dy^2) phi = omega with phi(+-1) = 0.
///
/// Boundary conditions are imposed by replacing the first and last rows of
/// the collocation matrix with identity rows and zero data. (Basis
/// recombination with polynomials vanishing at +-1 would be the alternative.)
/// The LU factorisation is kept so repeated solves at one k are cheap.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const ChebGrid& grid, Real k);

  Real k() const { return k_; }
  ModeField solve(const ModeField& omega) const;

  /// Interior rows of (-k^2 + d2) applied to f; boundary entries are zero.
  ModeField apply_operator(const ModeField& f) const;

 private:
  const ChebGrid* grid_;
  Real k_;
  Eigen::PartialPivLU<RealMatrix> lu_;
};

ModeField helmholtz_solve(const ChebGrid& grid, Real k, const ModeField& omega);

}  // namespace couette
