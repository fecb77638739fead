#pragma once

#include "couette/cheb.hpp"

namespace couette {

/// Below this |k| the Green's function uses its k -> 0 limit.
inline constexpr Real kSmallWavenumber = 1e-4;

/// Dirichlet Green's function of (-k^2 + d^2/dy^2) on [-1, 1].
///
///   G_k(y, y') = -sinh(k(1 - max)) sinh(k(1 + min)) / (k sinh 2k)
///
/// evaluated as exponential differences (no overflow at large |k|) and by
/// -(1 - max)(1 + min)/2 when |k| < kSmallWavenumber. G is even in k.
Real greens_function(Real k, Real y, Real yp);

/// G_k sampled on the nodes, plus product-integration weights.
///
/// `values(i, j) = G_k(y_i, y_j)`. `weights(i, j)` integrates G_k(y_i, .)
/// against the j-th Lagrange cardinal polynomial exactly up to rounding: the
/// integral is split at the kink y' = y_i and each side uses Gauss–Legendre
/// panels, so apply_greens is spectrally accurate instead of second order.
struct GreensMatrix {
  Real k = 0.0;
  RealMatrix values;
  RealMatrix weights;
};

/// Throws ConfigError for k == 0 or non-finite k.
GreensMatrix assemble_greens(const ChebGrid& grid, Real k);

/// phi(y_i) = integral of G_k(y_i, y') f(y') dy' for the interpolant of f.
ModeField apply_greens(const GreensMatrix& g, const ChebGrid& grid, const ModeField& f);

/// Discrete delta property of the sampled kernel: max over resolved test
/// functions of || (d2 - k^2) G diag(qw) f - f ||, interior rows only. The
/// pointwise identity does not converge (G has a kink on the diagonal), but
/// on resolved data the defect falls like n^-2.
Real greens_delta_defect(const ChebGrid& grid, Real k, int modes = 8);

}  // namespace couette
