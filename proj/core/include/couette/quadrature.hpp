#pragma once

#include <vector>

#include "couette/common.hpp"

namespace couette {

struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// m-point Gauss–Legendre rule on [-1, 1] (Newton iteration on P_m).
QuadratureRule gauss_legendre(int m);

/// Composite Gauss–Legendre rule on [a, b] for integrands that vary on the
/// scale 1/|k| next to the end `anchor` (which must be a or b). A panel of
/// width min(b - a, 20/|k|) is placed against the anchor and the remainder
/// gets a second panel. Used for the split integrals of the Green's kernel.
QuadratureRule anchored_rule(const QuadratureRule& base, Real a, Real b, Real anchor, Real k);

}  // namespace couette
