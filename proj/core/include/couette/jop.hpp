#pragma once

#include <algorithm>

#include "couette/cheb.hpp"

namespace couette {

/// Nodal realisation of the singular integral operator
///
///   J_k[f](y) = k/(2i) p.v. int_{-1}^{1} G_k(y, y') f(y') / (y - y') dy'.
///
/// `mat` acts on node values with the quadrature folded in. Entries are
/// purely imaginary and the matrix is odd in k.
struct SingularOperator {
  Real k = 0.0;
  ComplexMatrix mat;

  ModeField apply(const ModeField& f) const { return mat * f; }
};

/// Assembles J_k on the grid.
///
/// Row i subtracts the singular part,
///   p.v. int G(y_i,.) f / (y_i - .) = int [G(y_i,.) f - G_ii f_i] / (y_i - .)
///                                     + G_ii f_i ln((1 + y_i) / (1 - y_i)),
/// and integrates the regular remainder by product integration against the
/// Lagrange cardinals, split at y_i where the remainder jumps. Rows at
/// y = +-1 are zero since G vanishes there.
///
/// Throws ConfigError for k == 0, non-finite k, or n < 32.
SingularOperator assemble_j(const ChebGrid& grid, Real k);

/// L2 -> L2 norm of J on the resolved subspace (quadrature inner product).
Real operator_norm(const SingularOperator& j, const ChebGrid& grid, int modes = kResolvedModes);

/// || d1 J - J d1 || / |k| on resolved functions vanishing at +-1.
Real commutator_norm(const SingularOperator& j, const ChebGrid& grid, int modes = kResolvedModes);

struct AdjointDefect {
  /// || A - A^H ||_2 with A_{ab} = <e_a, J e_b> over the resolved basis.
  Real self_adjoint = 0.0;
  /// max_ij |Re mat_ij|; zero iff conj(J f) = -J conj(f) holds exactly.
  Real real_part = 0.0;

  Real value() const { return std::max(self_adjoint, real_part); }
};

AdjointDefect adjoint_defect(const SingularOperator& j, const ChebGrid& grid, int modes = kResolvedModes);

}  // namespace couette
