#include "couette/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace couette {

QuadratureRule gauss_legendre(int m) {
  if (m < 1) throw ConfigError("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Real z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    Real dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0;
      Real p1 = z;
      for (int l = 2; l <= m; ++l) {
        const Real p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const Real dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const Real w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return rule;
}

namespace {

void append_panel(QuadratureRule& out, const QuadratureRule& base, Real a, Real b) {
  const Real half = 0.5 * (b - a);
  const Real mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    out.nodes.push_back(mid + half * base.nodes[i]);
    out.weights.push_back(half * base.weights[i]);
  }
}

}  // namespace

QuadratureRule anchored_rule(const QuadratureRule& base, Real a, Real b, Real anchor, Real k) {
  QuadratureRule out;
  const Real len = b - a;
  if (len <= 0.0) return out;
  const Real width = std::min(len, 20.0 / std::max(std::abs(k), 1.0));
  if (anchor == a) {
    append_panel(out, base, a, a + width);
    if (width < len) append_panel(out, base, a + width, b);
  } else {
    append_panel(out, base, b - width, b);
    if (width < len) append_panel(out, base, a, b - width);
  }
  return out;
}

}  // namespace couette
