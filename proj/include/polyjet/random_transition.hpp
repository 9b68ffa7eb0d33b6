#pragma once

#include <cstdint>

#include "polyjet/chart.hpp"

namespace polyjet {

/// Seeded nonlinear chart change with an exact inverse, for covariance testing.
///
/// Each factor (t and x separately) is a composition of an odd cubic
/// y = v + c v^3 per coordinate (inverted with Cardano's formula), shears
/// y_k = v_k + c v_j^2 or c v_j^3 (d >= 2), and a well-conditioned affine map.
/// Coefficients are kept small so Jacobians on [-1, 1] stay O(1).
TransitionMap random_transition(const JetChart& chart, std::uint64_t seed);

/// Real root of v + c v^3 = y for c > 0, as an expression in y.
Expr cubic_inverse(const Expr& y, double c);

}  // namespace polyjet
