#pragma once

// Independent reference computations for the verification suite: plain
// loops, linear-domain sums and midpoint refinements, sharing no code with
// the symbolic paths they check.

#include "orbitdens/density.hpp"
#include "orbitdens/semigroup.hpp"
#include "orbitdens/shifts.hpp"

#include <cstdint>
#include <vector>

namespace orbitdens::oracle {

/// Membership of n in [1, horizon] by direct interval enumeration.
std::vector<std::uint8_t> familyBitmap(const GeomIntervalFamily& fam, std::int64_t horizon);

/// #(A ∩ [1, t]) / t.
Rational prefixRatio(const std::vector<std::uint8_t>& bits, std::int64_t t);

/// v_j by reading the band table directly (no block search).
Rational weightValue(const PieceGeomWeight& w, std::int64_t j);

/// ||B^n x||^p as sum |x_i|^p v_{i-n} over the shifted support, long double.
long double orbitNormPow(const PieceGeomWeight& w, const SparseVector& shifted);

/// integral of |f|^p rho over the common refinement of f's breakpoints and the integers.
Rational integralPow(const StepWeight& rho, const StepFunction& f, int p);

}  // namespace orbitdens::oracle
