#pragma once

#include "orbitdens/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace orbitdens {

/// Integer form alpha*b^k + beta*k + gamma in the block index k.
struct AffineForm {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  std::int64_t gamma = 0;

  i128 eval(std::int64_t base, int k) const;
  /// Throws std::overflow_error if the value leaves int64.
  std::int64_t eval64(std::int64_t base, int k) const;

  AffineForm operator-(const AffineForm& o) const { return {alpha - o.alpha, beta - o.beta, gamma - o.gamma}; }
  AffineForm operator+(const AffineForm& o) const { return {alpha + o.alpha, beta + o.beta, gamma + o.gamma}; }
  AffineForm operator-() const { return {-alpha, -beta, -gamma}; }
  AffineForm plus(std::int64_t c) const { return {alpha, beta, gamma + c}; }
  bool operator==(const AffineForm&) const = default;

  std::string str() const;
};

/// b^k in 128 bits; caller keeps k <= maxSafeK(base).
i128 powBase(std::int64_t base, int k);

/// Largest k with base^(k+1) < 2^100: the scan cap for symbolic checks.
int maxSafeK(std::int64_t base);

/// Sign of the form for all sufficiently large k (lexicographic on alpha, beta, gamma).
int eventualSign(const AffineForm& f);

/// Smallest k0 >= kFrom with f(k) >= 0 for every k in [k0, maxSafeK(base)], or -1 when
/// f is negative at the cap (eventually negative).
int nonNegativeFrom(const AffineForm& f, std::int64_t base, int kFrom);

}  // namespace orbitdens
