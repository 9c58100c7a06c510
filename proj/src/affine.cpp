#include "orbitdens/affine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace orbitdens {

Rational fromDouble(double x) {
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 53-bit integer mantissa
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  Rational r(m);
  return r * pow2(exp - 53);
}

std::string toString(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

i128 powBase(std::int64_t base, int k) {
  i128 r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

int maxSafeK(std::int64_t base) {
  const i128 cap = i128(1) << 100;
  int k = 0;
  i128 p = base;
  while (p * base < cap) {
    p *= base;
    ++k;
  }
  return k;
}

i128 AffineForm::eval(std::int64_t base, int k) const {
  return i128(alpha) * powBase(base, k) + i128(beta) * k + gamma;
}

std::int64_t AffineForm::eval64(std::int64_t base, int k) const {
  i128 v = eval(base, k);
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw std::overflow_error("affine form exceeds int64 at k=" + std::to_string(k));
  return static_cast<std::int64_t>(v);
}

std::string AffineForm::str() const {
  std::ostringstream os;
  os << alpha << "*b^k" << (beta < 0 ? " - " : " + ") << (beta < 0 ? -beta : beta) << "*k"
     << (gamma < 0 ? " - " : " + ") << (gamma < 0 ? -gamma : gamma);
  return os.str();
}

int eventualSign(const AffineForm& f) {
  for (auto c : {f.alpha, f.beta, f.gamma})
    if (c != 0) return c > 0 ? 1 : -1;
  return 0;
}

int nonNegativeFrom(const AffineForm& f, std::int64_t base, int kFrom) {
  const int cap = maxSafeK(base);
  if (kFrom > cap) kFrom = cap;
  if (f.eval(base, cap) < 0) return -1;
  int k0 = cap;
  while (k0 > kFrom && f.eval(base, k0 - 1) >= 0) --k0;
  return k0;
}

}  // namespace orbitdens
