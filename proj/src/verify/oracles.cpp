#include "orbitdens/verify/oracles.hpp"

#include "orbitdens/errors.hpp"

#include <cmath>
#include <set>

namespace orbitdens::oracle {

namespace {

std::int64_t ipow(std::int64_t b, int k) {
  std::int64_t r = 1;
  while (k-- > 0) r *= b;
  return r;
}

std::int64_t at(const AffineForm& f, std::int64_t bk, int k) { return f.alpha * bk + f.beta * k + f.gamma; }

}  // namespace

std::vector<std::uint8_t> familyBitmap(const GeomIntervalFamily& fam, std::int64_t horizon) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(horizon), 0);
  for (const auto& s : fam.schemas)
    for (int k = s.kMin;; ++k) {
      const std::int64_t bk = ipow(fam.base, k);
      const std::int64_t lo = at(s.lo, bk, k), hi = at(s.hi, bk, k);
      if (lo > horizon) break;
      for (std::int64_t n = std::max<std::int64_t>(lo, 1); n <= std::min(hi, horizon); ++n) bits[n - 1] = 1;
    }
  return bits;
}

Rational prefixRatio(const std::vector<std::uint8_t>& bits, std::int64_t t) {
  std::int64_t c = 0;
  for (std::int64_t n = 1; n <= t; ++n) c += bits[n - 1];
  return Rational(c, t);
}

Rational weightValue(const PieceGeomWeight& w, std::int64_t j) {
  if (j >= 1) {
    if (w.forward.kind == ForwardLaw::Kind::Reciprocal) return Rational(1, j);
    return pow2(w.forward.slope * j + w.forward.offset);
  }
  const std::int64_t n = -j;
  if (n <= w.base) return pow2(w.baseBandLog2);
  for (int k = 1; ipow(w.base, k) < n; ++k) {
    const std::int64_t bk = ipow(w.base, k);
    for (const auto& b : w.bands)
      if (at(b.lo, bk, k) < n && n <= at(b.hi, bk, k))
        return pow2(b.exponent.nCoef * n + b.exponent.aCoef * bk + b.exponent.kCoef * k + b.exponent.c);
  }
  throw WeightStructureError("oracle: no band holds n=" + std::to_string(n));
}

long double orbitNormPow(const PieceGeomWeight& w, const SparseVector& shifted) {
  long double s = 0;
  for (const auto& [j, c] : shifted.entries())
    s += std::pow(static_cast<long double>(std::fabs(c)), static_cast<long double>(shifted.p())) *
         static_cast<long double>(toDouble(weightValue(w, j)));
  return s;
}

Rational integralPow(const StepWeight& rho, const StepFunction& f, int p) {
  const auto& b = f.breakpoints();
  if (b.empty()) return 0;
  std::set<Rational> cuts(b.begin(), b.end());
  for (Rational z = Rational(static_cast<std::int64_t>(std::floor(toDouble(b.front()))));
       z <= b.back(); z += 1)
    if (z > b.front()) cuts.insert(z);
  Rational total = 0;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    const Rational &a = *it, &c = *std::next(it);
    const Rational mid = (a + c) / 2;
    const double v = f.at(mid);
    if (v == 0.0) continue;
    // mid lies in the unit cell (n-1, n] with n = ceil(mid)
    const auto n = static_cast<std::int64_t>(std::ceil(toDouble(mid)));
    Rational vp = 1;
    for (int i = 0; i < p; ++i) vp *= fromDouble(std::fabs(v));
    total += (c - a) * vp * weightValue(rho.source(), n);
  }
  return total;
}

}  // namespace orbitdens::oracle
