#include "orbitdens/density.hpp"

#include "orbitdens/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace orbitdens {

namespace {

// Interval length form hi - lo + 1.
AffineForm lengthForm(const IntervalSchema& s) { return (s.hi - s.lo).plus(1); }

std::string schemaName(std::size_t i) { return "schema " + std::to_string(i); }

// count/n >= thr, with thr exact.
class RatioThreshold {
 public:
  explicit RatioThreshold(const Rational& thr) {
    const auto& num = numerator(thr);
    const auto& den = denominator(thr);
    if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX) {
      fallback_ = true;
      approx_ = toDouble(thr);
    } else {
      num_ = static_cast<std::int64_t>(num);
      den_ = static_cast<std::int64_t>(den);
    }
  }
  bool met(std::int64_t count, std::int64_t n) const {
    if (fallback_) return static_cast<long double>(count) >= approx_ * static_cast<long double>(n);
    return i128(count) * den_ >= i128(n) * num_;
  }

 private:
  std::int64_t num_ = 0, den_ = 1;
  bool fallback_ = false;
  long double approx_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// GeomIntervalFamily

void GeomIntervalFamily::validate() const {
  if (base < 2) throw MalformedFamilyError("base must be >= 2");
  const int cap = maxSafeK(base);
  for (std::size_t i = 0; i < schemas.size(); ++i) {
    const auto& s = schemas[i];
    if (s.kMin < 0) throw MalformedFamilyError(schemaName(i) + ": kMin must be >= 0");
    if (s.kMin > cap) throw MalformedFamilyError(schemaName(i) + ": kMin beyond the symbolic range");
    if (s.lo.alpha < 0 || s.hi.alpha < 0) throw MalformedFamilyError(schemaName(i) + ": negative b^k coefficient");
    if (s.hi.alpha < s.lo.alpha) throw MalformedFamilyError(schemaName(i) + ": alphaR < alphaL");
    const AffineForm len = lengthForm(s);
    for (int k = s.kMin; k <= cap; ++k)
      if (len.eval(base, k) < 0)
        throw MalformedFamilyError(schemaName(i) + ": L(k) > R(k)+1 at k=" + std::to_string(k));
    // consecutive intervals disjoint: L(k+1) - R(k) - 1 >= 0 eventually
    AffineForm next = s.lo;
    next.gamma += s.lo.beta;
    next.alpha *= base;
    const AffineForm gap = (next - s.hi).plus(-1);
    if (s.lo.alpha == 0 && s.hi.alpha > 0)
      throw UnsupportedStructureError(schemaName(i) + ": intervals nest from a fixed left end");
    if (nonNegativeFrom(gap, base, s.kMin) < 0)
      throw UnsupportedStructureError(schemaName(i) + ": consecutive intervals never become disjoint");
  }
}

GeomIntervalFamily GeomIntervalFamily::translated(std::int64_t c) const {
  GeomIntervalFamily out = *this;
  for (auto& s : out.schemas) {
    s.lo.gamma += c;
    s.hi.gamma += c;
  }
  return out;
}

bool GeomIntervalFamily::thin() const {
  return std::none_of(schemas.begin(), schemas.end(), [](const auto& s) { return s.hi.alpha > s.lo.alpha; });
}

// ---------------------------------------------------------------------------
// IndexSet

IndexSet IndexSet::fromBitmap(Bitmap bits) {
  IndexSet s;
  s.horizon_ = static_cast<std::int64_t>(bits.size());
  s.rep_ = std::move(bits);
  return s;
}

IndexSet IndexSet::fromList(std::vector<std::int64_t> elems, std::int64_t horizon) {
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (elems[i] < 1 || elems[i] > horizon) throw ParameterError("list element outside [1, horizon]");
    if (i > 0 && elems[i] <= elems[i - 1]) throw ParameterError("list must be strictly increasing");
  }
  IndexSet s;
  s.horizon_ = horizon;
  s.rep_ = List{std::move(elems)};
  return s;
}

IndexSet IndexSet::symbolic(GeomIntervalFamily fam) {
  fam.validate();
  IndexSet s;
  s.rep_ = std::move(fam);
  return s;
}

IndexSet IndexSet::materialize(const GeomIntervalFamily& fam, std::int64_t horizon) {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  Bitmap bits(static_cast<std::size_t>(horizon), 0);
  const int cap = maxSafeK(fam.base);
  for (const auto& s : fam.schemas) {
    for (int k = s.kMin; k <= cap; ++k) {
      i128 lo = s.lo.eval(fam.base, k), hi = s.hi.eval(fam.base, k);
      if (lo > horizon) {
        if (s.lo.alpha > 0 || s.lo.beta > 0) break;
        continue;
      }
      lo = std::max<i128>(lo, 1);
      hi = std::min<i128>(hi, horizon);
      for (i128 n = lo; n <= hi; ++n) bits[static_cast<std::size_t>(n - 1)] = 1;
    }
  }
  return fromBitmap(std::move(bits));
}

bool IndexSet::contains(std::int64_t n) const {
  if (const auto* b = std::get_if<Bitmap>(&rep_)) return n >= 1 && n <= horizon_ && (*b)[n - 1];
  if (const auto* l = std::get_if<List>(&rep_)) return std::binary_search(l->elems.begin(), l->elems.end(), n);
  const auto& fam = std::get<GeomIntervalFamily>(rep_);
  const int cap = maxSafeK(fam.base);
  for (const auto& s : fam.schemas)
    for (int k = s.kMin; k <= cap; ++k) {
      i128 lo = s.lo.eval(fam.base, k);
      if (lo > n && (s.lo.alpha > 0 || s.lo.beta > 0)) break;
      if (lo <= n && n <= s.hi.eval(fam.base, k)) return true;
    }
  return false;
}

std::int64_t IndexSet::count() const {
  if (const auto* b = std::get_if<Bitmap>(&rep_)) return std::accumulate(b->begin(), b->end(), std::int64_t{0});
  if (const auto* l = std::get_if<List>(&rep_)) return static_cast<std::int64_t>(l->elems.size());
  throw ModeError("count of a symbolic set is infinite or unbounded");
}

IndexSet::Bitmap IndexSet::bitmap() const {
  if (const auto* b = std::get_if<Bitmap>(&rep_)) return *b;
  if (const auto* l = std::get_if<List>(&rep_)) {
    Bitmap bits(static_cast<std::size_t>(horizon_), 0);
    for (auto n : l->elems) bits[n - 1] = 1;
    return bits;
  }
  throw ModeError("symbolic set has no bitmap; materialize it first");
}

std::vector<std::int64_t> IndexSet::elements() const {
  if (const auto* l = std::get_if<List>(&rep_)) return l->elems;
  std::vector<std::int64_t> out;
  const auto bits = bitmap();
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(static_cast<std::int64_t>(i) + 1);
  return out;
}

std::vector<std::int64_t> IndexSet::prefixCounts() const {
  const auto bits = bitmap();
  std::vector<std::int64_t> pre(bits.size() + 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) pre[i + 1] = pre[i] + bits[i];
  return pre;
}

bool IndexSet::operator==(const IndexSet& o) const {
  if (isSymbolic() || o.isSymbolic()) return isSymbolic() && o.isSymbolic() && family() == o.family();
  return horizon_ == o.horizon_ && bitmap() == o.bitmap();
}

// ---------------------------------------------------------------------------
// Densities

DensityEstimate empiricalDensity(const IndexSet& set, std::int64_t tailWindowStart) {
  if (set.isSymbolic()) throw ModeError("empirical density needs a bitmap or list");
  const std::int64_t horizon = set.horizon();
  if (tailWindowStart < 2 || horizon < 2 * tailWindowStart)
    throw ParameterError("need horizon >= 2*tailWindowStart >= 4 (horizon=" + std::to_string(horizon) +
                         ", tailWindowStart=" + std::to_string(tailWindowStart) + ")");
  const auto pre = set.prefixCounts();
  // track best count/n pairs by cross-multiplication
  std::int64_t loC = pre[tailWindowStart], loN = tailWindowStart;
  std::int64_t hiC = loC, hiN = loN;
  for (std::int64_t n = tailWindowStart + 1; n <= horizon; ++n) {
    const std::int64_t c = pre[n];
    if (i128(c) * loN < i128(loC) * n) loC = c, loN = n;
    if (i128(c) * hiN > i128(hiC) * n) hiC = c, hiN = n;
  }
  DensityEstimate d;
  d.lower = Rational(loC, loN);
  d.upper = Rational(hiC, hiN);
  d.kind = DensityKind::Empirical;
  d.horizon = horizon;
  d.tailWindowStart = tailWindowStart;
  return d;
}

DensityEstimate empiricalDensity(const IndexSet& set) {
  return empiricalDensity(set, defaultTailWindow(set.horizon()));
}

DensityEstimate exactUnionDensity(const GeomIntervalFamily& fam) {
  fam.validate();
  DensityEstimate d;
  d.kind = DensityKind::Exact;
  d.lower = 0;
  d.upper = 0;
  const Rational b(fam.base);

  // Limit picture: S = U_k [alphaL b^k, alphaR b^k], invariant under x -> b x.
  // Clip every scaled interval to one period [1, b].
  std::vector<std::pair<Rational, Rational>> pieces;
  for (const auto& s : fam.schemas) {
    if (s.hi.alpha == s.lo.alpha) continue;  // thin: lengths o(b^k)
    const Rational aL(s.lo.alpha), aR(s.hi.alpha);
    // smallest j with aR * b^j >= 1
    Rational scale = 1;
    while (aR * scale >= 1) scale /= b;
    for (; aL * scale <= b; scale *= b) {
      Rational lo = std::max(Rational(aL * scale), Rational(1));
      Rational hi = std::min(Rational(aR * scale), b);
      if (lo < hi) pieces.emplace_back(lo, hi);
    }
  }
  if (pieces.empty()) return d;
  std::sort(pieces.begin(), pieces.end());
  std::vector<std::pair<Rational, Rational>> comps;
  for (auto& p : pieces) {
    if (!comps.empty() && p.first <= comps.back().second)
      comps.back().second = std::max(comps.back().second, p.second);
    else
      comps.push_back(p);
  }
  Rational period = 0;
  for (const auto& c : comps) period += c.second - c.first;
  const Rational below1 = period / (b - 1);  // measure of S ∩ (0, 1]

  // F(theta) = mu(S ∩ (0, theta]) / theta; extrema at component endpoints.
  std::vector<Rational> cands{Rational(1), b};
  for (const auto& c : comps) {
    cands.push_back(c.first);
    cands.push_back(c.second);
  }
  bool first = true;
  for (const auto& theta : cands) {
    Rational mass = below1;
    for (const auto& c : comps) {
      if (c.first >= theta) break;
      mass += std::min(c.second, theta) - c.first;
    }
    const Rational f = mass / theta;
    if (first || f < d.lower) d.lower = f;
    if (first || f > d.upper) d.upper = f;
    first = false;
  }
  return d;
}

DensityEstimate complementDensity(const DensityEstimate& d) {
  DensityEstimate out = d;
  out.lower = 1 - d.upper;
  out.upper = 1 - d.lower;
  return out;
}

// ---------------------------------------------------------------------------
// Staircase extraction

StaircaseResult extractDensityOneSubset(const std::map<int, IndexSet>& levelSets, StaircaseMode mode,
                                        const Rational& target) {
  if (levelSets.empty()) throw ParameterError("no level sets");
  const std::int64_t horizon = levelSets.begin()->second.horizon();
  std::vector<int> ms;
  std::vector<IndexSet::Bitmap> bits;
  for (const auto& [m, set] : levelSets) {
    if (set.horizon() != horizon) throw ParameterError("level sets must share a horizon");
    ms.push_back(m);
    bits.push_back(set.bitmap());
    if (bits.size() > 1) {
      const auto& prev = bits[bits.size() - 2];
      for (std::size_t i = 0; i < bits.back().size(); ++i)
        if (bits.back()[i] && !prev[i])
          throw ParameterError("level sets must be nested decreasing (level " + std::to_string(m) + ")");
    }
  }

  StaircaseResult res;
  std::int64_t prevN = 0;
  for (std::size_t li = 0; li < ms.size(); ++li) {
    const int m = ms[li];
    const auto& b = bits[li];
    const RatioThreshold thr(target - pow2(-m));
    std::vector<std::int64_t> pre(b.size() + 1, 0);
    for (std::size_t i = 0; i < b.size(); ++i) pre[i + 1] = pre[i] + b[i];

    std::int64_t found = 0;
    if (mode == StaircaseMode::Upper) {
      for (std::int64_t n = prevN + 1; n <= horizon; ++n)
        if (b[n - 1] && thr.met(pre[n], n)) {
          found = n;
          break;
        }
    } else {
      // okFrom[n]: the ratio stays above the bar on [n, horizon]
      std::vector<std::uint8_t> okFrom(static_cast<std::size_t>(horizon) + 2, 0);
      okFrom[horizon + 1] = 1;
      for (std::int64_t n = horizon; n >= 1; --n) okFrom[n] = okFrom[n + 1] && thr.met(pre[n], n);
      for (std::int64_t n = prevN + 1; n <= horizon; ++n)
        if (b[n - 1] && okFrom[n]) {
          found = n;
          break;
        }
    }
    if (found == 0) {
      res.stalled = true;
      res.diagnostic = "staircase stalled at level m=" + std::to_string(m) + " after N=" + std::to_string(prevN);
      break;
    }
    res.levels.push_back(m);
    res.thresholds.push_back(found);
    prevN = found;
  }

  IndexSet::Bitmap out(static_cast<std::size_t>(horizon), 0);
  for (std::size_t st = 0; st < res.levels.size(); ++st) {
    const std::int64_t from = st == 0 ? 1 : res.thresholds[st] + 1;
    const std::int64_t to = st + 1 < res.levels.size() ? res.thresholds[st + 1] : horizon;
    const auto& b = bits[st];
    for (std::int64_t n = from; n <= to; ++n) out[n - 1] = b[n - 1];
  }
  res.set = IndexSet::fromBitmap(std::move(out));
  return res;
}

}  // namespace orbitdens
