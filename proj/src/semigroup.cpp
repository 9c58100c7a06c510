#include "orbitdens/semigroup.hpp"

#include "orbitdens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace orbitdens {

namespace {

using LD = long double;

std::int64_t floorR(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return static_cast<std::int64_t>(q);
}
std::int64_t ceilR(const Rational& r) { return -floorR(-r); }
std::int64_t floorN(const Rational& r) { return floorR(r); }
std::int64_t floorN(LD x) { return static_cast<std::int64_t>(std::floor(x)); }
std::int64_t ceilN(const Rational& r) { return ceilR(r); }
std::int64_t ceilN(LD x) { return static_cast<std::int64_t>(std::ceil(x)); }

template <class Num> Num numOf(const Rational& r);
template <> Rational numOf<Rational>(const Rational& r) { return r; }
template <> LD numOf<LD>(const Rational& r) { return static_cast<LD>(toDouble(r)); }

template <class Num> Num weightNum(const WeightValue& v);
template <> Rational weightNum<Rational>(const WeightValue& v) { return v.exact(); }
template <> LD weightNum<LD>(const WeightValue& v) {
  return v.kind == WeightValue::Kind::Dyadic ? std::exp2l(static_cast<LD>(v.exponent))
                                             : 1.0L / static_cast<LD>(v.denominator);
}

template <class Num> Num absPow(double v, int p);
template <> Rational absPow<Rational>(double v, int p) { return powInt(fromDouble(std::fabs(v)), p); }
template <> LD absPow<LD>(double v, int p) { return std::pow(static_cast<LD>(std::fabs(v)), p); }

int checkIntP(double p) {
  if (!(p >= 1) || p != std::floor(p) || p > 64) throw ParameterError("exact computation needs integer p in [1, 64]");
  return static_cast<int>(p);
}

// Breakpoints and values as Num, with per-cell |value|^p.
template <class Num>
struct Cells {
  std::vector<Num> bps;
  std::vector<Num> mass;  // |value|^p
};

template <class Num>
Cells<Num> cellsOf(const StepFunction& f, int p) {
  Cells<Num> c;
  for (const auto& b : f.breakpoints()) c.bps.push_back(numOf<Num>(b));
  for (double v : f.values()) c.mass.push_back(absPow<Num>(v, p));
  return c;
}

// integral of |f(s+t)|^p rho(s) ds.
template <class Num>
Num normPowAt(const StepWeight& rho, const Cells<Num>& c, const Num& t) {
  Num total = 0;
  const bool half = rho.side() == LineSide::HalfLine;
  for (std::size_t i = 0; i + 1 < c.bps.size(); ++i) {
    if (c.mass[i] == 0) continue;
    Num L = c.bps[i] - t, R = c.bps[i + 1] - t;
    if (half) {
      if (R <= 0) continue;
      if (L < 0) L = 0;
    }
    Num acc = 0;
    for (std::int64_t n = floorN(L) + 1; n <= ceilN(R); ++n) {
      const Num lo = L > Num(n - 1) ? L : Num(n - 1);
      const Num hi = R < Num(n) ? R : Num(n);
      if (hi > lo) acc += (hi - lo) * weightNum<Num>(rho.cell(n));
    }
    total += acc * c.mass[i];
  }
  return total;
}

template <class Num>
struct Profile {
  std::vector<Num> t;
  std::vector<Num> value;
};

// Event times: t = u + phi, phi the fractional parts of the breakpoints (and 0).
template <class Num>
Profile<Num> profileOf(const StepWeight& rho, const StepFunction& f, int p, std::int64_t horizon) {
  std::set<Rational> fr{Rational(0)};
  for (const auto& b : f.breakpoints()) fr.insert(b - floorR(b));
  std::vector<Num> phis;
  for (const auto& r : fr) phis.push_back(numOf<Num>(r));
  const auto cells = cellsOf<Num>(f, p);
  Profile<Num> prof;
  prof.t.reserve(static_cast<std::size_t>(horizon) * phis.size() + 1);
  prof.value.reserve(prof.t.capacity());
  for (std::int64_t u = 0; u < horizon; ++u)
    for (const auto& ph : phis) {
      const Num t = Num(u) + ph;
      prof.t.push_back(t);
      prof.value.push_back(normPowAt(rho, cells, t));
    }
  prof.t.push_back(Num(horizon));
  prof.value.push_back(normPowAt(rho, cells, Num(horizon)));
  return prof;
}

template <class Num>
struct LevelSet {
  std::vector<std::pair<Num, Num>> iv;
  std::vector<Num> cum;
  Num horizon = 0;

  void add(const Num& a, const Num& b) {
    if (!(b > a)) return;
    if (!iv.empty() && iv.back().second == a) {
      iv.back().second = b;
      return;
    }
    iv.emplace_back(a, b);
  }
  void finish() {
    cum.assign(iv.size() + 1, Num(0));
    for (std::size_t i = 0; i < iv.size(); ++i) cum[i + 1] = cum[i] + (iv[i].second - iv[i].first);
  }
  Num measureUpTo(const Num& T) const {
    auto it = std::upper_bound(iv.begin(), iv.end(), T, [](const Num& x, const auto& in) { return x < in.first; });
    if (it == iv.begin()) return Num(0);
    const std::size_t i = static_cast<std::size_t>(it - iv.begin()) - 1;
    const Num end = T < iv[i].second ? T : iv[i].second;
    return cum[i] + (end - iv[i].first);
  }
};

template <class Num>
LevelSet<Num> levelOf(const Profile<Num>& prof, const Num& theta, Direction dir) {
  LevelSet<Num> s;
  s.horizon = prof.t.back();
  const bool below = dir == Direction::Below;
  for (std::size_t i = 0; i + 1 < prof.t.size(); ++i) {
    const Num &t0 = prof.t[i], &t1 = prof.t[i + 1], &n0 = prof.value[i], &n1 = prof.value[i + 1];
    const bool in0 = below ? n0 < theta : !(n0 < theta);
    const bool in1 = below ? n1 < theta : !(n1 < theta);
    if (in0 && in1) {
      s.add(t0, t1);
    } else if (in0 != in1) {
      const Num cross = t0 + (theta - n0) * (t1 - t0) / (n1 - n0);
      if (in0) s.add(t0, cross);
      else s.add(cross, t1);
    }
  }
  s.finish();
  return s;
}

// min/max of measure/T over T in [tail, horizon]; extremes sit at interval ends.
template <class Num>
std::pair<Num, Num> densityRange(const LevelSet<Num>& s, const Num& tail) {
  std::vector<Num> cand{tail, s.horizon};
  for (const auto& [a, b] : s.iv) {
    if (a >= tail && a <= s.horizon) cand.push_back(a);
    if (b >= tail && b <= s.horizon) cand.push_back(b);
  }
  Num lo = 2, hi = -1;
  for (const auto& T : cand) {
    const Num r = s.measureUpTo(T) / T;
    if (r < lo) lo = r;
    if (r > hi) hi = r;
  }
  return {lo, hi};
}

}  // namespace

// ---------------------------------------------------------------------------

StepWeight::StepWeight(LineSide side, PieceGeomWeight source) : side_(side), source_(std::move(source)) {
  if (side_ == LineSide::Line && source_.side != Side::Bilateral)
    throw ParameterError("line-side step weights need a bilateral source");
  ratioBound_ = lintWeight(source_, 12).ratioBound;
}

WeightValue StepWeight::cell(std::int64_t n) const {
  if (side_ == LineSide::HalfLine && n < 1) throw ParameterError("half-line cells start at n = 1");
  return evalWeightExact(source_, n);
}

StepFunction::StepFunction(LineSide side, std::vector<Rational> breakpoints, std::vector<double> values)
    : side_(side) {
  if (breakpoints.empty() != values.empty() || (!values.empty() && values.size() + 1 != breakpoints.size()))
    throw ParameterError("step function needs one value per cell");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1])) throw ParameterError("breakpoints must increase strictly");
  if (side == LineSide::HalfLine && !breakpoints.empty() && breakpoints.front() < 0)
    throw ParameterError("half-line step functions live on [0, inf)");
  for (double v : values)
    if (!std::isfinite(v)) throw ParameterError("step function values must be finite");
  // canonical form: no zero cells at the ends, equal neighbours merged
  std::size_t a = 0, b = values.size();
  while (a < b && values[a] == 0.0) ++a;
  while (b > a && values[b - 1] == 0.0) --b;
  if (a == b) return;
  bps_.push_back(breakpoints[a]);
  for (std::size_t i = a; i < b; ++i) {
    if (!vals_.empty() && vals_.back() == values[i]) {
      bps_.back() = breakpoints[i + 1];
      continue;
    }
    vals_.push_back(values[i]);
    bps_.push_back(breakpoints[i + 1]);
  }
}

StepFunction StepFunction::indicator(LineSide side, const Rational& a, const Rational& b, double value) {
  return StepFunction(side, {a, b}, {value});
}

bool StepFunction::integerBreakpoints() const {
  return std::all_of(bps_.begin(), bps_.end(), [](const Rational& r) { return denominator(r) == 1; });
}

double StepFunction::at(const Rational& x) const {
  if (vals_.empty() || x < bps_.front() || x >= bps_.back()) return 0.0;
  auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
  return vals_[static_cast<std::size_t>(it - bps_.begin()) - 1];
}

AdmissibilityResult admissibilityCheck(const StepWeight& rho, double M, double omega, std::int64_t windowLo,
                                       std::int64_t windowHi) {
  if (!(M >= 1) || !(omega > 0)) throw ParameterError("need M >= 1 and omega > 0");
  if (windowHi < windowLo) throw ParameterError("empty window");
  if (rho.side() == LineSide::HalfLine) windowLo = std::max<std::int64_t>(windowLo, 1);
  std::vector<double> lv;
  for (std::int64_t n = windowLo; n <= windowHi; ++n) lv.push_back(rho.cell(n).log().log2());
  const double lm = std::log2(M), rate = omega / std::log(2.0);
  AdmissibilityResult res;
  const std::size_t W = lv.size();
  for (std::size_t a = 0; a < W; ++a)
    for (std::size_t b = a; b < W; ++b) {
      // s in cell a, s + t in cell b: smallest t is max(0, b - a - 1)
      const double lhs = lv[a] - lv[b];
      const double rhs = lm + rate * static_cast<double>(b > a ? b - a - 1 : 0);
      if (lhs > rhs + 1e-12) {
        res.pass = false;
        res.witness = {windowLo + static_cast<std::int64_t>(a), windowLo + static_cast<std::int64_t>(b)};
        res.lhsLog2 = lhs;
        res.rhsLog2 = rhs;
        return res;
      }
    }
  return res;
}

StepFunction translate(const StepFunction& f, const Rational& t) {
  if (t < 0) throw ParameterError("translation needs t >= 0");
  std::vector<Rational> bps;
  std::vector<double> vals;
  const auto& fb = f.breakpoints();
  for (std::size_t i = 0; i + 1 < fb.size(); ++i) {
    Rational L = fb[i] - t, R = fb[i + 1] - t;
    if (f.side() == LineSide::HalfLine) {
      if (R <= 0) continue;
      if (L < 0) L = 0;
    }
    if (bps.empty()) bps.push_back(L);
    vals.push_back(f.values()[i]);
    bps.push_back(R);
  }
  return StepFunction(f.side(), std::move(bps), std::move(vals));
}

Rational semigroupNormPow(const StepWeight& rho, const StepFunction& f, const Rational& t, int p) {
  if (t < 0) throw ParameterError("translation needs t >= 0");
  return normPowAt(rho, cellsOf<Rational>(f, checkIntP(p)), t);
}

Rational semigroupNormPowTranslated(const StepWeight& rho, const StepFunction& f, const Rational& t, int p) {
  return normPowAt(rho, cellsOf<Rational>(translate(f, t), checkIntP(p)), Rational(0));
}

LogNorm semigroupNorm(const StepWeight& rho, const StepFunction& f, const Rational& t, double p) {
  if (!(p >= 1)) throw ParameterError("p must be >= 1");
  if (p == std::floor(p) && p <= 64) {
    const Rational v = semigroupNormPow(rho, f, t, static_cast<int>(p));
    if (v == 0) return LogNorm::zero();
    const double l = std::log2(toDouble(numerator(v))) - std::log2(toDouble(denominator(v)));
    return LogNorm::fromLog2(l / p);
  }
  const StepFunction g = translate(f, t);
  std::vector<LogNorm> terms;
  for (std::size_t i = 0; i + 1 < g.breakpoints().size(); ++i) {
    const double val = g.values()[i];
    if (val == 0.0) continue;
    const Rational &L = g.breakpoints()[i], &R = g.breakpoints()[i + 1];
    for (std::int64_t n = floorR(L) + 1; n <= ceilR(R); ++n) {
      const Rational len = std::min(R, Rational(n)) - std::max(L, Rational(n - 1));
      if (len <= 0) continue;
      terms.push_back(LogNorm::fromLog2(p * std::log2(std::fabs(val)) + std::log2(toDouble(len)) +
                                        rho.cell(n).log().log2()));
    }
  }
  return logSum(terms).pow(1.0 / p);
}

std::map<std::int64_t, Rational> blockMasses(const StepFunction& f, int p) {
  checkIntP(p);
  std::map<std::int64_t, Rational> m;
  const auto& b = f.breakpoints();
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const Rational w = powInt(fromDouble(std::fabs(f.values()[i])), p);
    if (w == 0) continue;
    for (std::int64_t n = floorR(b[i]) + 1; n <= ceilR(b[i + 1]); ++n) {
      const Rational len = std::min(b[i + 1], Rational(n)) - std::max(b[i], Rational(n - 1));
      if (len > 0) m[n] += len * w;
    }
  }
  return m;
}

SparseVector blockEmbed(const StepFunction& f, double p) {
  std::map<std::int64_t, Rational> masses;
  if (p == std::floor(p) && p <= 64) {
    masses = blockMasses(f, static_cast<int>(p));
  } else {
    const auto& b = f.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      for (std::int64_t n = floorR(b[i]) + 1; n <= ceilR(b[i + 1]); ++n) {
        const Rational len = std::min(b[i + 1], Rational(n)) - std::max(b[i], Rational(n - 1));
        if (len > 0) masses[n] += len * fromDouble(std::pow(std::fabs(f.values()[i]), p));
      }
  }
  std::map<std::int64_t, double> e;
  for (const auto& [n, m] : masses) e[n] = std::pow(toDouble(m), 1.0 / p);
  return SparseVector(f.side() == LineSide::Line ? Side::Bilateral : Side::Unilateral, p, std::move(e));
}

NormProfile normProfile(const StepWeight& rho, const StepFunction& f, int p, std::int64_t horizon) {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  auto pr = profileOf<Rational>(rho, f, checkIntP(p), horizon);
  return NormProfile{std::move(pr.t), std::move(pr.value)};
}

Rational ContinuousSet::measureUpTo(const Rational& T) const {
  LevelSet<Rational> s;
  s.iv = intervals;
  s.cum = cumulative;
  return s.measureUpTo(T);
}

ContinuousSet continuousLevelSet(const NormProfile& prof, const Rational& theta, Direction dir) {
  if (prof.t.size() < 2) throw ParameterError("profile needs at least two points");
  auto s = levelOf(Profile<Rational>{prof.t, prof.value}, theta, dir);
  return ContinuousSet{std::move(s.iv), std::move(s.cum), prof.t.back()};
}

DensityEstimate continuousDensity(const ContinuousSet& set, const Rational& tailStart) {
  if (!(tailStart > 0) || tailStart > set.horizon) throw ParameterError("tail start must lie in (0, horizon]");
  LevelSet<Rational> s;
  s.iv = set.intervals;
  s.cum = set.cumulative;
  s.horizon = set.horizon;
  auto [lo, hi] = densityRange(s, tailStart);
  DensityEstimate d{lo, hi, DensityKind::Empirical, floorR(set.horizon), floorR(tailStart)};
  return d;
}

namespace {

LevelSet<LD> fastLevelSet(const StepWeight& rho, const StepFunction& f, LogNorm threshold, Direction dir,
                          std::int64_t horizon, int p) {
  const auto prof = profileOf<LD>(rho, f, p, horizon);
  const LD theta = std::exp2l(static_cast<LD>(threshold.log2()) * p);
  return levelOf(prof, theta, dir);
}

}  // namespace

DensityEstimate continuousLevelDensity(const StepWeight& rho, const StepFunction& f, LogNorm threshold,
                                       Direction dir, LevelMode mode, std::int64_t horizon, int p) {
  checkIntP(p);
  if (threshold.isZero()) throw ParameterError("threshold must be > 0");
  if (dir == Direction::AtLeast && f.isZero()) throw ParameterError("atLeast level sets need f nonzero");
  if (mode == LevelMode::ExactSymbolic) {
    if (!f.integerBreakpoints()) throw ModeError("exact continuous densities need integer breakpoints");
    if (rho.side() == LineSide::HalfLine || f.isZero()) {
      // T_t f = 0 for large t
      const Rational v = dir == Direction::Below ? Rational(1) : Rational(0);
      return DensityEstimate{v, v, DensityKind::Exact, std::nullopt, std::nullopt};
    }
    const LevelSetSpec spec{blockEmbed(f, p), threshold, dir};
    return levelSetDensity(rho.source(), spec, LevelMode::ExactSymbolic, horizon);
  }
  if (horizon < 64) throw ParameterError("horizon must be >= 64");
  const auto s = fastLevelSet(rho, f, threshold, dir, horizon, p);
  const std::int64_t tail = defaultTailWindow(horizon);
  auto [lo, hi] = densityRange(s, static_cast<LD>(tail));
  return DensityEstimate{fromDouble(static_cast<double>(lo)), fromDouble(static_cast<double>(hi)),
                         DensityKind::Empirical, horizon, tail};
}

std::vector<double> continuousPrefixRatios(const StepWeight& rho, const StepFunction& f, LogNorm threshold,
                                           Direction dir, std::int64_t horizon, const std::vector<std::int64_t>& at,
                                           int p) {
  checkIntP(p);
  const auto s = fastLevelSet(rho, f, threshold, dir, horizon, p);
  std::vector<double> out;
  for (auto T : at) {
    if (T < 1 || T > horizon) throw ParameterError("prefix time outside [1, horizon]");
    out.push_back(static_cast<double>(s.measureUpTo(static_cast<LD>(T)) / static_cast<LD>(T)));
  }
  return out;
}

CsBound computeCs(const StepWeight& rho, const Rational& s, std::int64_t windowLo, std::int64_t windowHi) {
  if (!(s > 0)) throw ParameterError("s must be > 0");
  if (rho.side() == LineSide::HalfLine) windowLo = std::max<std::int64_t>(windowLo, 1);
  const std::int64_t span = ceilR(s);
  std::vector<double> lv;
  for (std::int64_t n = windowLo; n <= windowHi; ++n) lv.push_back(rho.cell(n).log().log2());
  double best = 0;  // t = 0 gives ratio 1
  std::int64_t ba = windowLo, bb = windowLo;
  for (std::size_t a = 0; a < lv.size(); ++a)
    for (std::size_t d = 1; d <= static_cast<std::size_t>(span) && a + d < lv.size(); ++d)
      if (lv[a] - lv[a + d] > best) {
        best = lv[a] - lv[a + d];
        ba = windowLo + static_cast<std::int64_t>(a);
        bb = ba + static_cast<std::int64_t>(d);
      }
  CsBound c;
  c.windowSup = rho.cell(ba).exact() / rho.cell(bb).exact();
  c.cap = powInt(fromDouble(rho.ratioBound()), static_cast<unsigned>(span));
  c.capActive = c.cap >= c.windowSup;
  c.csPow = c.capActive ? c.cap : c.windowSup;
  return c;
}

bool BridgeReport::pass() const {
  return !inequalities.empty() &&
         std::all_of(inequalities.begin(), inequalities.end(), [](const auto& q) { return q.holds && q.pointwise; });
}

BridgeReport densBridgeCheck(const StepWeight& rho, const StepFunction& f, const Rational& s, double eps,
                             std::int64_t horizon, int p) {
  if (!(s > 0)) throw ParameterError("s must be > 0");
  if (Rational(horizon) < 10 * s) throw ParameterError("horizon must be >= 10 s");
  if (!(eps > 0)) throw ParameterError("eps must be > 0");
  checkIntP(p);
  BridgeReport rep;
  rep.s = s;
  rep.eps = eps;
  rep.horizon = horizon;

  std::int64_t lo = 1, hi = 2;
  if (!f.isZero()) {
    hi = ceilR(f.breakpoints().back()) + 1;
    lo = floorR(f.breakpoints().front()) - horizon - ceilR(s) - 1;
  }
  rep.cs = computeCs(rho, s, lo, hi);

  const Rational epsP = powInt(fromDouble(eps), p);
  const Rational epsCP = epsP * rep.cs.csPow;
  const auto prof = profileOf<Rational>(rho, f, p, horizon);
  const auto aEps = levelOf(prof, epsP, Direction::Below);
  const auto aCEps = levelOf(prof, epsCP, Direction::Below);

  const auto cells = cellsOf<Rational>(f, p);
  const std::int64_t Jmax = floorR(Rational(horizon) / s);
  std::vector<std::uint8_t> dEps(Jmax + 1), dC(Jmax + 1);
  for (std::int64_t j = 0; j <= Jmax; ++j) {
    const Rational v = normPowAt(rho, cells, Rational(s * j));
    dEps[j] = v < epsP;
    dC[j] = v < epsCP;
  }

  const std::int64_t tail = std::max<std::int64_t>(1, Jmax / 8);
  Rational aLo = 2, aHi = -1, dcLo = 2, dcHi = -1, deLo = 2, deHi = -1, acLo = 2, acHi = -1;
  bool point1 = true, point2 = true;
  std::int64_t cntC = 0, cntE = 0;  // #(D_Ceps ∩ [1,J]), #(D_eps ∩ [0,J-1])
  for (std::int64_t J = 1; J <= Jmax; ++J) {
    cntC += dC[J];
    cntE += dEps[J - 1];
    const Rational T = s * J;
    const Rational m1 = aEps.measureUpTo(T), m2 = aCEps.measureUpTo(T);
    if (m1 > s * cntC) point1 = false;
    if (s * cntE > m2) point2 = false;
    if (J < tail) continue;
    const Rational r1 = m1 / T, r2 = Rational(cntC, J), r3 = Rational(cntE, J), r4 = m2 / T;
    aLo = std::min(aLo, r1), aHi = std::max(aHi, r1);
    dcLo = std::min(dcLo, r2), dcHi = std::max(dcHi, r2);
    deLo = std::min(deLo, r3), deHi = std::max(deHi, r3);
    acLo = std::min(acLo, r4), acHi = std::max(acHi, r4);
  }
  rep.inequalities = {
      {"lDens(A_eps) <= ldens(D_Cs*eps)", aLo, dcLo, aLo <= dcLo, point1},
      {"uDens(A_eps) <= udens(D_Cs*eps)", aHi, dcHi, aHi <= dcHi, point1},
      {"ldens(D_eps) <= lDens(A_Cs*eps)", deLo, acLo, deLo <= acLo, point2},
      {"udens(D_eps) <= uDens(A_Cs*eps)", deHi, acHi, deHi <= acHi, point2},
  };
  return rep;
}

}  // namespace orbitdens
