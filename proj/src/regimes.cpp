#include "orbitdens/regimes.hpp"

#include "orbitdens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orbitdens {

namespace {

constexpr double kTol = 1e-3;
const char* kProbeCaveat = "finite-support probes stand in for hypercyclic vectors";

bool isIntegral(double x) { return std::isfinite(x) && x == std::floor(x); }

// Smallest integer e with 2^e * S >= R^p, S = sum |c_i|^p 2^(-s i).
std::int64_t smallestExponent(const SparseVector& x, std::int64_t s, double thresholdLog2) {
  const double p = x.p();
  if (isIntegral(p) && isIntegral(thresholdLog2) && std::fabs(thresholdLog2 * p) < 1e6) {
    Rational S = 0;
    for (const auto& [i, c] : x.entries()) S += powInt(fromDouble(std::fabs(c)), static_cast<int>(p)) * pow2(-s * i);
    const Rational target = pow2(static_cast<std::int64_t>(thresholdLog2 * p));
    std::int64_t e = static_cast<std::int64_t>(std::ceil(p * thresholdLog2 - std::log2(toDouble(S))));
    while (pow2(e) * S < target) ++e;
    while (pow2(e - 1) * S >= target) --e;
    return e;
  }
  double acc = 0;
  std::vector<LogNorm> terms;
  for (const auto& [i, c] : x.entries())
    terms.push_back(LogNorm::fromLog2(p * std::log2(std::fabs(c)) - static_cast<double>(s * i)));
  acc = logSum(terms).log2();
  return static_cast<std::int64_t>(std::ceil(p * thresholdLog2 - acc));
}

AffineForm constForm(std::int64_t c) { return {0, 0, c}; }

// Interval [left, right] picked as the eventual max / min of two candidates.
struct Choice {
  AffineForm form;
  int kFrom = 0;  // -1 if never valid
};

Choice eventualMax(const AffineForm& a, const AffineForm& b, std::int64_t base, int kFrom) {
  const AffineForm d = a - b;
  if (eventualSign(d) >= 0) return {a, nonNegativeFrom(d, base, kFrom)};
  return {b, nonNegativeFrom(-d, base, kFrom)};
}

Choice eventualMin(const AffineForm& a, const AffineForm& b, std::int64_t base, int kFrom) {
  const AffineForm d = b - a;
  if (eventualSign(d) >= 0) return {a, nonNegativeFrom(d, base, kFrom)};
  return {b, nonNegativeFrom(-d, base, kFrom)};
}

Rational ratFromDouble(double v) { return fromDouble(v); }

bool hasOne(const DensityEstimate& d, bool lowerSide) {
  const Rational& r = lowerSide ? d.lower : d.upper;
  if (d.kind == DensityKind::Exact) return r == 1;
  return toDouble(r) >= 1 - kTol;
}

std::optional<std::int64_t> hypercyclicityEvidence(const PieceGeomWeight& w, double p) {
  constexpr std::int64_t horizon = 262144;
  if (w.side == Side::Bilateral) return hypercyclicityProbe(w, 1, 0.125, horizon, p);
  return unilateralHCProbe(w, 0.125, horizon, p);
}

std::string fmtRational(const Rational& r) { return toString(r); }

}  // namespace

Ladders Ladders::dyadic(int depth) {
  Ladders l;
  for (int m = 1; m <= depth; ++m) l.belowLog2.push_back(-m);
  for (int m = 0; m <= depth; ++m) l.atLeastLog2.push_back(m);
  return l;
}

std::string describe(const SparseVector& x) {
  if (x.isZero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [j, c] : x.entries()) {
    if (!first) os << (c < 0 ? "-" : "+");
    else if (c < 0) os << "-";
    first = false;
    if (std::fabs(c) != 1.0) os << std::fabs(c) << "*";
    os << "e_" << j;
  }
  return os.str();
}

std::string regimeName(Regime r) {
  switch (r) {
    case Regime::One: return "1";
    case Regime::Two: return "2";
    case Regime::Three: return "3";
    case Regime::Four: return "4";
    default: return "inconclusive";
  }
}

bool supportsExact(const PieceGeomWeight& w) {
  if (w.side == Side::Unilateral) return true;
  return std::all_of(w.bands.begin(), w.bands.end(),
                     [](const WeightBand& b) { return b.exponent.nCoef >= -1 && b.exponent.nCoef <= 1; });
}

// ---------------------------------------------------------------------------
// Level sets

GeomIntervalFamily levelSetFamily(const PieceGeomWeight& w, const LevelSetSpec& spec) {
  if (w.side != Side::Bilateral || !supportsExact(w))
    throw ModeError("symbolic level sets need bilateral weights with band slopes in {-1, 0, 1}");
  const auto& x = spec.probe;
  if (x.isZero()) throw ModeError("symbolic level sets need a nonzero probe");
  if (spec.threshold.isZero()) throw ParameterError("threshold must be > 0");
  const double r = spec.threshold.log2();
  const bool below = spec.direction == Direction::Below;

  std::map<std::int64_t, std::int64_t> tBySlope;
  GeomIntervalFamily fam;
  fam.base = w.base;
  for (const auto& band : w.bands) {
    const std::int64_t s = band.exponent.nCoef;
    if (!tBySlope.count(s)) tBySlope[s] = smallestExponent(x, s, r);
    const std::int64_t t = tBySlope[s];
    const AffineForm g{band.exponent.aCoef, band.exponent.kCoef, band.exponent.c};
    const AffineForm lo = band.lo.plus(1), hi = band.hi;
    Choice left{lo, 1}, right{hi, 1};
    if (s == 0) {
      const AffineForm f = below ? constForm(t - 1) - g : g - constForm(t);
      if (eventualSign(f) < 0) continue;
      const int k0 = nonNegativeFrom(f, w.base, 1);
      if (k0 < 0) continue;
      left.kFrom = right.kFrom = k0;
    } else if ((s == 1) == below) {
      // m <= U
      const AffineForm U = s == 1 ? constForm(t - 1) - g : g - constForm(t);
      right = eventualMin(hi, U, w.base, 1);
    } else {
      // m >= L
      const AffineForm L = s == 1 ? constForm(t) - g : g - constForm(t - 1);
      left = eventualMax(lo, L, w.base, 1);
    }
    if (left.kFrom < 0 || right.kFrom < 0) continue;
    const AffineForm len = (right.form - left.form).plus(1);
    if (eventualSign(len) < 0) continue;
    const int kLen = nonNegativeFrom(len, w.base, 1);
    if (kLen < 0) continue;
    if (right.form.alpha == left.form.alpha) continue;  // o(b^k) pieces carry no density
    fam.schemas.push_back({std::max({left.kFrom, right.kFrom, kLen, 1}), left.form, right.form});
  }
  return fam.translated(x.entries().begin()->first);
}

IndexSet levelSetIndex(const std::vector<LogNorm>& norms, LogNorm threshold, Direction dir) {
  IndexSet::Bitmap bits(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i)
    bits[i] = dir == Direction::Below ? norms[i] < threshold : norms[i] >= threshold;
  return IndexSet::fromBitmap(std::move(bits));
}

IndexSet levelSetIndex(const PieceGeomWeight& w, const LevelSetSpec& spec, std::int64_t horizon) {
  return levelSetIndex(orbitNorms(w, spec.probe, horizon), spec.threshold, spec.direction);
}

DensityEstimate levelSetDensity(const PieceGeomWeight& w, const LevelSetSpec& spec, LevelMode mode,
                                std::int64_t horizon) {
  if (spec.threshold.isZero()) throw ParameterError("threshold must be > 0");
  if (mode == LevelMode::ExactSymbolic) {
    if (!supportsExact(w)) throw ModeError("exact level sets unsupported for weight '" + w.name + "'");
    if (w.side == Side::Unilateral) {
      // B^n x = 0 once n passes the support
      const Rational v = spec.direction == Direction::Below ? Rational(1) : Rational(0);
      return DensityEstimate{v, v, DensityKind::Exact, std::nullopt, std::nullopt};
    }
    return exactUnionDensity(levelSetFamily(w, spec));
  }
  return empiricalDensity(levelSetIndex(w, spec, horizon));
}

// ---------------------------------------------------------------------------
// c(T)

CEstimate estimateC(const PieceGeomWeight& w, const std::vector<SparseVector>& probes, const Ladders& ladders,
                    LevelMode mode, std::int64_t horizon) {
  if (probes.empty()) throw ParameterError("estimateC needs at least one probe");
  CEstimate est;
  est.kind = mode == LevelMode::ExactSymbolic ? DensityKind::Exact : DensityKind::Empirical;
  est.cLo = 0;
  Rational maxLow = 0;
  bool haveLo = false, haveHi = false;
  for (const auto& x : probes) {
    std::vector<LogNorm> norms;
    if (mode == LevelMode::Empirical) norms = orbitNorms(w, x, horizon);
    auto density = [&](double rl, Direction dir) {
      const LevelSetSpec spec{x, LogNorm::fromLog2(rl), dir};
      if (mode == LevelMode::Empirical) return empiricalDensity(levelSetIndex(norms, spec.threshold, dir));
      return levelSetDensity(w, spec, mode, horizon);
    };
    for (int r : ladders.belowLog2) {
      auto d = density(r, Direction::Below);
      if (!haveLo || d.upper > est.cLo) {
        est.cLo = d.upper;
        est.loWitness = {describe(x), double(r), Direction::Below, d};
        haveLo = true;
      }
    }
    for (int r : ladders.atLeastLog2) {
      auto d = density(r, Direction::AtLeast);
      if (!haveHi || d.lower > maxLow) {
        maxLow = d.lower;
        est.hiWitness = {describe(x), double(r), Direction::AtLeast, d};
        haveHi = true;
      }
    }
  }
  est.cHi = 1 - maxLow;
  est.caveats.push_back(kProbeCaveat);
  if (est.kind == DensityKind::Empirical)
    est.caveats.push_back("empirical densities at horizon " + std::to_string(horizon));
  if (!hypercyclicityEvidence(w, probes.front().p())) est.caveats.push_back("operator not hypercyclic");
  if (est.cLo > est.cHi) {
    const bool hard = est.kind == DensityKind::Exact || toDouble(est.cLo - est.cHi) > kTol;
    if (hard)
      throw InconsistencyError("cLo " + fmtRational(est.cLo) + " (" + est.loWitness.probe + ") > cHi " +
                               fmtRational(est.cHi) + " (" + est.hiWitness.probe + ")");
    est.caveats.push_back("cLo exceeds cHi within tolerance");
  }
  return est;
}

// ---------------------------------------------------------------------------
// Mean-L stability

MeanLResult meanLStabilityProbe(const PieceGeomWeight& w, const std::vector<double>& epsLadder, std::int64_t horizon,
                                double p, int deltaDepth) {
  if (horizon < 64) throw ParameterError("horizon must be >= 64");
  const bool bil = w.side == Side::Bilateral;
  const std::int64_t maxN = std::min<std::int64_t>(std::int64_t(1) << 14, horizon / 8);

  // backward table and prefix sums of v, linear domain
  std::vector<double> blog;
  if (bil) blog = backwardLog2Table(w, horizon);
  std::vector<long double> pw(blog.size() + 1, 0.0L);
  bool linearOk = true;
  for (std::size_t i = 0; i < blog.size(); ++i) {
    if (std::fabs(blog[i]) > 8000) linearOk = false;
    pw[i + 1] = pw[i] + std::exp2l(static_cast<long double>(blog[i]));
  }
  const std::int64_t fwdN = horizon + maxN + 1;
  std::vector<double> flog(static_cast<std::size_t>(fwdN) + 1, 0.0);
  std::vector<long double> pf(static_cast<std::size_t>(fwdN) + 1, 0.0L);
  for (std::int64_t j = 1; j <= fwdN; ++j) {
    flog[j] = evalWeight(w, j).log2();
    pf[j] = pf[j - 1] + std::exp2l(static_cast<long double>(flog[j]));
  }
  // log2 v_idx
  auto vlog = [&](std::int64_t idx) { return idx <= 0 ? blog[static_cast<std::size_t>(-idx)] : flog[idx]; };

  const std::int64_t anchor = bil ? 0 : 1;
  MeanLResult res;
  for (double eps : epsLadder) {
    const double elog = std::log2(eps);
    const Rational epsR = ratFromDouble(eps);
    std::vector<MeanLResult::Hit> hits;
    for (int d = 1; d <= deltaDepth; ++d) {
      const double delta = std::ldexp(1.0, -d);
      const double target = std::log2(delta) - 1;  // ||z|| = delta / 2
      std::optional<MeanLResult::Hit> hit;
      auto test = [&](const std::vector<LogNorm>& norms, const std::string& name) {
        auto dens = empiricalDensity(levelSetIndex(norms, LogNorm::fromLog2(elog), Direction::AtLeast));
        if (dens.upper >= epsR) hit = MeanLResult::Hit{delta, name, target, dens.upper};
      };
      {
        // c * e_anchor
        const double cl = target - vlog(anchor) / p;
        std::vector<LogNorm> norms(static_cast<std::size_t>(horizon));
        for (std::int64_t n = 1; n <= horizon; ++n) {
          const std::int64_t idx = anchor - n;
          if (!bil && idx < 1) continue;
          norms[n - 1] = LogNorm::fromLog2(cl + vlog(idx) / p);
        }
        std::ostringstream os;
        os << "2^" << cl << "*e_" << anchor;
        test(norms, os.str());
      }
      for (std::int64_t N = 2; !hit && linearOk && N <= maxN; N *= 2) {
        // c * 1_[1,N]
        const double cl = target - static_cast<double>(std::log2(pf[N])) / p;
        std::vector<LogNorm> norms(static_cast<std::size_t>(horizon));
        for (std::int64_t n = 1; n <= horizon; ++n) {
          long double sum = 0;
          if (bil) sum += pw[n] - pw[std::max<std::int64_t>(0, n - N)];  // n' in [max(0,n-N), n-1]
          if (N - n >= 1) sum += pf[N - n];
          if (sum > 0) norms[n - 1] = LogNorm::fromLog2(cl + static_cast<double>(std::log2(sum)) / p);
        }
        std::ostringstream os;
        os << "2^" << cl << "*1[1," << N << "]";
        test(norms, os.str());
      }
      if (!hit) break;
      hits.push_back(*hit);
    }
    if (static_cast<int>(hits.size()) == deltaDepth) {
      res.unstable = true;
      res.eps = eps;
      res.hits = std::move(hits);
      res.summary = "unstable: witnesses at every delta down to 2^-" + std::to_string(deltaDepth);
      return res;
    }
  }
  res.summary = "stable: no eps with witnesses at every delta down to 2^-" + std::to_string(deltaDepth);
  return res;
}

// ---------------------------------------------------------------------------
// Irregularity certificates

IrregularityCertificate irregularityCertificate(const PieceGeomWeight& w, const SparseVector& x,
                                                IrregularityKind kind, std::int64_t horizon, double thresholdScale,
                                                int depth) {
  if (x.isZero()) throw ParameterError("certificate needs a nonzero vector");
  if (!(thresholdScale > 0)) throw ParameterError("threshold scale must be > 0");
  IrregularityCertificate cert;
  cert.requested = kind;
  cert.horizon = horizon;
  const auto norms = orbitNorms(w, x, horizon);
  const double sl = std::log2(thresholdScale);
  std::map<int, IndexSet> lows, highs;
  for (int m = 1; m <= depth; ++m) {
    lows.emplace(m, levelSetIndex(norms, LogNorm::fromLog2(sl - m), Direction::Below));
    highs.emplace(m, levelSetIndex(norms, LogNorm::fromLog2(sl + m), Direction::AtLeast));
  }
  const Rational targetA = empiricalDensity(lows.at(1)).upper;
  const Rational targetB = empiricalDensity(highs.at(1)).upper;
  cert.setA = extractDensityOneSubset(lows, StaircaseMode::Upper, targetA);
  cert.setB = extractDensityOneSubset(highs, StaircaseMode::Upper, targetB);
  cert.densityA = cert.setA.levels.empty() ? Rational(0) : empiricalDensity(cert.setA.set).upper;
  cert.densityB = cert.setB.levels.empty() ? Rational(0) : empiricalDensity(cert.setB.set).upper;
  cert.decaySchedule = cert.setA.levels;
  cert.growthSchedule = cert.setB.levels;

  const double tol = 1e-2;
  if (toDouble(cert.densityA) >= 1 - tol && toDouble(cert.densityB) >= 1 - tol)
    cert.achieved = IrregularityKind::Type1;
  else if (cert.densityA * cert.densityB > 0)
    cert.achieved = IrregularityKind::Type2Half;

  if (kind == IrregularityKind::Type1 && cert.achieved == IrregularityKind::Type2Half)
    cert.caveats.push_back("downgraded to type 2.5: achieved upper densities " + fmtRational(cert.densityA) +
                           " and " + fmtRational(cert.densityB) + " are not both near 1");
  if (!cert.achieved) {
    cert.caveats.push_back(std::string("downgraded: ") +
                           (cert.densityA == 0 ? "decay sets have density 0" : "growth sets have density 0") +
                           " at horizon " + std::to_string(horizon));
  }
  if (w.side == Side::Bilateral && supportsExact(w) && cert.densityB > 0) {
    const LevelSetSpec spec{x, LogNorm::fromLog2(sl + 1), Direction::AtLeast};
    if (exactUnionDensity(levelSetFamily(w, spec)).upper == 0)
      cert.caveats.push_back("growth set has exact upper density 0; its positive density here is a finite-horizon value");
  }
  if (cert.setA.stalled) cert.caveats.push_back("decay staircase: " + cert.setA.diagnostic);
  if (cert.setB.stalled) cert.caveats.push_back("growth staircase: " + cert.setB.diagnostic);
  return cert;
}

// ---------------------------------------------------------------------------
// Classification

std::vector<SparseVector> defaultProbes(const PieceGeomWeight& w, double p) {
  if (w.side == Side::Unilateral)
    return {SparseVector::unit(Side::Unilateral, 1, p), SparseVector::unit(Side::Unilateral, 2, p)};
  return {SparseVector::unit(Side::Bilateral, 0, p), SparseVector::unit(Side::Bilateral, 1, p),
          SparseVector(Side::Bilateral, p, {{0, 1.0}, {3, 1.0}})};
}

RegimeReport classify(const PieceGeomWeight& w, const std::vector<SparseVector>& probes, const ClassifyOptions& opt) {
  if (probes.empty()) throw ParameterError("classify needs at least one probe");
  RegimeReport rep;
  const LevelMode mode = supportsExact(w) ? LevelMode::ExactSymbolic : LevelMode::Empirical;
  const auto lint = lintWeight(w, 12);
  if (!lint.pass())
    for (const auto& f : lint.flags) rep.caveats.push_back("lint: " + f);
  rep.caveats.push_back(kProbeCaveat);

  rep.hypercyclicityWitness = hypercyclicityEvidence(w, opt.p);
  if (!rep.hypercyclicityWitness) {
    rep.caveats.push_back("hypercyclicity probe found no witness (q=1, eps=2^-3, horizon 8^6); operator may not be hypercyclic");
    rep.c = estimateC(w, probes, opt.ladders, mode, opt.horizon);
    return rep;
  }

  // regime 1: every below-set has density one
  bool allOne = true;
  for (const auto& x : probes) {
    std::vector<LogNorm> norms;
    if (mode == LevelMode::Empirical) norms = orbitNorms(w, x, opt.horizon);
    for (int r : opt.ladders.belowLog2) {
      const LevelSetSpec spec{x, LogNorm::fromLog2(r), Direction::Below};
      auto d = mode == LevelMode::Empirical ? empiricalDensity(levelSetIndex(norms, spec.threshold, spec.direction))
                                            : levelSetDensity(w, spec, mode, opt.horizon);
      if (!hasOne(d, true)) {
        allOne = false;
        rep.witnesses["not asymptotic to zero"] = {describe(x), double(r), Direction::Below, d};
        break;
      }
    }
    if (!allOne) break;
  }
  rep.c = estimateC(w, probes, opt.ladders, mode, opt.horizon);
  rep.witnesses["cLo"] = rep.c.loWitness;
  rep.witnesses["cHi"] = rep.c.hiWitness;
  if (allOne) {
    rep.regime = Regime::One;
    rep.caveats.push_back("regime 1 evidence is probe-limited");
    return rep;
  }

  std::vector<double> epsLadder{0.5, 0.25, 0.125};
  rep.meanL = meanLStabilityProbe(w, epsLadder, opt.horizon, opt.p);

  const bool exact = rep.c.kind == DensityKind::Exact;
  const double lo = toDouble(rep.c.cLo), hi = toDouble(rep.c.cHi);
  const bool loIsOne = exact ? rep.c.cLo == 1 : lo >= 1 - kTol;
  const bool hiIsZero = exact ? rep.c.cHi == 0 : hi <= kTol;
  const bool interior = exact ? (rep.c.cLo > 0 && rep.c.cLo <= rep.c.cHi && rep.c.cHi < 1)
                              : (lo > kTol && lo <= hi + kTol && hi < 1 - kTol);

  if (loIsOne && rep.meanL.unstable) {
    rep.regime = Regime::Two;
  } else if (interior && rep.meanL.unstable) {
    rep.regime = Regime::Three;
  } else if (hiIsZero) {
    bool dens1 = true;
    for (const auto& x : probes) {
      std::vector<LogNorm> norms;
      if (mode == LevelMode::Empirical) norms = orbitNorms(w, x, opt.horizon);
      for (int r : opt.ladders.atLeastLog2) {
        const LevelSetSpec spec{x, LogNorm::fromLog2(r), Direction::AtLeast};
        auto d = mode == LevelMode::Empirical
                     ? empiricalDensity(levelSetIndex(norms, spec.threshold, spec.direction))
                     : levelSetDensity(w, spec, mode, opt.horizon);
        if (!hasOne(d, true)) {
          dens1 = false;
          rep.witnesses["not divergent with density one"] = {describe(x), double(r), Direction::AtLeast, d};
          break;
        }
      }
      if (!dens1) break;
    }
    if (dens1) rep.regime = Regime::Four;
    else rep.caveats.push_back("cHi = 0 but some atLeast-set has density below 1");
  } else {
    if (!rep.meanL.unstable) rep.caveats.push_back("no distributional unboundedness evidence: " + rep.meanL.summary);
    rep.caveats.push_back("densities fall between regimes within tolerance");
  }

  if ((rep.regime == Regime::Two || rep.regime == Regime::Three) && opt.certificate)
    rep.certificate = irregularityCertificate(w, probes.front(), IrregularityKind::Type2Half, opt.horizon);
  return rep;
}

}  // namespace orbitdens
