#include "orbitdens/verify/verify.hpp"

#include "orbitdens/errors.hpp"
#include "orbitdens/regimes.hpp"
#include "orbitdens/semigroup.hpp"
#include "orbitdens/verify/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace orbitdens {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::int64_t pow8(int k) {
  std::int64_t r = 1;
  while (k-- > 0) r *= 8;
  return r;
}

std::string num(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

struct Ctx {
  int H = 7;
  double widen = 1;
  std::int64_t horizon = 0;
  std::vector<int> checkpointsK;
  std::uint64_t seed = 0;
  CriterionResult* out = nullptr;

  void check(bool ok, const std::string& what) {
    if (!ok) out->pass = false;
    out->details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { out->details.push_back("     " + what); }
  double tol(double base) const { return std::min(base * widen, 0.1); }
  // horizons that carry structure (staircases, bridges) never drop below 8^floorK
  std::int64_t structural(int k, int floorK) const { return pow8(std::max(k, floorK)); }
};

SparseVector e(std::int64_t j, double p = 1.0) { return SparseVector::unit(Side::Bilateral, j, p); }

GeomIntervalFamily fam1(std::int64_t base, IntervalSchema s) { return GeomIntervalFamily{base, {s}}; }

// ---------------------------------------------------------------------------

void c1(Ctx& c) {
  const auto t0 = Clock::now();
  const auto fam = fam1(8, {1, {2, 0, 0}, {8, 0, 0}});
  const auto d = exactUnionDensity(fam);
  c.check(d.lower == Rational(3, 7), "exact lower density of U[2*8^k, 8^(k+1)] = " + toString(d.lower) + " (want 3/7)");
  const auto bits = oracle::familyBitmap(fam, c.horizon);
  for (int K : c.checkpointsK) {
    const std::int64_t t = 2 * pow8(K);
    const double r = toDouble(oracle::prefixRatio(bits, t));
    c.check(std::fabs(r - 3.0 / 7) <= c.tol(1e-3),
            "prefix ratio at 2*8^" + std::to_string(K) + " = " + num(r) + ", |r - 3/7| <= " + num(c.tol(1e-3)));
  }
  const double s = since(t0);
  c.check(s <= 10, "runtime " + num(s) + " s <= 10 s");
}

void c2(Ctx& c) {
  const auto t0 = Clock::now();
  for (int m : {1, 2, 3}) {
    const auto fam = fam1(8, {m, {1, 1, 0}, {2, -1, 0}});
    const auto d = exactUnionDensity(fam);
    const std::string tag = "m=" + std::to_string(m);
    c.check(d.upper == Rational(4, 7), tag + ": exact upper density of U_{k>=m}[8^k+k, 2*8^k-k] = " + toString(d.upper));
    const auto bits = oracle::familyBitmap(fam, c.horizon);
    for (int K : c.checkpointsK) {
      if (c.H < 7 && K <= m + 1) continue;
      const std::int64_t t = 2 * pow8(K);
      const double r = toDouble(oracle::prefixRatio(bits, t));
      c.check(std::fabs(r - 4.0 / 7) <= c.tol(1e-3), tag + ": prefix ratio at 2*8^" + std::to_string(K) + " = " +
                                                         num(r) + ", |r - 4/7| = " + num(std::fabs(r - 4.0 / 7)) +
                                                         " <= " + num(c.tol(1e-3)));
    }
  }
  const double s = since(t0);
  c.check(s <= 10, "runtime " + num(s) + " s <= 10 s");
}

void c3(Ctx& c) {
  const auto w = makeCase3();
  const std::vector<SparseVector> probes{e(0), e(1), SparseVector(Side::Bilateral, 1.0, {{0, 1.0}, {3, 1.0}})};
  const auto est = estimateC(w, probes, Ladders::dyadic(), LevelMode::ExactSymbolic, 0);
  c.check(est.cLo == Rational(4, 7) && est.cHi == Rational(4, 7),
          "estimateC over {e_0, e_1, e_0+e_3} = [" + toString(est.cLo) + ", " + toString(est.cHi) + "] (want [4/7, 4/7])");
  ClassifyOptions opt;
  opt.horizon = c.structural(c.H - 1, 5);
  const auto rep = classify(w, probes, opt);
  c.check(rep.regime == Regime::Three, "classify -> regime " + regimeName(rep.regime));
  if (!rep.certificate) {
    c.check(false, "type-2.5 certificate present");
    return;
  }
  const auto& cert = *rep.certificate;
  const double a = toDouble(cert.densityA), b = toDouble(cert.densityB);
  c.check(cert.achieved.has_value(), "certificate achieved type 2.5");
  c.check(a >= 4.0 / 7 - 1e-2, "udens(A) = " + num(a) + " >= 4/7 - 0.01");
  c.check(b > 0, "udens(B) = " + num(b) + " > 0 at horizon " + std::to_string(opt.horizon));
  for (const auto& cv : cert.caveats) c.note("caveat: " + cv);
}

void c4(Ctx& c) {
  const auto w = makeCase4Corrected();
  for (int m = 0; m <= 4; ++m) {
    const LevelSetSpec spec{e(0), LogNorm::fromLog2(m + 1), Direction::AtLeast};
    const bool brute = c.H >= 7 || m <= c.H - 3;
    const auto d = levelSetDensity(w, spec, LevelMode::ExactSymbolic, 0);
    c.check(d.lower == 1 && d.upper == 1, "m=" + std::to_string(m) + ": exact density of {n : ||B^n e_0|| >= 2^(m+1)} = [" +
                                              toString(d.lower) + ", " + toString(d.upper) + "]");
    if (!brute) continue;
    std::int64_t cnt = 0;
    const Rational bar = pow2(m + 1);
    for (std::int64_t n = 1; n <= c.horizon; ++n) cnt += oracle::weightValue(w, -n) >= bar;
    const double r = static_cast<double>(cnt) / static_cast<double>(c.horizon);
    c.check(r >= 1 - c.tol(1e-3), "m=" + std::to_string(m) + ": prefix ratio at 8^" + std::to_string(c.H) + " = " +
                                      num(r) + " >= " + num(1 - c.tol(1e-3)));
  }
  ClassifyOptions opt;
  opt.horizon = c.structural(c.H - 1, 5);
  const auto rep = classify(w, defaultProbes(w), opt);
  c.check(rep.regime == Regime::Four, "classify -> regime " + regimeName(rep.regime));
}

void c5(Ctx& c) {
  for (const auto& w : {makeCase3(), makeCase4Corrected()}) {
    const auto l = lintWeight(w, 12);
    c.check(l.ratioBound == 2.0 && l.pass(), w.name + ": ratio bound " + num(l.ratioBound) + " (want exactly 2), lint " +
                                                 (l.pass() ? "pass" : "fail"));
  }
  const auto pw = makeCase4Printed();
  const auto l = lintWeight(pw, 12);
  bool allTwo = l.blocks.size() == 12;
  for (const auto& b : l.blocks) allTwo = allTwo && b.minLog2 == 1;
  c.check(allTwo, "case4-printed: per-block minimum of v(n) is 2 for every k = 1..12");
  c.check(!l.deepDips, "case4-printed flagged 'no deep dips'");
  c.note("case4-printed ratio bound " + num(l.ratioBound) + " at " + l.ratioWhere);
  for (double eps : {0.5, 0.75, 0.999}) {
    const auto hc = hypercyclicityProbe(pw, 0, eps, c.horizon);
    c.check(!hc, "case4-printed: hypercyclicityProbe(q=0, eps=" + num(eps) + ") returns none up to 8^" + std::to_string(c.H));
  }
}

void c6(Ctx& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(c.seed + 6);
  std::uniform_int_distribution<int> supp(-20, 20), size(1, 6), pd(1, 3);
  std::uniform_int_distribution<std::int64_t> nd(0, 10000);
  std::uniform_real_distribution<double> coef(-4, 4);
  const std::vector<PieceGeomWeight> ws{makeCase3(), makeCase4Corrected()};
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto& w = ws[trial % 2];
    const double p = pd(rng);
    std::map<std::int64_t, double> ent;
    for (int i = size(rng); i > 0; --i) {
      double v = coef(rng);
      if (v == 0.0) v = 1.0;
      ent[supp(rng)] = v;
    }
    const SparseVector x(Side::Bilateral, p, ent);
    const std::int64_t n = nd(rng);
    const double closed = orbitNormClosedForm(w, x, n).log2();
    const long double direct = oracle::orbitNormPow(w, applyShiftIter(w, x, n));
    const double dl = static_cast<double>(std::log2(direct)) / p;
    worst = std::max(worst, std::fabs(std::exp2(closed - dl) - 1));
  }
  c.check(worst <= 1e-9, "200 seeded probes: max relative error " + num(worst) + " <= 1e-9");
  const double s = since(t0);
  c.check(s <= 5, "runtime " + num(s) + " s <= 5 s");
}

void c7(Ctx& c) {
  const auto w = makeCase3();
  const std::int64_t horizon = c.structural(c.H - 1, 5);
  const auto norms = orbitNorms(w, e(0), horizon);
  std::map<int, IndexSet> lows;
  for (int m = 1; m <= 20; ++m) lows.emplace(m, levelSetIndex(norms, LogNorm::fromLog2(-m), Direction::Below));
  const Rational target = empiricalDensity(lows.at(1)).upper;
  const auto st = extractDensityOneSubset(lows, StaircaseMode::Upper, target);
  const double a = toDouble(empiricalDensity(st.set).upper);
  std::ostringstream th;
  for (auto t : st.thresholds) th << t << " ";
  c.note("staircase levels up to m=" + std::to_string(st.deepestLevel()) + ", thresholds " + th.str());
  c.check(a >= 4.0 / 7 - 1e-2, "udens(A) at horizon " + std::to_string(horizon) + " = " + num(a) + " >= 4/7 - 0.01");
  if (st.thresholds.size() < 3) {
    c.check(false, "staircase reaches a third threshold");
    return;
  }
  const std::int64_t N3 = st.thresholds[2];
  bool small = true;
  std::int64_t bad = 0;
  const Rational bar = pow2(-3);
  for (auto n : st.set.elements())
    if (n > N3 && oracle::weightValue(w, -n) > bar) {
      small = false;
      bad = n;
      break;
    }
  c.check(small, "||B^n e_0|| <= 2^-3 on A beyond N_3 = " + std::to_string(N3) + (small ? "" : ", violated at n=" + std::to_string(bad)));
}

StepFunction randomStep(std::mt19937_64& rng, LineSide side, bool integer) {
  std::uniform_int_distribution<int> cells(1, 6), start(side == LineSide::Line ? -30 : 0, 30), step(1, 4), den(1, 4),
      val(-16, 16);
  std::vector<Rational> b;
  Rational x = start(rng);
  if (!integer) x += Rational(den(rng) - 1, 4);
  b.push_back(x);
  const int nc = cells(rng);
  std::vector<double> v;
  for (int i = 0; i < nc; ++i) {
    x += integer ? Rational(step(rng)) : Rational(step(rng), den(rng));
    b.push_back(x);
    v.push_back(val(rng) / 4.0);
  }
  return StepFunction(side, b, v);
}

void c8(Ctx& c) {
  std::mt19937_64 rng(c.seed + 8);
  const StepWeight rhos[] = {StepWeight(LineSide::Line, makeCase3()), StepWeight(LineSide::Line, makeCase4Corrected()),
                             StepWeight(LineSide::HalfLine, makeCase3())};
  int ok = 0;
  std::string firstBad;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& rho = rhos[trial % 3];
    const int p = 1 + trial % 2;
    const auto f = randomStep(rng, rho.side(), true);
    Rational lhs = 0;
    for (const auto& [n, m] : blockMasses(f, p)) lhs += m * rho.cell(n).exact();
    const Rational rhs = oracle::integralPow(rho, f, p);
    if (lhs == rhs) ++ok;
    else if (firstBad.empty()) firstBad = " (trial " + std::to_string(trial) + ": " + toString(lhs) + " vs " + toString(rhs) + ")";
  }
  c.check(ok == 100, std::to_string(ok) + "/100 seeded step functions: ||x^f||^p == ||f||^p exactly" + firstBad);
}

void c9(Ctx& c) {
  const std::int64_t horizon = c.structural(c.H - 2, 3);
  for (const auto& w : {makeCase3(), makeCase4Corrected()}) {
    const StepWeight rho(LineSide::Line, w);
    const auto f = StepFunction::indicator(LineSide::Line, -1, 0);
    for (int s : {1, 2})
      for (double eps : {0.5, 0.125}) {
        const auto r = densBridgeCheck(rho, f, Rational(s), eps, horizon);
        std::ostringstream os;
        os << w.name << " s=" << s << " eps=" << eps << " C_s^p=" << toString(r.cs.csPow) << ":";
        for (const auto& q : r.inequalities) os << " " << num(toDouble(q.lhs)) << "<=" << num(toDouble(q.rhs));
        c.check(r.pass(), os.str());
      }
  }
}

void c10(Ctx& c) {
  const auto w3 = makeCase3(), w4 = makeCase4Corrected();
  const StepWeight r3(LineSide::Line, w3), r4(LineSide::Line, w4);
  const auto f = StepFunction::indicator(LineSide::Line, -1, 0);
  auto exactPair = [&](const StepWeight& rho, const PieceGeomWeight& w, double rl, Direction dir) {
    const auto cd = continuousLevelDensity(rho, f, LogNorm::fromLog2(rl), dir, LevelMode::ExactSymbolic, 0);
    const auto dd = levelSetDensity(w, {e(0), LogNorm::fromLog2(rl), dir}, LevelMode::ExactSymbolic, 0);
    return std::make_pair(cd, dd);
  };
  auto same = [](const DensityEstimate& a, const DensityEstimate& b) { return a.lower == b.lower && a.upper == b.upper;
  };
  {
    auto [cd, dd] = exactPair(r3, w3, 0, Direction::AtLeast);
    c.check(same(cd, dd) && cd.lower == Rational(3, 7), "case3 lDens{t : ||T_t f|| >= 1} = " + toString(cd.lower) +
                                                        " (discrete " + toString(dd.lower) + ")");
  }
  for (int m = 1; m <= 3; ++m) {
    auto [cd, dd] = exactPair(r3, w3, -m, Direction::Below);
    c.check(same(cd, dd) && cd.upper == Rational(4, 7), "case3 uDens{t : ||T_t f|| < 2^-" + std::to_string(m) +
                                                        "} = " + toString(cd.upper) + " (discrete " + toString(dd.upper) + ")");
  }
  for (int m = 0; m <= 4; ++m) {
    auto [cd, dd] = exactPair(r4, w4, m + 1, Direction::AtLeast);
    c.check(same(cd, dd) && cd.lower == 1 && cd.upper == 1,
            "case4-corrected Dens{t : ||T_t f|| >= 2^" + std::to_string(m + 1) + "} = " + toString(cd.lower));
  }
  std::vector<std::int64_t> at;
  for (int K : c.checkpointsK) at.push_back(2 * pow8(K));
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += num(x) + " ";
    return s;
  };
  const double tol = c.tol(1e-2);
  {
    const auto r = continuousPrefixRatios(r3, f, LogNorm::fromLog2(0), Direction::AtLeast, c.horizon, at);
    bool ok = std::all_of(r.begin(), r.end(), [&](double x) { return std::fabs(x - 3.0 / 7) <= tol; });
    c.check(ok, "case3 atLeast-1 continuous prefix ratios at 2*8^K: " + list(r) + "within " + num(tol) + " of 3/7");
  }
  for (int m = 1; m <= 3; ++m) {
    std::vector<std::int64_t> atm;
    for (int K : c.checkpointsK)
      if (c.H >= 7 || K > m) atm.push_back(2 * pow8(K));
    const auto r = continuousPrefixRatios(r3, f, LogNorm::fromLog2(1 - m), Direction::Below, c.horizon, atm);
    bool ok = std::all_of(r.begin(), r.end(), [&](double x) { return std::fabs(x - 4.0 / 7) <= tol; });
    c.check(ok, "case3 below-2^" + std::to_string(1 - m) + " continuous prefix ratios at 2*8^K: " + list(r) + "within " +
                    num(tol) + " of 4/7");
  }
  for (int m = 0; m <= 4; ++m) {
    if (c.H < 7 && m > c.H - 3) continue;
    const auto r = continuousPrefixRatios(r4, f, LogNorm::fromLog2(m + 1), Direction::AtLeast, c.horizon, {c.horizon});
    c.check(r[0] >= 1 - tol, "case4-corrected atLeast-2^" + std::to_string(m + 1) + " continuous prefix ratio at 8^" +
                                 std::to_string(c.H) + " = " + num(r[0]) + " >= " + num(1 - tol));
  }
}

void c11(Ctx& c, Clock::time_point suiteStart, bool fullRun) {
  std::mt19937_64 rng(c.seed + 11);
  const std::vector<PieceGeomWeight> ws{makeCase3(), makeCase4Corrected()};

  // complement duality
  {
    std::uniform_int_distribution<int> supp(-8, 8), size(1, 3), ex(-3, 3), thr(-6, 6), pd(1, 2), sign(0, 1);
    int ok = 0, total = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto& w = ws[trial % 2];
      std::map<std::int64_t, double> ent;
      for (int i = size(rng); i > 0; --i) ent[supp(rng)] = std::ldexp(sign(rng) ? 1.0 : -1.0, ex(rng));
      const SparseVector x(Side::Bilateral, pd(rng), ent);
      const auto R = LogNorm::fromLog2(thr(rng));
      const auto b = levelSetDensity(w, {x, R, Direction::Below}, LevelMode::ExactSymbolic, 0);
      const auto a = levelSetDensity(w, {x, R, Direction::AtLeast}, LevelMode::ExactSymbolic, 0);
      ++total;
      if (b.upper + a.lower == 1 && b.lower + a.upper == 1) ++ok;
    }
    std::uniform_int_distribution<int> bit(0, 2);
    int invol = 0;
    for (int trial = 0; trial < 20; ++trial) {
      IndexSet::Bitmap bits(512);
      for (auto& v : bits) v = bit(rng) == 0;
      const auto d = empiricalDensity(IndexSet::fromBitmap(bits));
      if (complementDensity(complementDensity(d)) == d) ++invol;
    }
    c.check(ok == total && invol == 20, "complement duality: " + std::to_string(ok) + "/" + std::to_string(total) +
                                            " exact level-set pairs, " + std::to_string(invol) + "/20 involutions");
  }

  // scaling invariance
  {
    const std::int64_t horizon = pow8(std::max(3, c.H - 2));
    std::uniform_int_distribution<int> ex(-6, 6);
    bool ok = true;
    std::string why;
    for (const auto& w : ws) {
      const auto base = irregularityCertificate(w, e(0), IrregularityKind::Type2Half, horizon);
      for (int t = 0; t < 3; ++t) {
        const int r = ex(rng);
        const double cf = std::ldexp(1.0, r);
        const auto sc = irregularityCertificate(w, e(0).scaled(-cf), IrregularityKind::Type2Half, horizon, cf);
        if (!(sc.setA.set == base.setA.set && sc.setB.set == base.setB.set)) {
          ok = false;
          why = w.name + " c=-2^" + std::to_string(r);
        }
        const auto x = SparseVector(Side::Bilateral, 2.0, {{0, 1.5}, {2, -0.75}});
        for (std::int64_t n : {0, 7, 100, 4099}) {
          const double l1 = orbitNormClosedForm(w, x.scaled(cf), n).log2();
          const double l0 = orbitNormClosedForm(w, x, n).log2() + r;
          if (std::fabs(l1 - l0) > 1e-12) {
            ok = false;
            why = "norm scaling at n=" + std::to_string(n);
          }
        }
      }
    }
    c.check(ok, "scaling invariance: certificates of c*e_0 with ladders scaled by |c| match e_0" +
                    (why.empty() ? "" : " (broken: " + why + ")"));
  }

  // shift invariance of classification
  {
    ClassifyOptions opt;
    opt.horizon = pow8(std::max(4, c.H - 2));
    opt.certificate = false;
    int ok = 0, total = 0;
    std::string why;
    for (const auto& w : ws) {
      const auto base = classify(w, {e(0)}, opt);
      for (int m = -8; m <= 8; ++m) {
        if (m == 0) continue;
        const auto r = classify(w, {e(m)}, opt);
        ++total;
        if (r.regime == base.regime && r.c.cLo == base.c.cLo && r.c.cHi == base.c.cHi) ++ok;
        else if (why.empty()) why = " (" + w.name + " m=" + std::to_string(m) + ")";
      }
    }
    c.check(ok == total, "shift invariance: classify(e_m) == classify(e_0) for " + std::to_string(ok) + "/" +
                             std::to_string(total) + " cases, |m| <= 8" + why);
  }

  // semigroup law
  {
    std::uniform_int_distribution<int> nu(0, 24), de(1, 8);
    const StepWeight rho(LineSide::Line, makeCase3());
    int ok = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto side = trial % 2 ? LineSide::Line : LineSide::HalfLine;
      const auto f = randomStep(rng, side, false);
      const Rational s(nu(rng), de(rng)), t(nu(rng), de(rng));
      bool law = translate(translate(f, s), t) == translate(f, s + t);
      if (side == LineSide::Line)
        law = law && semigroupNormPow(rho, f, t, 2) == semigroupNormPowTranslated(rho, f, t, 2);
      ok += law;
    }
    const auto f = StepFunction::indicator(LineSide::HalfLine, 0, 1);
    const bool ex = translate(translate(f, Rational(1, 2)), Rational(3, 2)) == translate(f, Rational(2));
    c.check(ok == 50 && ex, "semigroup law: " + std::to_string(ok) + "/50 random (f, s, t) exact");
  }

  // C_s monotonicity
  {
    bool ok = true;
    std::string trace;
    for (const auto& w : ws) {
      const StepWeight rho(LineSide::Line, w);
      Rational prevSup = 0, prevCs = 0;
      for (int q = 1; q <= 6; ++q) {
        const Rational s(q, 2);
        const auto cs = computeCs(rho, s, -pow8(4), 64);
        ok = ok && cs.windowSup >= prevSup && cs.csPow >= prevCs && cs.windowSup <= cs.cap;
        prevSup = cs.windowSup;
        prevCs = cs.csPow;
        if (w.name == "case3") trace += toString(cs.csPow) + " ";
      }
    }
    c.check(ok, "C_s nondecreasing in s and window sup <= C^ceil(s) (case3 C_s^p for s=1/2..3: " + trace + ")");
  }

  if (fullRun) {
    const double s = since(suiteStart);
    c.check(s < 60, "full suite runtime " + num(s) + " s < 60 s");
  }
}

const std::map<std::string, std::vector<int>>& groups() {
  static const std::map<std::string, std::vector<int>> g{{"density", {1, 2, 7}},   {"shifts", {5, 6}},
                                                         {"regimes", {3, 4}},      {"semigroup", {8, 9, 10}},
                                                         {"properties", {11}}};
  return g;
}

const char* title(int id) {
  switch (id) {
    case 1: return "case-3 lower density 3/7";
    case 2: return "case-3 upper density 4/7";
    case 3: return "case-3 c estimate and regime 3";
    case 4: return "case-4 corrected density-one divergence";
    case 5: return "construction lint";
    case 6: return "closed-form orbit norms vs shifted vectors";
    case 7: return "density-one staircase extraction";
    case 8: return "block-embedding isometry";
    case 9: return "continuous/discrete density bridge";
    case 10: return "continuous-time transfer";
    case 11: return "property suite";
  }
  return "?";
}

}  // namespace

std::vector<int> selectCriteria(const std::vector<std::string>& only) {
  std::set<int> ids;
  if (only.empty())
    for (int i = 1; i <= 11; ++i) ids.insert(i);
  for (const auto& o : only) {
    auto it = groups().find(o);
    if (it != groups().end()) {
      ids.insert(it->second.begin(), it->second.end());
      continue;
    }
    int id = 0;
    try {
      std::size_t pos = 0;
      id = std::stoi(o, &pos);
      if (pos != o.size()) id = 0;
    } catch (const std::exception&) {
      id = 0;
    }
    if (id < 1 || id > 11)
      throw ParameterError("unknown selection '" + o + "' (groups: density shifts regimes semigroup properties, or 1..11)");
    ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

std::vector<CriterionResult> runVerification(const VerifyOptions& opt,
                                             const std::function<void(const CriterionResult&)>& onResult) {
  if (opt.horizonK < 3 || opt.horizonK > 8) throw ParameterError("--horizon-k must be in 3..8");
  const auto ids = selectCriteria(opt.only);
  Ctx c;
  c.H = opt.horizonK;
  c.widen = opt.horizonK < 7 ? std::pow(8.0, 7 - opt.horizonK) : 1.0;
  c.horizon = pow8(c.H);
  c.seed = opt.seed;
  if (c.H >= 7) c.checkpointsK = {4, 5, 6};
  else
    for (int K = std::max(2, c.H - 2); K <= c.H - 1; ++K) c.checkpointsK.push_back(K);

  const auto suiteStart = Clock::now();
  std::vector<CriterionResult> out;
  for (int id : ids) {
    CriterionResult r;
    r.id = id;
    r.title = title(id);
    r.pass = true;
    c.out = &r;
    if (c.widen > 1 && (id == 1 || id == 2 || id == 4 || id == 10))
      c.note("horizon 8^" + std::to_string(c.H) + ": tolerances x" + num(c.widen) + ", capped at 0.1");
    const auto t0 = Clock::now();
    try {
      switch (id) {
        case 1: c1(c); break;
        case 2: c2(c); break;
        case 3: c3(c); break;
        case 4: c4(c); break;
        case 5: c5(c); break;
        case 6: c6(c); break;
        case 7: c7(c); break;
        case 8: c8(c); break;
        case 9: c9(c); break;
        case 10: c10(c); break;
        case 11: c11(c, suiteStart, ids.size() == 11 && opt.horizonK == 7); break;
      }
    } catch (const std::exception& ex) {
      c.check(false, std::string("exception: ") + ex.what());
    }
    r.seconds = since(t0);
    if (onResult) onResult(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string formatResult(const CriterionResult& r) {
  std::ostringstream os;
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << " (" << secs << " s)\n";
  for (const auto& d : r.details) os << "    " << d << "\n";
  return os.str();
}

}  // namespace orbitdens
