#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitdens/errors.hpp"
#include "orbitdens/regimes.hpp"
#include "orbitdens/verify/oracles.hpp"

#include <random>

using namespace orbitdens;

namespace {

SparseVector e(std::int64_t j, double p = 1.0) { return SparseVector::unit(Side::Bilateral, j, p); }

LevelSetSpec spec(SparseVector x, int thrLog2, Direction d) { return {std::move(x), LogNorm::fromLog2(thrLog2), d}; }

SparseVector randomDyadicProbe(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> supp(-10, 10), size(1, 3), ex(-3, 3), sign(0, 1);
  std::map<std::int64_t, double> ent;
  for (int i = size(rng); i > 0; --i) ent[supp(rng)] = std::ldexp(sign(rng) ? 1.0 : -1.0, ex(rng));
  return SparseVector(Side::Bilateral, 1.0 + sign(rng), ent);
}

}  // namespace

TEST_CASE("case-3 e_0 level sets have the block densities") {
  const auto w = makeCase3();
  const auto at1 = levelSetDensity(w, spec(e(0), 0, Direction::AtLeast), LevelMode::ExactSymbolic, 0);
  CHECK(at1.lower == Rational(3, 7));
  CHECK(at1.upper == Rational(6, 7));
  for (int m = 1; m <= 6; ++m) {
    const auto b = levelSetDensity(w, spec(e(0), -m, Direction::Below), LevelMode::ExactSymbolic, 0);
    CHECK(b.upper == Rational(4, 7));
  }
}

TEST_CASE("symbolic level sets agree with brute-force orbit scans on a late block") {
  // the family describes the eventual block structure; coefficients and thresholds stay
  // small against the block index 6 so block (8^6, 8^7] is already eventual
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> thr(-1, 1), dir(0, 1), supp(-10, 10), size(1, 3), ex(-1, 1), sign(0, 1);
  const std::int64_t lo = 262144, hi = 2097152;
  for (int trial = 0; trial < 30; ++trial) {
    const auto& w = trial % 2 ? makeCase3() : makeCase4Corrected();
    std::map<std::int64_t, double> ent;
    for (int i = size(rng); i > 0; --i) ent[supp(rng)] = std::ldexp(sign(rng) ? 1.0 : -1.0, ex(rng));
    const SparseVector x(Side::Bilateral, 1.0, ent);
    const auto s = spec(x, thr(rng), dir(rng) ? Direction::Below : Direction::AtLeast);
    const auto sym = oracle::familyBitmap(levelSetFamily(w, s), hi);
    const long double R = std::exp2(static_cast<long double>(s.threshold.log2()));
    std::int64_t mismatches = 0;
    for (std::int64_t n = lo + 1; n <= hi; n += 11) {
      const bool below = oracle::orbitNormPow(w, applyShiftIter(w, x, n)) < R;
      const bool in = s.direction == Direction::Below ? below : !below;
      mismatches += in != static_cast<bool>(sym[n - 1]);
    }
    CAPTURE(trial);
    CAPTURE(describe(x));
    CAPTURE(s.threshold.log2());
    // only near-edge points may differ
    CHECK(mismatches <= 4 * static_cast<std::int64_t>(x.entries().size()));
  }
}

TEST_CASE("complement duality of exact level sets") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> thr(-6, 6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto& w = trial % 2 ? makeCase3() : makeCase4Corrected();
    const auto x = randomDyadicProbe(rng);
    const int r = thr(rng);
    const auto b = levelSetDensity(w, spec(x, r, Direction::Below), LevelMode::ExactSymbolic, 0);
    const auto a = levelSetDensity(w, spec(x, r, Direction::AtLeast), LevelMode::ExactSymbolic, 0);
    CHECK(b.upper + a.lower == 1);
    CHECK(b.lower + a.upper == 1);
  }
}

TEST_CASE("empirical and exact densities are close at a long horizon") {
  const auto w = makeCase3();
  const auto d = levelSetDensity(w, spec(e(0), 0, Direction::AtLeast), LevelMode::Empirical, 2097152);
  CHECK(d.kind == DensityKind::Empirical);
  CHECK(d.lowerValue() == doctest::Approx(3.0 / 7).epsilon(2e-3));
  CHECK(d.upperValue() == doctest::Approx(6.0 / 7).epsilon(2e-3));
}

TEST_CASE("exact mode needs dyadic slopes") {
  auto w = makeCase3();
  w.bands[0].exponent.nCoef = 2;
  CHECK_FALSE(supportsExact(w));
  CHECK_THROWS_AS(levelSetDensity(w, spec(e(0), 0, Direction::AtLeast), LevelMode::ExactSymbolic, 0), ModeError);
}

TEST_CASE("c interval of the built-ins") {
  const std::vector<SparseVector> probes{e(0), e(1), SparseVector(Side::Bilateral, 1.0, {{0, 1.0}, {3, 1.0}})};
  const auto c3 = estimateC(makeCase3(), probes, Ladders::dyadic(), LevelMode::ExactSymbolic, 0);
  CHECK(c3.cLo == Rational(4, 7));
  CHECK(c3.cHi == Rational(4, 7));
  const auto c4 = estimateC(makeCase4Corrected(), probes, Ladders::dyadic(), LevelMode::ExactSymbolic, 0);
  CHECK(c4.cLo == 0);
  CHECK(c4.cHi == 0);
}

TEST_CASE("classification of the built-ins") {
  ClassifyOptions opt;
  opt.horizon = 32768;
  const auto r3 = classify(makeCase3(), defaultProbes(makeCase3()), opt);
  CHECK(r3.regime == Regime::Three);
  CHECK(r3.meanL.unstable);
  REQUIRE(r3.certificate.has_value());
  CHECK(r3.certificate->achieved == IrregularityKind::Type2Half);
  CHECK(r3.hypercyclicityWitness.has_value());

  const auto r4 = classify(makeCase4Corrected(), defaultProbes(makeCase4Corrected()), opt);
  CHECK(r4.regime == Regime::Four);

  const auto rp = classify(makeCase4Printed(), defaultProbes(makeCase4Printed()), opt);
  CHECK(rp.regime == Regime::Inconclusive);
  CHECK_FALSE(rp.hypercyclicityWitness.has_value());
  CHECK_FALSE(rp.caveats.empty());

  CHECK(classify(makeConstantOne(), defaultProbes(makeConstantOne()), opt).regime == Regime::Inconclusive);
  for (const auto& w : {makeUnilateralReciprocal(), makeUnilateralDyadic(-1)})
    CHECK(classify(w, defaultProbes(w), opt).regime == Regime::One);
}

TEST_CASE("classification does not depend on which basis vector probes the orbit") {
  ClassifyOptions opt;
  opt.horizon = 4096;
  opt.certificate = false;
  for (const auto& w : {makeCase3(), makeCase4Corrected()}) {
    const auto base = classify(w, {e(0)}, opt);
    for (int m : {-5, -1, 2, 7}) {
      const auto r = classify(w, {e(m)}, opt);
      CHECK(r.regime == base.regime);
      CHECK(r.c.cLo == base.c.cLo);
      CHECK(r.c.cHi == base.c.cHi);
    }
  }
}

TEST_CASE("certificates are invariant under scaling probe and thresholds together") {
  const auto w = makeCase3();
  const auto base = irregularityCertificate(w, e(0), IrregularityKind::Type2Half, 32768);
  for (double c : {0.125, 4.0, -2.0}) {
    const auto s = irregularityCertificate(w, e(0).scaled(c), IrregularityKind::Type2Half, 32768, std::fabs(c));
    CHECK(s.setA.set == base.setA.set);
    CHECK(s.setB.set == base.setB.set);
    CHECK(s.densityA == base.densityA);
  }
}

TEST_CASE("type-1 request on case 3 is downgraded with a caveat") {
  const auto c = irregularityCertificate(makeCase3(), e(0), IrregularityKind::Type1, 32768);
  CHECK(c.achieved != IrregularityKind::Type1);
  CHECK_FALSE(c.caveats.empty());
}

TEST_CASE("certificate decay set carries small norms") {
  const auto w = makeCase3();
  const auto c = irregularityCertificate(w, e(0), IrregularityKind::Type2Half, 262144);
  REQUIRE(c.setA.thresholds.size() >= 2);
  const auto N2 = c.setA.thresholds[1];
  for (auto n : c.setA.set.elements())
    if (n > N2) REQUIRE(oracle::weightValue(w, -n) <= Rational(1, 4));
  CHECK(toDouble(c.densityA) > 4.0 / 7 - 1e-2);
}

TEST_CASE("mean-L probe on the constant weight finds no instability") {
  const auto m = meanLStabilityProbe(makeConstantOne(), {0.5, 0.25, 0.125}, 4096);
  CHECK_FALSE(m.unstable);
}

TEST_CASE("describe renders probes") {
  CHECK(describe(e(3)) == describe(SparseVector(Side::Bilateral, 1.0, {{3, 1.0}})));
  CHECK(describe(e(3)) != describe(e(4)));
  CHECK(regimeName(Regime::Three) == "3");
  CHECK(regimeName(Regime::Inconclusive) == "inconclusive");
}
