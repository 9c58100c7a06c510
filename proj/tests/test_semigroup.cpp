#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitdens/errors.hpp"
#include "orbitdens/semigroup.hpp"
#include "orbitdens/verify/oracles.hpp"

#include <cmath>
#include <random>

using namespace orbitdens;

namespace {

StepFunction randomStep(std::mt19937_64& rng, LineSide side, bool integer) {
  std::uniform_int_distribution<int> cells(1, 5), start(side == LineSide::Line ? -20 : 0, 20), step(1, 3),
      den(1, 4), val(-12, 12);
  std::vector<Rational> b{Rational(start(rng))};
  std::vector<double> v;
  for (int i = cells(rng); i > 0; --i) {
    b.push_back(b.back() + (integer ? Rational(step(rng)) : Rational(step(rng), den(rng))));
    v.push_back(val(rng) / 4.0);
  }
  return StepFunction(side, b, v);
}

}  // namespace

TEST_CASE("step weight cells copy the sequence weight") {
  const StepWeight line(LineSide::Line, makeCase3());
  CHECK(line.cell(-600).exact() == evalWeightExact(makeCase3(), -600).exact());
  CHECK(line.cell(3).exact() == Rational(1, 3));
  CHECK(line.ratioBound() == 2.0);
  const StepWeight half(LineSide::HalfLine, makeUnilateralReciprocal());
  CHECK(half.cell(4).exact() == Rational(1, 4));
  CHECK_THROWS_AS(half.cell(0), ParameterError);
  CHECK_THROWS_AS(StepWeight(LineSide::Line, makeUnilateralReciprocal()), ParameterError);
}

TEST_CASE("step functions canonicalize") {
  const StepFunction f(LineSide::Line, {0, 1, 2, 3}, {0.0, 2.0, 2.0});
  CHECK(f.breakpoints() == std::vector<Rational>{1, 3});
  CHECK(f.values() == std::vector<double>{2.0});
  CHECK(f.at(Rational(3, 2)) == 2.0);
  CHECK(f.at(Rational(5)) == 0.0);
  CHECK(StepFunction(LineSide::Line, {0, 1}, {0.0}).isZero());
  CHECK(StepFunction::indicator(LineSide::Line, -1, 0).integerBreakpoints());
  CHECK_FALSE(StepFunction::indicator(LineSide::Line, Rational(1, 2), 2).integerBreakpoints());
  CHECK_THROWS_AS(StepFunction(LineSide::HalfLine, {-1, 1}, {1.0}), ParameterError);
  CHECK_THROWS_AS(StepFunction(LineSide::Line, {1, 0}, {1.0}), ParameterError);
}

TEST_CASE("norm integrals match the refinement oracle") {
  std::mt19937_64 rng(10);
  const StepWeight rhos[] = {StepWeight(LineSide::Line, makeCase3()), StepWeight(LineSide::Line, makeCase4Corrected()),
                             StepWeight(LineSide::HalfLine, makeCase3())};
  std::uniform_int_distribution<int> nu(0, 30), de(1, 6);
  for (int t = 0; t < 120; ++t) {
    const auto& rho = rhos[t % 3];
    const int p = 1 + t % 2;
    const auto f = randomStep(rng, rho.side(), t % 4 < 2);
    const Rational s(nu(rng), de(rng));
    CHECK(semigroupNormPow(rho, f, s, p) == oracle::integralPow(rho, translate(f, s), p));
    CHECK(semigroupNormPow(rho, f, s, p) == semigroupNormPowTranslated(rho, f, s, p));
  }
}

TEST_CASE("block embedding is an isometry on integer step functions") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    const auto side = t % 2 ? LineSide::Line : LineSide::HalfLine;
    const StepWeight rho(side, makeCase3());
    const int p = 1 + t % 2;
    const auto f = randomStep(rng, side, true);
    Rational lhs = 0;
    for (const auto& [n, m] : blockMasses(f, p)) lhs += m * rho.cell(n).exact();
    CHECK(lhs == oracle::integralPow(rho, f, p));
    const auto x = blockEmbed(f, p);
    if (side == LineSide::Line && !f.isZero())
      CHECK(norm(makeCase3(), x).log2() == doctest::Approx(std::log2(toDouble(lhs)) / p).epsilon(1e-12));
  }
}

TEST_CASE("translation semigroup law") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> nu(0, 20), de(1, 5);
  for (int t = 0; t < 80; ++t) {
    const auto side = t % 2 ? LineSide::Line : LineSide::HalfLine;
    const auto f = randomStep(rng, side, false);
    const Rational a(nu(rng), de(rng)), b(nu(rng), de(rng));
    CHECK(translate(translate(f, a), b) == translate(f, a + b));
    CHECK(translate(f, 0) == f);
  }
  CHECK(translate(StepFunction::indicator(LineSide::HalfLine, 0, 1), 1).isZero());
  CHECK_THROWS_AS(translate(StepFunction::indicator(LineSide::Line, 0, 1), -1), ParameterError);
}

TEST_CASE("norm profile is exact at its knots") {
  const StepWeight rho(LineSide::Line, makeCase3());
  const auto f = StepFunction(LineSide::Line, {Rational(-3, 2), 0, Rational(1, 3)}, {1.0, -2.0});
  const auto prof = normProfile(rho, f, 2, 200);
  REQUIRE(prof.t.size() == prof.value.size());
  CHECK(prof.t.front() == 0);
  CHECK(prof.t.back() == 200);
  for (std::size_t i = 0; i < prof.t.size(); i += 7) CHECK(prof.value[i] == semigroupNormPow(rho, f, prof.t[i], 2));
  // linear between knots
  for (std::size_t i = 0; i + 1 < prof.t.size(); i += 11) {
    const Rational mid = (prof.t[i] + prof.t[i + 1]) / 2;
    CHECK(semigroupNormPow(rho, f, mid, 2) == (prof.value[i] + prof.value[i + 1]) / 2);
  }
}

TEST_CASE("continuous level sets of the case-3 indicator") {
  const StepWeight rho(LineSide::Line, makeCase3());
  const auto f = StepFunction::indicator(LineSide::Line, -1, 0);
  const auto ex = continuousLevelDensity(rho, f, LogNorm::fromLog2(0), Direction::AtLeast, LevelMode::ExactSymbolic, 0);
  CHECK(ex.lower == Rational(3, 7));
  const auto em = continuousLevelDensity(rho, f, LogNorm::fromLog2(0), Direction::AtLeast, LevelMode::Empirical, 262144);
  CHECK(em.lowerValue() == doctest::Approx(3.0 / 7).epsilon(1e-2));
  // rational profile route agrees with the fast route
  const auto prof = normProfile(rho, f, 1, 4096);
  const auto set = continuousLevelSet(prof, Rational(1), Direction::AtLeast);
  const auto fast = continuousPrefixRatios(rho, f, LogNorm::fromLog2(0), Direction::AtLeast, 4096, {1000, 4096});
  CHECK(toDouble(set.measureUpTo(1000) / 1000) == doctest::Approx(fast[0]).epsilon(1e-12));
  CHECK(toDouble(set.measureUpTo(4096) / 4096) == doctest::Approx(fast[1]).epsilon(1e-12));
  CHECK_THROWS_AS(continuousLevelDensity(rho, StepFunction::indicator(LineSide::Line, Rational(-1, 2), 0),
                                         LogNorm::fromLog2(0), Direction::AtLeast, LevelMode::ExactSymbolic, 0),
                  ModeError);
}

TEST_CASE("half-line orbits vanish") {
  const StepWeight rho(LineSide::HalfLine, makeCase3());
  const auto f = StepFunction::indicator(LineSide::HalfLine, 0, 3);
  const auto d = continuousLevelDensity(rho, f, LogNorm::fromLog2(-2), Direction::Below, LevelMode::ExactSymbolic, 0);
  CHECK(d.lower == 1);
  CHECK(semigroupNorm(rho, f, 3, 1).isZero());
}

TEST_CASE("C_s grows with s and respects the analytic cap") {
  const StepWeight rho(LineSide::Line, makeCase3());
  Rational prev = 0;
  for (int q = 1; q <= 8; ++q) {
    const auto c = computeCs(rho, Rational(q, 2), -4096, 64);
    CHECK(c.windowSup <= c.cap);
    CHECK(c.csPow >= prev);
    CHECK(c.csPow == c.cap);
    prev = c.csPow;
  }
  CHECK(computeCs(rho, 1, -4096, 64).csPow == 2);
  CHECK(computeCs(rho, 2, -4096, 64).csPow == 4);
}

TEST_CASE("density bridge holds for both built-in weights") {
  const auto f = StepFunction::indicator(LineSide::Line, -1, 0);
  for (const auto& w : {makeCase3(), makeCase4Corrected()}) {
    const StepWeight rho(LineSide::Line, w);
    for (int s : {1, 2}) {
      const auto r = densBridgeCheck(rho, f, s, 0.25, 4096);
      CHECK(r.pass());
      CHECK(r.inequalities.size() == 4);
      for (const auto& q : r.inequalities) CHECK(q.lhs <= q.rhs);
    }
  }
  CHECK_THROWS_AS(densBridgeCheck(StepWeight(LineSide::Line, makeCase3()), f, 10, 0.5, 50), ParameterError);
}

TEST_CASE("admissibility of rho") {
  CHECK(admissibilityCheck(StepWeight(LineSide::Line, makeConstantOne()), 1, 0.01, -256, 256).pass);
  CHECK(admissibilityCheck(StepWeight(LineSide::Line, makeCase3()), 2, std::log(2.0), -4096, 4096).pass);
  const auto bad = admissibilityCheck(StepWeight(LineSide::HalfLine, makeUnilateralDyadic(-1)), 1,
                                      std::log(2.0) - 0.1, 1, 64);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.witness.has_value());
  CHECK(*bad.witness == std::make_pair<std::int64_t, std::int64_t>(1, 2));
}
