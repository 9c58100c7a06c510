#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitdens/errors.hpp"
#include "orbitdens/shifts.hpp"
#include "orbitdens/verify/oracles.hpp"

#include <random>

using namespace orbitdens;

namespace {

SparseVector randomProbe(std::mt19937_64& rng, Side side, double p) {
  std::uniform_int_distribution<int> size(1, 5), idx(side == Side::Bilateral ? -20 : 1, 20);
  std::uniform_real_distribution<double> coef(-4, 4);
  std::map<std::int64_t, double> e;
  for (int i = size(rng); i > 0; --i) e[idx(rng)] = coef(rng) + 4.5;
  return SparseVector(side, p, e);
}

PieceGeomWeight gapped() {
  auto w = makeCase3();
  w.name = "gapped";
  w.bands.erase(w.bands.begin() + 1);
  return w;
}

}  // namespace

TEST_CASE("case-3 band values at block landmarks") {
  const auto w = makeCase3();
  const std::int64_t a = 512;  // k = 3
  CHECK(evalWeightExact(w, -(a + 1)).exponent == 1);
  CHECK(evalWeightExact(w, -(a + 3)).exponent == 3);
  CHECK(evalWeightExact(w, -(a + 4)).exponent == -3);
  CHECK(evalWeightExact(w, -(2 * a - 3)).exponent == -3);
  CHECK(evalWeightExact(w, -(2 * a - 2)).exponent == -2);
  CHECK(evalWeightExact(w, -(2 * a)).exponent == 0);
  CHECK(evalWeightExact(w, -(8 * a)).exponent == 0);
  CHECK(evalWeightExact(w, 0).exponent == 0);
  CHECK(evalWeightExact(w, -8).exponent == 0);
  const auto f = evalWeightExact(w, 5);
  CHECK(f.kind == WeightValue::Kind::Reciprocal);
  CHECK(f.exact() == Rational(1, 5));
}

TEST_CASE("corrected case-4 values") {
  const auto w = makeCase4Corrected();
  const std::int64_t a = 64;  // k = 2
  CHECK(evalWeightExact(w, -(a + 1)).exponent == -3);
  CHECK(evalWeightExact(w, -(a + 7)).exponent == 3);
  CHECK(evalWeightExact(w, -(a + 8)).exponent == 3);
  CHECK(evalWeightExact(w, -(8 * a)).exponent == 3);
}

TEST_CASE("evaluator agrees with the band-table oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> j(-3000000, 200);
  for (const auto& w : {makeCase3(), makeCase4Printed(), makeCase4Corrected(), makeConstantOne()})
    for (int t = 0; t < 400; ++t) {
      const auto jj = j(rng);
      if (jj == 0 && w.forward.kind == ForwardLaw::Kind::Reciprocal) continue;
      CAPTURE(jj);
      CHECK(evalWeightExact(w, jj).exact() == oracle::weightValue(w, jj));
    }
}

TEST_CASE("lint of the built-in weights") {
  const auto l3 = lintWeight(makeCase3(), 12);
  CHECK(l3.pass());
  CHECK(l3.ratioBound == 2.0);
  const auto l4 = lintWeight(makeCase4Corrected(), 12);
  CHECK(l4.pass());
  CHECK(l4.ratioBound == 2.0);
  const auto lp = lintWeight(makeCase4Printed(), 12);
  CHECK_FALSE(lp.pass());
  CHECK_FALSE(lp.deepDips);
  CHECK(std::find(lp.flags.begin(), lp.flags.end(), "no deep dips") != lp.flags.end());
  REQUIRE(lp.blocks.size() == 12);
  for (const auto& b : lp.blocks) CHECK(b.minLog2 == 1);
}

TEST_CASE("a band gap is a structural error that names the gap") {
  const auto w = gapped();
  const auto l = lintWeight(w, 6);
  CHECK_FALSE(l.partition);
  REQUIRE_FALSE(l.partitionIssues.empty());
  CHECK(l.partitionIssues.front().find("gap") != std::string::npos);
  CHECK_THROWS_AS(evalWeightExact(w, -(512 + 10)), WeightStructureError);
}

TEST_CASE("unilateral weights reject indices below 1") {
  const auto w = makeUnilateralReciprocal();
  CHECK_THROWS_AS(evalWeightExact(w, 0), ParameterError);
  CHECK(evalWeightExact(w, 7).exact() == Rational(1, 7));
  CHECK(evalWeightExact(makeUnilateralDyadic(-1), 3).exact() == Rational(1, 8));
}

TEST_CASE("closed-form orbit norms agree with shifting the vector") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::int64_t> nd(0, 20000);
  const std::vector<PieceGeomWeight> ws{makeCase3(), makeCase4Corrected(), makeUnilateralReciprocal()};
  for (int t = 0; t < 300; ++t) {
    const auto& w = ws[t % 3];
    const double p = 1 + t % 3;
    const auto x = randomProbe(rng, w.side, p);
    const auto n = nd(rng);
    const auto closed = orbitNormClosedForm(w, x, n);
    const auto shifted = applyShiftIter(w, x, n);
    const long double direct = oracle::orbitNormPow(w, shifted);
    if (direct == 0) {
      CHECK(closed.isZero());
      continue;
    }
    CHECK(closed.log2() == doctest::Approx(static_cast<double>(std::log2(direct)) / p).epsilon(1e-12));
  }
}

TEST_CASE("tabulated orbit norms match the closed form") {
  std::mt19937_64 rng(7);
  for (const auto& w : {makeCase3(), makeCase4Corrected()}) {
    const auto x = randomProbe(rng, Side::Bilateral, 2.0);
    const auto norms = orbitNorms(w, x, 5000);
    REQUIRE(norms.size() == 5000);
    for (std::int64_t n : {1, 9, 77, 512, 1031, 4999, 5000})
      CHECK(norms[n - 1].log2() == doctest::Approx(orbitNormClosedForm(w, x, n).log2()).epsilon(1e-12));
  }
}

TEST_CASE("norm scales linearly with the vector") {
  const auto w = makeCase3();
  const SparseVector x(Side::Bilateral, 3.0, {{-2, 1.0}, {4, -2.5}});
  for (double c : {0.25, 3.0, -8.0})
    for (std::int64_t n : {0, 10, 600})
      CHECK(orbitNormClosedForm(w, x.scaled(c), n).log2() ==
            doctest::Approx(orbitNormClosedForm(w, x, n).log2() + std::log2(std::fabs(c))));
}

TEST_CASE("shift moves coefficients and drops them on the unilateral side") {
  const auto w = makeUnilateralReciprocal();
  const SparseVector x(Side::Unilateral, 1.0, {{1, 1.0}, {3, 2.0}});
  const auto y = applyShiftIter(w, x, 2);
  REQUIRE(y.entries().size() == 1);
  CHECK(y.entries().at(1) == 2.0);
  CHECK(applyShiftIter(w, x, 3).isZero());
  CHECK(orbitNormClosedForm(w, x, 3).isZero());
}

TEST_CASE("hypercyclicity evidence") {
  const auto hc = hypercyclicityProbe(makeCase3(), 1, 0.125, 262144);
  REQUIRE(hc.has_value());
  CHECK(*hc == 4102);  // n-1 enters (a+k, 2a-k] at k=4
  CHECK_FALSE(hypercyclicityProbe(makeCase4Printed(), 0, 0.99, 32768).has_value());
  CHECK_FALSE(hypercyclicityProbe(makeConstantOne(), 0, 0.5, 4096).has_value());
  const auto u = unilateralHCProbe(makeUnilateralReciprocal(), 0.125, 4096);
  REQUIRE(u.has_value());
  CHECK(*u == 9);
}

TEST_CASE("built-in registry") {
  for (const auto& n : builtinWeightNames()) {
    const auto w = builtinWeight(n);
    REQUIRE(w.has_value());
    CHECK(w->name == n);
  }
  CHECK_FALSE(builtinWeight("nope").has_value());
}

TEST_CASE("zero coefficients are not stored") {
  const SparseVector x(Side::Bilateral, 1.0, {{0, 0.0}, {1, 1.0}});
  CHECK(x.entries().size() == 1);
  CHECK(norm(makeCase3(), SparseVector(Side::Bilateral, 1.0)).isZero());
}
