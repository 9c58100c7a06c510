#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitdens/density.hpp"
#include "orbitdens/errors.hpp"
#include "orbitdens/verify/oracles.hpp"

#include <algorithm>
#include <random>

using namespace orbitdens;

namespace {

GeomIntervalFamily one(std::int64_t b, int kMin, AffineForm lo, AffineForm hi) { return {b, {{kMin, lo, hi}}}; }

// min/max of the prefix ratio over the block (b^K, b^(K+1)], straight from the bitmap
std::pair<double, double> blockRange(const std::vector<std::uint8_t>& bits, std::int64_t from, std::int64_t to) {
  std::int64_t cnt = 0;
  double lo = 2, hi = -1;
  for (std::int64_t n = 1; n <= to; ++n) {
    cnt += bits[n - 1];
    if (n >= from) {
      const double r = double(cnt) / double(n);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("lower density of the dyadic-ratio family is 3/7") {
  const auto d = exactUnionDensity(one(8, 1, {2, 0, 0}, {8, 0, 0}));
  CHECK(d.kind == DensityKind::Exact);
  CHECK(d.lower == Rational(3, 7));
  CHECK(d.upper == Rational(6, 7));
}

TEST_CASE("upper density of the shrinking-interval family is 4/7 for every start") {
  for (int m = 1; m <= 4; ++m) {
    const auto d = exactUnionDensity(one(8, m, {1, 1, 0}, {2, -1, 0}));
    CHECK(d.upper == Rational(4, 7));
    CHECK(d.lower == Rational(1, 7));
  }
}

TEST_CASE("thin families have density zero") {
  const auto fam = one(8, 1, {1, 0, 0}, {1, 3, 2});
  CHECK(fam.thin());
  const auto d = exactUnionDensity(fam);
  CHECK(d.lower == 0);
  CHECK(d.upper == 0);
}

TEST_CASE("malformed and unsupported families are rejected") {
  CHECK_THROWS_AS(one(1, 1, {1, 0, 0}, {2, 0, 0}).validate(), MalformedFamilyError);
  CHECK_THROWS_AS(one(8, 1, {2, 0, 0}, {1, 0, 0}).validate(), MalformedFamilyError);
  CHECK_THROWS_AS(one(8, 1, {1, 0, 5}, {1, 0, 0}).validate(), MalformedFamilyError);
  CHECK_THROWS_AS(one(8, 1, {0, 0, 1}, {1, 0, 0}).validate(), UnsupportedStructureError);
}

TEST_CASE("exact densities bracket brute-force prefix ratios on random families") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> base(4, 8), a(1, 4), extra(1, 3), beta(-2, 2), gamma(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::int64_t b = base(rng);
    const int al = a(rng), ar = std::min<int>(al + extra(rng), static_cast<int>(b));
    GeomIntervalFamily fam{b, {{2, {al, beta(rng), gamma(rng)}, {ar, beta(rng), gamma(rng)}}}};
    try {
      fam.validate();
    } catch (const MalformedFamilyError&) {
      continue;
    }
    const auto d = exactUnionDensity(fam);
    int K = 2;
    std::int64_t bk = b * b;
    while (bk * b * b <= 3000000) {
      bk *= b;
      ++K;
    }
    const auto bits = oracle::familyBitmap(fam, bk * b);
    const auto [lo, hi] = blockRange(bits, bk + 1, bk * b);
    CAPTURE(trial);
    CAPTURE(b);
    CHECK(std::fabs(toDouble(d.lower) - lo) < 1e-2);
    CHECK(std::fabs(toDouble(d.upper) - hi) < 1e-2);
  }
}

TEST_CASE("materialized families match the oracle bitmap") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> a(1, 3), g(-2, 2);
  for (int trial = 0; trial < 25; ++trial) {
    const int al = a(rng);
    GeomIntervalFamily fam{8, {{1, {al, 0, g(rng)}, {al + a(rng), 0, g(rng)}}}};
    const auto set = IndexSet::materialize(fam, 40000);
    const auto bits = oracle::familyBitmap(fam, 40000);
    CHECK(set.bitmap() == bits);
    CHECK(set.count() == std::count(bits.begin(), bits.end(), 1));
  }
}

TEST_CASE("empirical density is the tail-window min and max of the prefix ratio") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    IndexSet::Bitmap bits(1000);
    for (auto& v : bits) v = coin(rng);
    const auto d = empiricalDensity(IndexSet::fromBitmap(bits), 100);
    Rational lo = 2, hi = -1;
    std::int64_t cnt = 0;
    for (std::int64_t n = 1; n <= 1000; ++n) {
      cnt += bits[n - 1];
      if (n >= 100) {
        lo = std::min(lo, Rational(cnt, n));
        hi = std::max(hi, Rational(cnt, n));
      }
    }
    CHECK(d.lower == lo);
    CHECK(d.upper == hi);
    CHECK(d.kind == DensityKind::Empirical);
    CHECK(d.horizon == 1000);
  }
  CHECK_THROWS_AS(empiricalDensity(IndexSet::fromBitmap(IndexSet::Bitmap(6)), 4), ParameterError);
}

TEST_CASE("complement duality and involution") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 20; ++trial) {
    IndexSet::Bitmap bits(800), comp(800);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = coin(rng);
      comp[i] = !bits[i];
    }
    const auto d = empiricalDensity(IndexSet::fromBitmap(bits));
    const auto c = empiricalDensity(IndexSet::fromBitmap(comp));
    const auto dc = complementDensity(d);
    CHECK(dc.lower == c.lower);
    CHECK(dc.upper == c.upper);
    CHECK(complementDensity(dc) == d);
  }
  const auto e = exactUnionDensity(one(8, 1, {2, 0, 0}, {8, 0, 0}));
  CHECK(complementDensity(e).lower == Rational(1, 7));
  CHECK(complementDensity(e).upper == Rational(4, 7));
}

TEST_CASE("translation preserves exact densities") {
  const auto fam = one(8, 1, {2, 0, 0}, {8, 0, 0});
  for (std::int64_t c : {-5, 1, 17}) {
    const auto d = exactUnionDensity(fam.translated(c));
    CHECK(d.lower == Rational(3, 7));
    CHECK(d.upper == Rational(6, 7));
  }
}

TEST_CASE("index set representations agree") {
  const auto set = IndexSet::fromList({2, 3, 7, 10}, 12);
  CHECK(set.count() == 4);
  CHECK(set.contains(7));
  CHECK_FALSE(set.contains(8));
  IndexSet::Bitmap bits(12, 0);
  for (int n : {2, 3, 7, 10}) bits[n - 1] = 1;
  CHECK(set == IndexSet::fromBitmap(bits));
  CHECK(set.prefixCounts().back() == 4);
  CHECK_THROWS_AS(IndexSet::fromList({3, 2}, 12), ParameterError);
  CHECK_THROWS_AS(IndexSet::fromList({13}, 12), ParameterError);
  CHECK_THROWS_AS(IndexSet::symbolic(one(8, 1, {1, 0, 0}, {2, 0, 0})).bitmap(), ModeError);
}

TEST_CASE("staircase follows deeper levels and keeps the target density") {
  // a_n = 2^-depth(n), depth = 1 + (n/2 mod 4) on even n and 0 on odd n
  const std::int64_t H = 6000;
  std::map<int, IndexSet> lows;
  for (int m = 1; m <= 3; ++m) {
    IndexSet::Bitmap bits(H);
    for (std::int64_t n = 1; n <= H; ++n) {
      const int depth = n % 2 == 0 ? 1 + static_cast<int>((n / 2) % 4) : 0;
      bits[n - 1] = depth > m;
    }
    lows.emplace(m, IndexSet::fromBitmap(bits));
  }
  const auto st = extractDensityOneSubset(lows, StaircaseMode::Upper, empiricalDensity(lows.at(1)).upper);
  CHECK_FALSE(st.levels.empty());
  CHECK(std::is_sorted(st.thresholds.begin(), st.thresholds.end()));
  const auto base = lows.at(1).bitmap();
  const auto got = st.set.bitmap();
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i]) REQUIRE(base[i]);
}

TEST_CASE("staircase rejects non-nested level sets") {
  IndexSet::Bitmap a(64, 0), b(64, 0);
  a[0] = 1;
  b[1] = 1;
  std::map<int, IndexSet> lows{{1, IndexSet::fromBitmap(a)}, {2, IndexSet::fromBitmap(b)}};
  CHECK_THROWS_AS(extractDensityOneSubset(lows, StaircaseMode::Upper), ParameterError);
}
