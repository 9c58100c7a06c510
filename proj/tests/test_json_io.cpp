#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitdens/errors.hpp"
#include "orbitdens/json_io.hpp"

using namespace orbitdens;

TEST_CASE("rationals round-trip in every accepted form") {
  for (const Rational& r : {Rational(4, 7), Rational(-3, 2), Rational(0), pow2(80), pow2(-70)}) {
    const auto j = toJson(r);
    CHECK(rationalFromJson(j) == r);
  }
  CHECK(toJson(Rational(4, 7)) == Json::parse(R"({"num": 4, "den": 7})"));
  CHECK(rationalFromJson(Json(5)) == 5);
  CHECK(rationalFromJson(Json("-3/9")) == Rational(-1, 3));
  CHECK_THROWS_AS(rationalFromJson(Json("1/0")), ParameterError);
  CHECK_THROWS_AS(rationalFromJson(Json("x")), ParameterError);
  CHECK_THROWS_AS(rationalFromJson(Json(0.5)), ParameterError);
}

TEST_CASE("weights round-trip") {
  for (const auto& n : builtinWeightNames()) {
    const auto w = *builtinWeight(n);
    CHECK(weightFromJson(toJson(w)) == w);
  }
  CHECK_THROWS_AS(weightFromJson(Json::array()), ParameterError);
  CHECK_THROWS_AS(weightFromJson(Json{{"side", "sideways"}}), ParameterError);
  auto j = toJson(makeCase3());
  j["bands"][0].erase("exponent");
  CHECK_THROWS_AS(weightFromJson(j), ParameterError);
}

TEST_CASE("families and index sets round-trip") {
  const GeomIntervalFamily fam{8, {{1, {2, 0, 0}, {8, 0, 0}}, {3, {1, 1, 0}, {2, -1, 0}}}};
  CHECK(familyFromJson(toJson(fam)) == fam);
  const auto sym = IndexSet::symbolic(fam);
  CHECK(indexSetFromJson(toJson(sym)) == sym);
  const auto mat = IndexSet::materialize(fam, 3000);
  const auto j = toJson(mat);
  CHECK(j.contains("runs"));
  CHECK(indexSetFromJson(j) == mat);
  CHECK_THROWS_AS(indexSetFromJson(Json::parse(R"({"horizon": 5, "runs": [[4, 3]]})")), ParameterError);
  CHECK_THROWS_AS(familyFromJson(Json::parse(R"({"base": 8, "schemas": [{"lo": {"alpha": 2}, "hi": {"alpha": 1}}]})")),
                  MalformedFamilyError);
}

TEST_CASE("probes and step functions round-trip") {
  const SparseVector x(Side::Bilateral, 2.0, {{-3, 0.5}, {4, -1.25}});
  CHECK(sparseVectorFromJson(toJson(x)) == x);
  const StepFunction f(LineSide::Line, {Rational(-3, 2), 0, Rational(7, 3)}, {1.0, -0.25});
  CHECK(stepFunctionFromJson(toJson(f)) == f);
  const StepFunction h(LineSide::HalfLine, {0, 2}, {3.0});
  CHECK(stepFunctionFromJson(toJson(h)) == h);
}

TEST_CASE("regime report carries the exact c") {
  ClassifyOptions opt;
  opt.horizon = 4096;
  opt.certificate = false;
  const auto j = toJson(classify(makeCase3(), {SparseVector::unit(Side::Bilateral, 0, 1.0)}, opt));
  CHECK(j["regime"] == "3");
  CHECK(j["c"] == Json::parse(R"({"num": 4, "den": 7})"));
  CHECK(j.dump(2).find("\"regime\": \"3\"") != std::string::npos);
}

TEST_CASE("serialization is deterministic") {
  ClassifyOptions opt;
  opt.horizon = 4096;
  const auto w = makeCase4Corrected();
  const auto a = toJson(classify(w, defaultProbes(w), opt)).dump();
  const auto b = toJson(classify(w, defaultProbes(w), opt)).dump();
  CHECK(a == b);
}

TEST_CASE("csv flattens rationals with exact parts") {
  const Json j{{"lint", {{"ratioBound", 2.0}}}, {"c", toJson(Rational(4, 7))}, {"names", {"a", "b"}}};
  const auto csv = toCsv(j);
  CHECK(csv.rfind("path,value,num,den\n", 0) == 0);
  CHECK(csv.find("c,0.571428571429,4,7") != std::string::npos);
  CHECK(csv.find("lint.ratioBound,2,,") != std::string::npos);
  CHECK(csv.find("names[1],b,,") != std::string::npos);
}
