#include "orbitdens/json_io.hpp"

#include "orbitdens/errors.hpp"

#include <cstdio>
#include <sstream>

namespace orbitdens {

namespace {

Json bigToJson(const BigInt& v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return static_cast<std::int64_t>(v);
  return v.str();
}

BigInt bigFromJson(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw ParameterError("expected an integer");
}

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw ParameterError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParameterError(std::string("field '") + name + "' has the wrong type");
  }
}

template <class T>
T fieldOr(const Json& j, const char* name, T def) {
  return j.contains(name) ? field<T>(j, name) : def;
}

const char* dirName(Direction d) { return d == Direction::Below ? "below" : "atLeast"; }
const char* sideName(Side s) { return s == Side::Bilateral ? "bilateral" : "unilateral"; }
const char* lineName(LineSide s) { return s == LineSide::Line ? "line" : "halfLine"; }

std::string kindName(IrregularityKind k) { return k == IrregularityKind::Type1 ? "type1" : "type2half"; }

}  // namespace

Json toJson(const Rational& r) { return Json{{"num", bigToJson(numerator(r))}, {"den", bigToJson(denominator(r))}}; }

Rational rationalFromJson(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(BigInt(s));
      const BigInt den(s.substr(slash + 1));
      if (den == 0) throw ParameterError("zero denominator");
      return Rational(BigInt(s.substr(0, slash)), den);
    } catch (const std::runtime_error&) {
      throw ParameterError("bad rational '" + s + "'");
    }
  }
  if (j.is_object() && j.contains("num") && j.contains("den")) {
    const BigInt den = bigFromJson(j.at("den"));
    if (den == 0) throw ParameterError("zero denominator");
    return Rational(bigFromJson(j.at("num")), den);
  }
  throw ParameterError("expected a rational");
}

Json toJson(const AffineForm& f) { return Json{{"alpha", f.alpha}, {"beta", f.beta}, {"gamma", f.gamma}}; }

AffineForm affineFromJson(const Json& j) {
  return {fieldOr<std::int64_t>(j, "alpha", 0), fieldOr<std::int64_t>(j, "beta", 0),
          fieldOr<std::int64_t>(j, "gamma", 0)};
}

Json toJson(const GeomIntervalFamily& fam) {
  Json s = Json::array();
  for (const auto& sc : fam.schemas) s.push_back(Json{{"kMin", sc.kMin}, {"lo", toJson(sc.lo)}, {"hi", toJson(sc.hi)}});
  return Json{{"base", fam.base}, {"schemas", s}};
}

GeomIntervalFamily familyFromJson(const Json& j) {
  GeomIntervalFamily fam;
  fam.base = field<std::int64_t>(j, "base");
  for (const auto& s : field<Json>(j, "schemas"))
    fam.schemas.push_back({fieldOr<int>(s, "kMin", 1), affineFromJson(field<Json>(s, "lo")),
                           affineFromJson(field<Json>(s, "hi"))});
  fam.validate();
  return fam;
}

Json toJson(const IndexSet& s) {
  if (s.isSymbolic()) return Json{{"family", toJson(s.family())}};
  Json runs = Json::array();
  const auto bits = s.bitmap();
  for (std::size_t i = 0; i < bits.size();) {
    if (!bits[i]) {
      ++i;
      continue;
    }
    std::size_t e = i;
    while (e < bits.size() && bits[e]) ++e;
    runs.push_back(Json::array({static_cast<std::int64_t>(i + 1), static_cast<std::int64_t>(e - i)}));
    i = e;
  }
  return Json{{"horizon", s.horizon()}, {"runs", runs}};
}

IndexSet indexSetFromJson(const Json& j) {
  if (j.contains("family")) return IndexSet::symbolic(familyFromJson(j.at("family")));
  const auto horizon = field<std::int64_t>(j, "horizon");
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  IndexSet::Bitmap bits(static_cast<std::size_t>(horizon));
  for (const auto& r : field<Json>(j, "runs")) {
    const auto start = r.at(0).get<std::int64_t>(), len = r.at(1).get<std::int64_t>();
    if (start < 1 || len < 0 || start + len - 1 > horizon) throw ParameterError("run outside [1, horizon]");
    for (std::int64_t n = start; n < start + len; ++n) bits[n - 1] = 1;
  }
  return IndexSet::fromBitmap(std::move(bits));
}

Json toJson(const DensityEstimate& d) {
  Json j{{"kind", d.kind == DensityKind::Exact ? "exact" : "empirical"},
         {"lower", toJson(d.lower)},
         {"upper", toJson(d.upper)},
         {"lowerValue", d.lowerValue()},
         {"upperValue", d.upperValue()}};
  if (d.horizon) j["horizon"] = *d.horizon;
  if (d.tailWindowStart) j["tailWindowStart"] = *d.tailWindowStart;
  return j;
}

Json toJson(const PieceGeomWeight& w) {
  Json bands = Json::array();
  for (const auto& b : w.bands)
    bands.push_back(Json{{"lo", toJson(b.lo)},
                         {"hi", toJson(b.hi)},
                         {"exponent",
                          {{"n", b.exponent.nCoef}, {"a", b.exponent.aCoef}, {"k", b.exponent.kCoef}, {"c", b.exponent.c}}}});
  return Json{{"name", w.name},
              {"side", sideName(w.side)},
              {"base", w.base},
              {"forward",
               {{"kind", w.forward.kind == ForwardLaw::Kind::Reciprocal ? "reciprocal" : "dyadic"},
                {"slope", w.forward.slope},
                {"offset", w.forward.offset}}},
              {"baseBandLog2", w.baseBandLog2},
              {"bands", bands},
              {"ratioBound", w.ratioBound}};
}

PieceGeomWeight weightFromJson(const Json& j) {
  if (!j.is_object()) throw ParameterError("weight document must be an object");
  PieceGeomWeight w;
  w.name = fieldOr<std::string>(j, "name", "custom");
  const auto side = fieldOr<std::string>(j, "side", "bilateral");
  if (side == "bilateral") w.side = Side::Bilateral;
  else if (side == "unilateral") w.side = Side::Unilateral;
  else throw ParameterError("side must be 'bilateral' or 'unilateral'");
  w.base = fieldOr<std::int64_t>(j, "base", 8);
  if (w.base < 2) throw ParameterError("base must be >= 2");
  const Json fw = fieldOr<Json>(j, "forward", Json{{"kind", "reciprocal"}});
  const auto kind = fieldOr<std::string>(fw, "kind", "reciprocal");
  if (kind == "reciprocal") w.forward.kind = ForwardLaw::Kind::Reciprocal;
  else if (kind == "dyadic") w.forward.kind = ForwardLaw::Kind::Dyadic;
  else throw ParameterError("forward.kind must be 'reciprocal' or 'dyadic'");
  w.forward.slope = fieldOr<std::int64_t>(fw, "slope", 0);
  w.forward.offset = fieldOr<std::int64_t>(fw, "offset", 0);
  w.baseBandLog2 = fieldOr<std::int64_t>(j, "baseBandLog2", 0);
  for (const auto& b : fieldOr<Json>(j, "bands", Json::array())) {
    const Json e = field<Json>(b, "exponent");
    w.bands.push_back({affineFromJson(field<Json>(b, "lo")), affineFromJson(field<Json>(b, "hi")),
                       {fieldOr<std::int64_t>(e, "n", 0), fieldOr<std::int64_t>(e, "a", 0),
                        fieldOr<std::int64_t>(e, "k", 0), fieldOr<std::int64_t>(e, "c", 0)}});
  }
  if (w.side == Side::Bilateral && w.bands.empty()) throw ParameterError("bilateral weights need bands");
  w.ratioBound = fieldOr<double>(j, "ratioBound", 2.0);
  return w;
}

Json toJson(const SparseVector& x) {
  Json e = Json::array();
  for (const auto& [j, c] : x.entries()) e.push_back(Json::array({j, c}));
  return Json{{"side", sideName(x.side())}, {"p", x.p()}, {"entries", e}};
}

SparseVector sparseVectorFromJson(const Json& j) {
  const auto side = fieldOr<std::string>(j, "side", "bilateral") == "unilateral" ? Side::Unilateral : Side::Bilateral;
  std::map<std::int64_t, double> e;
  for (const auto& p : field<Json>(j, "entries")) e[p.at(0).get<std::int64_t>()] += p.at(1).get<double>();
  return SparseVector(side, fieldOr<double>(j, "p", 1.0), std::move(e));
}

Json toJson(const LintReport& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) blocks.push_back(Json{{"k", b.k}, {"minLog2", b.minLog2}, {"maxLog2", b.maxLog2}});
  return Json{{"pass", r.pass()},
              {"ratioBound", r.ratioBound},
              {"ratioLog2", r.ratioLog2},
              {"ratioWhere", r.ratioWhere},
              {"claimedRatioBound", r.claimedRatioBound},
              {"ratioWithinClaim", r.ratioWithinClaim},
              {"positive", r.positive},
              {"partition", r.partition},
              {"partitionIssues", r.partitionIssues},
              {"deepDips", r.deepDips},
              {"forwardDecays", r.forwardDecays},
              {"blocks", blocks},
              {"flags", r.flags}};
}

Json toJson(const Witness& w) {
  return Json{{"probe", w.probe},
              {"thresholdLog2", w.thresholdLog2},
              {"direction", dirName(w.direction)},
              {"density", toJson(w.density)}};
}

Json toJson(const CEstimate& c) {
  return Json{{"cLo", toJson(c.cLo)},
              {"cHi", toJson(c.cHi)},
              {"cLoValue", toDouble(c.cLo)},
              {"cHiValue", toDouble(c.cHi)},
              {"kind", c.kind == DensityKind::Exact ? "exact" : "empirical"},
              {"loWitness", toJson(c.loWitness)},
              {"hiWitness", toJson(c.hiWitness)},
              {"caveats", c.caveats}};
}

Json toJson(const MeanLResult& m) {
  Json hits = Json::array();
  for (const auto& h : m.hits)
    hits.push_back(Json{{"delta", h.delta}, {"probe", h.probe}, {"probeNormLog2", h.probeNormLog2}, {"density", toJson(h.density)}});
  Json j{{"unstable", m.unstable}, {"summary", m.summary}, {"hits", hits}};
  if (m.unstable) j["eps"] = m.eps;
  return j;
}

Json toJson(const StaircaseResult& s) {
  return Json{{"levels", s.levels},
              {"thresholds", s.thresholds},
              {"stalled", s.stalled},
              {"diagnostic", s.diagnostic},
              {"set", toJson(s.set)}};
}

Json toJson(const IrregularityCertificate& c) {
  Json j{{"requested", kindName(c.requested)},
         {"achieved", c.achieved ? Json(kindName(*c.achieved)) : Json(nullptr)},
         {"horizon", c.horizon},
         {"densityA", toJson(c.densityA)},
         {"densityB", toJson(c.densityB)},
         {"densityAValue", toDouble(c.densityA)},
         {"densityBValue", toDouble(c.densityB)},
         {"decaySchedule", c.decaySchedule},
         {"growthSchedule", c.growthSchedule},
         {"setA", toJson(c.setA)},
         {"setB", toJson(c.setB)},
         {"caveats", c.caveats}};
  return j;
}

Json toJson(const RegimeReport& r) {
  Json w = Json::object();
  for (const auto& [k, v] : r.witnesses) w[k] = toJson(v);
  Json j{{"regime", regimeName(r.regime)},
         {"c", toJson(r.c.cLo == r.c.cHi ? r.c.cLo : r.c.cHi)},
         {"cEstimate", toJson(r.c)},
         {"hypercyclicityWitness", r.hypercyclicityWitness ? Json(*r.hypercyclicityWitness) : Json(nullptr)},
         {"meanL", toJson(r.meanL)},
         {"witnesses", w},
         {"caveats", r.caveats}};
  j["certificate"] = r.certificate ? toJson(*r.certificate) : Json(nullptr);
  if (r.c.cLo != r.c.cHi) j.erase("c");
  return j;
}

Json toJson(const StepFunction& f) {
  Json b = Json::array();
  for (const auto& r : f.breakpoints()) b.push_back(toJson(r));
  return Json{{"side", lineName(f.side())}, {"breakpoints", b}, {"values", f.values()}};
}

StepFunction stepFunctionFromJson(const Json& j) {
  const auto side = fieldOr<std::string>(j, "side", "line") == "halfLine" ? LineSide::HalfLine : LineSide::Line;
  std::vector<Rational> b;
  for (const auto& r : field<Json>(j, "breakpoints")) b.push_back(rationalFromJson(r));
  return StepFunction(side, std::move(b), field<std::vector<double>>(j, "values"));
}

Json toJson(const CsBound& c) {
  return Json{{"windowSup", toJson(c.windowSup)}, {"cap", toJson(c.cap)}, {"csPow", toJson(c.csPow)},
              {"active", c.capActive ? "cap" : "window"}};
}

Json toJson(const BridgeReport& r) {
  Json q = Json::array();
  for (const auto& i : r.inequalities)
    q.push_back(Json{{"name", i.name},
                     {"lhs", toJson(i.lhs)},
                     {"rhs", toJson(i.rhs)},
                     {"lhsValue", toDouble(i.lhs)},
                     {"rhsValue", toDouble(i.rhs)},
                     {"holds", i.holds},
                     {"pointwise", i.pointwise}});
  return Json{{"pass", r.pass()}, {"s", toJson(r.s)}, {"eps", r.eps}, {"horizon", r.horizon}, {"Cs", toJson(r.cs)},
              {"inequalities", q}};
}

namespace {

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

std::string sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool isRational(const Json& j) { return j.is_object() && j.size() == 2 && j.contains("num") && j.contains("den"); }

void flatten(const Json& j, const std::string& path, std::ostringstream& os) {
  if (isRational(j)) {
    const Rational r = rationalFromJson(j);
    os << csvField(path) << "," << sig12(toDouble(r)) << "," << numerator(r) << "," << denominator(r) << "\n";
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", os);
  } else if (j.is_number_float()) {
    os << csvField(path) << "," << sig12(j.get<double>()) << ",,\n";
  } else if (j.is_string()) {
    os << csvField(path) << "," << csvField(j.get<std::string>()) << ",,\n";
  } else {
    os << csvField(path) << "," << j.dump() << ",,\n";
  }
}

}  // namespace

std::string toCsv(const Json& j) {
  std::ostringstream os;
  os << "path,value,num,den\n";
  flatten(j, "", os);
  return os.str();
}

}  // namespace orbitdens
