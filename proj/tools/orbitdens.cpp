#include "orbitdens/errors.hpp"
#include "orbitdens/json_io.hpp"
#include "orbitdens/regimes.hpp"
#include "orbitdens/semigroup.hpp"
#include "orbitdens/shifts.hpp"
#include "orbitdens/verify/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace orbitdens;

namespace {

enum Exit { Ok = 0, Failed = 1, Usage = 2, Structural = 3 };

struct Common {
  std::string format = "json";
  std::string output;
  int horizonK = 7;
  double p = 1.0;
  std::uint64_t seed = 0;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::int64_t pow8(int k) {
  std::int64_t r = 1;
  while (k-- > 0) r *= 8;
  return r;
}

Json parseJsonArg(const std::string& s) {
  // inline document, or @path / path to a file
  std::string text = s;
  std::string path = !s.empty() && s[0] == '@' ? s.substr(1) : std::string();
  if (path.empty() && !s.empty() && s[0] != '{' && s[0] != '[') path = s;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParameterError(std::string("invalid JSON: ") + e.what());
  }
}

PieceGeomWeight loadWeight(const std::string& spec) {
  if (auto w = builtinWeight(spec)) return *w;
  std::ifstream probe(spec);
  if (!probe) {
    std::string names;
    for (const auto& n : builtinWeightNames()) names += " " + n;
    throw ParameterError("'" + spec + "' is neither a built-in weight (" + names.substr(1) + ") nor a readable file");
  }
  return weightFromJson(parseJsonArg(spec));
}

std::vector<SparseVector> loadProbes(const std::vector<std::string>& specs, const PieceGeomWeight& w, double p) {
  if (specs.empty()) return defaultProbes(w, p);
  std::vector<SparseVector> out;
  for (const auto& s : specs) {
    Json j = parseJsonArg(s);
    if (!j.contains("p")) j["p"] = p;
    if (!j.contains("side")) j["side"] = w.side == Side::Unilateral ? "unilateral" : "bilateral";
    out.push_back(sparseVectorFromJson(j));
  }
  return out;
}

std::vector<std::int64_t> defaultCheckpoints(int K) {
  std::set<std::int64_t> s;
  for (int k = 1; k <= K; ++k) {
    s.insert(2 * pow8(k));
    s.insert(pow8(k) + k);
    s.insert(pow8(k + 1));
  }
  return {s.begin(), s.end()};
}

void emit(const Common& c, const Json& j) {
  const std::string text = c.format == "csv" ? toCsv(j) : j.dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw ParameterError("cannot write '" + c.output + "'");
  out << text;
}

void checkCommon(const Common& c) {
  if (c.horizonK < 2 || c.horizonK > 9) throw ParameterError("--horizon-k must be in 2..9");
  if (!(c.p >= 1)) throw ParameterError("--p must be >= 1");
}

Direction parseDirection(const std::string& s) {
  if (s == "below") return Direction::Below;
  if (s == "atleast" || s == "atLeast") return Direction::AtLeast;
  throw ParameterError("--direction must be 'below' or 'atleast'");
}

LevelMode parseMode(const std::string& s) {
  if (s == "exact") return LevelMode::ExactSymbolic;
  if (s == "empirical") return LevelMode::Empirical;
  throw ParameterError("--mode must be 'exact' or 'empirical'");
}

// ---------------------------------------------------------------------------

int cmdWeights(const Common& c, const std::string& spec, bool strict, const std::vector<std::int64_t>& at) {
  const auto w = loadWeight(spec);
  const auto lint = lintWeight(w, std::max(12, c.horizonK));
  if (!lint.partition) {
    std::string msg = "weight '" + w.name + "' does not partition the blocks:";
    for (const auto& i : lint.partitionIssues) msg += "\n  " + i;
    throw StructuralError(msg);
  }
  Json table = Json::array();
  const auto points = at.empty() ? defaultCheckpoints(c.horizonK) : at;
  for (auto n : points) {
    const std::int64_t j = w.side == Side::Bilateral ? -n : n;
    const auto v = evalWeightExact(w, j);
    Json row{{"j", j}, {"log2", v.log().log2()}};
    if (v.kind == WeightValue::Kind::Dyadic) row["exponent"] = v.exponent;
    else row["value"] = toJson(v.exact());
    table.push_back(row);
  }
  emit(c, Json{{"weight", toJson(w)}, {"lint", toJson(lint)}, {"table", table}});
  if (strict && !lint.pass()) {
    std::cerr << "lint failed:";
    for (const auto& f : lint.flags) std::cerr << " [" << f << "]";
    std::cerr << "\n";
    return Failed;
  }
  return Ok;
}

int cmdClassify(const Common& c, const std::string& spec, const std::vector<std::string>& probes, bool noCert) {
  const auto w = loadWeight(spec);
  ClassifyOptions opt;
  opt.horizon = pow8(c.horizonK - 1);
  opt.p = c.p;
  opt.certificate = !noCert;
  const auto rep = classify(w, loadProbes(probes, w, c.p), opt);
  Json j = toJson(rep);
  j["weight"] = w.name;
  j["horizon"] = opt.horizon;
  emit(c, j);
  return Ok;
}

int cmdOrbit(const Common& c, const std::string& spec, const std::vector<std::string>& probes,
             const std::vector<std::int64_t>& at) {
  const auto w = loadWeight(spec);
  Json out = Json::array();
  const auto points = at.empty() ? defaultCheckpoints(c.horizonK) : at;
  for (const auto& x : loadProbes(probes, w, c.p)) {
    Json rows = Json::array();
    for (auto n : points) {
      if (n < 0) throw ParameterError("orbit times must be >= 0");
      const auto v = orbitNormClosedForm(w, x, n);
      rows.push_back(Json{{"n", n}, {"log2", v.isZero() ? Json(nullptr) : Json(v.log2())}, {"value", v.value()}});
    }
    out.push_back(Json{{"probe", toJson(x)}, {"norms", rows}});
  }
  emit(c, Json{{"weight", w.name}, {"orbits", out}});
  return Ok;
}

int cmdDensity(const Common& c, const std::string& spec, const std::vector<std::string>& probes, double thrLog2,
               const std::string& dir, const std::string& mode, const std::string& family) {
  if (!family.empty()) {
    const auto fam = familyFromJson(parseJsonArg(family));
    emit(c, Json{{"family", toJson(fam)}, {"density", toJson(exactUnionDensity(fam))}});
    return Ok;
  }
  if (spec.empty()) throw ParameterError("density needs a weight or --family");
  const auto w = loadWeight(spec);
  const auto d = parseDirection(dir);
  const auto horizon = pow8(c.horizonK);
  Json out = Json::array();
  for (const auto& x : loadProbes(probes, w, c.p)) {
    const LevelSetSpec ls{x, LogNorm::fromLog2(thrLog2), d};
    Json row{{"probe", toJson(x)}};
    if (mode == "both" || mode == "exact") {
      if (supportsExact(w)) {
        row["exact"] = toJson(levelSetDensity(w, ls, LevelMode::ExactSymbolic, horizon));
        if (w.side == Side::Bilateral) row["family"] = toJson(levelSetFamily(w, ls));
      } else if (mode == "exact") {
        throw ModeError("exact level sets are not available for '" + w.name + "'");
      }
    }
    if (mode == "both" || mode == "empirical")
      row["empirical"] = toJson(levelSetDensity(w, ls, LevelMode::Empirical, horizon));
    if (mode != "both") parseMode(mode);
    out.push_back(row);
  }
  emit(c, Json{{"weight", w.name},
               {"thresholdLog2", thrLog2},
               {"direction", d == Direction::Below ? "below" : "atLeast"},
               {"horizon", horizon},
               {"levelSets", out}});
  return Ok;
}

int cmdCertify(const Common& c, const std::string& spec, const std::vector<std::string>& probes,
               const std::string& kind, double scale) {
  const auto w = loadWeight(spec);
  IrregularityKind k;
  if (kind == "type1") k = IrregularityKind::Type1;
  else if (kind == "type2half") k = IrregularityKind::Type2Half;
  else throw ParameterError("--kind must be 'type1' or 'type2half'");
  Json out = Json::array();
  for (const auto& x : loadProbes(probes, w, c.p))
    out.push_back(Json{{"probe", toJson(x)},
                       {"certificate", toJson(irregularityCertificate(w, x, k, pow8(c.horizonK - 1), scale))}});
  emit(c, Json{{"weight", w.name}, {"certificates", out}});
  return Ok;
}

struct SemigroupArgs {
  std::string side = "line";
  std::string f;
  std::vector<std::string> s{"1", "2"};
  std::vector<double> eps{0.5, 0.125};
  double thrLog2 = 0;
  std::string dir = "atleast";
  std::vector<double> admissibility;  // M omega
};

int cmdSemigroup(const Common& c, const std::string& spec, const SemigroupArgs& a) {
  const auto w = loadWeight(spec);
  const LineSide side = a.side == "halfline" || a.side == "halfLine" ? LineSide::HalfLine : LineSide::Line;
  if (side == LineSide::Line && a.side != "line") throw ParameterError("--side must be 'line' or 'halfline'");
  if (c.p != std::floor(c.p)) throw ParameterError("semigroup computations need integer --p");
  const int p = static_cast<int>(c.p);
  const StepWeight rho(side, w);
  const StepFunction f = a.f.empty() ? StepFunction::indicator(side, side == LineSide::Line ? -1 : 0,
                                                               side == LineSide::Line ? 0 : 1)
                                     : [&] {
                                         Json j = parseJsonArg(a.f);
                                         if (!j.contains("side")) j["side"] = side == LineSide::Line ? "line" : "halfLine";
                                         return stepFunctionFromJson(j);
                                       }();
  const auto horizon = pow8(c.horizonK - 2);
  Json bridges = Json::array();
  for (const auto& s : a.s)
    for (double e : a.eps) bridges.push_back(toJson(densBridgeCheck(rho, f, rationalFromJson(Json(s)), e, horizon, p)));
  const std::int64_t dh = pow8(c.horizonK);
  const auto d = parseDirection(a.dir);
  Json dens{{"thresholdLog2", a.thrLog2},
            {"direction", d == Direction::Below ? "below" : "atLeast"},
            {"empirical", toJson(continuousLevelDensity(rho, f, LogNorm::fromLog2(a.thrLog2), d, LevelMode::Empirical, dh, p))}};
  if (f.integerBreakpoints() && (side == LineSide::HalfLine || supportsExact(w)))
    dens["exact"] = toJson(continuousLevelDensity(rho, f, LogNorm::fromLog2(a.thrLog2), d, LevelMode::ExactSymbolic, dh, p));
  Json j{{"weight", w.name}, {"f", toJson(f)}, {"ratioBound", rho.ratioBound()}, {"bridges", bridges},
         {"continuousDensity", dens}};
  bool ok = true;
  for (const auto& b : bridges) ok = ok && b["pass"].get<bool>();
  if (a.admissibility.size() == 2) {
    const std::int64_t lo = side == LineSide::Line ? -4096 : 1;
    const auto r = admissibilityCheck(rho, a.admissibility[0], a.admissibility[1], lo, 4096);
    Json ad{{"M", a.admissibility[0]}, {"omega", a.admissibility[1]}, {"pass", r.pass}};
    if (r.witness) ad["witness"] = Json::array({r.witness->first, r.witness->second});
    j["admissibility"] = ad;
  }
  emit(c, j);
  return ok ? Ok : Failed;
}

int cmdVerify(const Common& c, const std::vector<std::string>& only) {
  VerifyOptions opt;
  opt.horizonK = c.horizonK;
  opt.only = only;
  opt.seed = c.seed;
  const bool text = c.format != "json" && c.format != "csv";
  const auto results = runVerification(opt, [&](const CriterionResult& r) {
    if (text) std::cout << formatResult(r) << std::flush;
  });
  bool ok = true;
  Json arr = Json::array();
  for (const auto& r : results) {
    ok = ok && r.pass;
    arr.push_back(Json{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"details", r.details}});
  }
  if (!text) emit(c, Json{{"horizonK", c.horizonK}, {"seed", c.seed}, {"pass", ok}, {"criteria", arr}});
  else std::cout << (ok ? "all selected criteria pass\n" : "verification FAILED\n");
  return ok ? Ok : Failed;
}

void addCommon(CLI::App* app, Common& c, int defaultK) {
  c.horizonK = defaultK;
  app->add_option("--format", c.format, "json or csv");
  app->add_option("--output,-o", c.output, "write the report to a file");
  app->add_option("--horizon-k", c.horizonK, "horizon 8^k")->capture_default_str();
  app->add_option("--p", c.p, "exponent p >= 1")->capture_default_str();
  app->add_option("--seed", c.seed, "seed for randomized suites")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-density behaviour of weighted backward shifts and translation semigroups"};
  app.require_subcommand(1);

  Common cw, cc, co, cd, cce, cs, cv;
  cv.format = "text";
  std::string weight, family, kind = "type2half", dir = "below", mode = "both";
  std::vector<std::string> probes, only;
  std::vector<std::int64_t> at;
  bool strict = false, noCert = false;
  double thrLog2 = -1, scale = 1;
  SemigroupArgs sg;

  auto* weights = app.add_subcommand("weights", "lint a weight and tabulate v at checkpoints");
  addCommon(weights, cw, 7);
  weights->add_option("weight", weight, "built-in name or JSON file")->required();
  weights->add_flag("--strict", strict, "exit 1 when the lint fails");
  weights->add_option("--at", at, "checkpoints n (v at j = -n on the bilateral side)");

  auto* cls = app.add_subcommand("classify", "four-regime classification");
  addCommon(cls, cc, 7);
  cls->add_option("weight", weight)->required();
  cls->add_option("--probe", probes, "probe vector JSON {\"entries\": [[j, x_j], ...]}");
  cls->add_flag("--no-certificate", noCert);

  auto* orbit = app.add_subcommand("orbit", "tabulate ||B^n x|| at checkpoints");
  addCommon(orbit, co, 7);
  orbit->add_option("weight", weight)->required();
  orbit->add_option("--probe", probes);
  orbit->add_option("--at", at);

  auto* dens = app.add_subcommand("density", "exact and empirical level-set densities");
  addCommon(dens, cd, 6);
  dens->add_option("weight", weight);
  dens->add_option("--probe", probes);
  dens->add_option("--threshold-log2", thrLog2, "R = 2^r")->capture_default_str();
  dens->add_option("--direction", dir, "below or atleast")->capture_default_str();
  dens->add_option("--mode", mode, "exact, empirical or both")->capture_default_str();
  dens->add_option("--family", family, "interval family JSON (exact union density)");

  auto* cert = app.add_subcommand("certify", "distributional irregularity certificates");
  addCommon(cert, cce, 7);
  cert->add_option("weight", weight)->required();
  cert->add_option("--probe", probes);
  cert->add_option("--kind", kind, "type1 or type2half")->capture_default_str();
  cert->add_option("--scale", scale, "threshold scale")->capture_default_str();

  auto* semi = app.add_subcommand("semigroup", "bridge checks and continuous densities for T_t");
  addCommon(semi, cs, 6);
  semi->add_option("weight", weight)->required();
  semi->add_option("--side", sg.side, "line or halfline")->capture_default_str();
  semi->add_option("--f", sg.f, "step function JSON {\"breakpoints\": [...], \"values\": [...]}");
  semi->add_option("--s", sg.s, "bridge step sizes (rationals such as 1/2)");
  semi->add_option("--eps", sg.eps, "bridge thresholds");
  semi->add_option("--threshold-log2", sg.thrLog2)->capture_default_str();
  semi->add_option("--direction", sg.dir)->capture_default_str();
  semi->add_option("--admissibility", sg.admissibility, "M omega")->expected(2);

  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  addCommon(ver, cv, 7);
  ver->add_option("--only", only, "groups (density shifts regimes semigroup properties) or criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  try {
    const std::pair<CLI::App*, Common*> subs[] = {{weights, &cw}, {cls, &cc},  {orbit, &co}, {dens, &cd},
                                                  {cert, &cce},   {semi, &cs}, {ver, &cv}};
    for (const auto& [sub, c] : subs)
      if (sub->parsed()) {
        const bool okFormat = c->format == "json" || c->format == "csv" || (sub == ver && c->format == "text");
        if (!okFormat) throw ParameterError("--format must be json or csv" + std::string(sub == ver ? " or text" : ""));
        checkCommon(*c);
      }
    if (weights->parsed()) return cmdWeights(cw, weight, strict, at);
    if (cls->parsed()) return cmdClassify(cc, weight, probes, noCert);
    if (orbit->parsed()) return cmdOrbit(co, weight, probes, at);
    if (dens->parsed()) return cmdDensity(cd, weight, probes, thrLog2, dir, mode, family);
    if (cert->parsed()) return cmdCertify(cce, weight, probes, kind, scale);
    if (semi->parsed()) return cmdSemigroup(cs, weight, sg);
    if (ver->parsed()) return cmdVerify(cv, only);
  } catch (const StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return Structural;
  } catch (const WeightStructureError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return Structural;
  } catch (const InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << "\n";
    return Failed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}
