#pragma once

// JSON forms of every report type. Rationals are {"num": n, "den": d}; index
// sets are interval families (symbolic) or run-length bitmaps.

#include "orbitdens/density.hpp"
#include "orbitdens/regimes.hpp"
#include "orbitdens/semigroup.hpp"
#include "orbitdens/shifts.hpp"

#include <json.hpp>

namespace orbitdens {

using Json = nlohmann::ordered_json;

Json toJson(const Rational& r);
Rational rationalFromJson(const Json& j);  // {"num","den"}, integer, or "a/b"

Json toJson(const AffineForm& f);
AffineForm affineFromJson(const Json& j);

Json toJson(const GeomIntervalFamily& fam);
GeomIntervalFamily familyFromJson(const Json& j);

Json toJson(const IndexSet& s);
IndexSet indexSetFromJson(const Json& j);

Json toJson(const DensityEstimate& d);
Json toJson(const PieceGeomWeight& w);
/// Throws ParameterError on missing or mistyped fields.
PieceGeomWeight weightFromJson(const Json& j);

Json toJson(const SparseVector& x);
SparseVector sparseVectorFromJson(const Json& j);

Json toJson(const LintReport& r);
Json toJson(const Witness& w);
Json toJson(const CEstimate& c);
Json toJson(const MeanLResult& m);
Json toJson(const StaircaseResult& s);
Json toJson(const IrregularityCertificate& c);
Json toJson(const RegimeReport& r);

Json toJson(const StepFunction& f);
StepFunction stepFunctionFromJson(const Json& j);
Json toJson(const CsBound& c);
Json toJson(const BridgeReport& r);

/// Rows "path,value,num,den"; rationals as 12 significant digits plus exact parts.
std::string toCsv(const Json& j);

}  // namespace orbitdens
