#pragma once

// Translation semigroups (T_t f)(x) = f(x + t) on L^p_rho with the step weight
// rho_v(t) = v_n on (n-1, n]. Functions are step functions with rational
// breakpoints; integrals, translations and level-set measures are exact.

#include "orbitdens/density.hpp"
#include "orbitdens/regimes.hpp"
#include "orbitdens/shifts.hpp"

#include <optional>
#include <string>
#include <vector>

namespace orbitdens {

enum class LineSide { HalfLine, Line };

class StepWeight {
 public:
  /// HalfLine uses v_n for n >= 1; Line needs a bilateral source.
  StepWeight(LineSide side, PieceGeomWeight source);

  LineSide side() const { return side_; }
  const PieceGeomWeight& source() const { return source_; }
  /// Verified sup v(n)/v(n-1) of the source.
  double ratioBound() const { return ratioBound_; }
  /// rho on the unit cell (n-1, n].
  WeightValue cell(std::int64_t n) const;

 private:
  LineSide side_;
  PieceGeomWeight source_;
  double ratioBound_ = 0;
};

class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(LineSide side, std::vector<Rational> breakpoints, std::vector<double> values);
  static StepFunction zero(LineSide side) { return StepFunction(side, {}, {}); }
  static StepFunction indicator(LineSide side, const Rational& a, const Rational& b, double value = 1.0);

  LineSide side() const { return side_; }
  const std::vector<Rational>& breakpoints() const { return bps_; }
  const std::vector<double>& values() const { return vals_; }
  bool isZero() const { return vals_.empty(); }
  bool integerBreakpoints() const;
  double at(const Rational& x) const;
  bool operator==(const StepFunction&) const = default;

 private:
  LineSide side_ = LineSide::HalfLine;
  std::vector<Rational> bps_;
  std::vector<double> vals_;  // vals_[i] on (bps_[i], bps_[i+1])
};

struct AdmissibilityResult {
  bool pass = true;
  // first violating (cell of s, cell of s + t) and the bound there
  std::optional<std::pair<std::int64_t, std::int64_t>> witness;
  double lhsLog2 = 0;
  double rhsLog2 = 0;
};

/// rho(s) <= M e^{omega t} rho(t + s) over cell pairs with both cells in [windowLo, windowHi].
AdmissibilityResult admissibilityCheck(const StepWeight& rho, double M, double omega, std::int64_t windowLo,
                                       std::int64_t windowHi);

/// T_t f, t >= 0. The half line drops what moves below 0.
StepFunction translate(const StepFunction& f, const Rational& t);

/// integral of |f(s + t)|^p rho(s) ds; integer p, exact.
Rational semigroupNormPow(const StepWeight& rho, const StepFunction& f, const Rational& t, int p);
/// Same integral via the translated function.
Rational semigroupNormPowTranslated(const StepWeight& rho, const StepFunction& f, const Rational& t, int p);
/// ||T_t f|| in log domain, any real p >= 1.
LogNorm semigroupNorm(const StepWeight& rho, const StepFunction& f, const Rational& t, double p);

/// Unit-cell masses m_n = integral over [n-1, n] of |f|^p (integer p, exact).
std::map<std::int64_t, Rational> blockMasses(const StepFunction& f, int p);
/// x^f with x_n = m_n^(1/p).
SparseVector blockEmbed(const StepFunction& f, double p);

/// N(t) = ||T_t f||^p on [0, horizon] as a piecewise-linear profile.
struct NormProfile {
  std::vector<Rational> t;
  std::vector<Rational> value;
};
NormProfile normProfile(const StepWeight& rho, const StepFunction& f, int p, std::int64_t horizon);

/// {t in [0, horizon] : N(t) < theta} or >= theta, as disjoint closed intervals.
struct ContinuousSet {
  std::vector<std::pair<Rational, Rational>> intervals;
  std::vector<Rational> cumulative;  // measure of intervals[0..i)
  Rational horizon;
  Rational measureUpTo(const Rational& T) const;
};
ContinuousSet continuousLevelSet(const NormProfile& prof, const Rational& theta, Direction dir);

/// min / max of mu(A ∩ [0,T]) / T over T in [tailStart, horizon].
DensityEstimate continuousDensity(const ContinuousSet& set, const Rational& tailStart);

/// Empirical mode (cell decomposition) or exact delegation to the discrete family
/// (integer breakpoints; same level set up to o(t) measure).
DensityEstimate continuousLevelDensity(const StepWeight& rho, const StepFunction& f, LogNorm threshold,
                                       Direction dir, LevelMode mode, std::int64_t horizon, int p = 1);
/// Prefix ratio mu(A ∩ [0, T]) / T at the given times (cell decomposition in extended precision).
std::vector<double> continuousPrefixRatios(const StepWeight& rho, const StepFunction& f, LogNorm threshold,
                                             Direction dir, std::int64_t horizon, const std::vector<std::int64_t>& at,
                                             int p = 1);

struct CsBound {
  Rational windowSup;  // sup over t in [0,s], cells in window, of rho(u) / rho(u + t)
  Rational cap;        // C^ceil(s)
  Rational csPow;      // C_s^p = max(windowSup, cap)
  bool capActive = true;
  double cs(double p) const { return std::pow(toDouble(csPow), 1.0 / p); }
};
CsBound computeCs(const StepWeight& rho, const Rational& s, std::int64_t windowLo, std::int64_t windowHi);

struct BridgeInequality {
  std::string name;
  Rational lhs;
  Rational rhs;
  bool holds = false;
  bool pointwise = false;  // finite form at every aligned time J*s
};

struct BridgeReport {
  Rational s;
  double eps = 0;
  std::int64_t horizon = 0;
  CsBound cs;
  std::vector<BridgeInequality> inequalities;  // four sandwich inequalities
  bool pass() const;
};

/// Throws ParameterError if horizon < 10 s.
BridgeReport densBridgeCheck(const StepWeight& rho, const StepFunction& f, const Rational& s, double eps,
                             std::int64_t horizon, int p = 1);

}  // namespace orbitdens
