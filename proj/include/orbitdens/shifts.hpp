#pragma once

// Weighted l^p sequence spaces and backward shifts (Bx)_j = x_{j+1}.
//
// Index convention on the bilateral side: the weight at j <= 0 is addressed
// by n = -j, and block k >= 1 covers (b^k, b^{k+1}]. Every band value is a
// power of two whose exponent is affine in n, b^k and k, so values and
// per-step ratios are exact in log2.

#include "orbitdens/affine.hpp"
#include "orbitdens/log_norm.hpp"
#include "orbitdens/rational.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orbitdens {

enum class Side { Unilateral, Bilateral };

/// v_j for j >= 1: 1/j, or 2^(slope*j + offset).
struct ForwardLaw {
  enum class Kind { Reciprocal, Dyadic };
  Kind kind = Kind::Reciprocal;
  std::int64_t slope = 0;
  std::int64_t offset = 0;
  bool operator==(const ForwardLaw&) const = default;
};

/// Exponent e = nCoef*n + aCoef*b^k + kCoef*k + c.
struct ExponentRule {
  std::int64_t nCoef = 0;
  std::int64_t aCoef = 0;
  std::int64_t kCoef = 0;
  std::int64_t c = 0;

  i128 eval(std::int64_t n, std::int64_t base, int k) const {
    return i128(nCoef) * n + i128(aCoef) * powBase(base, k) + i128(kCoef) * k + c;
  }
  bool operator==(const ExponentRule&) const = default;
};

/// v(n) = 2^exponent for lo(k) < n <= hi(k).
struct WeightBand {
  AffineForm lo;
  AffineForm hi;
  ExponentRule exponent;
  bool operator==(const WeightBand&) const = default;
};

struct PieceGeomWeight {
  std::string name;
  Side side = Side::Bilateral;
  std::int64_t base = 8;
  ForwardLaw forward;
  std::int64_t baseBandLog2 = 0;  // value on 0 <= n <= b
  std::vector<WeightBand> bands;  // bilateral only
  double ratioBound = 2.0;        // claimed sup v_j / v_{j+1}
  bool operator==(const PieceGeomWeight&) const = default;
};

/// Exact weight value: 2^exponent or 1/denominator.
struct WeightValue {
  enum class Kind { Dyadic, Reciprocal };
  Kind kind = Kind::Dyadic;
  std::int64_t exponent = 0;
  std::int64_t denominator = 1;

  LogNorm log() const {
    return kind == Kind::Dyadic ? LogNorm::fromLog2(static_cast<double>(exponent))
                                : LogNorm::fromLog2(-std::log2(static_cast<double>(denominator)));
  }
  Rational exact() const { return kind == Kind::Dyadic ? pow2(exponent) : Rational(1, denominator); }
};

PieceGeomWeight makeCase3();
PieceGeomWeight makeCase4Printed();
PieceGeomWeight makeCase4Corrected();
/// Bilateral v = 1 everywhere (bounded, not hypercyclic).
PieceGeomWeight makeConstantOne();
/// Unilateral v_j = 1/j.
PieceGeomWeight makeUnilateralReciprocal();
/// Unilateral v_j = 2^(slope*j).
PieceGeomWeight makeUnilateralDyadic(std::int64_t slope);
/// "case3", "case4-printed", "case4-corrected", "constant-one", "unilateral-reciprocal", "unilateral-halving".
std::optional<PieceGeomWeight> builtinWeight(const std::string& name);
std::vector<std::string> builtinWeightNames();

/// v_j. Throws WeightStructureError when j falls in no band, ParameterError off the index set.
WeightValue evalWeightExact(const PieceGeomWeight& w, std::int64_t j);
LogNorm evalWeight(const PieceGeomWeight& w, std::int64_t j);

/// log2 v(n) = log2 v_{-n} for n = 0..maxN (bilateral), built block by block.
std::vector<double> backwardLog2Table(const PieceGeomWeight& w, std::int64_t maxN);

struct BlockStats {
  int k = 0;
  std::int64_t minLog2 = 0;
  std::int64_t maxLog2 = 0;
};

struct LintReport {
  double ratioBound = 0;        // verified sup v(n)/v(n-1), all sides
  double ratioLog2 = 0;
  std::string ratioWhere;       // location the bound is attained
  double claimedRatioBound = 0;
  bool ratioWithinClaim = false;
  bool positive = false;
  bool partition = false;
  std::vector<std::string> partitionIssues;
  std::vector<BlockStats> blocks;
  bool deepDips = false;       // block minima head to 0 on the backward side
  bool forwardDecays = false;  // v_j -> 0 as j -> +inf
  std::vector<std::string> flags;

  bool pass() const { return positive && partition && ratioWithinClaim && deepDips && forwardDecays; }
};

LintReport lintWeight(const PieceGeomWeight& w, int horizonK);

/// Finite-support vector in l^p(v); stored coefficients are nonzero.
class SparseVector {
 public:
  SparseVector(Side side, double p, std::map<std::int64_t, double> entries = {});
  static SparseVector unit(Side side, std::int64_t j, double p, double coef = 1.0);

  Side side() const { return side_; }
  double p() const { return p_; }
  const std::map<std::int64_t, double>& entries() const { return entries_; }
  bool isZero() const { return entries_.empty(); }
  SparseVector scaled(double c) const;
  bool operator==(const SparseVector&) const = default;

 private:
  Side side_;
  double p_;
  std::map<std::int64_t, double> entries_;
};

/// ||x||, log domain.
LogNorm norm(const PieceGeomWeight& w, const SparseVector& x);
/// ||B^n x|| = (sum_i |x_i|^p v_{i-n})^(1/p).
LogNorm orbitNormClosedForm(const PieceGeomWeight& w, const SparseVector& x, std::int64_t n);
/// B^n x. Unilateral: indices below 1 are dropped.
SparseVector applyShiftIter(const PieceGeomWeight& w, const SparseVector& x, std::int64_t n);

/// ||B^n x|| for n = 1..horizon (index n-1), via a precomputed weight table.
std::vector<LogNorm> orbitNorms(const PieceGeomWeight& w, const SparseVector& x, std::int64_t horizon);

/// Smallest n <= horizon with v_{i-n} < eps^p and v_{i+n} < eps^p for all |i| <= q.
std::optional<std::int64_t> hypercyclicityProbe(const PieceGeomWeight& w, std::int64_t q, double eps,
                                                std::int64_t horizon, double p = 1.0);
/// Smallest n <= horizon with v_n < eps^p (unilateral).
std::optional<std::int64_t> unilateralHCProbe(const PieceGeomWeight& w, double eps, std::int64_t horizon,
                                              double p = 1.0);

}  // namespace orbitdens
