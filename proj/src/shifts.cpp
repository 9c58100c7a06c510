#include "orbitdens/shifts.hpp"

#include "orbitdens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orbitdens {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t toExponent(i128 e) {
  if (e > i128(1) << 40 || e < -(i128(1) << 40)) throw WeightStructureError("weight exponent out of range");
  return static_cast<std::int64_t>(e);
}

WeightValue forwardValue(const ForwardLaw& f, std::int64_t j) {
  WeightValue v;
  if (f.kind == ForwardLaw::Kind::Reciprocal) {
    v.kind = WeightValue::Kind::Reciprocal;
    v.denominator = j;
  } else {
    v.kind = WeightValue::Kind::Dyadic;
    v.exponent = toExponent(i128(f.slope) * j + f.offset);
  }
  return v;
}

double valueOf(const WeightValue& v) {
  return v.kind == WeightValue::Kind::Dyadic ? std::exp2(static_cast<double>(v.exponent))
                                             : 1.0 / static_cast<double>(v.denominator);
}

// largest k >= 0 with b^k < n
int blockOf(std::int64_t base, std::int64_t n) {
  int k = 0;
  i128 p = base;
  while (p < n) {
    p *= base;
    ++k;
  }
  return k;
}

std::optional<std::int64_t> backwardExponent(const PieceGeomWeight& w, std::int64_t n) {
  if (n <= w.base) return w.baseBandLog2;
  const int k0 = blockOf(w.base, n);
  for (int k : {k0, k0 - 1, k0 + 1}) {
    if (k < 1) continue;
    for (const auto& band : w.bands) {
      if (band.lo.eval(w.base, k) < n && n <= band.hi.eval(w.base, k))
        return toExponent(band.exponent.eval(n, w.base, k));
    }
  }
  return std::nullopt;
}

WeightBand band(AffineForm lo, AffineForm hi, ExponentRule e) { return WeightBand{lo, hi, e}; }

}  // namespace

// ---------------------------------------------------------------------------
// Built-in families, a_k = 8^k

PieceGeomWeight makeCase3() {
  PieceGeomWeight w;
  w.name = "case3";
  w.side = Side::Bilateral;
  w.base = 8;
  w.forward = {ForwardLaw::Kind::Reciprocal, 0, 0};
  w.baseBandLog2 = 0;
  w.bands = {
      band({1, 0, 0}, {1, 1, 0}, {1, -1, 0, 0}),   // a_k < n <= a_k+k      : 2^(n-a_k)
      band({1, 1, 0}, {2, -1, 0}, {0, 0, -1, 0}),  // a_k+k < n <= 2a_k-k   : 2^-k
      band({2, -1, 0}, {2, 0, 0}, {1, -2, 0, 0}),  // 2a_k-k < n <= 2a_k    : 2^(n-2a_k)
      band({2, 0, 0}, {8, 0, 0}, {0, 0, 0, 0}),    // 2a_k < n <= a_{k+1}   : 1
  };
  w.ratioBound = 2.0;
  return w;
}

PieceGeomWeight makeCase4Printed() {
  PieceGeomWeight w;
  w.name = "case4-printed";
  w.side = Side::Bilateral;
  w.base = 8;
  w.forward = {ForwardLaw::Kind::Reciprocal, 0, 0};
  w.baseBandLog2 = 0;
  w.bands = {
      band({1, 0, 0}, {1, 2, 0}, {1, -1, 1, 0}),   // a_k < n <= a_k+2k       : 2^(k+n-a_k)
      band({1, 2, 0}, {1, 3, 1}, {1, -1, -2, 0}),  // a_k+2k < n <= a_k+3k+1  : 2^(-2k+n-a_k)
      band({1, 3, 1}, {8, 0, 0}, {0, 0, 1, 1}),    // a_k+3k+1 < n <= a_{k+1} : 2^(k+1)
  };
  w.ratioBound = 2.0;
  return w;
}

PieceGeomWeight makeCase4Corrected() {
  PieceGeomWeight w;
  w.name = "case4-corrected";
  w.side = Side::Bilateral;
  w.base = 8;
  w.forward = {ForwardLaw::Kind::Reciprocal, 0, 0};
  w.baseBandLog2 = 0;
  w.bands = {
      band({1, 0, 0}, {1, 3, 1}, {1, -1, -2, 0}),  // a_k < n <= a_k+3k+1  : 2^(n-a_k-2k)
      band({1, 3, 1}, {8, 0, 0}, {0, 0, 1, 1}),    // plateau 2^(k+1)
  };
  w.ratioBound = 2.0;
  return w;
}

PieceGeomWeight makeConstantOne() {
  PieceGeomWeight w;
  w.name = "constant-one";
  w.side = Side::Bilateral;
  w.base = 8;
  w.forward = {ForwardLaw::Kind::Dyadic, 0, 0};
  w.baseBandLog2 = 0;
  w.bands = {band({1, 0, 0}, {8, 0, 0}, {0, 0, 0, 0})};
  w.ratioBound = 1.0;
  return w;
}

PieceGeomWeight makeUnilateralReciprocal() {
  PieceGeomWeight w;
  w.name = "unilateral-reciprocal";
  w.side = Side::Unilateral;
  w.forward = {ForwardLaw::Kind::Reciprocal, 0, 0};
  w.ratioBound = 2.0;
  return w;
}

PieceGeomWeight makeUnilateralDyadic(std::int64_t slope) {
  PieceGeomWeight w;
  w.name = "unilateral-dyadic";
  w.side = Side::Unilateral;
  w.forward = {ForwardLaw::Kind::Dyadic, slope, 0};
  w.ratioBound = std::exp2(static_cast<double>(-slope));
  return w;
}

std::optional<PieceGeomWeight> builtinWeight(const std::string& name) {
  if (name == "case3") return makeCase3();
  if (name == "case4-printed") return makeCase4Printed();
  if (name == "case4-corrected") return makeCase4Corrected();
  if (name == "constant-one") return makeConstantOne();
  if (name == "unilateral-reciprocal") return makeUnilateralReciprocal();
  if (name == "unilateral-halving") {
    auto w = makeUnilateralDyadic(-1);
    w.name = name;
    return w;
  }
  return std::nullopt;
}

std::vector<std::string> builtinWeightNames() {
  return {"case3", "case4-printed", "case4-corrected", "constant-one", "unilateral-reciprocal", "unilateral-halving"};
}

// ---------------------------------------------------------------------------
// Evaluation

WeightValue evalWeightExact(const PieceGeomWeight& w, std::int64_t j) {
  if (j >= 1) return forwardValue(w.forward, j);
  if (w.side == Side::Unilateral) throw ParameterError("unilateral weights are indexed by j >= 1");
  const std::int64_t n = -j;
  auto e = backwardExponent(w, n);
  if (!e) {
    std::ostringstream os;
    os << "weight '" << w.name << "': n=" << n << " (j=" << j << ") falls in no band of block k="
       << blockOf(w.base, n);
    throw WeightStructureError(os.str());
  }
  WeightValue v;
  v.kind = WeightValue::Kind::Dyadic;
  v.exponent = *e;
  return v;
}

LogNorm evalWeight(const PieceGeomWeight& w, std::int64_t j) { return evalWeightExact(w, j).log(); }

std::vector<double> backwardLog2Table(const PieceGeomWeight& w, std::int64_t maxN) {
  std::vector<double> t(static_cast<std::size_t>(maxN) + 1, kNaN);
  for (std::int64_t n = 0; n <= std::min(maxN, w.base); ++n) t[n] = static_cast<double>(w.baseBandLog2);
  for (int k = 1; powBase(w.base, k) < maxN; ++k) {
    for (const auto& b : w.bands) {
      const i128 lo = b.lo.eval(w.base, k), hi = std::min<i128>(b.hi.eval(w.base, k), maxN);
      for (i128 n = std::max<i128>(lo + 1, 0); n <= hi; ++n) {
        auto& slot = t[static_cast<std::size_t>(n)];
        if (std::isnan(slot)) slot = static_cast<double>(toExponent(b.exponent.eval(static_cast<std::int64_t>(n), w.base, k)));
      }
    }
  }
  for (std::int64_t n = 0; n <= maxN; ++n)
    if (std::isnan(t[n])) evalWeightExact(w, -n);  // throws with the gap location
  return t;
}

// ---------------------------------------------------------------------------
// Lint

LintReport lintWeight(const PieceGeomWeight& w, int horizonK) {
  if (horizonK < 2) throw ParameterError("lint horizon must be >= 2");
  LintReport r;
  r.claimedRatioBound = w.ratioBound;
  r.positive = true;  // dyadic and reciprocal values are positive by construction
  r.partition = true;
  r.ratioLog2 = -std::numeric_limits<double>::infinity();

  auto consider = [&](double l2, const std::string& where) {
    if (l2 > r.ratioLog2) {
      r.ratioLog2 = l2;
      r.ratioWhere = where;
    }
  };

  // forward side: sup_j v_j / v_{j+1}
  if (w.forward.kind == ForwardLaw::Kind::Reciprocal) {
    consider(1.0, "forward j=1");  // (j+1)/j is largest at j = 1
    r.forwardDecays = true;
  } else {
    consider(static_cast<double>(-w.forward.slope), "forward steps");
    r.forwardDecays = w.forward.slope < 0;
  }

  if (w.side == Side::Unilateral) {
    r.deepDips = r.forwardDecays;
  } else {
    // v_0 / v_1
    consider(static_cast<double>(w.baseBandLog2) - evalWeight(w, 1).log2(), "junction j=0");
    const int cap = maxSafeK(w.base) - 1;
    for (int k = 1; k <= std::min(horizonK, cap); ++k) {
      const i128 blockLo = powBase(w.base, k), blockHi = blockLo * w.base;
      std::vector<const WeightBand*> order;
      for (const auto& b : w.bands) order.push_back(&b);
      std::sort(order.begin(), order.end(),
                [&](auto* a, auto* b) { return a->lo.eval(w.base, k) < b->lo.eval(w.base, k); });
      i128 cursor = blockLo;
      BlockStats st{k, std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::min()};
      for (const auto* b : order) {
        const i128 lo = b->lo.eval(w.base, k), hi = b->hi.eval(w.base, k);
        if (lo > hi) {
          r.partition = false;
          r.partitionIssues.push_back("k=" + std::to_string(k) + ": band with lo > hi");
          continue;
        }
        if (lo == hi) continue;
        if (lo != cursor) {
          r.partition = false;
          std::ostringstream os;
          os << "k=" << k << ": " << (lo > cursor ? "gap" : "overlap") << " at n="
             << static_cast<std::int64_t>(std::min(lo, cursor) + 1) << ".." << static_cast<std::int64_t>(std::max(lo, cursor));
          r.partitionIssues.push_back(os.str());
        }
        cursor = std::max(cursor, hi);
        const auto first = static_cast<std::int64_t>(lo + 1), last = static_cast<std::int64_t>(hi);
        const std::int64_t eFirst = toExponent(b->exponent.eval(first, w.base, k));
        const std::int64_t eLast = toExponent(b->exponent.eval(last, w.base, k));
        st.minLog2 = std::min({st.minLog2, eFirst, eLast});
        st.maxLog2 = std::max({st.maxLog2, eFirst, eLast});
        if (last > first) consider(static_cast<double>(b->exponent.nCoef), "within band, k=" + std::to_string(k));
        try {
          const auto prev = evalWeightExact(w, -(first - 1));
          consider(static_cast<double>(eFirst - prev.exponent), "n=" + std::to_string(first));
        } catch (const WeightStructureError& e) {
          r.partition = false;
          r.partitionIssues.push_back(e.what());
        }
      }
      if (cursor != blockHi) {
        r.partition = false;
        r.partitionIssues.push_back("k=" + std::to_string(k) + ": bands end at n=" +
                                    std::to_string(static_cast<std::int64_t>(cursor)) + " before a_{k+1}");
      }
      r.blocks.push_back(st);
    }
    if (!r.blocks.empty()) {
      const auto& lastBlock = r.blocks.back();
      r.deepDips = lastBlock.minLog2 < 0 && lastBlock.minLog2 < r.blocks.front().minLog2;
    }
  }

  r.ratioBound = std::exp2(r.ratioLog2);
  r.ratioWithinClaim = r.ratioBound <= w.ratioBound;
  if (!r.ratioWithinClaim) {
    std::ostringstream os;
    os << "ratio bound " << r.ratioBound << " at " << r.ratioWhere << " exceeds claimed " << w.ratioBound;
    r.flags.push_back(os.str());
  }
  if (!r.deepDips) r.flags.push_back("no deep dips");
  if (!r.forwardDecays) r.flags.push_back("forward weights do not decay");
  if (!r.partition) r.flags.push_back("band partition broken");
  return r;
}

// ---------------------------------------------------------------------------
// Vectors and orbits

SparseVector::SparseVector(Side side, double p, std::map<std::int64_t, double> entries) : side_(side), p_(p) {
  if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
  for (const auto& [j, c] : entries) {
    if (c == 0.0) continue;
    if (side == Side::Unilateral && j < 1) throw ParameterError("unilateral indices start at 1");
    entries_.emplace(j, c);
  }
}

SparseVector SparseVector::unit(Side side, std::int64_t j, double p, double coef) {
  return SparseVector(side, p, {{j, coef}});
}

SparseVector SparseVector::scaled(double c) const {
  std::map<std::int64_t, double> e;
  for (const auto& [j, v] : entries_) e.emplace(j, v * c);
  return SparseVector(side_, p_, std::move(e));
}

LogNorm norm(const PieceGeomWeight& w, const SparseVector& x) { return orbitNormClosedForm(w, x, 0); }

LogNorm orbitNormClosedForm(const PieceGeomWeight& w, const SparseVector& x, std::int64_t n) {
  if (n < 0) throw ParameterError("iterate index must be >= 0");
  std::vector<LogNorm> terms;
  terms.reserve(x.entries().size());
  for (const auto& [i, c] : x.entries()) {
    const std::int64_t idx = i - n;
    if (w.side == Side::Unilateral && idx < 1) continue;
    terms.push_back(LogNorm::fromLog2(x.p() * std::log2(std::fabs(c)) + evalWeight(w, idx).log2()));
  }
  return logSum(terms).pow(1.0 / x.p());
}

SparseVector applyShiftIter(const PieceGeomWeight& w, const SparseVector& x, std::int64_t n) {
  if (n < 0) throw ParameterError("iterate index must be >= 0");
  std::map<std::int64_t, double> out;
  for (const auto& [i, c] : x.entries()) {
    const std::int64_t idx = i - n;
    if (w.side == Side::Unilateral && idx < 1) continue;
    out.emplace(idx, c);
  }
  return SparseVector(x.side(), x.p(), std::move(out));
}

std::vector<LogNorm> orbitNorms(const PieceGeomWeight& w, const SparseVector& x, std::int64_t horizon) {
  std::vector<LogNorm> out(static_cast<std::size_t>(horizon));
  if (x.isZero()) return out;
  const std::int64_t minIdx = x.entries().begin()->first;
  std::vector<double> table;
  if (w.side == Side::Bilateral) table = backwardLog2Table(w, std::max<std::int64_t>(0, horizon - minIdx));
  std::vector<std::pair<double, std::int64_t>> coefs;  // (p*log2|c|, i)
  for (const auto& [i, c] : x.entries()) coefs.emplace_back(x.p() * std::log2(std::fabs(c)), i);
  const double invP = 1.0 / x.p();
  std::vector<double> t(coefs.size());
  for (std::int64_t n = 1; n <= horizon; ++n) {
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t cnt = 0;
    for (const auto& [lc, i] : coefs) {
      const std::int64_t idx = i - n;
      double lv;
      if (idx <= 0) {
        if (w.side == Side::Unilateral) continue;
        lv = table[static_cast<std::size_t>(-idx)];
      } else {
        lv = evalWeight(w, idx).log2();
      }
      t[cnt] = lc + lv;
      mx = std::max(mx, t[cnt]);
      ++cnt;
    }
    if (cnt == 0) continue;
    double acc = 0;
    for (std::size_t q = 0; q < cnt; ++q) acc += std::exp2(t[q] - mx);
    out[n - 1] = LogNorm::fromLog2((mx + std::log2(acc)) * invP);
  }
  return out;
}

std::optional<std::int64_t> hypercyclicityProbe(const PieceGeomWeight& w, std::int64_t q, double eps,
                                                std::int64_t horizon, double p) {
  if (w.side != Side::Bilateral) throw ParameterError("hypercyclicityProbe needs bilateral weights");
  if (q < 0 || !(eps > 0) || horizon < q) throw ParameterError("need q >= 0, eps > 0, horizon >= q");
  const double bar = std::pow(eps, p);
  for (std::int64_t n = 1; n <= horizon; ++n) {
    bool ok = true;
    for (std::int64_t i = -q; i <= q && ok; ++i)
      ok = valueOf(evalWeightExact(w, i - n)) < bar && valueOf(evalWeightExact(w, i + n)) < bar;
    if (ok) return n;
  }
  return std::nullopt;
}

std::optional<std::int64_t> unilateralHCProbe(const PieceGeomWeight& w, double eps, std::int64_t horizon, double p) {
  if (!(eps > 0)) throw ParameterError("eps must be > 0");
  const double bar = std::pow(eps, p);
  for (std::int64_t n = 1; n <= horizon; ++n)
    if (valueOf(forwardValue(w.forward, n)) < bar) return n;
  return std::nullopt;
}

}  // namespace orbitdens
