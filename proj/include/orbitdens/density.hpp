#pragma once

// Natural density calculus over the positive integers: exact densities of
// geometric interval families, empirical prefix-ratio densities of finite
// sets, and the staircase extraction of a density-one (or upper-density)
// subsequence along which a sequence tends to zero.

#include "orbitdens/affine.hpp"
#include "orbitdens/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orbitdens {

/// [lo(k), hi(k)] ∩ N for every k >= kMin.
struct IntervalSchema {
  int kMin = 1;
  AffineForm lo;
  AffineForm hi;
  bool operator==(const IntervalSchema&) const = default;
};

struct GeomIntervalFamily {
  std::int64_t base = 8;
  std::vector<IntervalSchema> schemas;

  /// Throws MalformedFamilyError / UnsupportedStructureError.
  void validate() const;
  /// Every interval moved by c.
  GeomIntervalFamily translated(std::int64_t c) const;
  /// True when no schema has alphaR > alphaL (all interval lengths are o(b^k)).
  bool thin() const;
  bool operator==(const GeomIntervalFamily&) const = default;
};

/// Subset of [1, horizon] or a symbolic family over N.
class IndexSet {
 public:
  using Bitmap = std::vector<std::uint8_t>;  // entry i <-> n = i + 1

  IndexSet() = default;
  static IndexSet fromBitmap(Bitmap bits);
  /// Strictly increasing elements in [1, horizon].
  static IndexSet fromList(std::vector<std::int64_t> elems, std::int64_t horizon);
  static IndexSet symbolic(GeomIntervalFamily fam);
  /// Bitmap of fam ∩ [1, horizon].
  static IndexSet materialize(const GeomIntervalFamily& fam, std::int64_t horizon);

  bool isSymbolic() const { return std::holds_alternative<GeomIntervalFamily>(rep_); }
  const GeomIntervalFamily& family() const { return std::get<GeomIntervalFamily>(rep_); }
  std::int64_t horizon() const { return horizon_; }

  bool contains(std::int64_t n) const;
  std::int64_t count() const;
  /// Dense 0/1 view of [1, horizon]; not available for symbolic sets.
  Bitmap bitmap() const;
  std::vector<std::int64_t> elements() const;
  /// prefix[n] = #(A ∩ [1, n]) for n = 0..horizon.
  std::vector<std::int64_t> prefixCounts() const;

  bool operator==(const IndexSet& o) const;

 private:
  struct List {
    std::vector<std::int64_t> elems;
  };
  std::variant<Bitmap, List, GeomIntervalFamily> rep_{Bitmap{}};
  std::int64_t horizon_ = 0;
};

enum class DensityKind { Exact, Empirical };

struct DensityEstimate {
  Rational lower;
  Rational upper;
  DensityKind kind = DensityKind::Exact;
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> tailWindowStart;

  double lowerValue() const { return toDouble(lower); }
  double upperValue() const { return toDouble(upper); }
  bool operator==(const DensityEstimate&) const = default;
};

/// Default tail window start for a horizon: horizon / 8.
inline std::int64_t defaultTailWindow(std::int64_t horizon) { return horizon / 8; }

/// min / max of #(A ∩ [1,n]) / n over n in [tailWindowStart, horizon].
/// Requires horizon >= 2 * tailWindowStart >= 4.
DensityEstimate empiricalDensity(const IndexSet& set, std::int64_t tailWindowStart);
DensityEstimate empiricalDensity(const IndexSet& set);

/// liminf / limsup of the counting ratio of the family, as exact rationals.
DensityEstimate exactUnionDensity(const GeomIntervalFamily& fam);

/// (1 - upper, 1 - lower).
DensityEstimate complementDensity(const DensityEstimate& d);

enum class StaircaseMode { Upper, Full };

struct StaircaseResult {
  IndexSet set;
  std::vector<int> levels;                 // m of each achieved stage, increasing
  std::vector<std::int64_t> thresholds;    // N for each achieved stage
  bool stalled = false;
  std::string diagnostic;

  int deepestLevel() const { return levels.empty() ? 0 : levels.back(); }
};

/// Staircase construction: levelSets[m] = {n : |a_n| < 2^-m}, nested and
/// decreasing in m, over a common horizon. Stage for level m picks the
/// smallest member N_m > N_prev whose prefix ratio reaches target - 2^-m
/// (mode Upper) or stays there through the horizon (mode Full). The result
/// follows level m on (N_m, N_next].
StaircaseResult extractDensityOneSubset(const std::map<int, IndexSet>& levelSets, StaircaseMode mode,
                                        const Rational& target = Rational(1));

}  // namespace orbitdens
