#pragma once

// Level-set densities of orbits {n : ||B^n x|| < R} and {n : ||B^n x|| >= R},
// the c(T) interval, the four-regime classifier, mean-L stability probes and
// distributional irregularity certificates. Finite-support probes stand in
// for hypercyclic vectors throughout.

#include "orbitdens/density.hpp"
#include "orbitdens/log_norm.hpp"
#include "orbitdens/shifts.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orbitdens {

enum class Direction { Below, AtLeast };

struct LevelSetSpec {
  SparseVector probe;
  LogNorm threshold;  // R > 0
  Direction direction = Direction::Below;
};

enum class LevelMode { ExactSymbolic, Empirical };

/// True when exact level sets are available: unilateral, or bilateral with
/// every band slope in {-1, 0, 1}.
bool supportsExact(const PieceGeomWeight& w);

/// Symbolic level set (time index n) of a finite-support bilateral probe.
/// O(|supp x|) points per block near band edges are not represented.
GeomIntervalFamily levelSetFamily(const PieceGeomWeight& w, const LevelSetSpec& spec);

/// Level set over [1, horizon] from the orbit norms.
IndexSet levelSetIndex(const PieceGeomWeight& w, const LevelSetSpec& spec, std::int64_t horizon);
IndexSet levelSetIndex(const std::vector<LogNorm>& norms, LogNorm threshold, Direction dir);

/// Throws ModeError when ExactSymbolic is not available for the weight.
DensityEstimate levelSetDensity(const PieceGeomWeight& w, const LevelSetSpec& spec, LevelMode mode,
                                std::int64_t horizon);

struct Witness {
  std::string probe;  // textual probe
  double thresholdLog2 = 0;
  Direction direction = Direction::Below;
  DensityEstimate density;
};

struct Ladders {
  std::vector<int> belowLog2;    // R = 2^r for the below-sets
  std::vector<int> atLeastLog2;  // R = 2^r for the atLeast-sets
  static Ladders dyadic(int depth = 20);
};

struct CEstimate {
  Rational cLo;
  Rational cHi;
  DensityKind kind = DensityKind::Exact;
  Witness loWitness;
  Witness hiWitness;
  std::vector<std::string> caveats;
};

/// cLo = max udens(below), cHi = 1 - max ldens(atLeast). Throws InconsistencyError if cLo > cHi
/// beyond tolerance.
CEstimate estimateC(const PieceGeomWeight& w, const std::vector<SparseVector>& probes, const Ladders& ladders,
                    LevelMode mode, std::int64_t horizon);

std::string describe(const SparseVector& x);

struct MeanLResult {
  bool unstable = false;
  double eps = 0;  // eps where every delta had a witness
  struct Hit {
    double delta = 0;
    std::string probe;
    double probeNormLog2 = 0;
    Rational density;  // empirical udens of {n : ||B^n z|| >= eps}
  };
  std::vector<Hit> hits;
  std::string summary;
};

/// Pairs reduce to z = x - y. For each eps and delta = 2^-d, d = 1..deltaDepth, searches
/// point probes c*e_j and spread probes c*1_[1,N] with ||z|| < delta for an
/// atLeast-eps set of empirical upper density >= eps.
MeanLResult meanLStabilityProbe(const PieceGeomWeight& w, const std::vector<double>& epsLadder, std::int64_t horizon,
                                double p = 1.0, int deltaDepth = 8);

enum class IrregularityKind { Type1, Type2Half };

struct IrregularityCertificate {
  IrregularityKind requested = IrregularityKind::Type2Half;
  std::optional<IrregularityKind> achieved;
  StaircaseResult setA;  // norms -> 0
  StaircaseResult setB;  // norms -> inf
  Rational densityA;     // achieved empirical upper densities
  Rational densityB;
  std::vector<int> decaySchedule;   // m with ||B^n x|| < scale * 2^-m along A
  std::vector<int> growthSchedule;  // m with ||B^n x|| >= scale * 2^m along B
  std::int64_t horizon = 0;
  std::vector<std::string> caveats;
};

/// thresholdScale multiplies both ladders: certificate(c*x, scale |c|) == certificate(x, 1).
IrregularityCertificate irregularityCertificate(const PieceGeomWeight& w, const SparseVector& x,
                                                IrregularityKind kind, std::int64_t horizon,
                                                double thresholdScale = 1.0, int depth = 20);

enum class Regime { One = 1, Two = 2, Three = 3, Four = 4, Inconclusive = 0 };
std::string regimeName(Regime r);

struct RegimeReport {
  Regime regime = Regime::Inconclusive;
  CEstimate c;
  std::map<std::string, Witness> witnesses;
  std::optional<std::int64_t> hypercyclicityWitness;
  MeanLResult meanL;
  std::optional<IrregularityCertificate> certificate;
  std::vector<std::string> caveats;
};

struct ClassifyOptions {
  std::int64_t horizon = 262144;  // 8^6
  double p = 1.0;
  Ladders ladders = Ladders::dyadic();
  bool certificate = true;
};

/// Default probes: e_0, e_1, e_0 + e_3 (bilateral), e_1, e_2 (unilateral).
std::vector<SparseVector> defaultProbes(const PieceGeomWeight& w, double p = 1.0);

RegimeReport classify(const PieceGeomWeight& w, const std::vector<SparseVector>& probes,
                      const ClassifyOptions& opt = {});

}  // namespace orbitdens
