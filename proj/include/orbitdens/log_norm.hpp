#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace orbitdens {

/// Nonnegative real held as log2 with an explicit zero flag.
class LogNorm {
 public:
  constexpr LogNorm() = default;

  static constexpr LogNorm zero() { return LogNorm(); }
  static constexpr LogNorm fromLog2(double l) {
    LogNorm n;
    n.zero_ = false;
    n.log2_ = l;
    return n;
  }
  static LogNorm fromValue(double v) { return v == 0.0 ? zero() : fromLog2(std::log2(std::fabs(v))); }

  constexpr bool isZero() const { return zero_; }
  /// -inf for zero.
  constexpr double log2() const { return zero_ ? -std::numeric_limits<double>::infinity() : log2_; }
  double value() const { return zero_ ? 0.0 : std::exp2(log2_); }

  /// x^e for real e > 0.
  LogNorm pow(double e) const { return zero_ ? zero() : fromLog2(log2_ * e); }
  LogNorm operator*(LogNorm o) const { return (zero_ || o.zero_) ? zero() : fromLog2(log2_ + o.log2_); }

  friend constexpr bool operator<(LogNorm a, LogNorm b) {
    if (b.zero_) return false;
    if (a.zero_) return true;
    return a.log2_ < b.log2_;
  }
  friend constexpr bool operator>=(LogNorm a, LogNorm b) { return !(a < b); }
  friend constexpr bool operator==(LogNorm a, LogNorm b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.log2_ == b.log2_);
  }

 private:
  bool zero_ = true;
  double log2_ = 0.0;
};

/// log2-sum-exp2 with max extraction; zeros are skipped.
inline LogNorm logSum(std::span<const LogNorm> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (auto t : terms)
    if (!t.isZero() && t.log2() > mx) mx = t.log2();
  if (mx == -std::numeric_limits<double>::infinity()) return LogNorm::zero();
  double acc = 0.0;
  for (auto t : terms)
    if (!t.isZero()) acc += std::exp2(t.log2() - mx);
  return LogNorm::fromLog2(mx + std::log2(acc));
}

}  // namespace orbitdens
