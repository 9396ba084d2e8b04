#pragma once

#include "lowres/common.hpp"

namespace lowres {

/// b-bit uniform midrise quantizer with step delta.
///
/// Thresholds tau_l = (-2^(b-1) + l) * delta for l = 1..2^b-1; bin l covers
/// (tau_(l-1), tau_l] with tau_0 = -inf, tau_(2^b) = +inf, and emits
/// tau_l - delta/2 (the top bin emits (2^b - 1) delta / 2).
struct QuantizerConfig {
  int b = 1;
  double delta = 1.0;

  int level_count() const { return 1 << b; }
  /// Throws DomainError unless b in [1, 16] and delta > 0.
  void validate() const;
};

Vec thresholds(const QuantizerConfig& cfg);
Vec output_levels(const QuantizerConfig& cfg);

/// 1-based bin index of r, i.e. the l with r in (tau_(l-1), tau_l].
int bin_index(double r, const QuantizerConfig& cfg);

double quantize(double r, const QuantizerConfig& cfg);
Vec quantize(const Vec& r, const QuantizerConfig& cfg);
/// Re and Im quantized separately.
CVec quantize(const CVec& r, const QuantizerConfig& cfg);

/// +1 for r >= 0, -1 for r < 0.
Vec sign_quantize(const Vec& r);

struct QuantizedSignal {
  Vec levels;
  QuantizerConfig config;
};

QuantizedSignal quantize_signal(const Vec& r, const QuantizerConfig& cfg);

/// Per-component bin edges of an observed quantized vector. Outer bins carry
/// -inf / +inf exactly.
struct BinBounds {
  Vec low;
  Vec up;

  Eigen::Index size() const { return low.size(); }
  static BinBounds unbounded(Eigen::Index n);
};

/// Throws DomainError when an entry is not one of the 2^b legal levels.
BinBounds bin_bounds(const QuantizedSignal& y);

/// One-bit bounds: (0, +inf) for +1 entries, (-inf, 0) for -1 entries.
BinBounds sign_bounds(const Vec& signs);

/// MSE-optimal uniform step for a unit-variance Gaussian input, b in [1, 6].
double gaussian_optimal_step(int b);

/// Loading rule: gaussian_optimal_step(b) * sqrt((K + 1/rho) / 2), the latter
/// factor being the per-real-component standard deviation of the unquantized
/// receive signal for unit-energy symbols over an i.i.d. CN(0,1) channel.
/// Requires b >= 2 (the one-bit path has no step).
double default_step(int b, int K, double rho);

}  // namespace lowres
