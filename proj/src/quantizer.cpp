#include "lowres/quantizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace lowres {

namespace {

double threshold(int l, const QuantizerConfig& cfg) {
  return static_cast<double>(l - (1 << (cfg.b - 1))) * cfg.delta;
}

double level_of_bin(int l, const QuantizerConfig& cfg) {
  return (static_cast<double>(l - (1 << (cfg.b - 1))) - 0.5) * cfg.delta;
}

void require_finite(double r, const char* what) {
  if (std::isnan(r)) throw InvalidValueError(std::string(what) + ": NaN input");
}

}  // namespace

void QuantizerConfig::validate() const {
  if (b < 1 || b > 16) throw DomainError("quantizer: b must be in [1, 16], got " + std::to_string(b));
  if (!(delta > 0) || !std::isfinite(delta)) throw DomainError("quantizer: delta must be positive");
}

Vec thresholds(const QuantizerConfig& cfg) {
  cfg.validate();
  Vec t(cfg.level_count() - 1);
  for (int l = 1; l < cfg.level_count(); ++l) t[l - 1] = threshold(l, cfg);
  return t;
}

Vec output_levels(const QuantizerConfig& cfg) {
  cfg.validate();
  Vec v(cfg.level_count());
  for (int l = 1; l <= cfg.level_count(); ++l) v[l - 1] = level_of_bin(l, cfg);
  return v;
}

int bin_index(double r, const QuantizerConfig& cfg) {
  require_finite(r, "quantize");
  const int top = cfg.level_count();
  double guess = std::ceil(r / cfg.delta + (1 << (cfg.b - 1)));
  if (!(guess >= 1)) guess = 1;  // also catches -inf
  if (guess > top) guess = top;
  int l = static_cast<int>(guess);
  // Settle against the exact thresholds so bin edges agree with thresholds().
  while (l > 1 && r <= threshold(l - 1, cfg)) --l;
  while (l < top && r > threshold(l, cfg)) ++l;
  return l;
}

double quantize(double r, const QuantizerConfig& cfg) {
  return level_of_bin(bin_index(r, cfg), cfg);
}

Vec quantize(const Vec& r, const QuantizerConfig& cfg) {
  cfg.validate();
  Vec y(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) y[i] = quantize(r[i], cfg);
  return y;
}

CVec quantize(const CVec& r, const QuantizerConfig& cfg) {
  cfg.validate();
  CVec y(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    y[i] = {quantize(r[i].real(), cfg), quantize(r[i].imag(), cfg)};
  }
  return y;
}

Vec sign_quantize(const Vec& r) {
  Vec y(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    require_finite(r[i], "sign_quantize");
    y[i] = r[i] >= 0.0 ? 1.0 : -1.0;
  }
  return y;
}

QuantizedSignal quantize_signal(const Vec& r, const QuantizerConfig& cfg) {
  return {quantize(r, cfg), cfg};
}

BinBounds BinBounds::unbounded(Eigen::Index n) {
  return {Vec::Constant(n, -kInf), Vec::Constant(n, kInf)};
}

BinBounds bin_bounds(const QuantizedSignal& y) {
  const QuantizerConfig& cfg = y.config;
  cfg.validate();
  const int top = cfg.level_count();
  BinBounds out{Vec(y.levels.size()), Vec(y.levels.size())};
  for (Eigen::Index i = 0; i < y.levels.size(); ++i) {
    const double v = y.levels[i];
    const double pos = v / cfg.delta + (1 << (cfg.b - 1)) + 0.5;
    const double l_real = std::round(pos);
    const int l = static_cast<int>(l_real);
    if (!std::isfinite(v) || l < 1 || l > top ||
        std::abs(v - level_of_bin(l, cfg)) > 1e-9 * std::max(1.0, cfg.delta)) {
      throw DomainError("bin_bounds: " + std::to_string(v) + " is not a legal " +
                        std::to_string(cfg.b) + "-bit level");
    }
    out.low[i] = l == 1 ? -kInf : threshold(l - 1, cfg);
    out.up[i] = l == top ? kInf : threshold(l, cfg);
  }
  return out;
}

BinBounds sign_bounds(const Vec& signs) {
  BinBounds out{Vec(signs.size()), Vec(signs.size())};
  for (Eigen::Index i = 0; i < signs.size(); ++i) {
    if (signs[i] == 1.0) {
      out.low[i] = 0.0;
      out.up[i] = kInf;
    } else if (signs[i] == -1.0) {
      out.low[i] = -kInf;
      out.up[i] = 0.0;
    } else {
      throw DomainError("sign_bounds: entries must be +1 or -1");
    }
  }
  return out;
}

double gaussian_optimal_step(int b) {
  // Minimum-MSE step of a 2^b-level uniform quantizer for N(0, 1).
  static constexpr std::array<double, 6> kSteps = {1.5958, 0.9957, 0.5860,
                                                   0.3352, 0.1881, 0.1041};
  if (b < 1 || b > static_cast<int>(kSteps.size())) {
    throw DomainError("no tabulated Gaussian step for b = " + std::to_string(b));
  }
  return kSteps[b - 1];
}

double default_step(int b, int K, double rho) {
  if (b < 2) throw DomainError("default_step: requires b >= 2 (one-bit path has no step)");
  if (K < 1 || !(rho > 0)) throw DomainError("default_step: requires K >= 1 and rho > 0");
  const double sigma = std::sqrt((K + 1.0 / rho) / 2.0);
  return gaussian_optimal_step(b) * sigma;
}

}  // namespace lowres
