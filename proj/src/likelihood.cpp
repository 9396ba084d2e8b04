#include "lowres/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace lowres {

double std_normal_cdf(double t) {
  if (t == kInf) return 1.0;
  if (t == -kInf) return 0.0;
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

double log_std_normal_cdf(double t) {
  if (t == kInf) return 0.0;
  if (t == -kInf) return -kInf;
  if (t > 5.0) return std::log1p(-0.5 * std::erfc(t / std::numbers::sqrt2));
  if (t > -30.0) return std::log(0.5 * std::erfc(-t / std::numbers::sqrt2));
  // Mills-ratio asymptotic expansion; five terms are exact to rounding here.
  const double z = 1.0 / (t * t);
  const double series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - z * 105.0)));
  return -0.5 * t * t - std::log(-t) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

double log_normal_mass(double upper, double lower) {
  if (!(upper > lower)) return -kInf;
  if (upper == kInf && lower == -kInf) return 0.0;
  // Phi(a) - Phi(b) = Phi(-b) - Phi(-a): work in whichever tail is lower.
  if (upper + lower > 0.0) {
    const double a = -lower;
    lower = -upper;
    upper = a;
  }
  const double la = log_std_normal_cdf(upper);
  if (lower == -kInf) return la;
  const double lb = log_std_normal_cdf(lower);
  if (la == -kInf) return -kInf;
  return la + std::log(-std::expm1(lb - la));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double log_sigmoid_mass(double upper, double lower) {
  if (!(upper > lower)) return -kInf;
  // sigma(u) - sigma(l) = (1 - e^(l-u)) * sigma(u) * sigma(-l)
  return std::log(-std::expm1(lower - upper)) - softplus(-upper) - softplus(lower);
}

namespace {

void check_fewbit(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds, double rho,
                  const char* who) {
  if (H.cols() != x.size() || H.rows() != bounds.size() || bounds.low.size() != bounds.up.size()) {
    throw DimensionError(std::string(who) + ": dimension mismatch (H is " +
                         std::to_string(H.rows()) + "x" + std::to_string(H.cols()) + ", x has " +
                         std::to_string(x.size()) + ", bounds have " +
                         std::to_string(bounds.size()) + ")");
  }
  if (!(rho > 0)) throw DomainError(std::string(who) + ": rho must be positive");
}

void check_onebit(const Vec& x, const OneBitEffectiveChannel& G, double rho, const char* who) {
  if (G.G.cols() != x.size()) {
    throw DimensionError(std::string(who) + ": G has " + std::to_string(G.G.cols()) +
                         " columns, x has " + std::to_string(x.size()));
  }
  if (!(rho > 0)) throw DomainError(std::string(who) + ": rho must be positive");
}

}  // namespace

OneBitEffectiveChannel effective_channel(const AugmentedChannel& H, const Vec& signs) {
  if (signs.size() != H.rows()) throw DimensionError("effective_channel: sign vector length");
  for (Eigen::Index i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1.0 && signs[i] != -1.0) {
      throw DomainError("effective_channel: signs must be +1 or -1");
    }
  }
  return {signs.asDiagonal() * H.real};
}

double loglik_fewbit_exact(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds,
                           double rho) {
  check_fewbit(x, H, bounds, rho, "loglik_fewbit_exact");
  const double k = std::sqrt(2.0 * rho);
  const Vec s = H.real * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    total += log_normal_mass(k * (bounds.up[i] - s[i]), k * (bounds.low[i] - s[i]));
  }
  return total;
}

double loglik_fewbit_approx(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds,
                            double rho) {
  check_fewbit(x, H, bounds, rho, "loglik_fewbit_approx");
  const double k = kCdfLogisticScale * std::sqrt(2.0 * rho);
  const Vec s = H.real * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    total += log_sigmoid_mass(k * (bounds.up[i] - s[i]), k * (bounds.low[i] - s[i]));
  }
  return total;
}

Vec grad_fewbit(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds, double rho) {
  check_fewbit(x, H, bounds, rho, "grad_fewbit");
  const double k = kCdfLogisticScale * std::sqrt(2.0 * rho);
  const Vec s = H.real * x;
  Vec u(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    // 1 - sigma(a) - sigma(b) written as sigma(-a) - sigma(b) to avoid
    // cancellation; infinite bounds give exact 0/1.
    u[i] = sigmoid(-k * (s[i] - bounds.up[i])) - sigmoid(k * (s[i] - bounds.low[i]));
  }
  return k * (H.real.transpose() * u);
}

double loglik_onebit_exact(const Vec& x, const OneBitEffectiveChannel& G, double rho) {
  check_onebit(x, G, rho, "loglik_onebit_exact");
  const double k = std::sqrt(2.0 * rho);
  const Vec s = G.G * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += log_std_normal_cdf(k * s[i]);
  return total;
}

double obj_onebit_approx(const Vec& x, const OneBitEffectiveChannel& G, double rho) {
  check_onebit(x, G, rho, "obj_onebit_approx");
  const double k = kCdfLogisticScale * std::sqrt(2.0 * rho);
  const Vec s = G.G * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) total += softplus(-k * s[i]);
  return total;
}

Vec grad_onebit(const Vec& x, const OneBitEffectiveChannel& G, double rho) {
  check_onebit(x, G, rho, "grad_onebit");
  const double k = kCdfLogisticScale * std::sqrt(2.0 * rho);
  const Vec s = G.G * x;
  Vec w(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) w[i] = sigmoid(-k * s[i]);
  return -k * (G.G.transpose() * w);
}

}  // namespace lowres
