#pragma once

#include "lowres/common.hpp"
#include "lowres/mimo_model.hpp"
#include "lowres/quantizer.hpp"

namespace lowres {

/// Logistic scale c for which sigma(c t) tracks the standard normal cdf to
/// within 0.0095 uniformly.
inline constexpr double kCdfLogisticScale = 1.702;

// ---------------------------------------------------------------------------
// Scalar primitives. All accept +-inf and return exact limits for them.

double std_normal_cdf(double t);
/// log Phi(t), accurate deep into the lower tail (asymptotic series below -37).
double log_std_normal_cdf(double t);
/// log(Phi(upper) - Phi(lower)) for upper > lower, evaluated on whichever
/// tail avoids cancellation. Returns -inf if the mass underflows.
double log_normal_mass(double upper, double lower);

double sigmoid(double t);
/// log(1 + e^t)
double softplus(double t);
/// log(sigma(upper) - sigma(lower)) for upper > lower.
double log_sigmoid_mass(double upper, double lower);

// ---------------------------------------------------------------------------

/// Rows g_i = y_i h_i of the one-bit effective channel diag(y) H.
struct OneBitEffectiveChannel {
  Mat G;
};

/// `signs` must be +-1.
OneBitEffectiveChannel effective_channel(const AugmentedChannel& H, const Vec& signs);

/// sum_i log[Phi(t_up_i) - Phi(t_low_i)], t = sqrt(2 rho) (q - h_i^T x).
double loglik_fewbit_exact(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds,
                           double rho);

/// Logistic surrogate of loglik_fewbit_exact: Phi(t) replaced by sigma(c t).
double loglik_fewbit_approx(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds,
                            double rho);

/// Gradient of loglik_fewbit_approx:
/// c sqrt(2 rho) H^T [1 - sigma(c sqrt(2 rho)(Hx - q_up)) - sigma(c sqrt(2 rho)(Hx - q_low))].
Vec grad_fewbit(const Vec& x, const AugmentedChannel& H, const BinBounds& bounds, double rho);

/// sum_i log Phi(sqrt(2 rho) g_i^T x)
double loglik_onebit_exact(const Vec& x, const OneBitEffectiveChannel& G, double rho);

/// SoftPlus objective sum_i log(1 + exp(-c sqrt(2 rho) g_i^T x)); minimized.
double obj_onebit_approx(const Vec& x, const OneBitEffectiveChannel& G, double rho);

/// -c sqrt(2 rho) G^T sigma(-c sqrt(2 rho) G x)
Vec grad_onebit(const Vec& x, const OneBitEffectiveChannel& G, double rho);

}  // namespace lowres
