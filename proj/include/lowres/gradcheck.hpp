#pragma once

#include <cstdint>

#include "lowres/common.hpp"

namespace lowres {

struct GradcheckConfig {
  int K = 4;
  int N = 16;
  int L = 5;
  int b = 2;  ///< resolution of the few-bit instances
  int instances = 100;
  double snr_db = 5.0;
  double step = 1e-5;
  std::uint64_t seed = 1;
};

/// Largest relative error seen per gradient path.
struct GradcheckReport {
  double grad_fewbit = 0.0;
  double grad_onebit = 0.0;
  double obmnet_backward = 0.0;
  double fbmnet_backward = 0.0;
  int instances = 0;

  double max() const;
};

/// ||analytic - numeric||_inf / max(||analytic||_inf, ||numeric||_inf);
/// zero when both vectors are zero.
double relative_error(const Vec& analytic, const Vec& numeric);

/// Central differences against every analytic gradient in the library on
/// randomized instances (random channel, data, noise; step sizes and beta
/// drawn around their initial values).
GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

}  // namespace lowres
