#pragma once

#include <cstdint>
#include <vector>

#include "lowres/adam.hpp"
#include "lowres/detectors.hpp"
#include "lowres/link.hpp"
#include "lowres/unfolded.hpp"

namespace lowres {

struct TrainConfig {
  double learning_rate = 1e-2;
  int batch_size = 1000;
  int iterations = 5000;
  /// Per-sample SNR is drawn uniformly from [snr_db_min, snr_db_max].
  double snr_db_min = 10.0;
  double snr_db_max = 10.0;
  std::uint64_t seed = 1;
  int layers = 10;
  double init_alpha = 0.01;
  double init_beta = 1.0;
  /// Stop when the mean loss of the latest window improves on the window
  /// before it by less than early_stop_tolerance (relative).
  bool early_stop = true;
  int early_stop_window = 500;
  double early_stop_tolerance = 1e-3;
  int workers = 1;

  void validate() const;
};

struct TrainResult {
  NetParams params;
  std::vector<double> loss_history;  ///< mean batch loss before each update
  bool early_stopped = false;
};

/// Builds the per-sample network weights (and biases) from one realization
/// observed at sys.rho and resolution sys.b.
NetInput make_net_input(NetKind kind, const SystemConfig& sys, const Realization& r);

/// Mini-batch Adam on the averaged network loss. Each sample is a fresh
/// (H, x, z) drawn from a seed derived from (seed, batch, sample), so results
/// do not depend on the worker count. Throws DivergenceError on a NaN loss.
TrainResult train(NetKind kind, const SystemConfig& sys, const TrainConfig& tc);

/// Forward pass from x0 = 0, normalization for OBMNet (raw output if it is
/// exactly zero, with a warning), then nearest-point demapping.
/// `objective` is the loss-free output norm ||x^(L)||.
DetectionResult net_detect(const NetInput& in, const NetParams& p, const Constellation& c);

}  // namespace lowres
