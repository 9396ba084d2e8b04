#pragma once

#include "lowres/unfolded.hpp"

namespace lowres {

struct AdamState {
  Vec first_moment;
  Vec second_moment;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Zeroed accumulators for a network with `layers` step sizes plus beta.
  static AdamState fresh(int layers);
};

/// One bias-corrected Adam update, descending the gradient. The parameter
/// vector is [alpha_1 .. alpha_L, beta].
void adam_step(NetParams& params, const ParamGradients& grads, AdamState& state,
               double learning_rate);

}  // namespace lowres
