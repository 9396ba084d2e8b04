#include "lowres/adam.hpp"

#include <cmath>

namespace lowres {

AdamState AdamState::fresh(int layers) {
  AdamState s;
  s.first_moment = Vec::Zero(layers + 1);
  s.second_moment = Vec::Zero(layers + 1);
  return s;
}

void adam_step(NetParams& params, const ParamGradients& grads, AdamState& state,
               double learning_rate) {
  const Eigen::Index L = params.alphas.size();
  if (grads.alphas.size() != L || state.first_moment.size() != L + 1 ||
      state.second_moment.size() != L + 1) {
    throw DimensionError("adam_step: parameter, gradient and state shapes disagree");
  }
  Vec g(L + 1);
  g.head(L) = grads.alphas;
  g[L] = grads.beta;

  ++state.step_count;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * g;
  state.second_moment =
      state.beta2 * state.second_moment + (1.0 - state.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  for (Eigen::Index i = 0; i <= L; ++i) {
    const double m_hat = state.first_moment[i] / c1;
    const double v_hat = state.second_moment[i] / c2;
    const double delta = learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    if (i < L) {
      params.alphas[i] -= delta;
    } else {
      params.beta -= delta;
    }
  }
}

}  // namespace lowres
