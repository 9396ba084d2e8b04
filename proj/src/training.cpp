#include "lowres/training.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lowres/log.hpp"
#include "lowres/parallel.hpp"

namespace lowres {

void TrainConfig::validate() const {
  std::ostringstream err;
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) err << "learning_rate must be >= 0; ";
  if (batch_size < 1) err << "batch_size must be >= 1; ";
  if (iterations < 0) err << "iterations must be >= 0; ";
  if (!(snr_db_max >= snr_db_min)) err << "snr_db range is empty; ";
  if (layers < 1) err << "layers must be >= 1; ";
  if (early_stop_window < 1) err << "early_stop_window must be >= 1; ";
  if (workers < 1) err << "workers must be >= 1; ";
  if (!err.str().empty()) throw ConfigError("invalid train config: " + err.str());
}

NetInput make_net_input(NetKind kind, const SystemConfig& sys, const Realization& r) {
  const Vec received = stack(r.received(sys.rho));
  if (kind == NetKind::kOBMNet) {
    return NetInput::obmnet(effective_channel(r.augmented, sign_quantize(received)));
  }
  const QuantizerConfig q = quantizer_for(sys);
  return NetInput::fbmnet(r.augmented, bin_bounds(quantize_signal(received, q)));
}

namespace {

struct SampleOutcome {
  double loss = 0.0;
  ParamGradients grads;
};

SampleOutcome run_sample(NetKind kind, const SystemConfig& sys, const TrainConfig& tc,
                         const NetParams& params, std::uint64_t seed) {
  Rng rng(seed);
  SystemConfig at = sys;
  double snr_db = tc.snr_db_min;
  if (tc.snr_db_max > tc.snr_db_min) {
    snr_db = std::uniform_real_distribution<double>(tc.snr_db_min, tc.snr_db_max)(rng);
  }
  at.rho = db_to_linear(snr_db);
  const Realization r = draw_realization(at, rng);
  const NetInput in = make_net_input(kind, at, r);
  const ForwardTrace trace = forward(in, params, Vec::Zero(2 * sys.K));
  SampleOutcome out;
  out.loss = loss(kind, trace.output(), r.tx.real_stack);
  out.grads = backward(trace, in, params, r.tx.real_stack);
  return out;
}

double window_mean(const std::vector<double>& h, std::size_t end, std::size_t width) {
  return std::accumulate(h.begin() + static_cast<long>(end - width), h.begin() + static_cast<long>(end),
                         0.0) /
         static_cast<double>(width);
}

}  // namespace

TrainResult train(NetKind kind, const SystemConfig& sys, const TrainConfig& tc) {
  sys.validate();
  tc.validate();
  TrainResult result;
  result.params = NetParams::initial(tc.layers, tc.init_alpha, tc.init_beta);
  AdamState adam = AdamState::fresh(tc.layers);
  std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(tc.batch_size));
  const auto window = static_cast<std::size_t>(tc.early_stop_window);

  for (int batch = 0; batch < tc.iterations; ++batch) {
    const NetParams snapshot = result.params;
    parallel_for(outcomes.size(), tc.workers, [&](std::size_t i) {
      outcomes[i] = run_sample(kind, sys, tc, snapshot,
                               derive_seed(tc.seed, static_cast<std::uint64_t>(batch), i));
    });

    // Fixed-order reduction keeps results bit-identical for any worker count.
    ParamGradients grads{Vec::Zero(tc.layers), 0.0};
    double batch_loss = 0.0;
    for (const auto& o : outcomes) {
      grads += o.grads;
      batch_loss += o.loss;
    }
    const double inv = 1.0 / static_cast<double>(outcomes.size());
    grads *= inv;
    batch_loss *= inv;
    if (std::isnan(batch_loss) || !grads.alphas.allFinite() || !std::isfinite(grads.beta)) {
      throw DivergenceError("training diverged at batch " + std::to_string(batch) +
                            " (non-finite loss or gradient)");
    }
    result.loss_history.push_back(batch_loss);
    adam_step(result.params, grads, adam, tc.learning_rate);

    if (log::verbosity() >= log::Level::kDebug && (batch + 1) % 100 == 0) {
      std::ostringstream msg;
      msg << to_string(kind) << " batch " << batch + 1 << " loss " << batch_loss << " beta "
          << result.params.beta;
      log::debug(msg.str());
    }

    const auto& h = result.loss_history;
    if (tc.early_stop && h.size() >= 2 * window && h.size() % window == 0) {
      const double prev = window_mean(h, h.size() - window, window);
      const double cur = window_mean(h, h.size(), window);
      if ((prev - cur) < tc.early_stop_tolerance * std::abs(prev)) {
        result.early_stopped = true;
        break;
      }
    }
  }
  return result;
}

DetectionResult net_detect(const NetInput& in, const NetParams& p, const Constellation& c) {
  const int K = in.users();
  const ForwardTrace trace = forward(in, p, Vec::Zero(2 * K));
  Vec estimate = trace.output();
  if (in.kind == NetKind::kOBMNet) {
    try {
      estimate = obmnet_normalize(estimate, K);
    } catch (const DegenerateOutputError&) {
      log::warn("OBMNet produced a zero-norm output; demapping the raw output");
    }
  }
  HardDecision hd = demap_nearest(estimate, c);
  return {std::move(hd.symbols), std::move(hd.indices), std::move(hd.bits), trace.final_norm};
}

}  // namespace lowres
