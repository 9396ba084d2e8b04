#include "lowres/gradcheck.hpp"

#include <algorithm>
#include <functional>

#include "lowres/link.hpp"
#include "lowres/training.hpp"

namespace lowres {

double GradcheckReport::max() const {
  return std::max({grad_fewbit, grad_onebit, obmnet_backward, fbmnet_backward});
}

double relative_error(const Vec& analytic, const Vec& numeric) {
  if (analytic.size() != numeric.size()) throw DimensionError("relative_error: length mismatch");
  const double scale = std::max(analytic.lpNorm<Eigen::Infinity>(), numeric.lpNorm<Eigen::Infinity>());
  if (scale == 0.0) return 0.0;
  return (analytic - numeric).lpNorm<Eigen::Infinity>() / scale;
}

namespace {

Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& at, double h) {
  Vec g(at.size());
  Vec probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + h;
    const double up = f(probe);
    probe[i] = at[i] - h;
    const double down = f(probe);
    probe[i] = at[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Vec pack(const NetParams& p) {
  Vec v(p.layers() + 1);
  v.head(p.layers()) = p.alphas;
  v[p.layers()] = p.beta;
  return v;
}

NetParams unpack(const Vec& v) {
  const Eigen::Index L = v.size() - 1;
  return {v.head(L), v[L]};
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
  SystemConfig sys;
  sys.K = cfg.K;
  sys.N = cfg.N;
  sys.b = cfg.b;
  sys.rho = db_to_linear(cfg.snr_db);
  sys.validate();

  GradcheckReport rep;
  rep.instances = cfg.instances;
  for (int n = 0; n < cfg.instances; ++n) {
    Rng rng(derive_seed(cfg.seed, 0x67726164, static_cast<std::uint64_t>(n)));
    const Realization real = draw_realization(sys, rng);
    const Vec r = stack(real.received(sys.rho));
    std::uniform_real_distribution<double> around(-0.5, 0.5);
    Vec x(2 * sys.K);
    for (auto& v : x) v = real.tx.real_stack[&v - x.data()] + around(rng);

    // Likelihood gradients.
    const BinBounds bounds = bin_bounds(quantize_signal(r, quantizer_for(sys)));
    const Vec g_few = grad_fewbit(x, real.augmented, bounds, sys.rho);
    const Vec n_few = central_difference(
        [&](const Vec& v) { return loglik_fewbit_approx(v, real.augmented, bounds, sys.rho); }, x, cfg.step);
    rep.grad_fewbit = std::max(rep.grad_fewbit, relative_error(g_few, n_few));

    const OneBitEffectiveChannel G = effective_channel(real.augmented, sign_quantize(r));
    const Vec g_one = grad_onebit(x, G, sys.rho);
    const Vec n_one = central_difference([&](const Vec& v) { return obj_onebit_approx(v, G, sys.rho); }, x,
                                         cfg.step);
    rep.grad_onebit = std::max(rep.grad_onebit, relative_error(g_one, n_one));

    // Network parameter gradients.
    std::uniform_real_distribution<double> alpha_dist(0.005, 0.05);
    std::uniform_real_distribution<double> beta_dist(0.5, 2.0);
    NetParams p = NetParams::initial(cfg.L);
    for (auto& a : p.alphas) a = alpha_dist(rng);
    p.beta = beta_dist(rng);
    const Vec x0 = Vec::Zero(2 * sys.K);

    for (NetKind kind : {NetKind::kOBMNet, NetKind::kFBMNet}) {
      const NetInput in = kind == NetKind::kOBMNet ? NetInput::obmnet(G) : NetInput::fbmnet(real.augmented, bounds);
      const ForwardTrace trace = forward(in, p, x0);
      const ParamGradients pg = backward(trace, in, p, real.tx.real_stack);
      Vec analytic(cfg.L + 1);
      analytic.head(cfg.L) = pg.alphas;
      analytic[cfg.L] = pg.beta;
      const Vec numeric = central_difference(
          [&](const Vec& v) { return loss(kind, forward(in, unpack(v), x0).output(), real.tx.real_stack); },
          pack(p), cfg.step);
      double& slot = kind == NetKind::kOBMNet ? rep.obmnet_backward : rep.fbmnet_backward;
      slot = std::max(slot, relative_error(analytic, numeric));
    }
  }
  return rep;
}

}  // namespace lowres
