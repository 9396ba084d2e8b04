#include "lowres/unfolded.hpp"

#include <cmath>

namespace lowres {

std::string to_string(NetKind kind) { return kind == NetKind::kOBMNet ? "obmnet" : "fbmnet"; }

NetKind parse_net_kind(const std::string& name) {
  if (name == "obmnet" || name == "OBMNet") return NetKind::kOBMNet;
  if (name == "fbmnet" || name == "FBMNet") return NetKind::kFBMNet;
  throw ConfigError("unknown network kind '" + name + "' (expected obmnet or fbmnet)");
}

void NetParams::validate() const {
  if (alphas.size() < 1) throw ConfigError("network needs at least one layer");
  if (!alphas.allFinite() || !std::isfinite(beta)) {
    throw ConfigError("network parameters must be finite");
  }
}

NetParams NetParams::initial(int layers, double alpha, double beta) {
  if (layers < 1) throw ConfigError("network needs at least one layer");
  return {Vec::Constant(layers, alpha), beta};
}

NetInput NetInput::obmnet(const OneBitEffectiveChannel& g) {
  return {NetKind::kOBMNet, g.G, BinBounds{}};
}

NetInput NetInput::fbmnet(const AugmentedChannel& h, BinBounds bounds) {
  if (bounds.size() != h.rows()) throw DimensionError("fbmnet input: bounds do not match H rows");
  return {NetKind::kFBMNet, h.real, std::move(bounds)};
}

ParamGradients& ParamGradients::operator+=(const ParamGradients& o) {
  alphas += o.alphas;
  beta += o.beta;
  return *this;
}

ParamGradients& ParamGradients::operator*=(double s) {
  alphas *= s;
  beta *= s;
  return *this;
}

namespace {

struct NoCount {
  static double mul(double a, double b) { return a * b; }
};

struct MulCounter {
  std::size_t count = 0;
  double mul(double a, double b) {
    ++count;
    return a * b;
  }
};

// sigma'(t) = sigma(t) sigma(-t)
double sigmoid_slope(double t) { return sigmoid(t) * sigmoid(-t); }

// Layer kernels. Loops are written out so that MulCounter sees every real
// multiplication the layer performs.

template <class Counter>
void obmnet_layer(const Mat& G, double alpha, double beta, const Vec& x_in, Vec& s, Vec& x_out,
                  Counter& cnt) {
  const Eigen::Index rows = G.rows();
  const Eigen::Index cols = G.cols();
  s.setZero(rows);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double xj = x_in[j];
    for (Eigen::Index i = 0; i < rows; ++i) s[i] -= cnt.mul(G(i, j), xj);
  }
  Vec act(rows);
  for (Eigen::Index i = 0; i < rows; ++i) act[i] = sigmoid(cnt.mul(beta, s[i]));
  x_out.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) acc += cnt.mul(G(i, j), act[i]);
    x_out[j] = x_in[j] + cnt.mul(alpha, acc);
  }
}

// Returns u_i = 1 - sigma(beta (s_i - q_up_i)) - sigma(beta (s_i - q_low_i)),
// evaluated as sigma(-a_up) - sigma(a_low).
template <class Counter>
double fbmnet_activation(double s, double q_up, double q_low, double beta, Counter& cnt) {
  const double a_up = cnt.mul(beta, s - q_up);
  const double a_low = cnt.mul(beta, s - q_low);
  const double up_part = q_up == kInf ? 1.0 : sigmoid(-a_up);
  const double low_part = q_low == -kInf ? 1.0 : sigmoid(a_low);
  return up_part - low_part;
}

template <class Counter>
void fbmnet_layer(const Mat& H, const BinBounds& bounds, double alpha, double beta,
                  const Vec& x_in, Vec& s, Vec& x_out, Counter& cnt) {
  const Eigen::Index rows = H.rows();
  const Eigen::Index cols = H.cols();
  s.setZero(rows);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double xj = x_in[j];
    for (Eigen::Index i = 0; i < rows; ++i) s[i] += cnt.mul(H(i, j), xj);
  }
  Vec u(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    u[i] = fbmnet_activation(s[i], bounds.up[i], bounds.low[i], beta, cnt);
  }
  x_out.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) acc += cnt.mul(H(i, j), u[i]);
    x_out[j] = x_in[j] + cnt.mul(alpha, acc);
  }
}

void check_input(const NetInput& in, const Vec& x0, const char* who) {
  if (in.weights.cols() != x0.size()) {
    throw DimensionError(std::string(who) + ": x0 has " + std::to_string(x0.size()) +
                         " entries, weights have " + std::to_string(in.weights.cols()) + " columns");
  }
  if (in.kind == NetKind::kFBMNet &&
      (in.bounds.low.size() != in.weights.rows() || in.bounds.up.size() != in.weights.rows())) {
    throw DimensionError(std::string(who) + ": bounds do not match weight rows");
  }
}

}  // namespace

ForwardTrace forward(const NetInput& in, const NetParams& p, const Vec& x0) {
  check_input(in, x0, "forward");
  const int L = p.layers();
  ForwardTrace trace;
  trace.layer_inputs.reserve(L + 1);
  trace.pre_activations.reserve(L);
  trace.layer_inputs.push_back(x0);
  NoCount cnt;
  for (int l = 0; l < L; ++l) {
    Vec s;
    Vec next;
    if (in.kind == NetKind::kOBMNet) {
      obmnet_layer(in.weights, p.alphas[l], p.beta, trace.layer_inputs.back(), s, next, cnt);
    } else {
      fbmnet_layer(in.weights, in.bounds, p.alphas[l], p.beta, trace.layer_inputs.back(), s, next,
                   cnt);
    }
    trace.pre_activations.push_back(std::move(s));
    trace.layer_inputs.push_back(std::move(next));
  }
  trace.final_norm = trace.output().norm();
  return trace;
}

ForwardTrace obmnet_forward(const OneBitEffectiveChannel& g, const NetParams& p, const Vec& x0) {
  return forward(NetInput::obmnet(g), p, x0);
}

ForwardTrace fbmnet_forward(const AugmentedChannel& h, const BinBounds& bounds, const NetParams& p,
                            const Vec& x0) {
  return forward(NetInput::fbmnet(h, bounds), p, x0);
}

Vec obmnet_normalize(const Vec& x, int K) {
  const double n = x.norm();
  if (!(n > 0.0)) throw DegenerateOutputError("obmnet_normalize: zero-norm network output");
  return (std::sqrt(static_cast<double>(K)) / n) * x;
}

double loss(NetKind kind, const Vec& x_out, const Vec& x_target) {
  if (x_out.size() != x_target.size()) throw DimensionError("loss: length mismatch");
  if (kind == NetKind::kOBMNet && x_out.norm() > 0.0) {
    const int K = static_cast<int>(x_out.size() / 2);
    return (obmnet_normalize(x_out, K) - x_target).squaredNorm();
  }
  return (x_out - x_target).squaredNorm();
}

ParamGradients backward(const ForwardTrace& trace, const NetInput& in, const NetParams& p,
                        const Vec& x_target) {
  const int L = p.layers();
  const Eigen::Index dim = in.weights.cols();
  if (static_cast<int>(trace.layer_inputs.size()) != L + 1 ||
      static_cast<int>(trace.pre_activations.size()) != L || x_target.size() != dim ||
      trace.output().size() != dim) {
    throw DimensionError("backward: trace does not match the network parameters or input");
  }
  for (const Vec& s : trace.pre_activations) {
    if (s.size() != in.weights.rows()) throw DimensionError("backward: trace pre-activation size");
  }

  const Mat& W = in.weights;
  const Vec& x_L = trace.output();

  // dLoss/dx^(L)
  Vec g;
  const double n = x_L.norm();
  if (in.kind == NetKind::kOBMNet && n > 0.0) {
    const double scale = std::sqrt(static_cast<double>(dim / 2)) / n;
    const Vec xhat = x_L / n;
    const Vec e = 2.0 * (scale * x_L - x_target);
    g = scale * (e - xhat * xhat.dot(e));
  } else {
    g = 2.0 * (x_L - x_target);
  }

  ParamGradients out{Vec::Zero(L), 0.0};
  const Eigen::Index rows = W.rows();
  Vec ds(rows);
  for (int l = L - 1; l >= 0; --l) {
    const Vec& s = trace.pre_activations[l];
    const double alpha = p.alphas[l];
    const Vec v = alpha * (W * g);  // dLoss / d(activation output)
    if (in.kind == NetKind::kOBMNet) {
      Vec act(rows);
      double dbeta = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double t = p.beta * s[i];
        const double slope = sigmoid_slope(t);
        act[i] = sigmoid(t);
        dbeta += v[i] * slope * s[i];
        ds[i] = v[i] * slope * p.beta;
      }
      out.alphas[l] = g.dot(W.transpose() * act);
      out.beta += dbeta;
      // s = -W x, so the pull-back through s flips sign.
      g -= W.transpose() * ds;
    } else {
      const Vec& q_up = in.bounds.up;
      const Vec& q_low = in.bounds.low;
      Vec u(rows);
      double dbeta = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double a_up = p.beta * (s[i] - q_up[i]);
        const double a_low = p.beta * (s[i] - q_low[i]);
        const bool up_finite = q_up[i] != kInf;
        const bool low_finite = q_low[i] != -kInf;
        u[i] = (up_finite ? sigmoid(-a_up) : 1.0) - (low_finite ? sigmoid(a_low) : 1.0);
        const double slope_up = up_finite ? sigmoid_slope(a_up) : 0.0;
        const double slope_low = low_finite ? sigmoid_slope(a_low) : 0.0;
        double du_dbeta = 0.0;
        if (up_finite) du_dbeta -= slope_up * (s[i] - q_up[i]);
        if (low_finite) du_dbeta -= slope_low * (s[i] - q_low[i]);
        dbeta += v[i] * du_dbeta;
        ds[i] = -v[i] * p.beta * (slope_up + slope_low);
      }
      out.alphas[l] = g.dot(W.transpose() * u);
      out.beta += dbeta;
      g += W.transpose() * ds;
    }
  }
  return out;
}

std::size_t layer_multiplications(NetKind kind, int K, int N) {
  if (K < 1 || N < 1) throw DimensionError("layer_multiplications: K and N must be >= 1");
  Rng rng(0x5eed);
  const AugmentedChannel H = augment(sample_channel(K, N, rng));
  Vec r = H.real * Vec::Ones(2 * K);
  const Vec x0 = Vec::Constant(2 * K, 0.1);
  Vec s;
  Vec x1;
  MulCounter cnt;
  if (kind == NetKind::kOBMNet) {
    const OneBitEffectiveChannel G = effective_channel(H, sign_quantize(r));
    obmnet_layer(G.G, 0.5, 1.0, x0, s, x1, cnt);
  } else {
    const QuantizerConfig q{2, 1.0};
    const BinBounds bounds = bin_bounds(quantize_signal(r, q));
    fbmnet_layer(H.real, bounds, 0.5, 1.0, x0, s, x1, cnt);
  }
  return cnt.count;
}

}  // namespace lowres
