#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lowres/likelihood.hpp"
#include "lowres/mimo_model.hpp"
#include "lowres/quantizer.hpp"

namespace lowres {

enum class NetKind { kOBMNet, kFBMNet };

std::string to_string(NetKind kind);
NetKind parse_net_kind(const std::string& name);

/// The only trainable scalars: one step size per layer and a shared sigmoid
/// scale.
struct NetParams {
  Vec alphas;
  double beta = 1.0;

  int layers() const { return static_cast<int>(alphas.size()); }
  void validate() const;
  static NetParams initial(int layers, double alpha = 0.01, double beta = 1.0);
};

/// Channel- and observation-dependent weights of one network evaluation.
/// OBMNet uses the effective channel G = diag(y) H as `weights` and no
/// bounds; FBMNet uses H with the observed bin bounds as biases.
struct NetInput {
  NetKind kind = NetKind::kOBMNet;
  Mat weights;
  BinBounds bounds;

  static NetInput obmnet(const OneBitEffectiveChannel& g);
  static NetInput fbmnet(const AugmentedChannel& h, BinBounds bounds);

  int users() const { return static_cast<int>(weights.cols() / 2); }
};

struct ForwardTrace {
  std::vector<Vec> layer_inputs;     ///< x^(0), ..., x^(L)
  std::vector<Vec> pre_activations;  ///< s^(1), ..., s^(L)
  double final_norm = 0.0;           ///< ||x^(L)||

  const Vec& output() const { return layer_inputs.back(); }
};

/// s = -G x;  x <- x + alpha_l G^T sigma(beta s)
ForwardTrace obmnet_forward(const OneBitEffectiveChannel& g, const NetParams& p, const Vec& x0);

/// s = H x;  u = 1 - sigma(beta (s - q_up)) - sigma(beta (s - q_low));
/// x <- x + alpha_l H^T u. Infinite bounds contribute exact 0 / 1.
ForwardTrace fbmnet_forward(const AugmentedChannel& h, const BinBounds& bounds, const NetParams& p,
                            const Vec& x0);

ForwardTrace forward(const NetInput& in, const NetParams& p, const Vec& x0);

/// sqrt(K) x / ||x||. Throws DegenerateOutputError for a zero vector.
Vec obmnet_normalize(const Vec& x, int K);

/// FBMNet: ||x_out - x_target||^2. OBMNet: ||normalize(x_out) - x_target||^2,
/// falling back to the raw output when x_out is exactly zero.
double loss(NetKind kind, const Vec& x_out, const Vec& x_target);

struct ParamGradients {
  Vec alphas;
  double beta = 0.0;

  ParamGradients& operator+=(const ParamGradients& o);
  ParamGradients& operator*=(double s);
};

/// Reverse-mode derivative of loss(kind, trace.output(), x_target) with
/// respect to every alpha_l and beta. Throws DimensionError if the trace does
/// not belong to (in, p).
ParamGradients backward(const ForwardTrace& trace, const NetInput& in, const NetParams& p,
                        const Vec& x_target);

/// Real multiplications performed by one layer on a K-user, N-antenna
/// instance, counted by instrumenting the production layer kernel.
std::size_t layer_multiplications(NetKind kind, int K, int N);

}  // namespace lowres
