#include "lowres/detectors.hpp"

#include <cmath>

namespace lowres {

std::string MlVariant::name() const {
  std::string out = objective == MlObjective::kExact ? "ml-exact" : "ml-approx";
  out += model == MlModel::kOneBit ? "-1bit" : "-fewbit";
  return out;
}

MlVariant parse_ml_variant(const std::string& name) {
  for (auto obj : {MlObjective::kExact, MlObjective::kApprox}) {
    for (auto model : {MlModel::kOneBit, MlModel::kFewBit}) {
      MlVariant v{obj, model};
      if (v.name() == name) return v;
    }
  }
  throw ConfigError("unknown ML variant '" + name + "'");
}

namespace {

struct PreparedObservation {
  BinBounds bounds;
  OneBitEffectiveChannel effective;
};

PreparedObservation prepare(const MlVariant& v, const MlInputs& in) {
  if (in.observed.size() != in.channel.rows()) {
    throw DimensionError("exhaustive_ml: observation length " + std::to_string(in.observed.size()) +
                         " does not match channel rows " + std::to_string(in.channel.rows()));
  }
  if (in.channel.cols() % 2 != 0) throw DimensionError("exhaustive_ml: channel must be 2N x 2K");
  PreparedObservation out;
  if (v.model == MlModel::kOneBit) {
    out.effective = effective_channel(in.channel, in.observed);
  } else {
    out.bounds = bin_bounds({in.observed, in.quantizer});
  }
  return out;
}

double evaluate(const MlVariant& v, const Vec& x, const MlInputs& in, const PreparedObservation& p) {
  if (v.model == MlModel::kOneBit) {
    return v.objective == MlObjective::kExact ? loglik_onebit_exact(x, p.effective, in.rho)
                                              : obj_onebit_approx(x, p.effective, in.rho);
  }
  return v.objective == MlObjective::kExact ? loglik_fewbit_exact(x, in.channel, p.bounds, in.rho)
                                            : loglik_fewbit_approx(x, in.channel, p.bounds, in.rho);
}

}  // namespace

double ml_objective(const MlVariant& variant, const Vec& x, const MlInputs& in) {
  return evaluate(variant, x, in, prepare(variant, in));
}

DetectionResult exhaustive_ml(const MlVariant& variant, const MlInputs& in) {
  const PreparedObservation prep = prepare(variant, in);
  const int K = static_cast<int>(in.channel.cols() / 2);
  const std::size_t M = static_cast<std::size_t>(in.constellation.size());

  std::size_t total = 1;
  for (int k = 0; k < K; ++k) {
    if (total > in.enumeration_cap / M) {
      throw SizeError("exhaustive_ml: |M|^K = " + std::to_string(M) + "^" + std::to_string(K) +
                      " exceeds the enumeration cap of " + std::to_string(in.enumeration_cap));
    }
    total *= M;
  }

  const auto& pts = in.constellation.points();
  const double sense = variant.maximizes() ? 1.0 : -1.0;
  std::vector<int> digits(K, 0);
  std::vector<int> best_digits(K, 0);
  double best = -kInf;
  double best_native = 0.0;
  bool found = false;
  Vec x(2 * K);

  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rem = n;
    for (int k = K - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rem % M);
      rem /= M;
    }
    for (int k = 0; k < K; ++k) {
      x[k] = pts[digits[k]].real();
      x[k + K] = pts[digits[k]].imag();
    }
    const double native = evaluate(variant, x, in, prep);
    const double score = sense * native;
    if (!found || score > best) {
      found = true;
      best = score;
      best_native = native;
      best_digits = digits;
    }
  }

  TransmitVector tx = modulate_indices(best_digits, in.constellation);
  return {std::move(tx.symbols), std::move(tx.indices), std::move(tx.bits), best_native};
}

DetectionResult zf_detect(const ComplexChannel& channel, const CVec& y, const Constellation& c) {
  const CMat& H = channel.entries;
  if (y.size() != H.rows()) throw DimensionError("zf_detect: signal length does not match channel rows");
  Eigen::ColPivHouseholderQR<CMat> qr(H);
  if (qr.rank() < H.cols()) {
    throw LinAlgError("zf_detect: channel is rank deficient (rank " + std::to_string(qr.rank()) +
                      " < K = " + std::to_string(H.cols()) + ")");
  }
  const CVec x_hat = qr.solve(y);  // least squares == pseudo-inverse for full column rank
  HardDecision hd = demap_nearest(stack(x_hat), c);
  const double residual = (y - H * hd.symbols).squaredNorm();
  return {std::move(hd.symbols), std::move(hd.indices), std::move(hd.bits), residual};
}

}  // namespace lowres
