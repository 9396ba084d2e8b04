#pragma once

#include <cstddef>
#include <string>

#include "lowres/likelihood.hpp"
#include "lowres/mimo_model.hpp"
#include "lowres/quantizer.hpp"

namespace lowres {

struct DetectionResult {
  CVec symbols;
  std::vector<int> indices;
  Bits bits;
  /// Value of the detector's own objective at the decision (see each
  /// detector for its sense).
  double objective = 0.0;
};

enum class MlObjective { kExact, kApprox };
enum class MlModel { kOneBit, kFewBit };

struct MlVariant {
  MlObjective objective = MlObjective::kExact;
  MlModel model = MlModel::kFewBit;

  /// e.g. "ml-exact-1bit", "ml-approx-fewbit"
  std::string name() const;
  /// True when the objective is maximized (all but the SoftPlus objective).
  bool maximizes() const { return !(objective == MlObjective::kApprox && model == MlModel::kOneBit); }
};

MlVariant parse_ml_variant(const std::string& name);

/// Observation seen by the exhaustive detectors. For the one-bit model
/// `observed` holds +-1 signs and `quantizer` is ignored; for the few-bit
/// model it holds legal levels of `quantizer`.
struct MlInputs {
  const AugmentedChannel& channel;
  const Vec& observed;
  QuantizerConfig quantizer;
  double rho = 1.0;
  const Constellation& constellation;
  std::size_t enumeration_cap = std::size_t{1} << 20;
};

/// Selected objective of the real-stacked candidate x.
double ml_objective(const MlVariant& variant, const Vec& x, const MlInputs& in);

/// Global optimum over all |M|^K candidates. Candidates are enumerated with
/// user 0 as the most significant digit over constellation indices; among
/// equal objectives the first one in that order wins. Throws SizeError when
/// |M|^K exceeds the cap. `objective` in the result is the native value
/// (log-likelihood, or the SoftPlus sum for the approximate one-bit model).
DetectionResult exhaustive_ml(const MlVariant& variant, const MlInputs& in);

/// Pseudo-inverse of the complex channel applied to the quantized signal,
/// followed by nearest-point demapping. `objective` is ||y - H x_hat||^2.
/// Throws LinAlgError for a rank-deficient channel.
DetectionResult zf_detect(const ComplexChannel& channel, const CVec& y, const Constellation& c);

}  // namespace lowres
