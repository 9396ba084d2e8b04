#pragma once

#include "lowres/likelihood.hpp"
#include "lowres/mimo_model.hpp"
#include "lowres/quantizer.hpp"

namespace lowres {

/// One draw of (H, x, z). The noise is kept at unit variance so the same draw
/// can be replayed at any SNR.
struct Realization {
  ComplexChannel channel;
  AugmentedChannel augmented;
  TransmitVector tx;
  CVec unit_noise;  ///< CN(0, 1) entries

  /// H x + z / sqrt(rho)
  CVec received(double rho) const;
};

/// Draw order: channel, then bits, then noise.
Realization draw_realization(const SystemConfig& sys, Rng& rng);

/// Quantizer used at system resolution b: the configured step, else the
/// loading rule for b >= 2, else delta = 2 (levels +-1) for one bit.
QuantizerConfig quantizer_for(const SystemConfig& sys, int b);
inline QuantizerConfig quantizer_for(const SystemConfig& sys) { return quantizer_for(sys, sys.b); }

}  // namespace lowres
