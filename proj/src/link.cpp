#include "lowres/link.hpp"

#include <cmath>

namespace lowres {

CVec Realization::received(double rho) const {
  if (!(rho > 0)) throw DomainError("received: rho must be positive");
  return channel.entries * tx.symbols + unit_noise / std::sqrt(rho);
}

Realization draw_realization(const SystemConfig& sys, Rng& rng) {
  Realization r;
  r.channel = sample_channel(sys.K, sys.N, rng);
  r.augmented = augment(r.channel);
  const Bits bits = random_bits(static_cast<std::size_t>(sys.K) * sys.constellation.bits_per_symbol(), rng);
  r.tx = modulate(bits, sys.constellation, sys.K);
  r.unit_noise = complex_gaussian(sys.N, 1.0, rng);
  return r;
}

QuantizerConfig quantizer_for(const SystemConfig& sys, int b) {
  if (sys.delta) return {b, *sys.delta};
  if (b == 1) return {1, 2.0};
  return {b, default_step(b, sys.K, sys.rho)};
}

}  // namespace lowres
