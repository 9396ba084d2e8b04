#include "doctest.h"

#include <cmath>

#include "lowres/bench.hpp"
#include "lowres/detectors.hpp"
#include "lowres/link.hpp"

using namespace lowres;

namespace {

SystemConfig make_system(int K, int N, int b, double snr_db) {
  SystemConfig s;
  s.K = K;
  s.N = N;
  s.b = b;
  s.rho = db_to_linear(snr_db);
  return s;
}

bool in_constellation(const CVec& symbols, const Constellation& c) {
  for (const auto& s : symbols) {
    bool hit = false;
    for (const auto& p : c.points()) hit = hit || std::abs(s - p) < 1e-12;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("detectors") {

TEST_CASE("variant names round trip") {
  for (const char* n : {"ml-exact-1bit", "ml-approx-1bit", "ml-exact-fewbit", "ml-approx-fewbit"}) {
    CHECK(parse_ml_variant(n).name() == n);
  }
  CHECK_FALSE(parse_ml_variant("ml-approx-1bit").maximizes());
  CHECK_THROWS_AS(parse_ml_variant("ml-fast"), ConfigError);
}

TEST_CASE("noiseless 3-bit exact ML recovers the transmitted vector") {
  const SystemConfig sys = make_system(2, 8, 3, 40.0);
  const auto q = quantizer_for(sys);
  int hits = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(17, 0, t));
    const Realization r = draw_realization(sys, rng);
    const Vec clean = r.augmented.real * r.tx.real_stack;
    const Vec y = quantize(clean, q);
    const MlInputs in{r.augmented, y, q, sys.rho, sys.constellation};
    hits += exhaustive_ml({MlObjective::kExact, MlModel::kFewBit}, in).bits == r.tx.bits;
  }
  CHECK(hits >= 999);
}

TEST_CASE("one-bit ML on a single user picks the transmitted symbol") {
  const auto c = Constellation::qpsk();
  ComplexChannel ch{CMat::Identity(1, 1)};
  const AugmentedChannel H = augment(ch);
  for (int idx = 0; idx < 4; ++idx) {
    const std::vector<int> ids{idx};
    const auto tx = modulate_indices(ids, c);
    const Vec y = sign_quantize(H.real * tx.real_stack);
    for (auto v : {MlVariant{MlObjective::kExact, MlModel::kOneBit}, MlVariant{MlObjective::kApprox, MlModel::kOneBit}}) {
      const MlInputs in{H, y, QuantizerConfig{1, 2.0}, 100.0, c};
      CHECK(exhaustive_ml(v, in).indices == ids);
    }
  }
}

TEST_CASE("returned ML candidate is optimal on re-enumeration") {
  const SystemConfig sys = make_system(2, 4, 2, 5.0);
  const auto q = quantizer_for(sys);
  const auto& c = sys.constellation;
  for (int t = 0; t < 30; ++t) {
    Rng rng(derive_seed(5, 1, t));
    const Realization r = draw_realization(sys, rng);
    const Vec rr = stack(r.received(sys.rho));
    const Vec yq = quantize(rr, q);
    const Vec ys = sign_quantize(rr);
    for (const char* name : {"ml-exact-1bit", "ml-approx-1bit", "ml-exact-fewbit", "ml-approx-fewbit"}) {
      const MlVariant v = parse_ml_variant(name);
      const Vec& y = v.model == MlModel::kOneBit ? ys : yq;
      const MlInputs in{r.augmented, y, q, sys.rho, c};
      const auto res = exhaustive_ml(v, in);
      CHECK(in_constellation(res.symbols, c));
      const double sense = v.maximizes() ? 1.0 : -1.0;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const std::vector<int> ids{a, b};
          const double other = ml_objective(v, modulate_indices(ids, c).real_stack, in);
          CHECK(sense * res.objective >= sense * other);
        }
      }
    }
  }
}

TEST_CASE("enumeration cap") {
  const SystemConfig sys = make_system(3, 6, 2, 5.0);
  Rng rng(1);
  const Realization r = draw_realization(sys, rng);
  const Vec y = quantize(stack(r.received(sys.rho)), quantizer_for(sys));
  MlInputs in{r.augmented, y, quantizer_for(sys), sys.rho, sys.constellation, 63};
  CHECK_THROWS_AS(exhaustive_ml({}, in), SizeError);
  in.enumeration_cap = 64;
  CHECK_NOTHROW(exhaustive_ml({}, in));
}

TEST_CASE("zero-forcing") {
  const auto c = Constellation::qam16();
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto ch = sample_channel(3, 6, rng);
    const auto tx = modulate(random_bits(12, rng), c, 3);
    const auto res = zf_detect(ch, transmit(ch, tx, 1.0, rng, Noise::kOff), c);
    CHECK(res.bits == tx.bits);
    CHECK(res.objective < 1e-20);
  }
  const auto ch = sample_channel(2, 4, rng);
  const auto noisy = zf_detect(ch, complex_gaussian(4, 1.0, rng), c);
  CHECK(in_constellation(noisy.symbols, c));

  ComplexChannel rank1{CMat::Ones(4, 2)};
  CHECK_THROWS_AS(zf_detect(rank1, CVec::Zero(4), c), LinAlgError);
}

TEST_CASE("one-bit exhaustive ML beats one-bit ZF at 10 dB") {
  SweepConfig cfg;
  cfg.system = make_system(4, 32, 1, 10.0);
  cfg.snr_db = {10.0};
  cfg.trials_per_point = 10000;
  cfg.min_errors = 0;
  cfg.seed = 21;
  cfg.detectors = {{{"kind", "ml-exact-1bit"}}, {{"kind", "zf"}}};
  const auto res = ber_sweep(cfg);
  REQUIRE(res.size() == 2);
  MESSAGE("ml " << res[0].ber << " zf " << res[1].ber);
  CHECK(below_three_sigma(res[0], res[1]));
}

}  // TEST_SUITE
