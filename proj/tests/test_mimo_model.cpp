#include "doctest.h"

#include <cmath>
#include <set>

#include "lowres/mimo_model.hpp"

using namespace lowres;

TEST_SUITE("mimo_model") {

TEST_CASE("sample_channel is deterministic per seed") {
  Rng a(42), b(42);
  const auto h1 = sample_channel(4, 32, a);
  const auto h2 = sample_channel(4, 32, b);
  CHECK(h1.entries.rows() == 32);
  CHECK(h1.entries.cols() == 4);
  CHECK((h1.entries.array() == h2.entries.array()).all());
}

TEST_CASE("sample_channel entries are zero mean, unit variance") {
  Rng rng(7);
  double power = 0.0, re = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws / 100; ++i) {
    const auto h = sample_channel(10, 10, rng);
    power += h.entries.cwiseAbs2().sum();
    re += h.entries.real().sum();
  }
  CHECK(power / draws == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(re / draws) < 0.02);
}

TEST_CASE("augment block pattern") {
  ComplexChannel ch{CMat(1, 1)};
  ch.entries(0, 0) = Complex(1, 2);
  const Mat h = augment(ch).real;
  Mat want(2, 2);
  want << 1, -2, 2, 1;
  CHECK(h == want);

  ComplexChannel id{CMat::Identity(2, 2)};
  CHECK(augment(id).real == Mat::Identity(4, 4));
}

TEST_CASE("augment matches complex multiply") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto ch = sample_channel(3, 5, rng);
    const CVec x = complex_gaussian(3, 1.0, rng);
    const Vec lhs = stack(ch.entries * x);
    const Vec rhs = augment(ch).real * stack(x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
  const CVec v = complex_gaussian(4, 1.0, rng);
  CHECK((unstack(stack(v)) - v).norm() == 0.0);
}

TEST_CASE("QPSK Gray map") {
  const auto c = Constellation::qpsk();
  const double s = 1.0 / std::sqrt(2.0);
  const Bits b00{0, 0}, b11{1, 1};
  const auto x00 = modulate(b00, c, 1);
  const auto x11 = modulate(b11, c, 1);
  CHECK(std::abs(x00.symbols[0] - Complex(s, s)) < 1e-15);
  CHECK(std::abs(x11.symbols[0] - Complex(-s, -s)) < 1e-15);
  CHECK(x00.real_stack.size() == 2);
}

TEST_CASE("16-QAM labels: closure, unit energy, Gray neighbours") {
  const auto c = Constellation::qam16();
  CHECK(c.size() == 16);
  CHECK(c.bits_per_symbol() == 4);
  double energy = 0.0;
  for (const auto& p : c.points()) energy += std::norm(p);
  CHECK(energy / 16 == doctest::Approx(1.0));
  std::set<std::pair<double, double>> pts;
  for (const auto& p : c.points()) pts.insert({p.real(), p.imag()});
  for (int i = 0; i < 16; ++i) {
    const Bits lab = c.label(i);
    CHECK(c.index_of(lab) == i);
    const auto x = modulate(lab, c, 1);
    CHECK(pts.count({x.symbols[0].real(), x.symbols[0].imag()}) == 1);
  }
  const double d = 2.0 / std::sqrt(10.0);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      if (std::abs(std::abs(c.points()[i] - c.points()[j]) - d) > 1e-12) continue;
      int diff = 0;
      const Bits a = c.label(i), b = c.label(j);
      for (int k = 0; k < 4; ++k) diff += a[k] != b[k];
      CHECK(diff == 1);
    }
  }
}

TEST_CASE("modulate rejects a wrong bit count") {
  const Bits three{0, 1, 0};
  CHECK_THROWS_AS(modulate(three, Constellation::qpsk(), 2), DimensionError);
}

TEST_CASE("demap_nearest") {
  const auto q = Constellation::qpsk();
  const double s = 1.0 / std::sqrt(2.0);
  Vec x(2);
  x << 0.3, -0.1;
  const auto d = demap_nearest(x, q);
  CHECK(std::abs(d.symbols[0] - Complex(s, -s)) < 1e-15);

  const auto c16 = Constellation::qam16();
  Vec y(2);
  y << 0.5, 0.5;
  CHECK(demap_nearest(y, c16).symbols[0].real() == doctest::Approx(1.0 / std::sqrt(10.0)));

  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto tx = modulate(random_bits(4 * 3, rng), c16, 3);
    const auto back = demap_nearest(tx.real_stack, c16);
    CHECK(back.bits == tx.bits);
    CHECK(back.indices == tx.indices);
  }

  Vec bad(2);
  bad << std::nan(""), 0.0;
  CHECK_THROWS_AS(demap_nearest(bad, q), InvalidValueError);
}

TEST_CASE("transmit: identity channel without noise, noise power, determinism") {
  const auto q = Constellation::qpsk();
  Rng rng(11);
  const auto tx = modulate(random_bits(4, rng), q, 2);
  ComplexChannel id{CMat::Identity(2, 2)};
  CHECK((transmit(id, tx, 1.0, rng, Noise::kOff) - tx.symbols).norm() == 0.0);

  const double rho = 4.0;
  ComplexChannel ch{CMat::Identity(1, 1)};
  const auto one = modulate(Bits{0, 0}, q, 1);
  double var = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) var += std::norm(transmit(ch, one, rho, rng)[0] - one.symbols[0]);
  CHECK(var / draws == doctest::Approx(1.0 / rho).epsilon(0.02));

  Rng a(9), b(9);
  CHECK(transmit(id, tx, 2.0, a) == transmit(id, tx, 2.0, b));
}

TEST_CASE("SystemConfig validation") {
  SystemConfig sys;
  sys.K = 4;
  sys.N = 2;
  CHECK_THROWS_AS(sys.validate(), ConfigError);
  sys.N = 8;
  CHECK_NOTHROW(sys.validate());
  CHECK(sys.at_snr_db(10.0).rho == doctest::Approx(10.0));
  CHECK(parse_constellation("16-qam") == ConstellationKind::QAM16);
  CHECK_THROWS_AS(parse_constellation("8psk"), ConfigError);
}

}  // TEST_SUITE
