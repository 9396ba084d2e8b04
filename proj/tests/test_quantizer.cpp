#include "doctest.h"

#include <cmath>

#include "lowres/quantizer.hpp"

using namespace lowres;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Mean squared error of the b-bit uniform midrise quantizer with step d on a
// standard normal input, from the Gaussian partial moments of each bin.
double gaussian_mse(int b, double d) {
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * M_PI);
  auto pdf = [&](double t) { return std::isinf(t) ? 0.0 : inv_sqrt2pi * std::exp(-0.5 * t * t); };
  auto cdf = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
  auto tpdf = [&](double t) { return std::isinf(t) ? 0.0 : t * pdf(t); };
  const int levels = 1 << b;
  double mse = 0.0;
  for (int l = 1; l <= levels; ++l) {
    const double lo = l == 1 ? -INFINITY : (-levels / 2 + l - 1) * d;
    const double hi = l == levels ? INFINITY : (-levels / 2 + l) * d;
    const double c = (l - levels / 2 - 0.5) * d;
    const double m0 = cdf(hi) - cdf(lo);
    const double m1 = pdf(lo) - pdf(hi);
    const double m2 = m0 + tpdf(lo) - tpdf(hi);
    mse += m2 - 2 * c * m1 + c * c * m0;
  }
  return mse;
}

double argmin_step(int b) {
  double lo = 0.01, hi = 3.0;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), c = lo + g * (hi - lo);
    if (gaussian_mse(b, a) < gaussian_mse(b, c)) hi = c; else lo = a;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("quantizer") {

TEST_CASE("thresholds") {
  CHECK(thresholds({2, 1.0}) == vec({-1, 0, 1}));
  CHECK(thresholds({1, 1.0}) == vec({0}));
  CHECK(thresholds({3, 0.5}) == vec({-1.5, -1, -0.5, 0, 0.5, 1, 1.5}));
  CHECK(output_levels({2, 1.0}) == vec({-1.5, -0.5, 0.5, 1.5}));
}

TEST_CASE("quantize") {
  const QuantizerConfig q{2, 1.0};
  CHECK(quantize(0.3, q) == 0.5);
  CHECK(quantize(-5.0, q) == -1.5);
  CHECK(quantize(1.2, q) == 1.5);
  CHECK(quantize(1.0, q) == 0.5);  // bins are closed on the right
  CHECK(quantize(0.0, q) == -0.5);
  CHECK_THROWS_AS(quantize(std::nan(""), q), InvalidValueError);
  CHECK_THROWS_AS(QuantizerConfig({0, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS(QuantizerConfig({2, -1.0}).validate(), DomainError);

  CVec z(1);
  z[0] = Complex(0.3, -5.0);
  CHECK(quantize(z, q)[0] == Complex(0.5, -1.5));
}

TEST_CASE("sign_quantize") {
  CHECK(sign_quantize(vec({0.0})) == vec({1.0}));
  CHECK(sign_quantize(vec({-1e-300})) == vec({-1.0}));
  CHECK(sign_quantize(vec({3, -2})) == vec({1, -1}));
  CHECK_THROWS_AS(sign_quantize(vec({std::nan("")})), InvalidValueError);
}

TEST_CASE("bin_bounds") {
  const QuantizerConfig q{2, 1.0};
  const auto b = bin_bounds(QuantizedSignal{vec({0.5, 1.5, -1.5}), q});
  CHECK(b.low[0] == 0.0);
  CHECK(b.up[0] == 1.0);
  CHECK(b.low[1] == 1.0);
  CHECK(b.up[1] == kInf);
  CHECK(b.low[2] == -kInf);
  CHECK(b.up[2] == -1.0);
  CHECK_THROWS_AS(bin_bounds(QuantizedSignal{vec({0.7}), q}), DomainError);
  CHECK_THROWS_AS(bin_bounds(QuantizedSignal{vec({2.5}), q}), DomainError);

  const auto s = sign_bounds(vec({1, -1}));
  CHECK(s.low[0] == 0.0);
  CHECK(s.up[0] == kInf);
  CHECK(s.low[1] == -kInf);
  CHECK(s.up[1] == 0.0);
}

TEST_CASE("default_step") {
  CHECK(default_step(2, 1, 1e300) == doctest::Approx(0.9957 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(default_step(2, 1, 1e300) == doctest::Approx(0.7041).epsilon(1e-4));
  CHECK(default_step(3, 4, 1.0) == doctest::Approx(0.5860 * std::sqrt(2.5)));
  CHECK_THROWS_AS(default_step(1, 4, 1.0), DomainError);
}

TEST_CASE("optimal step table agrees with direct MSE minimization") {
  for (int b = 1; b <= 6; ++b) {
    CAPTURE(b);
    CHECK(gaussian_optimal_step(b) == doctest::Approx(argmin_step(b)).epsilon(1e-3));
  }
}

}  // TEST_SUITE
