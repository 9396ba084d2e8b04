#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lowres {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Every stochastic operation takes one of these explicitly.
using Rng = std::mt19937_64;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy. Each maps onto one failure class named by the operation
// contracts so callers (and the CLI) can report them distinctly.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidValueError : std::domain_error {
  using std::domain_error::domain_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SizeError : std::length_error {
  using std::length_error::length_error;
};
struct LinAlgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateOutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// SplitMix64 finalizer; used to derive independent per-trial / per-sample
/// seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix_seed(mix_seed(master ^ mix_seed(stream)) + index);
}

}  // namespace lowres
