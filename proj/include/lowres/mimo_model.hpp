#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lowres/common.hpp"

namespace lowres {

enum class ConstellationKind { QPSK, QAM16 };

/// Unit-energy Gray-labelled constellation.
///
/// Point index i carries the label whose bits, read MSB first, spell i.
/// The first half of each label drives the real axis and the second half the
/// imaginary axis, with the same per-axis Gray code on both:
///   QPSK   (1 bit/axis):  0 -> +1, 1 -> -1, scaled by 1/sqrt(2)
///   16-QAM (2 bits/axis): 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3, scaled by
///   1/sqrt(10)
class Constellation {
 public:
  static Constellation qpsk();
  static Constellation qam16();
  static Constellation of(ConstellationKind kind);

  ConstellationKind kind() const { return kind_; }
  std::string name() const;
  const std::vector<Complex>& points() const { return points_; }
  int bits_per_symbol() const { return bits_per_symbol_; }
  int size() const { return static_cast<int>(points_.size()); }

  /// Distinct per-axis amplitudes, ascending.
  const std::vector<double>& axis_levels() const { return axis_levels_; }

  /// Label bits of point `index`, MSB first.
  Bits label(int index) const;
  int index_of(std::span<const std::uint8_t> label) const;

 private:
  Constellation(ConstellationKind kind, int bits_per_symbol);

  ConstellationKind kind_;
  int bits_per_symbol_;
  std::vector<Complex> points_;
  std::vector<double> axis_levels_;
};

ConstellationKind parse_constellation(std::string_view name);

struct SystemConfig {
  int K = 1;
  int N = 1;
  int b = 1;
  double rho = 1.0;  ///< linear SNR, 1/N0
  Constellation constellation = Constellation::qpsk();
  /// Quantizer step override; unset means the loading rule in default_step().
  std::optional<double> delta;

  /// Throws ConfigError when N >= K >= 1, rho > 0, b >= 1 do not hold.
  void validate() const;
  SystemConfig at_snr_db(double snr_db) const;
};

struct ComplexChannel {
  CMat entries;  ///< N x K

  int users() const { return static_cast<int>(entries.cols()); }
  int antennas() const { return static_cast<int>(entries.rows()); }
};

/// Real-domain 2N x 2K image [[Re, -Im], [Im, Re]] of a complex channel.
struct AugmentedChannel {
  Mat real;

  auto row(Eigen::Index i) const { return real.row(i); }
  Eigen::Index rows() const { return real.rows(); }
  Eigen::Index cols() const { return real.cols(); }
};

struct TransmitVector {
  CVec symbols;               ///< length K
  Vec real_stack;             ///< [Re; Im], length 2K
  std::vector<int> indices;   ///< constellation index per user
  Bits bits;
};

ComplexChannel sample_channel(int K, int N, Rng& rng);
AugmentedChannel augment(const ComplexChannel& ch);

Vec stack(const CVec& v);
CVec unstack(const Vec& v);

Bits random_bits(std::size_t count, Rng& rng);

TransmitVector modulate(std::span<const std::uint8_t> bits,
                        const Constellation& c, int K);
TransmitVector modulate_indices(std::span<const int> indices,
                                const Constellation& c);

struct HardDecision {
  CVec symbols;
  std::vector<int> indices;
  Bits bits;
};

/// Per-user nearest constellation point of x_est[k] + j x_est[k+K].
/// Equal distances resolve toward smaller real part, then smaller imaginary
/// part.
HardDecision demap_nearest(const Vec& x_est, const Constellation& c);

enum class Noise { kOn, kOff };

/// r = H x + z with z ~ CN(0, 1/rho). Noise::kOff returns H x.
CVec transmit(const ComplexChannel& ch, const TransmitVector& x, double rho,
              Rng& rng, Noise noise = Noise::kOn);

/// Complex Gaussian vector with E|z_n|^2 = variance.
CVec complex_gaussian(int n, double variance, Rng& rng);

}  // namespace lowres
