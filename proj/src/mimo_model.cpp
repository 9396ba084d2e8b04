#include "lowres/mimo_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace lowres {

namespace {

// Per-axis Gray amplitude (unscaled) for a group of axis bits, MSB first.
double axis_amplitude(ConstellationKind kind, std::span<const std::uint8_t> b) {
  if (kind == ConstellationKind::QPSK) return b[0] ? -1.0 : 1.0;
  // 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3
  const double sign = b[0] ? -1.0 : 1.0;
  const bool inner = b[1] != 0;
  return sign * (inner ? 1.0 : 3.0);
}

}  // namespace

Constellation::Constellation(ConstellationKind kind, int bits_per_symbol)
    : kind_(kind), bits_per_symbol_(bits_per_symbol) {
  const double scale =
      kind == ConstellationKind::QPSK ? 1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(10.0);
  const int half = bits_per_symbol / 2;
  const int count = 1 << bits_per_symbol;
  points_.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Bits lbl = label(i);
    const std::span<const std::uint8_t> all(lbl);
    const double re = axis_amplitude(kind, all.first(half)) * scale;
    const double im = axis_amplitude(kind, all.subspan(half)) * scale;
    points_.emplace_back(re, im);
  }
  if (kind == ConstellationKind::QPSK) {
    axis_levels_ = {-scale, scale};
  } else {
    axis_levels_ = {-3 * scale, -scale, scale, 3 * scale};
  }
}

Constellation Constellation::qpsk() { return {ConstellationKind::QPSK, 2}; }
Constellation Constellation::qam16() { return {ConstellationKind::QAM16, 4}; }

Constellation Constellation::of(ConstellationKind kind) {
  return kind == ConstellationKind::QPSK ? qpsk() : qam16();
}

std::string Constellation::name() const {
  return kind_ == ConstellationKind::QPSK ? "QPSK" : "QAM16";
}

Bits Constellation::label(int index) const {
  Bits out(bits_per_symbol_);
  for (int j = 0; j < bits_per_symbol_; ++j) {
    out[j] = static_cast<std::uint8_t>((index >> (bits_per_symbol_ - 1 - j)) & 1);
  }
  return out;
}

int Constellation::index_of(std::span<const std::uint8_t> lbl) const {
  if (static_cast<int>(lbl.size()) != bits_per_symbol_) {
    throw DimensionError("constellation label has wrong bit count");
  }
  int idx = 0;
  for (auto bit : lbl) idx = (idx << 1) | (bit & 1);
  return idx;
}

ConstellationKind parse_constellation(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) {
    return static_cast<char>(std::toupper(ch));
  });
  n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
  if (n == "QPSK") return ConstellationKind::QPSK;
  if (n == "QAM16" || n == "16QAM") return ConstellationKind::QAM16;
  throw ConfigError("unknown constellation '" + std::string(name) +
                    "' (expected QPSK or QAM16)");
}

void SystemConfig::validate() const {
  std::ostringstream err;
  if (K < 1) err << "K must be >= 1 (got " << K << "); ";
  if (N < K) err << "N must be >= K (got N=" << N << ", K=" << K << "); ";
  if (b < 1) err << "b must be >= 1 (got " << b << "); ";
  if (!(rho > 0) || !std::isfinite(rho)) err << "rho must be positive and finite; ";
  if (delta && !(*delta > 0)) err << "delta must be positive; ";
  if (!err.str().empty()) throw ConfigError("invalid system config: " + err.str());
}

SystemConfig SystemConfig::at_snr_db(double snr_db) const {
  SystemConfig out = *this;
  out.rho = db_to_linear(snr_db);
  return out;
}

CVec complex_gaussian(int n, double variance, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  CVec z(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    z[i] = {re, im};
  }
  return z;
}

ComplexChannel sample_channel(int K, int N, Rng& rng) {
  if (K < 1 || N < 1) throw DimensionError("sample_channel: K and N must be >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexChannel ch{CMat(N, K)};
  // Column-major fill so the draw order is fixed by (K, N) alone.
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      const double re = normal(rng);
      const double im = normal(rng);
      ch.entries(n, k) = {re, im};
    }
  }
  return ch;
}

AugmentedChannel augment(const ComplexChannel& ch) {
  const Eigen::Index N = ch.entries.rows();
  const Eigen::Index K = ch.entries.cols();
  Mat h(2 * N, 2 * K);
  const Mat re = ch.entries.real();
  const Mat im = ch.entries.imag();
  h.topLeftCorner(N, K) = re;
  h.topRightCorner(N, K) = -im;
  h.bottomLeftCorner(N, K) = im;
  h.bottomRightCorner(N, K) = re;
  return {std::move(h)};
}

Vec stack(const CVec& v) {
  Vec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

CVec unstack(const Vec& v) {
  if (v.size() % 2 != 0) throw DimensionError("unstack: odd-length real vector");
  const Eigen::Index n = v.size() / 2;
  CVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = {v[i], v[i + n]};
  return out;
}

Bits random_bits(std::size_t count, Rng& rng) {
  Bits out(count);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 63);
  return out;
}

TransmitVector modulate_indices(std::span<const int> indices, const Constellation& c) {
  const int K = static_cast<int>(indices.size());
  const int m = c.bits_per_symbol();
  TransmitVector tx;
  tx.symbols.resize(K);
  tx.indices.assign(indices.begin(), indices.end());
  tx.bits.reserve(static_cast<std::size_t>(K) * m);
  for (int k = 0; k < K; ++k) {
    const int idx = indices[k];
    if (idx < 0 || idx >= c.size()) throw DimensionError("modulate: symbol index out of range");
    tx.symbols[k] = c.points()[idx];
    const Bits lbl = c.label(idx);
    tx.bits.insert(tx.bits.end(), lbl.begin(), lbl.end());
  }
  tx.real_stack = stack(tx.symbols);
  return tx;
}

TransmitVector modulate(std::span<const std::uint8_t> bits, const Constellation& c, int K) {
  const std::size_t m = static_cast<std::size_t>(c.bits_per_symbol());
  if (K < 1 || bits.size() != static_cast<std::size_t>(K) * m) {
    throw DimensionError("modulate: expected " + std::to_string(K * m) + " bits, got " +
                         std::to_string(bits.size()));
  }
  std::vector<int> idx(K);
  for (int k = 0; k < K; ++k) idx[k] = c.index_of(bits.subspan(k * m, m));
  return modulate_indices(idx, c);
}

HardDecision demap_nearest(const Vec& x_est, const Constellation& c) {
  if (x_est.size() % 2 != 0) throw DimensionError("demap_nearest: odd-length estimate");
  if (x_est.hasNaN()) throw InvalidValueError("demap_nearest: NaN in estimate");
  const Eigen::Index K = x_est.size() / 2;
  std::vector<int> idx(K);
  const auto& pts = c.points();
  for (Eigen::Index k = 0; k < K; ++k) {
    const Complex z(x_est[k], x_est[k + K]);
    int best = 0;
    double best_d = std::norm(z - pts[0]);
    for (int i = 1; i < c.size(); ++i) {
      const double d = std::norm(z - pts[i]);
      const bool closer = d < best_d;
      const bool tie_wins = d == best_d &&
                            (pts[i].real() < pts[best].real() ||
                             (pts[i].real() == pts[best].real() &&
                              pts[i].imag() < pts[best].imag()));
      if (closer || tie_wins) {
        best = i;
        best_d = d;
      }
    }
    idx[k] = best;
  }
  TransmitVector tx = modulate_indices(idx, c);
  return {std::move(tx.symbols), std::move(tx.indices), std::move(tx.bits)};
}

CVec transmit(const ComplexChannel& ch, const TransmitVector& x, double rho, Rng& rng,
              Noise noise) {
  if (!(rho > 0)) throw DomainError("transmit: rho must be positive");
  if (ch.entries.cols() != x.symbols.size()) {
    throw DimensionError("transmit: channel has " + std::to_string(ch.entries.cols()) +
                         " columns but " + std::to_string(x.symbols.size()) + " symbols");
  }
  CVec r = ch.entries * x.symbols;
  if (noise == Noise::kOn) r += complex_gaussian(static_cast<int>(r.size()), 1.0 / rho, rng);
  return r;
}

}  // namespace lowres
