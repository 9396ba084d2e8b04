#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lowres/detectors.hpp"
#include "lowres/link.hpp"
#include "lowres/training.hpp"

namespace lowres {

/// Everything a detector may look at in one trial.
struct TrialView {
  const SystemConfig& system;  ///< template with rho set to the current point
  const Realization& realization;
  const CVec& received;        ///< unquantized r
  const Vec& received_real;    ///< stack(r)
  std::uint64_t seed;          ///< per-trial seed, for stochastic detectors
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string id() const = 0;
  /// Throws ConfigError when the detector cannot run on this system.
  virtual void check(const SystemConfig& /*sys*/) const {}
  /// Called once per SNR point, before its first trial.
  virtual void prepare(const SystemConfig& /*at_snr*/, double /*snr_db*/) {}
  /// Must be safe to call concurrently.
  virtual DetectionResult detect(const TrialView& trial) const = 0;
};

/// Builds a detector from its JSON spec:
///   {"kind": "genie" | "random" | "zf" | "ml-exact-1bit" | "ml-approx-1bit" |
///            "ml-exact-fewbit" | "ml-approx-fewbit" | "obmnet" | "fbmnet",
///    "id": optional label, "b": optional resolution override (zf: 0 = unquantized),
///    "params": trained-parameter file (networks),
///    "train": train config (networks), "train_mode": "per-snr" | "shared"}
std::unique_ptr<Detector> make_detector(const nlohmann::json& spec);

struct SweepConfig {
  SystemConfig system;
  std::vector<double> snr_db;
  int trials_per_point = 1000;
  /// Stop a (detector, SNR) point once this many bit errors are collected
  /// and at least 10% of the trials ran; <= 0 disables early stopping.
  int min_errors = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::vector<nlohmann::json> detectors;

  void validate() const;
};

struct BerResult {
  std::string detector;
  double snr_db = 0.0;
  long trials = 0;
  long bit_errors = 0;
  long bits_sent = 0;
  double ber = 0.0;
  long symbol_errors = 0;
  long symbols_sent = 0;
  double ser = 0.0;
  double ci_low = 0.0;   ///< Clopper-Pearson 95%
  double ci_high = 1.0;
  double wall_time_s = 0.0;
};

/// Exact binomial (Clopper-Pearson) two-sided interval.
std::pair<double, double> clopper_pearson(long successes, long n, double confidence = 0.95);

/// sqrt(p (1 - p) / n) of a BER estimate.
double ber_sigma(const BerResult& r);
/// |a - b| <= 3 sqrt(sigma_a^2 + sigma_b^2)
bool within_three_sigma(const BerResult& a, const BerResult& b);
/// a.ber < b.ber by more than 3 sqrt(sigma_a^2 + sigma_b^2)
bool below_three_sigma(const BerResult& a, const BerResult& b);

/// Results are ordered by SNR point, then by detector order. All detectors
/// see identical (H, x, z) in a given trial, and the same unit-noise draw is
/// reused across SNR points.
std::vector<BerResult> ber_sweep(const SweepConfig& cfg);
std::vector<BerResult> ber_sweep(const SweepConfig& cfg,
                                 const std::vector<std::shared_ptr<Detector>>& detectors);

struct CompareRow {
  double snr_db = 0.0;
  BerResult exact_onebit;
  BerResult approx_onebit;
  BerResult exact_fewbit;
  BerResult approx_fewbit;
};

struct CompareTable {
  int fewbit_resolution = 2;
  std::vector<CompareRow> rows;

  std::vector<BerResult> flatten() const;
};

/// Paired sweep of the four exhaustive ML variants: exact and logistic
/// objectives on the one-bit observation and on the max(b, 2)-bit
/// observation of the same trials. No early stopping. Zero trials gives an
/// empty table.
CompareTable compare_ml(const SystemConfig& sys, const std::vector<double>& snr_db, int trials,
                        std::uint64_t seed, int workers = 1);

enum class ResultFormat { kCsv, kJson };

ResultFormat format_from_path(const std::filesystem::path& path);

/// CSV header: detector,snr_db,trials,bit_errors,bits_sent,ber,ci_low,ci_high,wall_time_s.
/// JSON carries every field plus `config` (when given) for replay.
void write_results(const std::vector<BerResult>& results, const std::filesystem::path& path,
                   ResultFormat format, const std::optional<nlohmann::json>& config = std::nullopt);

std::vector<BerResult> read_results_json(const std::filesystem::path& path);

}  // namespace lowres
