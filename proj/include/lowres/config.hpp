#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "lowres/bench.hpp"
#include "lowres/training.hpp"
#include "lowres/unfolded.hpp"

namespace lowres {

using nlohmann::json;

// JSON <-> config conversions. Readers reject unknown keys and wrong types
// with a ConfigError naming the offending field path (e.g. "system.K").
//
// system:  {"K", "N", "b", "constellation", "snr_db" | "rho", "delta"?}
// train:   TrainConfig field names, "snr_db" as a number or [min, max]
// sweep:   {"system", "snr_db": [...], "trials_per_point", "min_errors"?,
//           "seed"?, "workers"?, "detectors": [...]}

SystemConfig system_from_json(const json& j, const std::string& path = "system");
json to_json(const SystemConfig& sys);

TrainConfig train_config_from_json(const json& j, const std::string& path = "train");
json to_json(const TrainConfig& tc);

SweepConfig sweep_config_from_json(const json& j);
json to_json(const SweepConfig& cfg);

/// Trained network as persisted on disk.
struct TrainedNet {
  NetKind kind = NetKind::kOBMNet;
  int K = 1;
  int N = 1;
  int b = 1;
  std::string constellation = "QPSK";
  double snr_db = 0.0;
  NetParams params;
  std::uint64_t seed = 0;
  TrainConfig train_config;
};

json to_json(const TrainedNet& net);
/// Validates that the alpha count equals L and that the dimensions are sane.
TrainedNet trained_net_from_json(const json& j);
void save_trained_net(const TrainedNet& net, const std::filesystem::path& path);
TrainedNet load_trained_net(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& j);

}  // namespace lowres
