#include "lowres/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/math/distributions/beta.hpp>

#include "lowres/config.hpp"
#include "lowres/log.hpp"
#include "lowres/parallel.hpp"

namespace lowres {

namespace {

constexpr std::uint64_t kTrialStream = 0x7472'6961'6cULL;

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Built-in detectors

class GenieDetector final : public Detector {
 public:
  explicit GenieDetector(std::string id) : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  DetectionResult detect(const TrialView& t) const override {
    const TransmitVector& tx = t.realization.tx;
    return {tx.symbols, tx.indices, tx.bits, 0.0};
  }

 private:
  std::string id_;
};

class RandomGuessDetector final : public Detector {
 public:
  explicit RandomGuessDetector(std::string id) : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  DetectionResult detect(const TrialView& t) const override {
    Rng rng(derive_seed(t.seed, hash_string(id_), 0));
    const int K = t.system.K;
    std::uniform_int_distribution<int> pick(0, t.system.constellation.size() - 1);
    std::vector<int> idx(K);
    for (auto& i : idx) i = pick(rng);
    TransmitVector tx = modulate_indices(idx, t.system.constellation);
    return {std::move(tx.symbols), std::move(tx.indices), std::move(tx.bits), 0.0};
  }

 private:
  std::string id_;
};

class ZfDetector final : public Detector {
 public:
  // resolution 0 means the unquantized signal.
  ZfDetector(std::string id, std::optional<int> resolution)
      : id_(std::move(id)), resolution_(resolution) {}
  std::string id() const override { return id_; }
  void check(const SystemConfig& sys) const override {
    if (resolution_ && *resolution_ < 0) throw ConfigError(id_ + ": b must be >= 0");
    (void)sys;
  }
  DetectionResult detect(const TrialView& t) const override {
    const int b = resolution_.value_or(t.system.b);
    if (b == 0) return zf_detect(t.realization.channel, t.received, t.system.constellation);
    const CVec y = quantize(t.received, quantizer_for(t.system, b));
    return zf_detect(t.realization.channel, y, t.system.constellation);
  }

 private:
  std::string id_;
  std::optional<int> resolution_;
};

class MlDetector final : public Detector {
 public:
  MlDetector(std::string id, MlVariant variant, std::optional<int> resolution)
      : id_(std::move(id)), variant_(variant), resolution_(resolution) {}
  std::string id() const override { return id_; }

  void check(const SystemConfig& sys) const override {
    std::size_t total = 1;
    const auto M = static_cast<std::size_t>(sys.constellation.size());
    for (int k = 0; k < sys.K; ++k) {
      total *= M;
      if (total > kCap) {
        throw ConfigError(id_ + ": |M|^K exceeds the enumeration cap of " + std::to_string(kCap));
      }
    }
    if (variant_.model == MlModel::kFewBit && resolution(sys) < 1) {
      throw ConfigError(id_ + ": few-bit model needs b >= 1");
    }
  }

  DetectionResult detect(const TrialView& t) const override {
    if (variant_.model == MlModel::kOneBit) {
      const Vec y = sign_quantize(t.received_real);
      return exhaustive_ml(variant_, MlInputs{t.realization.augmented, y, {1, 2.0}, t.system.rho,
                                              t.system.constellation, kCap});
    }
    const QuantizerConfig q = quantizer_for(t.system, resolution(t.system));
    const Vec y = quantize(t.received_real, q);
    return exhaustive_ml(variant_, MlInputs{t.realization.augmented, y, q, t.system.rho,
                                            t.system.constellation, kCap});
  }

 private:
  static constexpr std::size_t kCap = std::size_t{1} << 20;

  int resolution(const SystemConfig& sys) const { return resolution_.value_or(sys.b); }

  std::string id_;
  MlVariant variant_;
  std::optional<int> resolution_;
};

class NetDetector final : public Detector {
 public:
  NetDetector(std::string id, NetKind kind, std::optional<int> resolution,
              std::optional<TrainedNet> fixed, std::optional<TrainConfig> train, bool per_snr)
      : id_(std::move(id)),
        kind_(kind),
        resolution_(resolution),
        fixed_(std::move(fixed)),
        train_(std::move(train)),
        per_snr_(per_snr) {}

  std::string id() const override { return id_; }

  void check(const SystemConfig& sys) const override {
    const int b = effective_b(sys);
    if (kind_ == NetKind::kFBMNet && b < 2) throw ConfigError(id_ + ": FBMNet needs b >= 2");
    if (fixed_) {
      if (fixed_->kind != kind_) throw ConfigError(id_ + ": parameter file is for " + to_string(fixed_->kind));
      if (fixed_->K != sys.K || fixed_->N != sys.N) {
        throw ConfigError(id_ + ": parameter file was trained for K=" + std::to_string(fixed_->K) +
                          ", N=" + std::to_string(fixed_->N));
      }
      if (kind_ == NetKind::kFBMNet && fixed_->b != b) {
        throw ConfigError(id_ + ": parameter file was trained for b=" + std::to_string(fixed_->b));
      }
    }
  }

  void prepare(const SystemConfig& at_snr, double snr_db) override {
    if (fixed_) {
      params_ = fixed_->params;
      return;
    }
    if (!per_snr_ && params_) return;
    TrainConfig tc = *train_;
    if (per_snr_) tc.snr_db_min = tc.snr_db_max = snr_db;
    SystemConfig sys = at_snr;
    sys.b = effective_b(at_snr);
    std::ostringstream msg;
    msg << id_ << ": training " << to_string(kind_) << " at " << tc.snr_db_min << ".." << tc.snr_db_max
        << " dB";
    log::info(msg.str());
    params_ = train(kind_, sys, tc).params;
  }

  DetectionResult detect(const TrialView& t) const override {
    if (!params_) throw ConfigError(id_ + ": detector used before prepare()");
    SystemConfig sys = t.system;
    sys.b = effective_b(t.system);
    const NetInput in = make_net_input(kind_, sys, t.realization);
    return net_detect(in, *params_, sys.constellation);
  }

 private:
  int effective_b(const SystemConfig& sys) const {
    if (kind_ == NetKind::kOBMNet) return 1;
    return resolution_.value_or(sys.b);
  }

  std::string id_;
  NetKind kind_;
  std::optional<int> resolution_;
  std::optional<TrainedNet> fixed_;
  std::optional<TrainConfig> train_;
  bool per_snr_;
  std::optional<NetParams> params_;
};

struct TrialTally {
  long bit_errors = 0;
  long symbol_errors = 0;
  double seconds = 0.0;
};

}  // namespace

std::unique_ptr<Detector> make_detector(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("config field 'detectors[]': expected an object");
  const std::set<std::string> known = {"kind", "id", "b", "params", "train", "train_mode"};
  for (const auto& [key, _] : spec.items()) {
    if (!known.count(key)) throw ConfigError("config field 'detectors[]." + key + "': unknown field");
  }
  if (!spec.contains("kind") || !spec["kind"].is_string()) {
    throw ConfigError("config field 'detectors[].kind': required string is missing");
  }
  const std::string kind = spec["kind"].get<std::string>();
  std::optional<int> b;
  if (spec.contains("b")) {
    if (!spec["b"].is_number_integer()) throw ConfigError("config field 'detectors[].b': expected an integer");
    b = spec["b"].get<int>();
  }
  std::string id = kind;
  if (b) id += "-b" + std::to_string(*b);
  if (spec.contains("id")) {
    if (!spec["id"].is_string()) throw ConfigError("config field 'detectors[].id': expected a string");
    id = spec["id"].get<std::string>();
  }

  if (kind == "genie") return std::make_unique<GenieDetector>(id);
  if (kind == "random") return std::make_unique<RandomGuessDetector>(id);
  if (kind == "zf") return std::make_unique<ZfDetector>(id, b);
  if (kind.rfind("ml-", 0) == 0) return std::make_unique<MlDetector>(id, parse_ml_variant(kind), b);
  if (kind == "obmnet" || kind == "fbmnet") {
    const NetKind nk = parse_net_kind(kind);
    std::optional<TrainedNet> fixed;
    std::optional<TrainConfig> tc;
    if (spec.contains("params") == spec.contains("train")) {
      throw ConfigError("config field 'detectors[" + id + "]': give exactly one of 'params' or 'train'");
    }
    if (spec.contains("params")) {
      if (!spec["params"].is_string()) throw ConfigError("config field 'detectors[].params': expected a path");
      fixed = load_trained_net(spec["params"].get<std::string>());
    } else {
      tc = train_config_from_json(spec["train"], "detectors[" + id + "].train");
    }
    bool per_snr = true;
    if (spec.contains("train_mode")) {
      const auto mode = spec["train_mode"].is_string() ? spec["train_mode"].get<std::string>() : "";
      if (mode == "shared") {
        per_snr = false;
      } else if (mode != "per-snr") {
        throw ConfigError("config field 'detectors[].train_mode': expected \"per-snr\" or \"shared\"");
      }
    }
    return std::make_unique<NetDetector>(id, nk, b, std::move(fixed), std::move(tc), per_snr);
  }
  throw ConfigError("config field 'detectors[].kind': unknown detector '" + kind + "'");
}

void SweepConfig::validate() const {
  system.validate();
  if (snr_db.empty()) throw ConfigError("snr_db list must not be empty");
  if (trials_per_point < 1) throw ConfigError("trials_per_point must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::pair<double, double> clopper_pearson(long successes, long n, double confidence) {
  if (n <= 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double nn = static_cast<double>(n);
  double lo = 0.0;
  double hi = 1.0;
  if (successes > 0) lo = boost::math::quantile(boost::math::beta_distribution<>(k, nn - k + 1), alpha / 2);
  if (successes < n) hi = boost::math::quantile(boost::math::beta_distribution<>(k + 1, nn - k), 1 - alpha / 2);
  return {lo, hi};
}

double ber_sigma(const BerResult& r) {
  if (r.bits_sent <= 0) return 0.0;
  return std::sqrt(r.ber * (1.0 - r.ber) / static_cast<double>(r.bits_sent));
}

bool within_three_sigma(const BerResult& a, const BerResult& b) {
  const double s = std::hypot(ber_sigma(a), ber_sigma(b));
  return std::abs(a.ber - b.ber) <= 3.0 * s;
}

bool below_three_sigma(const BerResult& a, const BerResult& b) {
  const double s = std::hypot(ber_sigma(a), ber_sigma(b));
  return b.ber - a.ber > 3.0 * s;
}

std::vector<BerResult> ber_sweep(const SweepConfig& cfg) {
  std::vector<std::shared_ptr<Detector>> dets;
  dets.reserve(cfg.detectors.size());
  for (const auto& spec : cfg.detectors) dets.push_back(make_detector(spec));
  return ber_sweep(cfg, dets);
}

std::vector<BerResult> ber_sweep(const SweepConfig& cfg,
                                 const std::vector<std::shared_ptr<Detector>>& detectors) {
  cfg.validate();
  if (detectors.empty()) throw ConfigError("sweep needs at least one detector");
  std::set<std::string> ids;
  for (const auto& d : detectors) {
    if (!ids.insert(d->id()).second) throw ConfigError("duplicate detector id '" + d->id() + "'");
    d->check(cfg.system);
  }

  const std::size_t D = detectors.size();
  const long trials = cfg.trials_per_point;
  const long chunk = (trials + 9) / 10;
  const long min_trials = (trials + 9) / 10;
  const long bits_per_trial = static_cast<long>(cfg.system.K) * cfg.system.constellation.bits_per_symbol();

  std::vector<BerResult> results;
  for (double snr : cfg.snr_db) {
    const SystemConfig at = cfg.system.at_snr_db(snr);
    for (const auto& d : detectors) d->prepare(at, snr);

    std::vector<BerResult> point(D);
    std::vector<bool> active(D, true);
    for (std::size_t d = 0; d < D; ++d) {
      point[d].detector = detectors[d]->id();
      point[d].snr_db = snr;
    }

    for (long start = 0; start < trials; start += chunk) {
      std::vector<std::size_t> live;
      for (std::size_t d = 0; d < D; ++d) {
        if (active[d]) live.push_back(d);
      }
      if (live.empty()) break;
      const long n = std::min(chunk, trials - start);
      std::vector<TrialTally> tally(static_cast<std::size_t>(n) * D);

      parallel_for(static_cast<std::size_t>(n), cfg.workers, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(cfg.seed, kTrialStream, static_cast<std::uint64_t>(start) + i);
        Rng rng(seed);
        const Realization real = draw_realization(cfg.system, rng);
        const CVec r = real.received(at.rho);
        const Vec r_real = stack(r);
        const TrialView view{at, real, r, r_real, seed};
        for (std::size_t d : live) {
          const auto t0 = std::chrono::steady_clock::now();
          const DetectionResult res = detectors[d]->detect(view);
          const auto t1 = std::chrono::steady_clock::now();
          TrialTally& out = tally[i * D + d];
          for (std::size_t k = 0; k < res.bits.size(); ++k) out.bit_errors += res.bits[k] != real.tx.bits[k];
          for (std::size_t k = 0; k < res.indices.size(); ++k) {
            out.symbol_errors += res.indices[k] != real.tx.indices[k];
          }
          out.seconds = std::chrono::duration<double>(t1 - t0).count();
        }
      });

      for (std::size_t d : live) {
        BerResult& p = point[d];
        for (long i = 0; i < n; ++i) {
          const TrialTally& t = tally[static_cast<std::size_t>(i) * D + d];
          p.bit_errors += t.bit_errors;
          p.symbol_errors += t.symbol_errors;
          p.wall_time_s += t.seconds;
        }
        p.trials += n;
        if (cfg.min_errors > 0 && p.bit_errors >= cfg.min_errors && p.trials >= min_trials) {
          active[d] = false;
        }
      }
    }

    for (auto& p : point) {
      p.bits_sent = p.trials * bits_per_trial;
      p.symbols_sent = p.trials * cfg.system.K;
      p.ber = p.bits_sent > 0 ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent) : 0.0;
      p.ser = p.symbols_sent > 0 ? static_cast<double>(p.symbol_errors) / static_cast<double>(p.symbols_sent) : 0.0;
      std::tie(p.ci_low, p.ci_high) = clopper_pearson(p.bit_errors, p.bits_sent);
      results.push_back(std::move(p));
    }
  }
  return results;
}

std::vector<BerResult> CompareTable::flatten() const {
  std::vector<BerResult> out;
  for (const auto& row : rows) {
    out.push_back(row.exact_onebit);
    out.push_back(row.approx_onebit);
    out.push_back(row.exact_fewbit);
    out.push_back(row.approx_fewbit);
  }
  return out;
}

CompareTable compare_ml(const SystemConfig& sys, const std::vector<double>& snr_db, int trials,
                        std::uint64_t seed, int workers) {
  CompareTable table;
  table.fewbit_resolution = std::max(sys.b, 2);
  if (trials <= 0 || snr_db.empty()) return table;

  const int fb = table.fewbit_resolution;
  std::vector<std::shared_ptr<Detector>> dets = {
      std::make_shared<MlDetector>("ml-exact-1bit", MlVariant{MlObjective::kExact, MlModel::kOneBit}, 1),
      std::make_shared<MlDetector>("ml-approx-1bit", MlVariant{MlObjective::kApprox, MlModel::kOneBit}, 1),
      std::make_shared<MlDetector>("ml-exact-" + std::to_string(fb) + "bit",
                                   MlVariant{MlObjective::kExact, MlModel::kFewBit}, fb),
      std::make_shared<MlDetector>("ml-approx-" + std::to_string(fb) + "bit",
                                   MlVariant{MlObjective::kApprox, MlModel::kFewBit}, fb),
  };
  SweepConfig cfg;
  cfg.system = sys;
  cfg.snr_db = snr_db;
  cfg.trials_per_point = trials;
  cfg.min_errors = 0;
  cfg.seed = seed;
  cfg.workers = workers;
  const std::vector<BerResult> flat = ber_sweep(cfg, dets);
  for (std::size_t i = 0; i + 3 < flat.size(); i += 4) {
    table.rows.push_back({flat[i].snr_db, flat[i], flat[i + 1], flat[i + 2], flat[i + 3]});
  }
  return table;
}

ResultFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".json") return ResultFormat::kJson;
  if (ext == ".csv") return ResultFormat::kCsv;
  throw ConfigError("cannot infer result format from '" + path.string() + "' (use .csv or .json)");
}

namespace {

json result_to_json(const BerResult& r) {
  return {{"detector", r.detector},     {"snr_db", r.snr_db},
          {"trials", r.trials},         {"bit_errors", r.bit_errors},
          {"bits_sent", r.bits_sent},   {"ber", r.ber},
          {"symbol_errors", r.symbol_errors}, {"symbols_sent", r.symbols_sent},
          {"ser", r.ser},               {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},       {"wall_time_s", r.wall_time_s}};
}

BerResult result_from_json(const json& j) {
  BerResult r;
  try {
    r.detector = j.at("detector").get<std::string>();
    r.snr_db = j.at("snr_db").get<double>();
    r.trials = j.at("trials").get<long>();
    r.bit_errors = j.at("bit_errors").get<long>();
    r.bits_sent = j.at("bits_sent").get<long>();
    r.ber = j.at("ber").get<double>();
    r.symbol_errors = j.value("symbol_errors", 0L);
    r.symbols_sent = j.value("symbols_sent", 0L);
    r.ser = j.value("ser", 0.0);
    r.ci_low = j.at("ci_low").get<double>();
    r.ci_high = j.at("ci_high").get<double>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result record: ") + e.what());
  }
  return r;
}

}  // namespace

void write_results(const std::vector<BerResult>& results, const std::filesystem::path& path,
                   ResultFormat format, const std::optional<nlohmann::json>& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (format == ResultFormat::kCsv) {
    out << "detector,snr_db,trials,bit_errors,bits_sent,ber,ci_low,ci_high,wall_time_s\n";
    out << std::setprecision(17);
    for (const auto& r : results) {
      out << r.detector << ',' << r.snr_db << ',' << r.trials << ',' << r.bit_errors << ','
          << r.bits_sent << ',' << r.ber << ',' << r.ci_low << ',' << r.ci_high << ','
          << r.wall_time_s << '\n';
    }
  } else {
    json j;
    j["results"] = json::array();
    for (const auto& r : results) j["results"].push_back(result_to_json(r));
    if (config) {
      j["config"] = *config;
      if (config->contains("seed")) j["seed"] = (*config)["seed"];
    }
    out << std::setw(2) << j << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<BerResult> read_results_json(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  if (!j.contains("results") || !j["results"].is_array()) {
    throw ConfigError("'" + path.string() + "' has no results array");
  }
  std::vector<BerResult> out;
  for (const auto& r : j["results"]) out.push_back(result_from_json(r));
  return out;
}

}  // namespace lowres
