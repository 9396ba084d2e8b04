#include "lowres/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace lowres {

namespace {

// Reads fields off one JSON object, remembering which keys were consumed so
// that leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config field '" + path_ + "': expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config field '" + child(key) + "': " + what);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("config field '" + child(key) + "': unknown field");
    }
  }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) fail(key, "required field is missing");
    return *fallback;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Wraps library validation errors with the config section they came from.
template <class F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const ConfigError& e) {
    throw ConfigError("config section '" + path + "': " + e.what());
  }
}

}  // namespace

SystemConfig system_from_json(const json& j, const std::string& path) {
  Fields f(j, path);
  SystemConfig sys;
  sys.K = f.integer("K");
  sys.N = f.integer("N");
  sys.b = f.integer("b", 1);
  try {
    sys.constellation = Constellation::of(parse_constellation(f.string("constellation", "QPSK")));
  } catch (const ConfigError& e) {
    f.fail("constellation", e.what());
  }
  if (f.has("snr_db") && f.has("rho")) f.fail("rho", "give either snr_db or rho, not both");
  if (f.has("rho")) {
    sys.rho = f.number("rho");
  } else {
    sys.rho = db_to_linear(f.number("snr_db", 10.0));
  }
  if (f.has("delta")) sys.delta = f.number("delta");
  f.finish();
  validated(path, [&] { sys.validate(); });
  return sys;
}

json to_json(const SystemConfig& sys) {
  json j{{"K", sys.K}, {"N", sys.N}, {"b", sys.b}, {"constellation", sys.constellation.name()},
         {"rho", sys.rho}};
  if (sys.delta) j["delta"] = *sys.delta;
  return j;
}

TrainConfig train_config_from_json(const json& j, const std::string& path) {
  Fields f(j, path);
  TrainConfig tc;
  tc.learning_rate = f.number("learning_rate", tc.learning_rate);
  tc.batch_size = f.integer("batch_size", tc.batch_size);
  tc.iterations = f.integer("iterations", tc.iterations);
  if (f.has("snr_db")) {
    const json& s = f.raw("snr_db");
    if (s.is_number()) {
      tc.snr_db_min = tc.snr_db_max = s.get<double>();
    } else if (s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number()) {
      tc.snr_db_min = s[0].get<double>();
      tc.snr_db_max = s[1].get<double>();
    } else {
      f.fail("snr_db", "expected a number or a [min, max] pair");
    }
  }
  tc.seed = f.seed("seed", tc.seed);
  tc.layers = f.integer("layers", tc.layers);
  tc.init_alpha = f.number("init_alpha", tc.init_alpha);
  tc.init_beta = f.number("init_beta", tc.init_beta);
  tc.early_stop = f.boolean("early_stop", tc.early_stop);
  tc.early_stop_window = f.integer("early_stop_window", tc.early_stop_window);
  tc.early_stop_tolerance = f.number("early_stop_tolerance", tc.early_stop_tolerance);
  tc.workers = f.integer("workers", tc.workers);
  f.finish();
  validated(path, [&] { tc.validate(); });
  return tc;
}

json to_json(const TrainConfig& tc) {
  json snr = tc.snr_db_min == tc.snr_db_max ? json(tc.snr_db_min)
                                            : json::array({tc.snr_db_min, tc.snr_db_max});
  return {{"learning_rate", tc.learning_rate},
          {"batch_size", tc.batch_size},
          {"iterations", tc.iterations},
          {"snr_db", snr},
          {"seed", tc.seed},
          {"layers", tc.layers},
          {"init_alpha", tc.init_alpha},
          {"init_beta", tc.init_beta},
          {"early_stop", tc.early_stop},
          {"early_stop_window", tc.early_stop_window},
          {"early_stop_tolerance", tc.early_stop_tolerance},
          {"workers", tc.workers}};
}

SweepConfig sweep_config_from_json(const json& j) {
  Fields f(j, "sweep");
  SweepConfig cfg;
  if (!f.has("system")) f.fail("system", "required field is missing");
  cfg.system = system_from_json(f.raw("system"), "system");
  if (!f.has("snr_db")) throw ConfigError("config field 'snr_db': required field is missing");
  const json& snr = f.raw("snr_db");
  if (!snr.is_array()) throw ConfigError("config field 'snr_db': expected an array of numbers");
  for (const auto& v : snr) {
    if (!v.is_number()) throw ConfigError("config field 'snr_db': expected an array of numbers");
    cfg.snr_db.push_back(v.get<double>());
  }
  cfg.trials_per_point = f.integer("trials_per_point");
  cfg.min_errors = f.integer("min_errors", cfg.min_errors);
  cfg.seed = f.seed("seed", cfg.seed);
  cfg.workers = f.integer("workers", cfg.workers);
  if (!f.has("detectors")) throw ConfigError("config field 'detectors': required field is missing");
  const json& dets = f.raw("detectors");
  if (!dets.is_array()) throw ConfigError("config field 'detectors': expected an array");
  for (const auto& d : dets) cfg.detectors.push_back(d);
  f.finish();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config section 'sweep': ") + e.what());
  }
  return cfg;
}

json to_json(const SweepConfig& cfg) {
  return {{"system", to_json(cfg.system)},
          {"snr_db", cfg.snr_db},
          {"trials_per_point", cfg.trials_per_point},
          {"min_errors", cfg.min_errors},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"detectors", cfg.detectors}};
}

json to_json(const TrainedNet& net) {
  std::vector<double> alphas(net.params.alphas.data(),
                             net.params.alphas.data() + net.params.alphas.size());
  return {{"net_kind", to_string(net.kind)},
          {"K", net.K},
          {"N", net.N},
          {"b", net.b},
          {"constellation", net.constellation},
          {"L", net.params.layers()},
          {"snr_db", net.snr_db},
          {"alphas", alphas},
          {"beta", net.params.beta},
          {"seed", net.seed},
          {"train_config", to_json(net.train_config)}};
}

TrainedNet trained_net_from_json(const json& j) {
  Fields f(j, "params");
  TrainedNet net;
  try {
    net.kind = parse_net_kind(f.string("net_kind"));
  } catch (const ConfigError& e) {
    f.fail("net_kind", e.what());
  }
  net.K = f.integer("K");
  net.N = f.integer("N");
  net.b = f.integer("b");
  net.constellation = f.string("constellation", "QPSK");
  const int L = f.integer("L");
  net.snr_db = f.number("snr_db", 0.0);
  const json& a = f.has("alphas") ? f.raw("alphas") : json();
  if (!a.is_array()) f.fail("alphas", "expected an array of numbers");
  if (static_cast<int>(a.size()) != L) {
    f.fail("alphas", "has " + std::to_string(a.size()) + " entries but L = " + std::to_string(L));
  }
  net.params.alphas.resize(L);
  for (int l = 0; l < L; ++l) {
    if (!a[l].is_number()) f.fail("alphas", "expected an array of numbers");
    net.params.alphas[l] = a[l].get<double>();
  }
  net.params.beta = f.number("beta");
  net.seed = f.seed("seed", 0);
  if (f.has("train_config")) net.train_config = train_config_from_json(f.raw("train_config"), "params.train_config");
  f.finish();
  if (net.K < 1 || net.N < net.K) throw ConfigError("config section 'params': need N >= K >= 1");
  if (net.b < 1) throw ConfigError("config field 'params.b': must be >= 1");
  if (net.kind == NetKind::kOBMNet && net.b != 1) {
    throw ConfigError("config field 'params.b': OBMNet parameters must have b = 1");
  }
  validated("params", [&] { net.params.validate(); });
  return net;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << std::setw(2) << j << '\n';
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void save_trained_net(const TrainedNet& net, const std::filesystem::path& path) {
  write_json_file(to_json(net), path);
}

TrainedNet load_trained_net(const std::filesystem::path& path) {
  return trained_net_from_json(read_json_file(path));
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace lowres
