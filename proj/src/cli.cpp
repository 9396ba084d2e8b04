#include "lowres/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "lowres/config.hpp"
#include "lowres/gradcheck.hpp"
#include "lowres/log.hpp"
#include "lowres/parallel.hpp"

namespace lowres {

namespace {

constexpr double kGradTolerance = 1e-6;

struct Options {
  std::string config;
  std::string out;
  std::string history;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  bool quiet = false;
};

void banner(const std::string& command, std::uint64_t seed, const json& effective) {
  std::ostringstream msg;
  msg << "lowres-mimo " << kVersion << " " << command << " seed=" << seed
      << " config_hash=" << config_hash(effective);
  log::info(msg.str());
  log::debug("effective config: " + effective.dump());
}

int workers_or_default(const json& j) { return j.contains("workers") ? j.at("workers").get<int>() : default_workers(); }

std::filesystem::path history_path(const Options& o) {
  if (!o.history.empty()) return o.history;
  std::filesystem::path p(o.out);
  return p.parent_path() / (p.stem().string() + "_loss.csv");
}

int cmd_train(const Options& o, std::ostream& out) {
  const json j = read_json_file(o.config);
  if (!j.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "net" && key != "system" && key != "train") {
      throw ConfigError("config field '" + key + "': unknown field");
    }
  }
  if (!j.contains("net")) throw ConfigError("config field 'net': required field is missing");
  if (!j.contains("system")) throw ConfigError("config field 'system': required field is missing");
  NetKind kind;
  try {
    kind = parse_net_kind(j.at("net").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field 'net': ") + e.what());
  }
  SystemConfig sys = system_from_json(j.at("system"));
  TrainConfig tc = j.contains("train") ? train_config_from_json(j.at("train")) : TrainConfig{};
  if (!j.contains("train") || !j.at("train").contains("workers")) tc.workers = default_workers();
  if (o.seed) tc.seed = *o.seed;
  if (kind == NetKind::kOBMNet) sys.b = 1;

  const json effective{{"net", to_string(kind)}, {"system", to_json(sys)}, {"train", to_json(tc)}};
  banner("train", tc.seed, effective);

  const TrainResult res = train(kind, sys, tc);
  TrainedNet net;
  net.kind = kind;
  net.K = sys.K;
  net.N = sys.N;
  net.b = sys.b;
  net.constellation = sys.constellation.name();
  net.snr_db = 0.5 * (tc.snr_db_min + tc.snr_db_max);
  net.params = res.params;
  net.seed = tc.seed;
  net.train_config = tc;
  save_trained_net(net, o.out);

  const auto hist = history_path(o);
  std::ofstream h(hist);
  if (!h) throw std::runtime_error("cannot open '" + hist.string() + "' for writing");
  h << "batch,loss\n" << std::setprecision(17);
  for (std::size_t i = 0; i < res.loss_history.size(); ++i) h << i << ',' << res.loss_history[i] << '\n';

  out << "trained " << to_string(kind) << " for " << res.loss_history.size() << " batches"
      << (res.early_stopped ? " (early stop)" : "") << "; final loss "
      << (res.loss_history.empty() ? 0.0 : res.loss_history.back()) << "\n"
      << "params: " << o.out << "\nloss history: " << hist.string() << "\n";
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  json j = read_json_file(o.config);
  SweepConfig cfg = sweep_config_from_json(j);
  if (!j.contains("workers")) cfg.workers = default_workers();
  if (o.seed) cfg.seed = *o.seed;
  const json effective = to_json(cfg);
  banner("detect-sweep", cfg.seed, effective);

  const auto results = ber_sweep(cfg);
  write_results(results, o.out, format_from_path(o.out), effective);
  out << std::left << std::setw(24) << "detector" << std::setw(9) << "snr_db" << std::setw(9) << "trials"
      << "ber\n";
  for (const auto& r : results) {
    out << std::setw(24) << r.detector << std::setw(9) << r.snr_db << std::setw(9) << r.trials << r.ber << "\n";
  }
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const json j = read_json_file(o.config);
  if (!j.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "system" && key != "snr_db" && key != "trials" && key != "seed" && key != "workers") {
      throw ConfigError("config field '" + key + "': unknown field");
    }
  }
  for (const char* key : {"system", "snr_db", "trials"}) {
    if (!j.contains(key)) throw ConfigError(std::string("config field '") + key + "': required field is missing");
  }
  const SystemConfig sys = system_from_json(j.at("system"));
  std::vector<double> snr;
  if (!j.at("snr_db").is_array()) throw ConfigError("config field 'snr_db': expected an array of numbers");
  for (const auto& v : j.at("snr_db")) {
    if (!v.is_number()) throw ConfigError("config field 'snr_db': expected an array of numbers");
    snr.push_back(v.get<double>());
  }
  if (!j.at("trials").is_number_integer() || j.at("trials").get<long long>() < 0) {
    throw ConfigError("config field 'trials': expected a non-negative integer");
  }
  const int trials = j.at("trials").get<int>();
  std::uint64_t seed = j.value("seed", std::uint64_t{1});
  if (o.seed) seed = *o.seed;
  const int workers = workers_or_default(j);
  const json effective{{"system", to_json(sys)}, {"snr_db", snr}, {"trials", trials}, {"seed", seed},
                       {"workers", workers}};
  banner("compare-ml", seed, effective);

  const CompareTable table = compare_ml(sys, snr, trials, seed, workers);
  write_results(table.flatten(), o.out, format_from_path(o.out), effective);
  const int fb = table.fewbit_resolution;
  out << std::left << std::setw(8) << "snr_db" << std::setw(14) << "exact-1bit" << std::setw(14) << "approx-1bit"
      << std::setw(14) << "diff-1bit" << std::setw(14) << "exact-" + std::to_string(fb) + "bit" << std::setw(14)
      << "approx-" + std::to_string(fb) + "bit" << "diff-" << fb << "bit\n";
  for (const auto& row : table.rows) {
    out << std::setw(8) << row.snr_db << std::setw(14) << row.exact_onebit.ber << std::setw(14)
        << row.approx_onebit.ber << std::setw(14) << row.approx_onebit.ber - row.exact_onebit.ber << std::setw(14)
        << row.exact_fewbit.ber << std::setw(14) << row.approx_fewbit.ber
        << row.approx_fewbit.ber - row.exact_fewbit.ber << "\n";
  }
  return 0;
}

int cmd_quantizer(const Options& o, std::ostream& out) {
  const json j = read_json_file(o.config);
  const json& s = j.is_object() && j.contains("system") ? j.at("system") : j;
  const SystemConfig sys = system_from_json(s);
  const json effective{{"system", to_json(sys)}};
  banner("quantizer-info", 0, effective);

  const QuantizerConfig q = quantizer_for(sys);
  const Vec tau = thresholds(q);
  const Vec lv = output_levels(q);
  out << std::setprecision(10) << "b = " << q.b << "\nlevels = " << q.level_count() << "\ndelta = " << q.delta
      << "\nreceive std per real component = " << std::sqrt((sys.K + 1.0 / sys.rho) / 2.0) << "\nthresholds =";
  for (double t : tau) out << ' ' << t;
  out << "\noutput levels =";
  for (double v : lv) out << ' ' << v;
  out << "\n";
  if (!o.out.empty()) {
    write_json_file({{"b", q.b},
                     {"delta", q.delta},
                     {"thresholds", std::vector<double>(tau.begin(), tau.end())},
                     {"levels", std::vector<double>(lv.begin(), lv.end())}},
                    o.out);
  }
  return 0;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  GradcheckConfig gc;
  if (!o.config.empty()) {
    const json j = read_json_file(o.config);
    if (!j.is_object()) throw ConfigError("config: expected an object");
    for (const auto& [key, v] : j.items()) {
      if (key == "K" || key == "N" || key == "L" || key == "b" || key == "instances") {
        if (!v.is_number_integer()) throw ConfigError("config field '" + key + "': expected an integer");
        int& slot = key == "K" ? gc.K : key == "N" ? gc.N : key == "L" ? gc.L : key == "b" ? gc.b : gc.instances;
        slot = v.get<int>();
      } else if (key == "snr_db" || key == "step") {
        if (!v.is_number()) throw ConfigError("config field '" + key + "': expected a number");
        (key == "snr_db" ? gc.snr_db : gc.step) = v.get<double>();
      } else if (key == "seed") {
        if (!v.is_number_unsigned()) throw ConfigError("config field 'seed': expected a non-negative integer");
        gc.seed = v.get<std::uint64_t>();
      } else {
        throw ConfigError("config field '" + key + "': unknown field");
      }
    }
  }
  if (o.seed) gc.seed = *o.seed;
  if (gc.L < 1 || gc.instances < 1 || !(gc.step > 0.0)) {
    throw ConfigError("config: L and instances must be >= 1 and step > 0");
  }
  const json effective{{"K", gc.K}, {"N", gc.N}, {"L", gc.L}, {"b", gc.b}, {"instances", gc.instances},
                       {"snr_db", gc.snr_db}, {"step", gc.step}, {"seed", gc.seed}};
  banner("gradcheck", gc.seed, effective);

  const GradcheckReport rep = run_gradcheck(gc);
  out << std::scientific << std::setprecision(3) << "instances: " << rep.instances
      << "\ngrad_fewbit      max rel err " << rep.grad_fewbit << "\ngrad_onebit      max rel err "
      << rep.grad_onebit << "\nobmnet backward  max rel err " << rep.obmnet_backward
      << "\nfbmnet backward  max rel err " << rep.fbmnet_backward << "\nmax relative error: " << rep.max()
      << (rep.max() < kGradTolerance ? " (ok)" : " (FAILED)") << "\n";
  return rep.max() < kGradTolerance ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-resolution ADC massive MIMO detection toolkit", "lowres-mimo"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);

  Options o;
  auto common = [&](CLI::App* sub, bool needs_config, bool needs_out) {
    auto* c = sub->add_option("-c,--config", o.config, "JSON config file");
    if (needs_config) c->required();
    c->check(CLI::ExistingFile);
    auto* w = sub->add_option("-o,--out", o.out, "output file");
    if (needs_out) w->required();
    sub->add_option("--seed", o.seed, "override the master seed");
    sub->add_flag("-v,--verbose", o.verbose, "debug logging");
    sub->add_flag("-q,--quiet", o.quiet, "errors only");
  };
  auto* train_cmd = app.add_subcommand("train", "train OBMNet or FBMNet, write params JSON and loss CSV");
  common(train_cmd, true, true);
  train_cmd->add_option("--history", o.history, "loss-history CSV (default: <out stem>_loss.csv)");
  auto* sweep_cmd = app.add_subcommand("detect-sweep", "BER/SER sweep over SNR for a set of detectors");
  common(sweep_cmd, true, true);
  auto* compare_cmd = app.add_subcommand("compare-ml", "paired exact vs approximate ML comparison");
  common(compare_cmd, true, true);
  auto* quant_cmd = app.add_subcommand("quantizer-info", "print quantizer thresholds, levels and step");
  common(quant_cmd, true, false);
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of every analytic gradient");
  common(grad_cmd, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const log::Level previous = log::verbosity();
  log::set_verbosity(o.quiet ? log::Level::kQuiet : o.verbose ? log::Level::kDebug : log::Level::kInfo);
  int code = 1;
  try {
    if (*train_cmd) code = cmd_train(o, out);
    else if (*sweep_cmd) code = cmd_sweep(o, out);
    else if (*compare_cmd) code = cmd_compare(o, out);
    else if (*quant_cmd) code = cmd_quantizer(o, out);
    else code = cmd_gradcheck(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  log::set_verbosity(previous);
  return code;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace lowres
