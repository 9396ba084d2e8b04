#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "lowres/bench.hpp"
#include "lowres/config.hpp"

using namespace lowres;
namespace fs = std::filesystem;

namespace {

SweepConfig base_sweep() {
  SweepConfig cfg;
  cfg.system.K = 2;
  cfg.system.N = 8;
  cfg.system.b = 2;
  cfg.snr_db = {0.0, 10.0};
  cfg.trials_per_point = 500;
  cfg.min_errors = 0;
  cfg.seed = 4;
  return cfg;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lowres_bench_" + std::to_string(::getpid()) + "_" + name);
}

// Records the transmitted vector of every trial it sees.
class Recorder : public Detector {
 public:
  explicit Recorder(std::string id) : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  DetectionResult detect(const TrialView& t) const override {
    std::lock_guard<std::mutex> lock(mu_);
    seen_.push_back(t.received_real.sum() + 1e3 * t.realization.tx.real_stack.sum());
    return {t.realization.tx.symbols, t.realization.tx.indices, t.realization.tx.bits, 0.0};
  }
  std::vector<double> sorted() const {
    auto v = seen_;
    std::sort(v.begin(), v.end());
    return v;
  }

 private:
  std::string id_;
  mutable std::mutex mu_;
  mutable std::vector<double> seen_;
};

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("genie and random guess") {
  SweepConfig cfg = base_sweep();
  cfg.system.K = 4;
  cfg.system.N = 16;
  cfg.trials_per_point = 10000;
  cfg.detectors = {{{"kind", "genie"}}, {{"kind", "random"}}};
  const auto res = ber_sweep(cfg);
  REQUIRE(res.size() == 4);
  for (const auto& r : res) {
    CHECK(r.bits_sent == 10000L * 8);
    CHECK(r.ber == doctest::Approx(double(r.bit_errors) / r.bits_sent));
    CHECK(r.ci_low <= r.ber);
    CHECK(r.ber <= r.ci_high);
    if (r.detector == "genie") {
      CHECK(r.ber == 0.0);
      CHECK(r.ser == 0.0);
    } else {
      CHECK(std::abs(r.ber - 0.5) < 0.01);
    }
  }
  CHECK(res[0].snr_db == 0.0);
  CHECK(res[2].snr_db == 10.0);
}

TEST_CASE("all detectors see the same trials") {
  SweepConfig cfg = base_sweep();
  auto a = std::make_shared<Recorder>("a");
  auto b = std::make_shared<Recorder>("b");
  cfg.workers = 3;
  ber_sweep(cfg, {a, b});
  CHECK(a->sorted() == b->sorted());
  CHECK(a->sorted().size() == 1000);
}

TEST_CASE("identical detectors give identical counts; results do not depend on workers") {
  SweepConfig cfg = base_sweep();
  cfg.detectors = {{{"kind", "ml-approx-fewbit"}, {"id", "one"}}, {{"kind", "ml-approx-fewbit"}, {"id", "two"}},
                   {{"kind", "zf"}}};
  const auto r1 = ber_sweep(cfg);
  cfg.workers = 4;
  const auto r2 = ber_sweep(cfg);
  REQUIRE(r1.size() == 6);
  CHECK(r1[0].bit_errors == r1[1].bit_errors);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].bit_errors == r2[i].bit_errors);
    CHECK(r1[i].symbol_errors == r2[i].symbol_errors);
  }
}

TEST_CASE("early stopping after enough errors") {
  SweepConfig cfg = base_sweep();
  cfg.trials_per_point = 5000;
  cfg.min_errors = 50;
  cfg.detectors = {{{"kind", "random"}}, {{"kind", "genie"}}};
  const auto res = ber_sweep(cfg);
  CHECK(res[0].trials == 500);
  CHECK(res[1].trials == 5000);
}

TEST_CASE("incompatible detectors are rejected before any trial") {
  SweepConfig cfg = base_sweep();
  cfg.system.b = 1;
  cfg.detectors = {{{"kind", "fbmnet"}, {"train", {{"iterations", 1}}}}};
  CHECK_THROWS_AS(ber_sweep(cfg), ConfigError);
  cfg.system.b = 2;
  cfg.system.K = 6;
  cfg.system.N = 12;
  cfg.system.constellation = Constellation::qam16();
  cfg.detectors = {{{"kind", "ml-exact-fewbit"}}};
  CHECK_THROWS_AS(ber_sweep(cfg), ConfigError);
  cfg = base_sweep();
  cfg.detectors = {{{"kind", "zf"}}, {{"kind", "zf"}}};
  CHECK_THROWS_AS(ber_sweep(cfg), ConfigError);
  cfg.detectors = {{{"kind", "zf"}, {"colour", "red"}}};
  CHECK_THROWS_AS(ber_sweep(cfg), ConfigError);
  cfg.detectors = {{{"kind", "obmnet"}}};
  CHECK_THROWS_AS(ber_sweep(cfg), ConfigError);
}

TEST_CASE("Clopper-Pearson interval") {
  const auto [lo0, hi0] = clopper_pearson(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(1.0 - std::pow(0.025, 1.0 / 100)));
  const auto [lo1, hi1] = clopper_pearson(100, 100);
  CHECK(lo1 == doctest::Approx(std::pow(0.025, 1.0 / 100)));
  CHECK(hi1 == 1.0);
  // textbook value for 5 of 20
  const auto [lo, hi] = clopper_pearson(5, 20);
  CHECK(lo == doctest::Approx(0.0865715).epsilon(1e-5));
  CHECK(hi == doctest::Approx(0.4910459).epsilon(1e-5));
}

TEST_CASE("three-sigma comparisons") {
  BerResult a, b;
  a.bits_sent = b.bits_sent = 10000;
  a.ber = 0.01;
  b.ber = 0.011;
  CHECK(within_three_sigma(a, b));
  CHECK_FALSE(below_three_sigma(a, b));
  b.ber = 0.03;
  CHECK_FALSE(within_three_sigma(a, b));
  CHECK(below_three_sigma(a, b));
  CHECK_FALSE(below_three_sigma(b, a));
}

TEST_CASE("compare_ml") {
  SystemConfig sys;
  sys.K = 2;
  sys.N = 8;
  sys.b = 1;
  CHECK(compare_ml(sys, {0.0, 5.0}, 0, 1).rows.empty());
  const auto t1 = compare_ml(sys, {5.0}, 200, 9);
  const auto t2 = compare_ml(sys, {5.0}, 200, 9, 2);
  CHECK(t1.fewbit_resolution == 2);
  REQUIRE(t1.rows.size() == 1);
  const auto f1 = t1.flatten(), f2 = t2.flatten();
  REQUIRE(f1.size() == 4);
  CHECK(f1[0].detector == "ml-exact-1bit");
  CHECK(f1[1].detector == "ml-approx-1bit");
  CHECK(f1[2].detector == "ml-exact-2bit");
  CHECK(f1[3].detector == "ml-approx-2bit");
  for (std::size_t i = 0; i < 4; ++i) CHECK(f1[i].bit_errors == f2[i].bit_errors);
}

TEST_CASE("results files") {
  SweepConfig cfg = base_sweep();
  cfg.detectors = {{{"kind", "zf"}}, {{"kind", "ml-approx-fewbit"}}};
  const auto res = ber_sweep(cfg);

  const auto csv = temp_file("r.csv");
  write_results(res, csv, format_from_path(csv));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "detector,snr_db,trials,bit_errors,bits_sent,ber,ci_low,ci_high,wall_time_s");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);

  const auto empty = temp_file("e.csv");
  write_results({}, empty, ResultFormat::kCsv);
  std::ifstream ein(empty);
  std::stringstream all;
  all << ein.rdbuf();
  CHECK(all.str() == header + "\n");

  // JSON round trip, then replay from the embedded config
  const auto js = temp_file("r.json");
  write_results(res, js, ResultFormat::kJson, to_json(cfg));
  const auto back = read_results_json(js);
  REQUIRE(back.size() == res.size());
  const auto replay = ber_sweep(sweep_config_from_json(read_json_file(js).at("config")));
  for (std::size_t i = 0; i < res.size(); ++i) {
    CHECK(back[i].detector == res[i].detector);
    CHECK(back[i].ber == res[i].ber);
    CHECK(back[i].ci_high == res[i].ci_high);
    CHECK(replay[i].bit_errors == res[i].bit_errors);
  }

  CHECK_THROWS_AS(format_from_path("r.txt"), ConfigError);
  CHECK_THROWS_WITH_AS(write_results(res, "/nonexistent-dir/x.csv", ResultFormat::kCsv),
                       doctest::Contains("/nonexistent-dir/x.csv"), std::runtime_error);
  fs::remove(csv);
  fs::remove(empty);
  fs::remove(js);
}

}  // TEST_SUITE
