#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lowres/bench.hpp"
#include "lowres/cli.hpp"
#include "lowres/config.hpp"

using namespace lowres;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lowres-mimo");
  args.push_back("-q");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("lowres_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const auto p = path / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("compare-ml writes the four variants") {
  TempDir dir;
  const auto cfg = dir.file("cmp.json", R"({"system": {"K": 2, "N": 8, "b": 2}, "snr_db": [5], "trials": 50})");
  const auto out = dir.file("cmp.csv");
  const auto r = invoke({"compare-ml", "--config", cfg, "--out", out});
  CHECK(r.code == 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> ids;
  while (std::getline(in, line)) ids.push_back(line.substr(0, line.find(',')));
  CHECK(ids == std::vector<std::string>{"ml-exact-1bit", "ml-approx-1bit", "ml-exact-2bit", "ml-approx-2bit"});
  CHECK(r.out.find("diff-1bit") != std::string::npos);
}

TEST_CASE("gradcheck passes on fresh parameters") {
  const auto r = invoke({"gradcheck"});
  CHECK(r.code == 0);
  CHECK(r.out.find("(ok)") != std::string::npos);
}

TEST_CASE("train then sweep with the saved parameters") {
  TempDir dir;
  const auto tcfg = dir.file("train.json", R"({"net": "fbmnet", "system": {"K": 2, "N": 8, "b": 2},
    "train": {"iterations": 5, "batch_size": 20, "layers": 3}})");
  const auto params = dir.file("net.json");
  auto r = invoke({"train", "-c", tcfg, "-o", params, "--seed", "5"});
  REQUIRE(r.code == 0);
  const auto net = load_trained_net(params);
  CHECK(net.seed == 5);
  CHECK(net.params.layers() == 3);
  CHECK(fs::exists(dir.path / "net_loss.csv"));

  const auto scfg = dir.file("sweep.json", R"({"system": {"K": 2, "N": 8, "b": 2}, "snr_db": [0, 10],
    "trials_per_point": 50, "detectors": [{"kind": "fbmnet", "params": ")" + params + R"("}, {"kind": "zf"}]})");
  const auto res = dir.file("res.json");
  r = invoke({"detect-sweep", "-c", scfg, "-o", res, "--seed", "11"});
  REQUIRE(r.code == 0);
  const auto rows = read_results_json(res);
  CHECK(rows.size() == 4);
  CHECK(read_json_file(res).at("config").at("seed") == 11);
}

TEST_CASE("quantizer-info") {
  TempDir dir;
  const auto cfg = dir.file("q.json", R"({"system": {"K": 1, "N": 1, "b": 2, "delta": 1.0}})");
  const auto r = invoke({"quantizer-info", "-c", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("thresholds = -1 0 1") != std::string::npos);
  CHECK(r.out.find("output levels = -1.5 -0.5 0.5 1.5") != std::string::npos);
}

TEST_CASE("bad config names the field and exits nonzero without a trace") {
  TempDir dir;
  const auto cfg = dir.file("bad.json", R"({"system": {"K": 2, "N": 8, "bits": 2}, "snr_db": [5], "trials": 5})");
  const auto r = invoke({"compare-ml", "-c", cfg, "-o", dir.file("x.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("system.bits") != std::string::npos);
  CHECK(r.err.rfind("error: ", 0) == 0);

  const auto notjson = dir.file("nj.json", "{ nope");
  CHECK(invoke({"gradcheck", "-c", notjson}).code == 2);
}

TEST_CASE("usage errors") {
  auto r = invoke({"compare-ml", "--frobnicate"});
  CHECK(r.code != 0);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = invoke({});
  CHECK(r.code != 0);
  r = invoke({"train", "gradcheck"});
  CHECK(r.code != 0);
}

TEST_CASE("installed binary: unknown flag prints usage and fails") {
  TempDir dir;
  const auto log = dir.file("out.txt");
  const std::string cmd = std::string(LOWRES_CLI_PATH) + " gradcheck --bogus > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(status != 0);
  std::ifstream in(log);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("Usage") != std::string::npos);
}

}  // TEST_SUITE
