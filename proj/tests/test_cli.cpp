#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "marea_cli_test";

struct Result {
  int status;
  std::string err;
};

Result marea(const std::string& args) {
  const auto err_file = kWork / "stderr.txt";
  const std::string cmd = std::string(MAREA_CLI) + " " + args + " 2>" + err_file.string() + " >/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(err_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const auto p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

const char* kThree = R"(
n_cell: 30
t_obs: 300
t_out: 100
horizon: 1500
services:
  - {w_th_ms: 5, traffic: {model: empirical-table, values: [0, 40, 80, 2000], probs: [0.5, 0.3, 0.18, 0.02]}, channel: {model: constant, values: [10]}}
  - {w_th_ms: 10, traffic: {model: empirical-table, values: [0, 40, 80, 2000], probs: [0.5, 0.3, 0.18, 0.02]}, channel: {model: constant, values: [15]}}
  - {w_th_ms: 20, epsilon: 0.01, traffic: {model: empirical-table, values: [0, 40, 80, 2000], probs: [0.5, 0.3, 0.18, 0.02]}, channel: {model: constant, values: [8]}}
table1: {n_cell: [60]}
)";

const char* kSingle = R"(
n_cell: 4
t_obs: 200
t_out: 100
horizon: 1000
services:
  - {w_th_ms: 5, traffic: {model: constant, values: [100]}, channel: {model: constant, values: [25]}}
validate: {n_min: [1, 4, 8], t_obs: [200, 400], runs: 2, measure_ttis: 2000}
)";

}  // namespace

TEST_CASE("run is byte-reproducible") {
  fs::remove_all(kWork);
  const auto cfg = write("three.yaml", kThree);
  REQUIRE(marea("run --config " + cfg.string() + " --seed 7 --out " + (kWork / "a").string()).status == 0);
  REQUIRE(marea("run --config " + cfg.string() + " --seed 7 --out " + (kWork / "b").string()).status == 0);
  for (const char* f : {"summary.csv", "ccdf.csv", "alloc.csv"}) {
    CHECK(!slurp(kWork / "a" / f).empty());
    CHECK(slurp(kWork / "a" / f) == slurp(kWork / "b" / f));
  }
  CHECK(slurp(kWork / "a" / "alloc.csv").rfind("period,service_id,n_min,w_est_ms,objective\n", 0) == 0);
}

TEST_CASE("outputs are never silently replaced") {
  const auto cfg = write("three.yaml", kThree);
  const auto out = (kWork / "keep").string();
  REQUIRE(marea("run --config " + cfg.string() + " --out " + out).status == 0);
  const auto r = marea("run --config " + cfg.string() + " --out " + out);
  CHECK(r.status == 1);
  CHECK(r.err.find("--overwrite") != std::string::npos);
  CHECK(marea("run --config " + cfg.string() + " --out " + out + " --overwrite").status == 0);
}

TEST_CASE("missing config names the path") {
  const auto r = marea("run --config /no/such/file.yaml --out " + (kWork / "x").string());
  CHECK(r.status == 1);
  CHECK(r.err.find("/no/such/file.yaml") != std::string::npos);
}

TEST_CASE("controller flag overrides the file") {
  const auto cfg = write("three.yaml", kThree);
  const auto out = kWork / "ref2";
  REQUIRE(marea("run --config " + cfg.string() + " --controller ref2 --out " + out.string()).status == 0);
  // QLDR periods carry no model estimate
  CHECK(slurp(out / "alloc.csv").find(",nan,nan") != std::string::npos);
  CHECK(marea("run --config " + cfg.string() + " --controller ref9 --out " + (kWork / "bad").string()).status == 1);
}

TEST_CASE("debug log") {
  const auto cfg = write("three.yaml", kThree);
  const auto out = kWork / "dbg";
  REQUIRE(marea("run --config " + cfg.string() + " --debug-log tti.csv --out " + out.string()).status == 0);
  const auto log = slurp(out / "tti.csv");
  CHECK(log.rfind("tti,service_id,state,n_req,n_min_i,rbs_used,queue_bits,head_wait_ttis\n", 0) == 0);
}

TEST_CASE("table1") {
  const auto cfg = write("three.yaml", kThree);
  const auto out = kWork / "t1";
  REQUIRE(marea("table1 --config " + cfg.string() + " --out " + out.string()).status == 0);
  const auto t = slurp(out / "table1.csv");
  CHECK(t.find("\n60,") != std::string::npos);
  CHECK(t.find(",1711,") != std::string::npos);

  std::string low = kThree;
  low.replace(low.find("n_cell: [60]"), 12, "n_cell: [2]");
  const auto lcfg = write("low.yaml", low);
  CHECK(marea("table1 --config " + lcfg.string() + " --out " + (kWork / "t2").string()).status == 1);
}

TEST_CASE("validate-model") {
  const auto cfg = write("single.yaml", kSingle);
  const auto out = kWork / "v";
  REQUIRE(marea("validate-model --config " + cfg.string() + " --out " + out.string()).status == 0);
  std::istringstream rows(slurp(out / "validate.csv"));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "n_min,t_obs,W_model_ms,W_measured_ms,rel_err");
  int count = 0;
  bool saw_inf = false;
  while (std::getline(rows, line)) {
    ++count;
    if (line.rfind("1,", 0) == 0) saw_inf |= line.find(",inf,") != std::string::npos;
  }
  CHECK(count == 3 * 2);
  CHECK(saw_inf);

  const auto three = write("three.yaml", kThree);
  CHECK(marea("validate-model --config " + three.string() + " --out " + (kWork / "v3").string()).status == 1);
}

TEST_CASE("sweep") {
  const auto cfg = write("three.yaml", kThree);
  const auto out = kWork / "sw";
  REQUIRE(marea("sweep --config " + cfg.string() + " --axis n_cell=30,40 --axis controller=marea,ref3 --jobs 2 --out " +
                out.string())
              .status == 0);
  CHECK(fs::exists(out / "sweep.csv"));
  CHECK(fs::exists(out / "n_cell=40_controller=ref3" / "summary.csv"));
  CHECK(marea("sweep --config " + cfg.string() + " --axis bogus=1 --out " + (kWork / "sw2").string()).status == 1);
}

TEST_CASE("usage errors") {
  CHECK(marea("").status == 1);
  CHECK(marea("run").status == 1);
  CHECK(marea("frobnicate --config x").status == 1);
}
