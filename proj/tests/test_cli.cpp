#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpvsdr/io.hpp"
#include "test_helpers.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(LPVSDR_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(raw);
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

double parse_token(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("generate writes the default dataset deterministically") {
  const auto dir = testutil::scratch_dir("cli_generate");
  const std::string prefix = (dir / "gamma").string();
  const std::string traj = (dir / "reference.csv").string();
  const CliResult first =
      run_cli("generate --out " + prefix + " --trajectory-out " + traj, dir);
  CHECK(first.exit_code == 0);
  CHECK(first.out.find("n_rho=10") != std::string::npos);
  CHECK(first.out.find("N=2001") != std::string::npos);
  REQUIRE(fs::exists(prefix + ".csv"));
  REQUIRE(fs::exists(prefix + ".json"));
  REQUIRE(fs::exists(traj));
  CHECK(slurp(traj).substr(0, 5) == "time,");

  const std::string bytes = slurp(prefix + ".csv");
  const CliResult second = run_cli("generate --out " + prefix, dir);
  CHECK(second.exit_code == 0);
  CHECK(slurp(prefix + ".csv") == bytes);
}

TEST_CASE("generate rejects a zero-duration config") {
  const auto dir = testutil::scratch_dir("cli_generate_bad");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"reference": {"duration": 0.0}})";
  const CliResult result = run_cli(
      "generate --config " + cfg.string() + " --out " + (dir / "g").string(),
      dir);
  CHECK(result.exit_code == 2);
}

TEST_CASE("lossless pca reduction reports a vanishing cost") {
  const auto dir = testutil::scratch_dir("cli_reduce_pca");
  const std::string prefix = (dir / "gamma").string();
  REQUIRE(run_cli("generate --out " + prefix, dir).exit_code == 0);
  const CliResult result = run_cli(
      "reduce --method pca --nphi 10 --data " + prefix + " --out " +
          (dir / "red").string() + " --epsilon 0.001",
      dir);
  CHECK(result.exit_code == 0);
  CHECK(parse_token(result.out, "cost=") < 1e-12);
  CHECK(result.out.find("epsilon-check: pass") != std::string::npos);
  CHECK(fs::exists((dir / "red.reducer.json")));
  CHECK(fs::exists((dir / "red.model.json")));
}

TEST_CASE("kpca on constant data exits with the fit-failure code") {
  const auto dir = testutil::scratch_dir("cli_reduce_kpca");
  lpvsdr::TrajectoryDataset dataset;
  dataset.gamma = Eigen::MatrixXd::Constant(10, 30, 0.25);
  dataset.sample_time = 0.01;
  const std::string prefix = (dir / "flat").string();
  lpvsdr::io::write_dataset_csv(prefix + ".csv", prefix + ".json", dataset);
  const CliResult result = run_cli(
      "reduce --method kpca --nphi 1 --data " + prefix + " --out " +
          (dir / "red").string(),
      dir);
  CHECK(result.exit_code == 3);
  CHECK(result.err.find("positive eigenvalues: 0") != std::string::npos);
}

TEST_CASE("seeded dnn reductions are identical across runs") {
  const auto dir = testutil::scratch_dir("cli_reduce_dnn");
  const std::string prefix = (dir / "gamma").string();
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"reference": {"duration": 2.0}})";
  REQUIRE(run_cli("generate --config " + cfg.string() + " --out " + prefix,
                  dir)
              .exit_code == 0);
  const std::string args = "reduce --method dnn --nphi 2 --data " + prefix +
                           " --seed 9 --epochs 60 --out ";
  REQUIRE(run_cli(args + (dir / "a").string(), dir).exit_code == 0);
  REQUIRE(run_cli(args + (dir / "b").string(), dir).exit_code == 0);
  CHECK(slurp(dir / "a.reducer.json") == slurp(dir / "b.reducer.json"));
  CHECK(slurp(dir / "a.model.json") == slurp(dir / "b.model.json"));
}

TEST_CASE("a pca sweep writes a nonincreasing cost column") {
  const auto dir = testutil::scratch_dir("cli_sweep");
  const std::string prefix = (dir / "gamma").string();
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"reference": {"duration": 5.0}})";
  REQUIRE(run_cli("generate --config " + cfg.string() + " --out " + prefix,
                  dir)
              .exit_code == 0);
  const CliResult result = run_cli(
      "sweep --methods pca --nphi-range 1..10 --seeds 1 --data " + prefix +
          " --out " + (dir / "report").string(),
      dir);
  CHECK(result.exit_code == 0);

  std::ifstream csv(dir / "report" / "report.csv");
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);  // header
  double previous = -1.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() >= 5);
    CHECK(fields[2] == "ok");
    const double cost = std::stod(fields[4]);
    if (previous >= 0.0) CHECK(cost <= previous + 1e-12);
    previous = cost;
  }
  CHECK(rows == 10);
}

TEST_CASE("a sweep where every cell fails exits with code 4") {
  const auto dir = testutil::scratch_dir("cli_sweep_fail");
  lpvsdr::TrajectoryDataset dataset;
  dataset.gamma = Eigen::MatrixXd::Constant(10, 20, 1.0);
  dataset.sample_time = 0.01;
  const std::string prefix = (dir / "flat").string();
  lpvsdr::io::write_dataset_csv(prefix + ".csv", prefix + ".json", dataset);
  const CliResult result = run_cli(
      "sweep --methods kpca --nphi-range 1..2 --data " + prefix + " --out " +
          (dir / "report").string(),
      dir);
  CHECK(result.exit_code == 4);
}

TEST_CASE("usage errors exit with code 2") {
  const auto dir = testutil::scratch_dir("cli_usage");
  CHECK(run_cli("check --suite everything", dir).exit_code == 2);
  CHECK(run_cli("reduce --method pca", dir).exit_code == 2);
  CHECK(run_cli("sweep --methods '' --data x --out y", dir).exit_code == 2);
}

TEST_CASE("the embedding self check passes") {
  const auto dir = testutil::scratch_dir("cli_check");
  const CliResult result = run_cli("check --suite embedding", dir);
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("max residual") != std::string::npos);
}

TEST_CASE("reproduce-benchmark is byte-identical across runs") {
  const auto dir = testutil::scratch_dir("cli_reproduce");
  const std::string common =
      "reproduce-benchmark --seed 11 --methods pca,dnn --nphi-range 1..2 "
      "--seeds 2 --epochs 40 --out ";
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"reference": {"duration": 2.0}})";
  const std::string with_cfg = common;
  REQUIRE(run_cli(with_cfg + (dir / "run1").string() + " --config " +
                      cfg.string(),
                  dir)
              .exit_code == 0);
  REQUIRE(run_cli(with_cfg + (dir / "run2").string() + " --config " +
                      cfg.string(),
                  dir)
              .exit_code == 0);
  CHECK(slurp(dir / "run1" / "report.csv") == slurp(dir / "run2" / "report.csv"));
  CHECK(slurp(dir / "run1" / "gamma.csv") == slurp(dir / "run2" / "gamma.csv"));

  // Seeded cells aggregate min and median over the requested seed count.
  std::ifstream csv(dir / "run1" / "report.csv");
  std::string line;
  std::getline(csv, line);
  bool saw_dnn = false;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() >= 6);
    if (fields[0] == "dnn") {
      saw_dnn = true;
      CHECK(fields[3] == "2");
      CHECK(!fields[4].empty());
      CHECK(!fields[5].empty());
    }
  }
  CHECK(saw_dnn);
}

TEST_SUITE_END();
