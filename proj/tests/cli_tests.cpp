// Black-box tests of the command-line binary.  The harness provides
// TASEP_BIN (path to the built executable) and TASEP_GOLDEN_DIR (directory
// with the committed golden outputs).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("TASEP_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string("\"") + bin + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
  const int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    rows.push_back(fields);
  }
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string golden_path(const std::string& name) {
  const char* dir = std::getenv("TASEP_GOLDEN_DIR");
  REQUIRE(dir != nullptr);
  return std::string(dir) + "/" + name;
}

std::string temp_path(const std::string& name) {
  const char* tmp = std::getenv("TMPDIR");
  return std::string(tmp ? tmp : "/tmp") + "/" + name;
}

}  // namespace

TEST_CASE("time-zero indicator through the step pipeline", "[cli]") {
  const auto res = run_cli("exact --step -N 3 -k 2 -x 1 -t 0");
  REQUIRE(res.status == 0);
  const auto rows = parse_csv(res.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"N", "k", "x", "t", "value", "method"});
  CHECK(rows[1][4] == "1");
  CHECK(rows[1][5] == "hankel");
}

TEST_CASE("step values do not depend on the block size", "[cli]") {
  const auto res = run_cli("exact --step -N 3 -x 2 -t 1 -k 1,2,3");
  REQUIRE(res.status == 0);
  const auto rows = parse_csv(res.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][4] == rows[2][4]);
  CHECK(rows[2][4] == rows[3][4]);
}

TEST_CASE("simulation output is byte-stable", "[cli]") {
  const std::string cmd = "simulate --step -N 2 -k 1 -x 1 -t 0.5 -n 100000 --seed 7";
  const auto a = run_cli(cmd);
  const auto b = run_cli(cmd);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto rows = parse_csv(a.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"N", "k", "x", "t", "p_hat", "stderr"});

  const auto single = run_cli(cmd + " --threads 1");
  const auto pooled = run_cli(cmd + " --threads 3");
  CHECK(single.out == a.out);
  CHECK(pooled.out == a.out);
}

TEST_CASE("three-way comparison on a small grid", "[cli]") {
  const auto res = run_cli("compare -Y 1,3,4 -k 0,1 -x 1,2,3 -t 0.5 -n 50000 --seed 11");
  REQUIRE(res.status == 0);
  const auto rows = parse_csv(res.out);
  REQUIRE(rows.size() == 1 + 2 * 3);
  CHECK(rows[0] == std::vector<std::string>{"N", "k", "x", "t", "exact", "oracle", "mc_phat",
                                            "mc_stderr", "abs_err", "z"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][8])) <= 1e-7);  // |exact - oracle|
    CHECK(std::abs(std::stod(rows[i][9])) <= 5.0);   // z
  }
}

TEST_CASE("exact value matches the oracle column", "[cli]") {
  const auto ex = run_cli("exact -Y 1,3,4 -k 1 -x 2 -t 0.5");
  const auto orc = run_cli("oracle -Y 1,3,4 -k 1 -x 2 -t 0.5");
  REQUIRE(ex.status == 0);
  REQUIRE(orc.status == 0);
  const auto erows = parse_csv(ex.out);
  const auto orows = parse_csv(orc.out);
  REQUIRE(erows.size() == 2);
  REQUIRE(orows.size() == 2);
  CHECK(orows[0] == std::vector<std::string>{"N", "k", "x", "t", "oracle"});
  CHECK(erows[1][5] == "determinant");
  CHECK(std::abs(std::stod(erows[1][4]) - std::stod(orows[1][4])) <= 1e-7);
}

TEST_CASE("a perturbed formula trips the comparison gate", "[cli]") {
  const auto res =
      run_cli("compare --step -N 2 -k 1 -x 1,2,3 -t 0.5 -n 20000 --perturb-exponent");
  CHECK(res.status == 1);
}

TEST_CASE("identity suite output and thresholds", "[cli]") {
  const auto res = run_cli("identities --trials 3 --seed 4242");
  REQUIRE(res.status == 0);
  CHECK(res.out.rfind("[", 0) == 0);
  CHECK(res.out.find("\"name\": \"bethe-sum\"") != std::string::npos);
  CHECK(res.out.find("\"pass\": false") == std::string::npos);
  CHECK(res.out.find("\"k\": null") != std::string::npos);

  const auto rerun = run_cli("identities --trials 3 --seed 4242");
  CHECK(rerun.out == res.out);

  // a threshold below the noise floor of the arithmetic must fail rows
  const auto strict = run_cli("identities --trials 2 --seed 4242 --threshold 1e-30");
  CHECK(strict.status == 1);
  CHECK(strict.out.find("\"pass\": false") != std::string::npos);

  // the mutation fixture must fail at the shipping threshold
  const auto mutated = run_cli("identities --trials 2 --seed 4242 --perturb-exponent");
  CHECK(mutated.status == 1);
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  CHECK(run_cli("exact --step -Y 1,2 -k 1 -x 1 -t 1").status == 2);
  CHECK(run_cli("exact -k 1 -x 1 -t 1").status == 2);
  CHECK(run_cli("exact --step -N 3 -k 7 -x 1 -t 1").status == 2);
  CHECK(run_cli("exact --step -N 3 -k 1 -x 1 -t -2").status == 2);
  CHECK(run_cli("exact -Y 3,1 -k 1 -x 1 -t 1").status == 2);
  CHECK(run_cli("exact --step -N 3 -k 1 -x 5:2 -t 1").status == 2);
  CHECK(run_cli("frobnicate").status == 2);
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("simulate --step -N 2 -k 1 -x 1 -t 0.5 -n 0").status == 2);
}

TEST_CASE("runaway series reports a numeric failure", "[cli]") {
  CHECK(run_cli("exact --step -N 2 -k 1 -x 3 -t 1e9").status == 3);
}

TEST_CASE("json output format", "[cli]") {
  const auto res = run_cli("exact --step -N 2 -k 0 -x 2 -t 1 --format json");
  REQUIRE(res.status == 0);
  CHECK(res.out.rfind("[", 0) == 0);
  CHECK(res.out.find("\"value\": ") != std::string::npos);
  CHECK(res.out.find("\"method\": \"hankel\"") != std::string::npos);
}

TEST_CASE("output redirection to a file", "[cli]") {
  const std::string path = temp_path("tasep_cli_out_test.csv");
  std::remove(path.c_str());
  const auto direct = run_cli("exact --step -N 2 -k 1 -x 1,2 -t 0.5");
  const auto redirected = run_cli("exact --step -N 2 -k 1 -x 1,2 -t 0.5 -o \"" + path + "\"");
  REQUIRE(redirected.status == 0);
  CHECK(redirected.out.empty());
  CHECK(read_file(path) == direct.out);
  std::remove(path.c_str());
}

TEST_CASE("config file with flag precedence", "[cli]") {
  const std::string path = temp_path("tasep_cli_cfg_test.ini");
  {
    std::ofstream f(path);
    f << "[exact]\nstep=true\nparticles=3\nmarked=1\nanchor=2\ntime=0\n";
  }
  const auto from_cfg = run_cli("--config \"" + path + "\" exact");
  REQUIRE(from_cfg.status == 0);
  auto rows = parse_csv(from_cfg.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][4] == "0");  // block is at 1, not at the configured anchor 2

  const auto overridden = run_cli("--config \"" + path + "\" exact -x 1");
  REQUIRE(overridden.status == 0);
  rows = parse_csv(overridden.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][4] == "1");  // the command line wins over the file
  std::remove(path.c_str());
}

TEST_CASE("golden outputs are reproduced byte for byte", "[cli]") {
  const struct {
    const char* file;
    const char* args;
  } cases[] = {
      {"exact_step.csv", "exact --step -N 4 -t 0.5,1 -x -1:8"},
      {"compare_small.csv", "compare -Y 1,2 -t 0.5,1 -x 0:4 -n 20000 --seed 12345"},
      {"identities_small.json", "identities --trials 2 --seed 4242"},
  };
  for (const auto& c : cases) {
    const auto res = run_cli(c.args);
    CAPTURE(c.file);
    REQUIRE(res.status == 0);
    CHECK(res.out == read_file(golden_path(c.file)));
  }
}
