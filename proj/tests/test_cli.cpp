#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "dimred_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("cd '") + scratch().string() + "' && '" + DIMRED_CLI + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return std::string("'") + DIMRED_DATA_DIR + "/" + name + ".csv'"; }

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("no arguments prints usage and fails") {
  const auto r = run("");
  CHECK(r.status != 0);
  CHECK(r.err.find("reduce") != std::string::npos);
  CHECK(r.err.find("--dataset") != std::string::npos);
}

TEST_CASE("--help documents every flag") {
  const auto r = run("--help");
  CHECK(r.status == 0);
  for (const char* flag : {"--dataset", "--schema", "--reducer", "--k", "--variance-threshold", "--eps", "--minpts",
                           "--em-k", "--em-runs", "--em-steps", "--em-quality", "--seed", "--out", "--no-normalize",
                           "--config"})
    CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
}

TEST_CASE("cluster --eps 0 is a range error naming eps") {
  const auto r = run("cluster --dataset " + data("acute-implant") + " --eps 0 --out bad_eps");
  CHECK(r.status != 0);
  CHECK(lines(r.err) == 1);
  CHECK(r.err.find("eps") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch() / "bad_eps"));
}

TEST_CASE("usage errors give one line and no output") {
  SUBCASE("unknown flag") {
    const auto r = run("cluster --dataset " + data("acute-implant") + " --bogus 1 --out bad_flag");
    CHECK(r.status != 0);
    CHECK(lines(r.err) == 1);
    CHECK_FALSE(fs::exists(scratch() / "bad_flag"));
  }
  SUBCASE("missing file") {
    const auto r = run("reduce --dataset /nonexistent/none.csv --out bad_file");
    CHECK(r.status != 0);
    CHECK(lines(r.err) == 1);
    CHECK(r.err.find("/nonexistent/none.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(scratch() / "bad_file"));
  }
  SUBCASE("unknown reducer") {
    const auto r = run("reduce --dataset " + data("acute-implant") + " --reducer lda --out bad_reducer");
    CHECK(r.status != 0);
    CHECK(lines(r.err) == 1);
    CHECK_FALSE(fs::exists(scratch() / "bad_reducer"));
  }
  SUBCASE("variance threshold out of range") {
    const auto r = run("reduce --dataset " + data("acute-implant") + " --reducer pca --variance-threshold 1.5 --out bad_t");
    CHECK(r.status != 0);
    CHECK(r.err.find("variance-threshold") != std::string::npos);
  }
  SUBCASE("runtime failure leaves nothing behind") {
    // FastICA on data whose monetary column is proportional to frequency.
    const auto r = run("reduce --dataset " + data("blood-transfusion") + " --reducer fastica --out bad_rank");
    CHECK(r.status != 0);
    CHECK(lines(r.err) == 1);
    CHECK_FALSE(fs::exists(scratch() / "bad_rank"));
  }
}

TEST_CASE("reduce writes the reduced rows and the model") {
  const auto r = run("reduce --dataset " + data("e-coli") + " --reducer pca --k 3 --out red");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(slurp(scratch() / "red" / "e-coli_pca.reduced.json"));
  CHECK(j["type"] == "reduced");
  CHECK(j["data"]["rows"] == 336);
  CHECK(j["data"]["cols"] == 3);
  CHECK(j["model"]["type"] == "pca");
  CHECK(j["normalized"] == true);
}

TEST_CASE("cluster writes the assignment and performance-1") {
  const auto r = run("cluster --dataset " + data("acute-implant") + " --out clu");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(slurp(scratch() / "clu" / "acute-implant_none.assignment.json"));
  CHECK(j["labels"].size() == 120);
  CHECK(j["eps"] == 1.0);
  CHECK(j["min_pts"] == 5);
  CHECK(j["performance1"] == j["clusters"]);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  {
    std::ofstream cfg(scratch() / "run.toml");
    cfg << "eps = 0.5\nminpts = 3\n";
  }
  auto r = run("--config run.toml cluster --dataset " + data("acute-implant") + " --out cfg1");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(slurp(scratch() / "cfg1" / "acute-implant_none.assignment.json"));
  CHECK(j["eps"] == 0.5);
  CHECK(j["min_pts"] == 3);

  r = run("--config run.toml cluster --dataset " + data("acute-implant") + " --eps 2 --out cfg2");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(slurp(scratch() / "cfg2" / "acute-implant_none.assignment.json"));
  CHECK(j["eps"] == 2.0);
  CHECK(j["min_pts"] == 3);
}

TEST_CASE("bench emits the grid for one dataset") {
  const auto r = run("bench --dataset " + data("acute-implant") + " --out bench");
  REQUIRE(r.status == 0);
  const fs::path out = scratch() / "bench";
  const std::string t1 = slurp(out / "table1_attributes.csv");
  CHECK(lines(t1) == 6);
  CHECK(t1.rfind("reducer,acute-implant\n", 0) == 0);
  for (const char* f : {"table2_time_ms.csv", "table3_clusters.csv", "report.json", "table1_comparison.csv",
                        "table3_comparison.csv", "pca_threshold_sweep.csv", "timing_direction.csv",
                        "raw/table3_clusters.csv", "acute-implant_som.points"})
    CHECK_MESSAGE(fs::exists(out / f), f);
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(j["cells"].size() == 5);
  CHECK(j["normalized"] == true);
}
