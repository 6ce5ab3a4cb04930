// dimred: command-line front end.
//
//   dimred reduce  --dataset FILE [--reducer svd] [--out DIR]
//   dimred cluster --dataset FILE [--reducer none] [--eps 1 --minpts 5]
//   dimred bench   --dataset A.csv --dataset B.csv ... [--out DIR]
//
// Every option may also come from a config file (--config); flags given on
// the command line win over the file, the file wins over built-in defaults.

#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dimred/benchmark.hpp"
#include "dimred/reference.hpp"
#include "dimred/report.hpp"
#include "dimred/serialize.hpp"

namespace fs = std::filesystem;
using namespace dimred;

namespace {

struct Options {
  std::vector<std::string> datasets;
  std::vector<std::string> schemas;
  std::vector<std::string> reducers;
  Eigen::Index k = 1;
  double variance_threshold = 0.95;
  double eps = 1.0;
  Eigen::Index min_pts = 5;
  Eigen::Index em_k = 2;
  int em_runs = 5;
  int em_steps = 100;
  double em_quality = 1e-10;
  std::uint64_t seed = 0;
  std::string out = "dimred-out";
  bool no_normalize = false;
  bool k_given = false;
};

std::vector<DatasetSource> sources(const Options& o) {
  if (o.datasets.empty()) throw InvalidConfigError("--dataset is required");
  if (!o.schemas.empty() && o.schemas.size() != o.datasets.size()) {
    throw InvalidConfigError("--schema must be given once per --dataset or not at all");
  }
  std::vector<DatasetSource> out;
  for (std::size_t i = 0; i < o.datasets.size(); ++i) {
    const fs::path data = o.datasets[i];
    fs::path schema = o.schemas.empty() ? data.parent_path() / (data.stem().string() + ".schema.json") : fs::path(o.schemas[i]);
    out.push_back({data, schema});
  }
  return out;
}

BenchmarkConfig make_config(const Options& o) {
  BenchmarkConfig c;
  c.datasets = sources(o);
  c.normalize = !o.no_normalize;
  c.eps = o.eps;
  c.min_pts = o.min_pts;
  c.reducer.svd_k = o.k;
  c.reducer.pca_threshold = o.variance_threshold;
  c.em.k = o.em_k;
  c.em.max_runs = o.em_runs;
  c.em.max_steps = o.em_steps;
  c.em.quality = o.em_quality;
  c.seed = o.seed;
  if (!o.reducers.empty()) {
    c.reducers.clear();
    for (const auto& r : o.reducers) c.reducers.push_back(reducer_from_string(r));
  }
  c.validate();
  return c;
}

ReducerKind single_reducer(const BenchmarkConfig& c, const Options& o, ReducerKind fallback) {
  if (o.reducers.empty()) return fallback;
  if (o.reducers.size() > 1) throw InvalidConfigError("--reducer takes one value for this subcommand");
  return c.reducers.front();
}

// Everything is written into a private staging directory first and moved
// into place only once the whole command has succeeded.
class Staging {
 public:
  explicit Staging(fs::path target) : target_(std::move(target)) {
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    if (!fs::is_directory(parent)) throw IoError("output parent directory does not exist: " + parent.string());
    dir_ = parent / (".dimred-staging-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string());
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  const fs::path& dir() const { return dir_; }

  void commit() {
    std::error_code ec;
    fs::create_directories(target_, ec);
    if (ec || !fs::is_directory(target_)) throw IoError("cannot create output directory " + target_.string());
    move_into(dir_, target_);
  }

 private:
  static void move_into(const fs::path& from, const fs::path& to) {
    for (const auto& entry : fs::directory_iterator(from)) {
      const fs::path dest = to / entry.path().filename();
      if (entry.is_directory()) {
        fs::create_directories(dest);
        move_into(entry.path(), dest);
        continue;
      }
      std::error_code ec;
      fs::rename(entry.path(), dest, ec);
      if (ec) throw IoError("cannot write " + dest.string());
    }
  }

  fs::path target_;
  fs::path dir_;
};

Dataset prepared(const BenchmarkConfig& c) {
  const Dataset ds = load_datasets(c.datasets).front();
  return c.normalize ? normalize(ds) : ds;
}

int run_reduce(const Options& o) {
  if (o.datasets.size() != 1) throw InvalidConfigError("reduce takes exactly one --dataset");
  BenchmarkConfig c = make_config(o);
  const ReducerKind kind = single_reducer(c, o, ReducerKind::svd);
  if (kind == ReducerKind::pca && o.k_given) c.reducer.pca_components = o.k;
  const Dataset ds = prepared(c);
  const Reduction r = reduce_dataset(ds, kind, c.reducer, o.seed);

  nlohmann::json j = to_json(r.reduced);
  j["model"] = r.model;
  j["converged"] = r.converged;
  j["normalized"] = c.normalize;
  j["provenance"] = {{"path", ds.provenance.path}, {"checksum", ds.provenance.checksum}, {"steps", ds.provenance.steps}};

  Staging stage(o.out);
  const std::string name = ds.name + "_" + std::string(to_string(kind)) + ".reduced.json";
  write_file(stage.dir() / name, j.dump(2) + "\n");
  stage.commit();
  std::cout << ds.name << ": " << r.reduced.config << ", " << r.reduced.k() << " attributes -> "
            << (fs::path(o.out) / name).string() << "\n";
  if (!r.converged) std::cerr << "warning: " << to_string(kind) << " did not converge\n";
  return 0;
}

int run_cluster(const Options& o) {
  if (o.datasets.size() != 1) throw InvalidConfigError("cluster takes exactly one --dataset");
  BenchmarkConfig c = make_config(o);
  const ReducerKind kind = single_reducer(c, o, ReducerKind::none);
  if (kind == ReducerKind::pca && o.k_given) c.reducer.pca_components = o.k;
  const Dataset ds = prepared(c);
  const Reduction r = reduce_dataset(ds, kind, c.reducer, o.seed);
  const ClusterAssignment a = dbscan(r.reduced.data, c.eps, c.min_pts, r.schema);

  nlohmann::json j = to_json(a);
  j["dataset"] = ds.name;
  j["reducer"] = r.reduced.config;
  j["attributes"] = r.reduced.k();
  j["normalized"] = c.normalize;
  j["performance1"] = cluster_count(a);

  Staging stage(o.out);
  const std::string name = ds.name + "_" + std::string(to_string(kind)) + ".assignment.json";
  write_file(stage.dir() / name, j.dump(2) + "\n");
  stage.commit();
  std::cout << ds.name << ": " << cluster_count(a) << " clusters, " << noise_count(a) << " noise points -> "
            << (fs::path(o.out) / name).string() << "\n";
  return 0;
}

int run_bench(const Options& o) {
  const BenchmarkConfig primary = make_config(o);
  const std::vector<Dataset> data = load_datasets(primary.datasets);
  BenchmarkConfig alternate = primary;
  alternate.normalize = !primary.normalize;

  const BenchmarkReport main_report = run_benchmark(data, primary);
  const BenchmarkReport alt_report = run_benchmark(data, alternate);
  const std::vector<double> thresholds(reference::kPcaSweep.begin(), reference::kPcaSweep.end());
  const auto sweep = pca_threshold_sweep(data, thresholds, primary.normalize);
  std::vector<TimingComparison> timing;
  for (const auto& ds : data) timing.push_back(compare_dbscan_timing(ds, primary));

  Staging stage(o.out);
  emit_report(main_report, stage.dir());
  emit_report(alt_report, stage.dir() / (alternate.normalize ? "normalized" : "raw"));
  const BenchmarkReport& norm = primary.normalize ? main_report : alt_report;
  const BenchmarkReport& raw = primary.normalize ? alt_report : main_report;
  emit_comparison(norm, raw, sweep, timing, stage.dir());
  stage.commit();

  for (const auto& w : main_report.warnings) std::cerr << "warning: " << w << "\n";
  std::size_t ok = 0;
  for (const auto& cell : main_report.cells) ok += cell.ok;
  std::cout << "bench: " << ok << "/" << main_report.cells.size() << " cells succeeded, report in " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension reduction and density clustering benchmark"};
  app.name("dimred");
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);

  Options o;
  app.add_option("--dataset", o.datasets, "Dataset file (CSV with header); repeat for bench");
  app.add_option("--schema", o.schemas, "Schema file per dataset (default: <dataset stem>.schema.json alongside)");
  app.add_option("--reducer", o.reducers, "svd, pca, som, fastica or none (bench: subset of the grid)")
      ->check(CLI::IsMember({"svd", "pca", "som", "fastica", "none"}));
  auto* k_opt = app.add_option("--k", o.k, "SVD components; with --reducer pca, fixed PCA components")
                    ->capture_default_str();
  app.add_option("--variance-threshold", o.variance_threshold, "PCA retained variance fraction in (0, 1]")
      ->capture_default_str();
  app.add_option("--eps", o.eps, "DBSCAN neighbourhood radius (> 0)")->capture_default_str();
  app.add_option("--minpts", o.min_pts, "DBSCAN minimum neighbourhood size (>= 1)")->capture_default_str();
  app.add_option("--em-k", o.em_k, "EM mixture components")->capture_default_str();
  app.add_option("--em-runs", o.em_runs, "EM independent runs")->capture_default_str();
  app.add_option("--em-steps", o.em_steps, "EM maximum steps per run")->capture_default_str();
  app.add_option("--em-quality", o.em_quality, "EM stop when the log-likelihood changes less than this")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_flag("--no-normalize", o.no_normalize, "Skip z-normalisation of numeric attributes");

  auto* reduce = app.add_subcommand("reduce", "Reduce one dataset and write the reduced rows and model");
  auto* cluster = app.add_subcommand("cluster", "Run DBSCAN on one (optionally reduced) dataset");
  auto* bench = app.add_subcommand("bench", "Run the full dataset x reducer grid and write the report");
  for (auto* sub : {reduce, cluster, bench}) sub->fallthrough();

  if (argc < 2) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "dimred: error: " << e.what() << "\n";
    return 2;
  }
  o.k_given = k_opt->count() > 0;

  try {
    if (*reduce) return run_reduce(o);
    if (*cluster) return run_cluster(o);
    return run_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "dimred: error: " << e.what() << "\n";
    return 1;
  }
}
