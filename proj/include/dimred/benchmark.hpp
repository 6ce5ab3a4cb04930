#pragma once

// The reduce -> DBSCAN -> similarity -> filter -> EM pipeline over a grid
// of (dataset, reducer) cells.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dimred/dataset.hpp"
#include "dimred/gmm.hpp"
#include "dimred/reducers/fastica.hpp"
#include "dimred/reducers/reduced.hpp"
#include "dimred/reducers/som.hpp"
#include "json.hpp"

namespace dimred {

struct DatasetSource {
  std::filesystem::path data;
  std::filesystem::path schema;
};

/// Hyperparameters for every reducer; seeds are supplied per call.
struct ReducerSettings {
  Eigen::Index svd_k = 1;
  std::optional<Eigen::Index> pca_components;  // overrides the threshold when set
  double pca_threshold = 0.95;
  SomOptions som;
  Nonlinearity ica_nonlinearity = Nonlinearity::tanh;
  double ica_tol = 1e-6;
  int ica_max_iter = 200;

  void validate() const;
};

struct BenchmarkConfig {
  std::vector<DatasetSource> datasets;
  std::vector<ReducerKind> reducers = {ReducerKind::svd, ReducerKind::pca, ReducerKind::som, ReducerKind::fastica,
                                       ReducerKind::none};
  bool normalize = true;
  double eps = 1.0;
  Eigen::Index min_pts = 5;
  ReducerSettings reducer;
  EmOptions em;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON form, as 16 hex digits.
  std::string hash() const;
};

struct Reduction {
  ReducedDataset<double> reduced;
  DistanceSchema schema;  // mixed for pass-through, all numeric otherwise
  bool converged = true;
  nlohmann::json model;   // fitted model, null for pass-through
};

/// Fits the reducer on the dataset's regular columns and returns the
/// transformed rows. "none" passes the features through unchanged.
Reduction reduce_dataset(const Dataset& ds, ReducerKind kind, const ReducerSettings& settings, std::uint64_t seed);

struct PlotPoint {
  double x = 0;
  double y = 0;
  int cluster = ClusterAssignment::kNoise;
};

struct CellResult {
  std::string dataset;
  ReducerKind reducer = ReducerKind::none;
  bool ok = false;
  std::string error;

  Eigen::Index rows = 0;
  Eigen::Index attributes = 0;
  std::string reducer_config;
  bool reducer_converged = true;
  double reduce_ms = 0;
  double cluster_ms = 0;

  int clusters = 0;
  std::size_t noise = 0;
  double mean_similarity = 0;

  std::size_t em_rows = 0;
  std::optional<double> performance2;  // mean log-likelihood per example
  std::string em_note;                 // reason when performance2 is absent
  int em_chosen_run = -1;
  bool em_converged = false;

  std::vector<PlotPoint> points;

  long long time_ms() const;  // reduce + cluster, rounded
};

struct BenchmarkReport {
  nlohmann::json config;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool normalized = true;
  std::vector<std::string> datasets;   // column order
  std::vector<ReducerKind> reducers;   // row order
  std::vector<CellResult> cells;       // dataset-major
  std::vector<std::string> warnings;

  const CellResult* find(std::string_view dataset, ReducerKind reducer) const;
};

/// Loads every dataset first; any load failure aborts before cell work.
std::vector<Dataset> load_datasets(const std::vector<DatasetSource>& sources);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);
BenchmarkReport run_benchmark(const std::vector<Dataset>& datasets, const BenchmarkConfig& config);

struct SweepEntry {
  std::string dataset;
  double threshold = 0;
  Eigen::Index retained = 0;
};

/// Retained PCA dimension per dataset at each variance threshold.
std::vector<SweepEntry> pca_threshold_sweep(const std::vector<Dataset>& datasets, const std::vector<double>& thresholds,
                                            bool normalize);

struct TimingComparison {
  std::string dataset;
  Eigen::Index reduced_dim = 0;
  std::vector<double> reduced_ms;
  std::vector<double> full_ms;
  double reduced_median_ms = 0;
  double full_median_ms = 0;

  bool reduced_faster() const { return reduced_median_ms < full_median_ms; }
};

/// DBSCAN wall time on SVD-reduced versus unreduced rows, interleaved in
/// one process. Reduction itself is not timed.
TimingComparison compare_dbscan_timing(const Dataset& ds, const BenchmarkConfig& config, int repetitions = 11);

}  // namespace dimred
