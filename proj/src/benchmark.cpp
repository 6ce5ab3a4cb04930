#include "dimred/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "dimred/dbscan.hpp"
#include "dimred/reducers/pca.hpp"
#include "dimred/reducers/svd_reduce.hpp"
#include "dimred/serialize.hpp"
#include "dimred/similarity.hpp"

namespace dimred {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Seed streams inside one cell.
enum Stream : std::uint64_t { kReducerStream = 1, kEmStream = 2 };

std::vector<PlotPoint> plot_points(const Dataset& ds, const Reduction& r, const ClusterAssignment& a) {
  const Eigen::MatrixXd source = r.reduced.reducer == ReducerKind::none ? ds.features() : r.reduced.data;
  std::vector<PlotPoint> out(static_cast<std::size_t>(source.rows()));
  for (Eigen::Index i = 0; i < source.rows(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.x = source.cols() > 0 ? source(i, 0) : 0.0;
    p.y = source.cols() > 1 ? source(i, 1) : 0.0;
    p.cluster = a.labels[static_cast<std::size_t>(i)];
  }
  return out;
}

CellResult run_cell(const Dataset& ds, ReducerKind kind, const BenchmarkConfig& config, std::uint64_t cell_seed) {
  CellResult cell;
  cell.dataset = ds.name;
  cell.reducer = kind;
  cell.rows = ds.rows();
  try {
    auto start = Clock::now();
    const Reduction r = reduce_dataset(ds, kind, config.reducer, derive_seed(cell_seed, kReducerStream));
    cell.reduce_ms = elapsed_ms(start);
    cell.attributes = r.reduced.k();
    cell.reducer_config = r.reduced.config;
    cell.reducer_converged = r.converged;

    start = Clock::now();
    const ClusterAssignment a = dbscan(r.reduced.data, config.eps, config.min_pts, r.schema);
    cell.cluster_ms = elapsed_ms(start);
    cell.clusters = static_cast<int>(cluster_count(a));
    cell.noise = noise_count(a);

    Dataset reduced = dataset_from_matrix(ds.name, r.reduced.data, "y");
    for (std::size_t j = 0; j < r.schema.kinds.size(); ++j) reduced.columns[j].kind = r.schema.kinds[j];
    cell.mean_similarity = data_to_similarity(reduced).mean_off_diagonal();

    const Dataset kept = filter_examples(reduced, Condition::non_noise(a));
    cell.em_rows = static_cast<std::size_t>(kept.rows());
    if (kept.rows() < config.em.k) {
      cell.em_note = "skipped: " + std::to_string(kept.rows()) + " non-noise rows for k=" + std::to_string(config.em.k);
    } else {
      EmOptions em = config.em;
      em.seed = derive_seed(cell_seed, kEmStream);
      try {
        const auto model = em_fit(kept.values, em);
        cell.performance2 = model.mean_log_likelihood;
        cell.em_chosen_run = static_cast<int>(model.chosen_run);
        cell.em_converged = model.runs[static_cast<std::size_t>(model.chosen_run)].converged;
      } catch (const Error& e) {
        cell.em_note = std::string("failed: ") + e.what();
      }
    }
    cell.points = plot_points(ds, r, a);
    cell.ok = true;
  } catch (const Error& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

void ReducerSettings::validate() const {
  if (svd_k < 1) throw InvalidConfigError("svd k must be >= 1");
  if (pca_components && *pca_components < 1) throw InvalidConfigError("pca components must be >= 1");
  if (!(pca_threshold > 0.0 && pca_threshold <= 1.0))
    throw InvalidConfigError("variance-threshold must lie in (0, 1]");
  if (som.width < 1 || som.height < 1 || som.epochs < 1) throw InvalidConfigError("som grid and epochs must be >= 1");
  if (!(ica_tol > 0.0) || ica_max_iter < 1) throw InvalidConfigError("fastica tol must be > 0 and max_iter >= 1");
}

void BenchmarkConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidConfigError("eps must be a finite value > 0");
  if (min_pts < 1) throw InvalidConfigError("minpts must be >= 1");
  if (em.k < 1) throw InvalidConfigError("em-k must be >= 1");
  if (em.max_runs < 1) throw InvalidConfigError("em-runs must be >= 1");
  if (em.max_steps < 1) throw InvalidConfigError("em-steps must be >= 1");
  if (!(em.quality > 0.0)) throw InvalidConfigError("em-quality must be > 0");
  if (reducers.empty()) throw InvalidConfigError("no reducers selected");
  reducer.validate();
}

nlohmann::json BenchmarkConfig::to_json() const {
  nlohmann::json j;
  j["datasets"] = nlohmann::json::array();
  for (const auto& d : datasets) j["datasets"].push_back({{"data", d.data.string()}, {"schema", d.schema.string()}});
  j["reducers"] = nlohmann::json::array();
  for (const auto r : reducers) j["reducers"].push_back(std::string(to_string(r)));
  j["normalize"] = normalize;
  j["eps"] = eps;
  j["min_pts"] = min_pts;
  j["svd_k"] = reducer.svd_k;
  if (reducer.pca_components) j["pca_components"] = *reducer.pca_components;
  j["pca_threshold"] = reducer.pca_threshold;
  j["som"] = {{"width", reducer.som.width},     {"height", reducer.som.height},
              {"epochs", reducer.som.epochs},   {"lr0", reducer.som.lr0},
              {"radius0", reducer.som.initial_radius()}, {"lr_floor", reducer.som.lr_floor},
              {"radius_floor", reducer.som.radius_floor}};
  j["fastica"] = {{"nonlinearity", std::string(to_string(reducer.ica_nonlinearity))},
                  {"tol", reducer.ica_tol},
                  {"max_iter", reducer.ica_max_iter}};
  j["em"] = {{"k", em.k},
             {"max_runs", em.max_runs},
             {"max_steps", em.max_steps},
             {"quality", em.quality},
             {"variance_floor", em.variance_floor}};
  j["seed"] = seed;
  return j;
}

std::string BenchmarkConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

Reduction reduce_dataset(const Dataset& ds, ReducerKind kind, const ReducerSettings& settings, std::uint64_t seed) {
  settings.validate();
  const Eigen::MatrixXd x = ds.features();
  if (x.cols() == 0) throw InvalidInputError("dataset '" + ds.name + "' has no regular attributes");
  Reduction r;
  switch (kind) {
    case ReducerKind::none:
      r.reduced.data = x;
      r.reduced.reducer = ReducerKind::none;
      r.reduced.config = "none";
      r.schema = ds.feature_schema();
      break;
    case ReducerKind::svd: {
      const auto model = svd_fit(x, settings.svd_k);
      r.reduced = svd_transform(model, x);
      r.model = to_json(model);
      break;
    }
    case ReducerKind::pca: {
      const auto criterion = settings.pca_components ? PcaCriterion::components(*settings.pca_components)
                                                     : PcaCriterion::variance(settings.pca_threshold);
      const auto model = pca_fit(x, criterion);
      r.reduced = pca_encode(model, x);
      r.model = to_json(model);
      break;
    }
    case ReducerKind::som: {
      SomOptions opt = settings.som;
      opt.seed = seed;
      const auto grid = som_fit(x, opt);
      r.reduced = som_encode(grid, x);
      r.model = to_json(grid);
      break;
    }
    case ReducerKind::fastica: {
      IcaOptions<double> opt;
      opt.nonlinearity = settings.ica_nonlinearity;
      opt.tol = settings.ica_tol;
      opt.max_iter = settings.ica_max_iter;
      opt.seed = seed;
      const auto model = fastica_fit(x, opt);
      r.reduced = fastica_transform(model, x);
      r.converged = model.converged;
      r.model = to_json(model);
      break;
    }
  }
  if (kind != ReducerKind::none) r.schema = DistanceSchema::all_numeric(r.reduced.k());
  r.reduced.source = ds.name;
  return r;
}

long long CellResult::time_ms() const { return std::llround(reduce_ms + cluster_ms); }

const CellResult* BenchmarkReport::find(std::string_view dataset, ReducerKind reducer) const {
  for (const auto& c : cells)
    if (c.dataset == dataset && c.reducer == reducer) return &c;
  return nullptr;
}

std::vector<Dataset> load_datasets(const std::vector<DatasetSource>& sources) {
  std::vector<Dataset> out;
  std::set<std::string> names;
  for (const auto& src : sources) {
    if (!std::filesystem::exists(src.data)) throw InvalidConfigError("dataset file not found: " + src.data.string());
    if (!std::filesystem::exists(src.schema)) throw InvalidConfigError("schema file not found: " + src.schema.string());
    Dataset ds = load_dataset(src.data, load_schema(src.schema));
    if (!names.insert(ds.name).second) throw InvalidConfigError("dataset '" + ds.name + "' listed twice");
    out.push_back(std::move(ds));
  }
  return out;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  if (config.datasets.empty()) throw InvalidConfigError("no datasets configured");
  return run_benchmark(load_datasets(config.datasets), config);
}

BenchmarkReport run_benchmark(const std::vector<Dataset>& datasets, const BenchmarkConfig& config) {
  config.validate();
  BenchmarkReport report;
  report.config = config.to_json();
  report.config_hash = config.hash();
  report.seed = config.seed;
  report.normalized = config.normalize;
  report.reducers = config.reducers;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const Dataset ds = config.normalize ? normalize(datasets[d]) : datasets[d];
    report.datasets.push_back(ds.name);
    for (const auto kind : config.reducers) {
      const std::uint64_t cell_seed = derive_seed(config.seed, d * 16 + static_cast<std::uint64_t>(kind));
      CellResult cell = run_cell(ds, kind, config, cell_seed);
      if (!cell.ok) report.warnings.push_back(ds.name + "/" + std::string(to_string(kind)) + ": " + cell.error);
      else if (!cell.reducer_converged)
        report.warnings.push_back(ds.name + "/" + std::string(to_string(kind)) + ": reducer did not converge");
      report.cells.push_back(std::move(cell));
    }
  }
  if (report.cells.empty()) report.warnings.emplace_back("empty report: no datasets were run");
  return report;
}

std::vector<SweepEntry> pca_threshold_sweep(const std::vector<Dataset>& datasets, const std::vector<double>& thresholds,
                                            bool normalize_first) {
  std::vector<SweepEntry> out;
  for (const auto& raw : datasets) {
    const Dataset ds = normalize_first ? normalize(raw) : raw;
    // One fit exposes the full spectrum; each threshold just cuts it.
    const auto model = pca_fit(ds.features(), PcaCriterion::components(1));
    for (const double t : thresholds) out.push_back({ds.name, t, retained_for_threshold(model.eigenvalues, t)});
  }
  return out;
}

TimingComparison compare_dbscan_timing(const Dataset& raw, const BenchmarkConfig& config, int repetitions) {
  if (repetitions < 1) throw InvalidConfigError("timing repetitions must be >= 1");
  const Dataset ds = config.normalize ? normalize(raw) : raw;
  const Eigen::MatrixXd full = ds.features();
  const DistanceSchema full_schema = ds.feature_schema();
  const Eigen::MatrixXd reduced = svd_reduce(full, config.reducer.svd_k).data;
  const DistanceSchema reduced_schema = DistanceSchema::all_numeric(reduced.cols());

  TimingComparison t;
  t.dataset = ds.name;
  t.reduced_dim = reduced.cols();
  auto time_one = [&](const Eigen::MatrixXd& x, const DistanceSchema& s) {
    const auto start = Clock::now();
    const auto a = dbscan(x, config.eps, config.min_pts, s);
    const double ms = elapsed_ms(start);
    if (a.labels.size() != static_cast<std::size_t>(x.rows())) throw InvalidInputError("dbscan label count mismatch");
    return ms;
  };
  // Alternate which variant runs first so cache warm-up favours neither.
  for (int rep = 0; rep < repetitions; ++rep) {
    if (rep % 2 == 0) {
      t.reduced_ms.push_back(time_one(reduced, reduced_schema));
      t.full_ms.push_back(time_one(full, full_schema));
    } else {
      t.full_ms.push_back(time_one(full, full_schema));
      t.reduced_ms.push_back(time_one(reduced, reduced_schema));
    }
  }
  t.reduced_median_ms = median(t.reduced_ms);
  t.full_median_ms = median(t.full_ms);
  return t;
}

}  // namespace dimred
