#include "dimred/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dimred/reference.hpp"

namespace dimred {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

template <class CellValue>
std::string grid_table(const BenchmarkReport& report, CellValue value) {
  std::ostringstream out;
  out << "reducer";
  for (const auto& d : report.datasets) out << ',' << d;
  out << '\n';
  if (report.cells.empty()) return out.str();
  for (const auto kind : report.reducers) {
    out << to_string(kind);
    for (const auto& d : report.datasets) {
      const CellResult* c = report.find(d, kind);
      out << ',' << (c && c->ok ? value(*c) : std::string("failed"));
    }
    out << '\n';
  }
  return out.str();
}

std::string points_file(const CellResult& c) {
  std::ostringstream out;
  out << "x,y,cluster,noise\n";
  for (const auto& p : c.points)
    out << fmt(p.x) << ',' << fmt(p.y) << ',' << p.cluster << ',' << (p.cluster == ClusterAssignment::kNoise) << '\n';
  return out.str();
}

std::string observed_or_failed(const BenchmarkReport& r, const std::string& dataset, ReducerKind kind,
                               int CellResult::*field) {
  const CellResult* c = r.find(dataset, kind);
  if (!c) return "missing";
  if (!c->ok) return "failed";
  return std::to_string(c->*field);
}

}  // namespace

void write_file(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    if (!out.flush()) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["generated_at"] = timestamp();
  j["config"] = report.config;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["normalized"] = report.normalized;
  j["datasets"] = report.datasets;
  j["reducers"] = nlohmann::json::array();
  for (const auto r : report.reducers) j["reducers"].push_back(std::string(to_string(r)));
  j["warnings"] = report.warnings;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cell = {{"dataset", c.dataset},
                           {"reducer", std::string(to_string(c.reducer))},
                           {"ok", c.ok},
                           {"rows", c.rows}};
    if (!c.ok) {
      cell["error"] = c.error;
    } else {
      cell["attributes"] = c.attributes;
      cell["reducer_config"] = c.reducer_config;
      cell["reducer_converged"] = c.reducer_converged;
      cell["reduce_ms"] = c.reduce_ms;
      cell["cluster_ms"] = c.cluster_ms;
      cell["time_ms"] = c.time_ms();
      cell["clusters"] = c.clusters;
      cell["noise"] = c.noise;
      cell["mean_similarity"] = c.mean_similarity;
      cell["em_rows"] = c.em_rows;
      cell["performance2"] = c.performance2 ? nlohmann::json(*c.performance2) : nlohmann::json(nullptr);
      if (!c.em_note.empty()) cell["em_note"] = c.em_note;
      cell["em_chosen_run"] = c.em_chosen_run;
      cell["em_converged"] = c.em_converged;
    }
    j["cells"].push_back(std::move(cell));
  }
  return j;
}

std::vector<fs::path> emit_report(const BenchmarkReport& report, const fs::path& dir) {
  ensure_dir(dir);
  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& contents) {
    write_file(dir / name, contents);
    written.push_back(dir / name);
  };
  put("table1_attributes.csv", grid_table(report, [](const CellResult& c) { return std::to_string(c.attributes); }));
  put("table2_time_ms.csv", grid_table(report, [](const CellResult& c) { return std::to_string(c.time_ms()); }));
  put("table3_clusters.csv", grid_table(report, [](const CellResult& c) { return std::to_string(c.clusters); }));
  put("report.json", report_to_json(report).dump(2) + "\n");
  for (const auto& c : report.cells)
    if (c.ok) put(c.dataset + "_" + std::string(to_string(c.reducer)) + ".points", points_file(c));
  return written;
}

std::vector<fs::path> emit_comparison(const BenchmarkReport& normalized, const BenchmarkReport& raw,
                                      const std::vector<SweepEntry>& sweep,
                                      const std::vector<TimingComparison>& timing, const fs::path& dir) {
  ensure_dir(dir);
  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& contents) {
    write_file(dir / name, contents);
    written.push_back(dir / name);
  };

  const BenchmarkReport& primary = normalized;
  std::ostringstream t1;
  t1 << "reducer,dataset,published,observed,status\n";
  for (const auto kind : primary.reducers) {
    for (const auto& d : primary.datasets) {
      const auto published = reference::lookup(reference::kAttributes, kind, d);
      const CellResult* c = primary.find(d, kind);
      const std::string observed = !c ? "missing" : !c->ok ? "failed" : std::to_string(c->attributes);
      std::string status = "n/a";
      if (published && c && c->ok) status = c->attributes == *published ? "match" : "deviation";
      else if (c && !c->ok) status = "failed";
      t1 << to_string(kind) << ',' << d << ',' << (published ? std::to_string(*published) : "") << ',' << observed
         << ',' << status << '\n';
    }
  }
  put("table1_comparison.csv", t1.str());

  std::ostringstream sw;
  sw << "dataset,threshold,retained,published\n";
  for (const auto& e : sweep) {
    const auto published = reference::lookup(reference::kAttributes, ReducerKind::pca, e.dataset);
    sw << e.dataset << ',' << fmt(e.threshold) << ',' << e.retained << ','
       << (published ? std::to_string(*published) : "") << '\n';
  }
  put("pca_threshold_sweep.csv", sw.str());

  std::ostringstream t3;
  t3 << "reducer,dataset,published,observed_normalized,observed_raw\n";
  for (const auto kind : primary.reducers) {
    for (const auto& d : primary.datasets) {
      const auto published = reference::lookup(reference::kClusters, kind, d);
      t3 << to_string(kind) << ',' << d << ',' << (published ? std::to_string(*published) : "") << ','
         << observed_or_failed(normalized, d, kind, &CellResult::clusters) << ','
         << observed_or_failed(raw, d, kind, &CellResult::clusters) << '\n';
    }
  }
  put("table3_comparison.csv", t3.str());

  std::ostringstream td;
  td << "dataset,reduced_dim,repetitions,reduced_median_ms,full_median_ms,reduced_faster\n";
  for (const auto& t : timing) {
    td << t.dataset << ',' << t.reduced_dim << ',' << t.reduced_ms.size() << ',' << fmt(t.reduced_median_ms) << ','
       << fmt(t.full_median_ms) << ',' << (t.reduced_faster() ? "yes" : "no") << '\n';
  }
  put("timing_direction.csv", td.str());
  return written;
}

}  // namespace dimred
