#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dimred/benchmark.hpp"

namespace dimred {

/// Keys in report.json whose values depend on the clock. Everything else
/// is reproducible for a fixed seed and configuration.
inline const std::vector<std::string> kTimingFields = {"generated_at", "reduce_ms", "cluster_ms", "time_ms"};

nlohmann::json report_to_json(const BenchmarkReport& report);

/// Writes table1_attributes.csv, table2_time_ms.csv, table3_clusters.csv,
/// report.json and one <dataset>_<reducer>.points file per successful cell.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report, const std::filesystem::path& dir);

/// Published-versus-observed tables: table1_comparison.csv,
/// pca_threshold_sweep.csv, table3_comparison.csv and timing_direction.csv.
std::vector<std::filesystem::path> emit_comparison(const BenchmarkReport& normalized, const BenchmarkReport& raw,
                                                   const std::vector<SweepEntry>& sweep,
                                                   const std::vector<TimingComparison>& timing,
                                                   const std::filesystem::path& dir);

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file. Throws IoError naming the path.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace dimred
