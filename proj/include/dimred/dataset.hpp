#pragma once

// Tabular datasets: delimited text with a header row plus a JSON schema
// descriptor declaring each column's kind (numeric | nominal) and role
// (regular | id | label). Only regular columns are clustering features.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dimred/dbscan.hpp"

namespace dimred {

enum class ColumnRole { regular, id, label };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::regular;
  std::vector<std::string> levels;  // nominal only, in order of first appearance
};

struct SchemaDescriptor {
  std::string name;
  char delimiter = ',';
  std::vector<Column> columns;  // levels left empty
  std::optional<std::size_t> expected_regular_attributes;
  std::optional<std::size_t> expected_rows;
};

struct Provenance {
  std::string path;
  std::uint64_t checksum = 0;       // FNV-1a of the file bytes
  std::vector<std::string> steps;   // transformations applied after loading
};

/// Per-column z-transform parameters (population standard deviation).
struct Normalization {
  std::vector<std::string> columns;
  std::vector<double> means;
  std::vector<double> stddevs;
};

struct Dataset {
  std::string name;
  std::vector<Column> columns;
  Eigen::MatrixXd values;  // rows x columns, nominal cells hold level codes
  Provenance provenance;
  std::optional<Normalization> normalization;

  Eigen::Index rows() const { return values.rows(); }
  std::vector<Eigen::Index> regular_columns() const;
  std::size_t regular_count() const { return regular_columns().size(); }
  /// Regular columns only; nominal codes stay as numbers.
  Eigen::MatrixXd features() const;
  DistanceSchema feature_schema() const;
  /// Throws InvalidConfigError for unknown names.
  Eigen::Index column_index(std::string_view name) const;
};

SchemaDescriptor load_schema(const std::filesystem::path& path);
SchemaDescriptor parse_schema(std::string_view json_text);

Dataset parse_dataset(std::string_view text, const SchemaDescriptor& schema, std::string source = "<memory>");
Dataset load_dataset(const std::filesystem::path& path, const SchemaDescriptor& schema);

/// z-normalises every numeric column (regular role); constant columns map
/// to zero. Nominal, id and label columns are left untouched.
Dataset normalize(const Dataset& ds);

/// Wraps a numeric matrix (e.g. reduced coordinates) as a dataset whose
/// columns are named <prefix>_1 .. <prefix>_k.
Dataset dataset_from_matrix(std::string name, const Eigen::MatrixXd& data, const std::string& prefix);

enum class CompareOp { eq, ne, lt, le, gt, ge };

struct Condition {
  struct Always {
    bool value;
  };
  struct Attribute {
    std::string column;
    CompareOp op;
    std::string value;  // number for numeric columns, level name for nominal ones
  };
  struct NonNoise {
    std::vector<int> labels;
  };
  std::variant<Always, Attribute, NonNoise> test;

  static Condition always(bool value) { return {Always{value}}; }
  static Condition attribute(std::string column, CompareOp op, std::string value) {
    return {Attribute{std::move(column), op, std::move(value)}};
  }
  static Condition non_noise(const ClusterAssignment& a) { return {NonNoise{a.labels}}; }

  std::string describe() const;
};

/// Rows satisfying the condition, in their original order.
Dataset filter_examples(const Dataset& ds, const Condition& condition);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace dimred
