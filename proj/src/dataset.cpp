#include "dimred/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dimred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

ColumnKind kind_from_string(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "nominal") return ColumnKind::nominal;
  throw SchemaError("schema: unknown column kind '" + s + "' (expected numeric or nominal)");
}

ColumnRole role_from_string(const std::string& s) {
  if (s == "regular") return ColumnRole::regular;
  if (s == "id") return ColumnRole::id;
  if (s == "label") return ColumnRole::label;
  throw SchemaError("schema: unknown column role '" + s + "' (expected regular, id or label)");
}

std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

template <class T>
bool compare(const T& a, CompareOp op, const T& b) {
  switch (op) {
    case CompareOp::eq: return a == b;
    case CompareOp::ne: return a != b;
    case CompareOp::lt: return a < b;
    case CompareOp::le: return a <= b;
    case CompareOp::gt: return a > b;
    case CompareOp::ge: return a >= b;
  }
  return false;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Eigen::Index> Dataset::regular_columns() const {
  std::vector<Eigen::Index> out;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j].role == ColumnRole::regular) out.push_back(static_cast<Eigen::Index>(j));
  return out;
}

Eigen::MatrixXd Dataset::features() const {
  const auto cols = regular_columns();
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
  return out;
}

DistanceSchema Dataset::feature_schema() const {
  DistanceSchema s;
  for (const auto j : regular_columns()) s.kinds.push_back(columns[static_cast<std::size_t>(j)].kind);
  return s;
}

Eigen::Index Dataset::column_index(std::string_view column) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j].name == column) return static_cast<Eigen::Index>(j);
  throw InvalidConfigError("dataset '" + name + "' has no attribute named '" + std::string(column) + "'");
}

SchemaDescriptor parse_schema(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("schema: invalid JSON: ") + e.what());
  }
  SchemaDescriptor s;
  try {
    s.name = j.at("name").get<std::string>();
    const std::string delim = j.value("delimiter", std::string(","));
    if (delim.size() != 1) throw SchemaError("schema: delimiter must be a single character");
    s.delimiter = delim[0];
    for (const auto& c : j.at("columns")) {
      Column col;
      col.name = c.at("name").get<std::string>();
      col.kind = kind_from_string(c.value("kind", std::string("numeric")));
      col.role = role_from_string(c.value("role", std::string("regular")));
      s.columns.push_back(std::move(col));
    }
    if (j.contains("expected_regular_attributes"))
      s.expected_regular_attributes = j["expected_regular_attributes"].get<std::size_t>();
    if (j.contains("expected_rows")) s.expected_rows = j["expected_rows"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema: ") + e.what());
  }
  if (s.columns.empty()) throw SchemaError("schema '" + s.name + "' declares no columns");
  return s;
}

SchemaDescriptor load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

Dataset parse_dataset(std::string_view text, const SchemaDescriptor& schema, std::string source) {
  Dataset ds;
  ds.name = schema.name;
  ds.columns = schema.columns;
  ds.provenance.path = std::move(source);
  ds.provenance.checksum = fnv1a(text);
  const std::size_t ncols = schema.columns.size();

  std::vector<std::map<std::string, int, std::less<>>> level_index(ncols);
  std::vector<double> cells;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(raw).empty()) continue;

    const auto fields = split(raw, schema.delimiter);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != ncols) {
        throw SchemaError(ds.provenance.path + ": header has " + std::to_string(fields.size()) +
                          " columns but the schema declares " + std::to_string(ncols));
      }
      for (std::size_t j = 0; j < ncols; ++j) {
        if (fields[j] != schema.columns[j].name) {
          throw SchemaError(ds.provenance.path + ": header column " + std::to_string(j + 1) + " is '" +
                            std::string(fields[j]) + "' but the schema declares '" + schema.columns[j].name + "'");
        }
      }
      continue;
    }
    if (fields.size() != ncols) {
      throw ParseError(ds.provenance.path + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " + std::to_string(ncols));
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      auto& col = ds.columns[j];
      if (col.kind == ColumnKind::numeric) {
        const auto v = parse_number(fields[j]);
        if (!v) {
          throw ParseError(ds.provenance.path + ": line " + std::to_string(line_no) + ", column '" + col.name +
                           "': cannot parse '" + std::string(fields[j]) + "' as a number");
        }
        cells.push_back(*v);
      } else {
        auto it = level_index[j].find(fields[j]);
        if (it == level_index[j].end()) {
          it = level_index[j].emplace(std::string(fields[j]), static_cast<int>(col.levels.size())).first;
          col.levels.emplace_back(fields[j]);
        }
        cells.push_back(static_cast<double>(it->second));
      }
    }
  }
  if (!header_seen) throw ParseError(ds.provenance.path + ": file is empty");
  const std::size_t nrows = cells.size() / ncols;
  if (nrows == 0) throw ParseError(ds.provenance.path + ": no data rows after the header");

  ds.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));

  if (schema.expected_regular_attributes && ds.regular_count() != *schema.expected_regular_attributes) {
    throw SchemaError(ds.provenance.path + ": " + std::to_string(ds.regular_count()) +
                      " regular attributes, schema expects " + std::to_string(*schema.expected_regular_attributes));
  }
  if (schema.expected_rows && nrows != *schema.expected_rows) {
    throw SchemaError(ds.provenance.path + ": " + std::to_string(nrows) + " rows, schema expects " +
                      std::to_string(*schema.expected_rows));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const SchemaDescriptor& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), schema, path.string());
}

Dataset normalize(const Dataset& ds) {
  Dataset out = ds;
  Normalization params;
  for (const auto j : ds.regular_columns()) {
    const auto& col = ds.columns[static_cast<std::size_t>(j)];
    if (col.kind != ColumnKind::numeric) continue;
    const double mean = ds.values.col(j).mean();
    const double sd = std::sqrt((ds.values.col(j).array() - mean).square().mean());
    if (sd > 0.0) {
      out.values.col(j) = (ds.values.col(j).array() - mean) / sd;
    } else {
      out.values.col(j).setZero();
    }
    params.columns.push_back(col.name);
    params.means.push_back(mean);
    params.stddevs.push_back(sd);
  }
  out.normalization = std::move(params);
  out.provenance.steps.emplace_back("normalize: z-score (population sd)");
  return out;
}

Dataset dataset_from_matrix(std::string name, const Eigen::MatrixXd& data, const std::string& prefix) {
  Dataset ds;
  ds.name = std::move(name);
  ds.values = data;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    ds.columns.push_back(Column{prefix + "_" + std::to_string(j + 1), ColumnKind::numeric, ColumnRole::regular, {}});
  }
  ds.provenance.path = "<derived>";
  return ds;
}

std::string Condition::describe() const {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Always>) {
          return t.value ? "always" : "never";
        } else if constexpr (std::is_same_v<T, Attribute>) {
          return t.column + " " + std::string(op_symbol(t.op)) + " " + t.value;
        } else {
          return "non-noise";
        }
      },
      test);
}

Dataset filter_examples(const Dataset& ds, const Condition& condition) {
  std::vector<Eigen::Index> keep;
  if (const auto* a = std::get_if<Condition::Always>(&condition.test)) {
    if (a->value)
      for (Eigen::Index i = 0; i < ds.rows(); ++i) keep.push_back(i);
  } else if (const auto* attr = std::get_if<Condition::Attribute>(&condition.test)) {
    const Eigen::Index j = ds.column_index(attr->column);
    const auto& col = ds.columns[static_cast<std::size_t>(j)];
    if (col.kind == ColumnKind::numeric) {
      const auto rhs = parse_number(attr->value);
      if (!rhs) throw InvalidConfigError("filter: '" + attr->value + "' is not a number for column '" + col.name + "'");
      for (Eigen::Index i = 0; i < ds.rows(); ++i)
        if (compare(ds.values(i, j), attr->op, *rhs)) keep.push_back(i);
    } else {
      if (attr->op != CompareOp::eq && attr->op != CompareOp::ne) {
        throw InvalidConfigError("filter: nominal column '" + col.name + "' supports only == and !=");
      }
      for (Eigen::Index i = 0; i < ds.rows(); ++i) {
        const auto& level = col.levels[static_cast<std::size_t>(ds.values(i, j))];
        if (compare(level, attr->op, attr->value)) keep.push_back(i);
      }
    }
  } else {
    const auto& labels = std::get<Condition::NonNoise>(condition.test).labels;
    if (static_cast<Eigen::Index>(labels.size()) != ds.rows()) {
      throw InvalidConfigError("filter: cluster assignment has " + std::to_string(labels.size()) +
                               " labels but the dataset has " + std::to_string(ds.rows()) + " rows");
    }
    for (Eigen::Index i = 0; i < ds.rows(); ++i)
      if (labels[static_cast<std::size_t>(i)] != ClusterAssignment::kNoise) keep.push_back(i);
  }

  Dataset out;
  out.name = ds.name;
  out.columns = ds.columns;
  out.provenance = ds.provenance;
  out.normalization = ds.normalization;
  out.provenance.steps.push_back("filter: " + condition.describe());
  out.values.resize(static_cast<Eigen::Index>(keep.size()), ds.values.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.values.row(static_cast<Eigen::Index>(r)) = ds.values.row(keep[r]);
  return out;
}

}  // namespace dimred
