#include "dimred/serialize.hpp"

namespace dimred {

namespace {

using nlohmann::json;

json tagged(const char* type) { return json{{"type", type}}; }

void expect_type(const json& j, const char* type) {
  if (!j.is_object() || j.value("type", std::string()) != type) {
    throw ParseError(std::string("expected a JSON object of type '") + type + "'");
  }
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::RowVectorXd row_from(const json& j) { return vector_from(j).transpose(); }

json role_json(PointRole r) {
  switch (r) {
    case PointRole::core: return "core";
    case PointRole::border: return "border";
    case PointRole::noise: return "noise";
  }
  return "noise";
}

PointRole role_from(const std::string& s) {
  if (s == "core") return PointRole::core;
  if (s == "border") return PointRole::border;
  if (s == "noise") return PointRole::noise;
  throw ParseError("unknown point role '" + s + "'");
}

}  // namespace

json to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
      throw ParseError("matrix: data length does not match rows x cols");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)];
    return m;
  });
}

json to_json(const PcaModel<double>& m) {
  json j = tagged("pca");
  j["basis"] = to_json(m.basis);
  j["mean"] = vector_json(m.mean.transpose());
  j["eigenvalues"] = vector_json(m.eigenvalues);
  return j;
}

PcaModel<double> pca_model_from_json(const json& j) {
  expect_type(j, "pca");
  return guarded("pca", [&] {
    PcaModel<double> m;
    m.basis = matrix_from_json(j.at("basis"));
    m.mean = row_from(j.at("mean"));
    m.eigenvalues = vector_from(j.at("eigenvalues"));
    return m;
  });
}

json to_json(const SvdModel<double>& m) {
  json j = tagged("svd");
  j["mean"] = vector_json(m.mean.transpose());
  j["axes"] = to_json(m.axes);
  j["singular_values"] = vector_json(m.singular_values);
  return j;
}

SvdModel<double> svd_model_from_json(const json& j) {
  expect_type(j, "svd");
  return guarded("svd", [&] {
    SvdModel<double> m;
    m.mean = row_from(j.at("mean"));
    m.axes = matrix_from_json(j.at("axes"));
    m.singular_values = vector_from(j.at("singular_values"));
    return m;
  });
}

json to_json(const SomGrid<double>& m) {
  json j = tagged("som");
  j["width"] = m.width;
  j["height"] = m.height;
  j["codebook"] = to_json(m.codebook);
  j["training_log"] = m.training_log;
  return j;
}

SomGrid<double> som_grid_from_json(const json& j) {
  expect_type(j, "som");
  return guarded("som", [&] {
    SomGrid<double> m;
    m.width = j.at("width").get<Eigen::Index>();
    m.height = j.at("height").get<Eigen::Index>();
    m.codebook = matrix_from_json(j.at("codebook"));
    m.training_log = j.at("training_log").get<std::vector<double>>();
    if (m.width * m.height != m.codebook.rows()) throw ParseError("som: codebook rows do not match the grid");
    return m;
  });
}

json to_json(const IcaModel<double>& m) {
  json j = tagged("fastica");
  j["mean"] = vector_json(m.mean.transpose());
  j["whitening"] = to_json(m.whitening);
  j["unmixing"] = to_json(m.unmixing);
  j["nonlinearity"] = std::string(to_string(m.nonlinearity));
  j["iterations"] = m.iterations;
  j["converged"] = m.converged;
  return j;
}

IcaModel<double> ica_model_from_json(const json& j) {
  expect_type(j, "fastica");
  return guarded("fastica", [&] {
    IcaModel<double> m;
    m.mean = row_from(j.at("mean"));
    m.whitening = matrix_from_json(j.at("whitening"));
    m.unmixing = matrix_from_json(j.at("unmixing"));
    m.nonlinearity = nonlinearity_from_string(j.at("nonlinearity").get<std::string>());
    m.iterations = j.at("iterations").get<int>();
    m.converged = j.at("converged").get<bool>();
    return m;
  });
}

json to_json(const MixtureModel<double>& m) {
  json j = tagged("mixture");
  j["weights"] = vector_json(m.weights);
  j["means"] = to_json(m.means);
  j["variances"] = to_json(m.variances);
  j["chosen_run"] = m.chosen_run;
  j["mean_log_likelihood"] = m.mean_log_likelihood;
  j["runs"] = json::array();
  for (const auto& r : m.runs) {
    j["runs"].push_back({{"seed", r.seed},
                         {"log_likelihood", r.log_likelihood},
                         {"reset_steps", r.reset_steps},
                         {"converged", r.converged}});
  }
  return j;
}

MixtureModel<double> mixture_model_from_json(const json& j) {
  expect_type(j, "mixture");
  return guarded("mixture", [&] {
    MixtureModel<double> m;
    m.weights = vector_from(j.at("weights"));
    m.means = matrix_from_json(j.at("means"));
    m.variances = matrix_from_json(j.at("variances"));
    m.chosen_run = j.at("chosen_run").get<Eigen::Index>();
    m.mean_log_likelihood = j.at("mean_log_likelihood").get<double>();
    for (const auto& r : j.at("runs")) {
      EmRun<double> run;
      run.seed = r.at("seed").get<std::uint64_t>();
      run.log_likelihood = r.at("log_likelihood").get<std::vector<double>>();
      run.reset_steps = r.at("reset_steps").get<std::vector<int>>();
      run.converged = r.at("converged").get<bool>();
      m.runs.push_back(std::move(run));
    }
    return m;
  });
}

json to_json(const ReducedDataset<double>& r) {
  json j = tagged("reduced");
  j["reducer"] = std::string(to_string(r.reducer));
  j["source"] = r.source;
  j["config"] = r.config;
  j["data"] = to_json(r.data);
  return j;
}

ReducedDataset<double> reduced_dataset_from_json(const json& j) {
  expect_type(j, "reduced");
  return guarded("reduced", [&] {
    ReducedDataset<double> r;
    r.reducer = reducer_from_string(j.at("reducer").get<std::string>());
    r.source = j.at("source").get<std::string>();
    r.config = j.at("config").get<std::string>();
    r.data = matrix_from_json(j.at("data"));
    return r;
  });
}

json to_json(const ClusterAssignment& a) {
  json j = tagged("assignment");
  j["eps"] = a.eps;
  j["min_pts"] = a.min_pts;
  j["clusters"] = cluster_count(a);
  j["noise"] = noise_count(a);
  j["labels"] = a.labels;
  j["roles"] = json::array();
  for (const auto r : a.roles) j["roles"].push_back(role_json(r));
  return j;
}

ClusterAssignment assignment_from_json(const json& j) {
  expect_type(j, "assignment");
  return guarded("assignment", [&] {
    ClusterAssignment a;
    a.eps = j.at("eps").get<double>();
    a.min_pts = j.at("min_pts").get<Eigen::Index>();
    a.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& r : j.at("roles")) a.roles.push_back(role_from(r.get<std::string>()));
    if (a.roles.size() != a.labels.size()) throw ParseError("assignment: roles and labels differ in length");
    return a;
  });
}

}  // namespace dimred
