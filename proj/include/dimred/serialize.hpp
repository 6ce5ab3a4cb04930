#pragma once

// JSON forms for fitted models and pipeline outputs. Matrices are stored as
// {"rows", "cols", "data"} with data in row-major order; doubles are written
// with round-trip precision, so reading back reproduces every bit.

#include <Eigen/Dense>

#include "dimred/dbscan.hpp"
#include "dimred/gmm.hpp"
#include "dimred/reducers/fastica.hpp"
#include "dimred/reducers/pca.hpp"
#include "dimred/reducers/som.hpp"
#include "dimred/reducers/svd_reduce.hpp"
#include "json.hpp"

namespace dimred {

nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PcaModel<double>& m);
nlohmann::json to_json(const SvdModel<double>& m);
nlohmann::json to_json(const SomGrid<double>& m);
nlohmann::json to_json(const IcaModel<double>& m);
nlohmann::json to_json(const MixtureModel<double>& m);
nlohmann::json to_json(const ReducedDataset<double>& r);
nlohmann::json to_json(const ClusterAssignment& a);

/// Each reader checks the "type" tag and throws ParseError on mismatch or
/// malformed input.
PcaModel<double> pca_model_from_json(const nlohmann::json& j);
SvdModel<double> svd_model_from_json(const nlohmann::json& j);
SomGrid<double> som_grid_from_json(const nlohmann::json& j);
IcaModel<double> ica_model_from_json(const nlohmann::json& j);
MixtureModel<double> mixture_model_from_json(const nlohmann::json& j);
ReducedDataset<double> reduced_dataset_from_json(const nlohmann::json& j);
ClusterAssignment assignment_from_json(const nlohmann::json& j);

}  // namespace dimred
