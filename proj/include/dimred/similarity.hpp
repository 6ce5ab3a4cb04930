#pragma once

#include <Eigen/Dense>

#include <string>

#include "dimred/dataset.hpp"

namespace dimred {

/// Pairwise similarity s(i, j) = 1 / (1 + d(i, j)) over the mixed distance.
struct SimilarityMatrix {
  Eigen::MatrixXd values;  // symmetric, unit diagonal
  std::string transform = "1/(1+d)";

  Eigen::Index size() const { return values.rows(); }
  /// Mean over i != j; 1 for a single row.
  double mean_off_diagonal() const;
};

SimilarityMatrix data_to_similarity(const Eigen::MatrixXd& x, const DistanceSchema& schema);
/// Uses the dataset's regular columns and their kinds.
SimilarityMatrix data_to_similarity(const Dataset& ds);

}  // namespace dimred
