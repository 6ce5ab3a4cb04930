#include "dimred/similarity.hpp"

namespace dimred {

double SimilarityMatrix::mean_off_diagonal() const {
  const Eigen::Index n = size();
  if (n < 2) return 1.0;
  return (values.sum() - values.trace()) / static_cast<double>(n * (n - 1));
}

SimilarityMatrix data_to_similarity(const Eigen::MatrixXd& x, const DistanceSchema& schema) {
  if (x.rows() == 0) throw InvalidInputError("similarity: dataset has no rows");
  SimilarityMatrix s;
  const Eigen::Index n = x.rows();
  s.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = 1.0 / (1.0 + mixed_euclidean(x.row(i), x.row(j), schema));
      s.values(i, j) = v;
      s.values(j, i) = v;
    }
  }
  return s;
}

SimilarityMatrix data_to_similarity(const Dataset& ds) { return data_to_similarity(ds.features(), ds.feature_schema()); }

}  // namespace dimred
