#pragma once

// Principal component analysis on the sample covariance of centered data.
//
//   fit:         covariance C = Xc^T Xc / (n - 1), U = top-d eigenvectors of C
//   encode:      Y = (X - mean) U
//   reconstruct: X_hat = Y U^T + mean
//
// d is either fixed or the smallest count whose cumulative eigenvalue
// fraction reaches a threshold.

#include <string>

#include "dimred/matrix_core.hpp"
#include "dimred/reducers/reduced.hpp"

namespace dimred {

struct PcaCriterion {
  enum class Kind { fixed_count, variance_threshold };
  Kind kind = Kind::variance_threshold;
  Index count = 0;
  double threshold = 0.95;

  static PcaCriterion components(Index k) { return {Kind::fixed_count, k, 0.0}; }
  static PcaCriterion variance(double t) { return {Kind::variance_threshold, 0, t}; }

  std::string describe() const {
    return kind == Kind::fixed_count ? "k=" + std::to_string(count) : "threshold=" + std::to_string(threshold);
  }
};

template <class Scalar>
struct PcaModel {
  Matrix<Scalar> basis;      // input dim x retained dim
  RowVector<Scalar> mean;    // removed before projecting
  Vector<Scalar> eigenvalues;  // every covariance eigenvalue, high to low

  Index input_dim() const { return basis.rows(); }
  Index retained() const { return basis.cols(); }
};

/// Smallest d whose leading eigenvalues carry at least `threshold` of the
/// total variance. All-zero spectra keep one component.
template <class Scalar>
Index retained_for_threshold(const Vector<Scalar>& eigenvalues, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidConfigError("pca: variance threshold must lie in (0, 1], got " + std::to_string(threshold));
  }
  const Scalar total = eigenvalues.sum();
  if (!(total > Scalar(0))) return 1;
  const Scalar target = Scalar(threshold) * total * (Scalar(1) - Scalar(1e-12));
  Scalar running(0);
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    running += eigenvalues(i);
    if (running >= target) return i + 1;
  }
  return eigenvalues.size();
}

template <class Derived>
PcaModel<typename Derived::Scalar> pca_fit(const Eigen::MatrixBase<Derived>& input, const PcaCriterion& criterion) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  if (x.rows() < 2) throw DegenerateInputError("pca: need at least 2 rows to estimate a covariance");
  detail::require_finite(x, "pca");
  if (criterion.kind == PcaCriterion::Kind::fixed_count && (criterion.count < 1 || criterion.count > x.cols())) {
    throw InvalidConfigError("pca: component count must lie in [1, " + std::to_string(x.cols()) + "], got " +
                             std::to_string(criterion.count));
  }
  if (criterion.kind == PcaCriterion::Kind::variance_threshold &&
      !(criterion.threshold > 0.0 && criterion.threshold <= 1.0)) {
    throw InvalidConfigError("pca: variance threshold must lie in (0, 1], got " + std::to_string(criterion.threshold));
  }

  const Centered<Scalar> c = center(x);
  const Matrix<Scalar> cov = c.data.transpose() * c.data / Scalar(x.rows() - 1);
  EigenPairs<Scalar> eig = sym_eig(cov);
  eig.values = eig.values.cwiseMax(Scalar(0));

  const Index d = criterion.kind == PcaCriterion::Kind::fixed_count ? criterion.count
                                                                    : retained_for_threshold(eig.values, criterion.threshold);
  return PcaModel<Scalar>{eig.vectors.leftCols(d), c.mean, eig.values};
}

template <class Scalar, class Derived>
ReducedDataset<Scalar> pca_encode(const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  detail::require_columns(x, model.input_dim(), "pca_encode");
  ReducedDataset<Scalar> out;
  out.data = (x.rowwise() - model.mean) * model.basis;
  out.reducer = ReducerKind::pca;
  out.config = "pca d=" + std::to_string(model.retained());
  return out;
}

template <class Scalar, class Derived>
Matrix<Scalar> pca_reconstruct(const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& y) {
  detail::require_columns(y, model.retained(), "pca_reconstruct");
  return (y * model.basis.transpose()).rowwise() + model.mean;
}

template <class Scalar>
Matrix<Scalar> pca_reconstruct(const PcaModel<Scalar>& model, const ReducedDataset<Scalar>& y) {
  return pca_reconstruct(model, y.data);
}

}  // namespace dimred
