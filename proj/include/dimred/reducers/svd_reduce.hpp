#pragma once

#include <string>

#include "dimred/matrix_core.hpp"
#include "dimred/reducers/reduced.hpp"

namespace dimred {

/// Top-k right singular directions of the centered training data.
template <class Scalar>
struct SvdModel {
  RowVector<Scalar> mean;
  Matrix<Scalar> axes;             // input dim x k
  Vector<Scalar> singular_values;  // k leading values, high to low

  Index input_dim() const { return axes.rows(); }
  Index retained() const { return axes.cols(); }
};

namespace detail {

template <class Derived>
void require_svd_rank(const Eigen::MatrixBase<Derived>& x, Index k) {
  const Index limit = std::min(x.rows(), x.cols());
  if (k < 1 || k > limit) {
    throw InvalidConfigError("svd_reduce: k must lie in [1, " + std::to_string(limit) + "], got " + std::to_string(k));
  }
}

}  // namespace detail

template <class Derived>
SvdModel<typename Derived::Scalar> svd_fit(const Eigen::MatrixBase<Derived>& input, Index k) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  detail::require_svd_rank(x, k);
  const Centered<Scalar> c = center(x);
  const SvdFactors<Scalar> f = svd(c.data);
  return SvdModel<Scalar>{c.mean, f.V.leftCols(k), f.S.head(k)};
}

template <class Scalar, class Derived>
ReducedDataset<Scalar> svd_transform(const SvdModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  detail::require_columns(x, model.input_dim(), "svd_transform");
  ReducedDataset<Scalar> out;
  out.data = (x.rowwise() - model.mean) * model.axes;
  out.reducer = ReducerKind::svd;
  out.config = "svd k=" + std::to_string(model.retained());
  return out;
}

/// Coordinates U_k diag(S_k) of the centered rows along the k leading right
/// singular vectors.
template <class Derived>
ReducedDataset<typename Derived::Scalar> svd_reduce(const Eigen::MatrixBase<Derived>& input, Index k) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  detail::require_svd_rank(x, k);
  const SvdFactors<Scalar> f = svd(center(x).data);
  ReducedDataset<Scalar> out;
  out.data = f.U.leftCols(k) * f.S.head(k).asDiagonal();
  out.reducer = ReducerKind::svd;
  out.config = "svd k=" + std::to_string(k);
  return out;
}

}  // namespace dimred
