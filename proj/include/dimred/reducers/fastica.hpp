#pragma once

// FastICA, symmetric (all components at once) variant.
//
// Data is centered and whitened with the eigendecomposition of its
// covariance (population convention, E{.} is the sample mean over rows).
// In whitened space z the unmixing matrix W is refined by the approximate
// Newton step
//
//   W+ = W + diag(a_i) [diag(b_i) + E{g(y) y^T}] W,   y = W z
//   b_i = -E{y_i g(y_i)},   a_i = -1 / (b_i + E{g'(y_i)})
//
// followed by symmetric decorrelation, until every row of W stops turning:
// max_i |1 - |<w_i+, w_i>|| < tol.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "dimred/matrix_core.hpp"
#include "dimred/reducers/reduced.hpp"

namespace dimred {

enum class Nonlinearity { tanh, cube };

inline std::string_view to_string(Nonlinearity g) { return g == Nonlinearity::tanh ? "tanh" : "cube"; }

inline Nonlinearity nonlinearity_from_string(std::string_view name) {
  if (name == "tanh") return Nonlinearity::tanh;
  if (name == "cube") return Nonlinearity::cube;
  throw InvalidConfigError("unknown FastICA nonlinearity '" + std::string(name) + "'");
}

template <class Scalar>
struct IcaOptions {
  std::optional<Index> components;  // defaults to the input dimension
  Nonlinearity nonlinearity = Nonlinearity::tanh;
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 0;
  std::optional<Matrix<Scalar>> initial_unmixing;  // replaces the seeded random start
};

template <class Scalar>
struct IcaModel {
  RowVector<Scalar> mean;
  Matrix<Scalar> whitening;  // components x input dim
  Matrix<Scalar> unmixing;   // components x components, orthogonal
  Nonlinearity nonlinearity = Nonlinearity::tanh;
  int iterations = 0;
  bool converged = false;

  Index input_dim() const { return whitening.cols(); }
  Index components() const { return unmixing.rows(); }
};

namespace detail {

template <class Scalar>
struct Contrast {
  Matrix<Scalar> g;
  Matrix<Scalar> g_prime;
};

template <class Scalar>
Contrast<Scalar> apply_contrast(const Matrix<Scalar>& y, Nonlinearity kind) {
  Contrast<Scalar> out;
  if (kind == Nonlinearity::tanh) {
    out.g = y.array().tanh().matrix();
    out.g_prime = (Scalar(1) - out.g.array().square()).matrix();
  } else {
    out.g = y.array().cube().matrix();
    out.g_prime = (Scalar(3) * y.array().square()).matrix();
  }
  return out;
}

}  // namespace detail

template <class Derived>
IcaModel<typename Derived::Scalar> fastica_fit(const Eigen::MatrixBase<Derived>& input,
                                                const IcaOptions<typename Derived::Scalar>& opt) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  if (x.rows() < 2) throw DegenerateInputError("fastica: need at least 2 rows");
  detail::require_finite(x, "fastica");
  const Index dim = x.cols();
  const Index comps = opt.components.value_or(dim);
  if (comps < 1 || comps > dim) {
    throw InvalidConfigError("fastica: n_components must lie in [1, " + std::to_string(dim) + "], got " +
                             std::to_string(comps));
  }
  if (!(opt.tol > 0.0)) throw InvalidConfigError("fastica: tol must be > 0");
  if (opt.max_iter < 1) throw InvalidConfigError("fastica: max_iter must be >= 1");

  IcaModel<Scalar> model;
  model.nonlinearity = opt.nonlinearity;

  const Centered<Scalar> c = center(x);
  model.mean = c.mean;
  const Scalar n = static_cast<Scalar>(x.rows());
  const EigenPairs<Scalar> eig = sym_eig(c.data.transpose() * c.data / n);
  // Numerical rank, relative to the largest variance.
  if (!(eig.values(0) > Scalar(0)) || eig.values(comps - 1) <= Scalar(1e-12) * eig.values(0)) {
    throw DegenerateInputError("fastica: covariance rank is below n_components=" + std::to_string(comps));
  }
  model.whitening = eig.values.head(comps).cwiseSqrt().cwiseInverse().asDiagonal() *
                    eig.vectors.leftCols(comps).transpose();
  const Matrix<Scalar> z = c.data * model.whitening.transpose();  // rows are whitened samples

  Matrix<Scalar> w;
  if (opt.initial_unmixing) {
    if (opt.initial_unmixing->rows() != comps || opt.initial_unmixing->cols() != comps) {
      throw InvalidConfigError("fastica: initial unmixing matrix must be n_components square");
    }
    w = orthogonalize(*opt.initial_unmixing);
  } else {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    w.resize(comps, comps);
    for (Index i = 0; i < comps; ++i)
      for (Index j = 0; j < comps; ++j) w(i, j) = static_cast<Scalar>(normal(rng));
    w = orthogonalize(w);
  }

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    const Matrix<Scalar> y = z * w.transpose();
    const detail::Contrast<Scalar> gy = detail::apply_contrast(y, opt.nonlinearity);

    const Vector<Scalar> beta = -(y.array() * gy.g.array()).colwise().mean().transpose();
    const Vector<Scalar> mean_gp = gy.g_prime.colwise().mean().transpose();
    Vector<Scalar> alpha(comps);
    for (Index i = 0; i < comps; ++i) {
      Scalar denom = beta(i) + mean_gp(i);
      if (denom == Scalar(0)) denom = std::numeric_limits<Scalar>::epsilon();
      alpha(i) = Scalar(-1) / denom;
    }

    Matrix<Scalar> step = gy.g.transpose() * y / n;
    step.diagonal() += beta;
    const Matrix<Scalar> w_new = orthogonalize(w + alpha.asDiagonal() * step * w);

    const Scalar change = (Scalar(1) - (w_new.array() * w.array()).rowwise().sum().abs()).abs().maxCoeff();
    w = w_new;
    model.iterations = iter;
    if (change < Scalar(opt.tol)) {
      model.converged = true;
      break;
    }
  }
  model.unmixing = w;
  return model;
}

/// y = W K (x - mean) for every row.
template <class Scalar, class Derived>
ReducedDataset<Scalar> fastica_transform(const IcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  detail::require_columns(x, model.input_dim(), "fastica_transform");
  ReducedDataset<Scalar> out;
  out.data = (x.rowwise() - model.mean) * model.whitening.transpose() * model.unmixing.transpose();
  out.reducer = ReducerKind::fastica;
  out.config = "fastica components=" + std::to_string(model.components()) + " g=" +
               std::string(to_string(model.nonlinearity));
  return out;
}

}  // namespace dimred
