#pragma once

// Dense factorizations shared by every reducer: one-sided Jacobi SVD,
// cyclic Jacobi symmetric eigendecomposition, column centering and
// symmetric decorrelation. Everything is templated on the scalar type and
// accepts any Eigen expression.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dimred/errors.hpp"

namespace dimred {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

/// X = U * diag(S) * V^T with r = min(rows, cols) columns in U and V.
/// S is non-negative and sorted high to low.
template <class Scalar>
struct SvdFactors {
  Matrix<Scalar> U;
  Vector<Scalar> S;
  Matrix<Scalar> V;
};

/// Eigenvalues sorted high to low; column i of `vectors` pairs with values(i).
template <class Scalar>
struct EigenPairs {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;
};

template <class Scalar>
struct Centered {
  Matrix<Scalar> data;
  RowVector<Scalar> mean;
};

namespace detail {

template <class Scalar>
Scalar rotation_tolerance() {
  return std::max<Scalar>(Scalar(1e-12), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
}

inline long sweep_cap(Index n) { return std::max<long>(1, 100L * static_cast<long>(n) * static_cast<long>(n)); }

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const char* what) {
  if (x.size() == 0) throw InvalidInputError(std::string(what) + ": empty matrix");
  if (!x.allFinite()) throw InvalidInputError(std::string(what) + ": matrix contains NaN or Inf");
}

// Flip column k of `primary` (and of `follower`, when given) so the
// largest-magnitude entry of primary.col(k) is positive. First index wins ties.
template <class Scalar>
void fix_signs(Matrix<Scalar>& primary, Matrix<Scalar>* follower) {
  for (Index k = 0; k < primary.cols(); ++k) {
    Index arg = 0;
    primary.col(k).cwiseAbs().maxCoeff(&arg);
    if (primary(arg, k) < Scalar(0)) {
      primary.col(k) = -primary.col(k);
      if (follower != nullptr) follower->col(k) = -follower->col(k);
    }
  }
}

template <class Scalar>
std::vector<Index> descending_order(const Vector<Scalar>& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

// Fill columns [first, cols) of q with unit vectors orthogonal to every
// earlier column, drawing candidates from the standard basis.
template <class Scalar>
void complete_orthonormal_basis(Matrix<Scalar>& q, Index first) {
  const Index m = q.rows();
  Index filled = first;
  for (Index e = 0; e < m && filled < q.cols(); ++e) {
    Vector<Scalar> cand = Vector<Scalar>::Unit(m, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < filled; ++j) cand -= q.col(j).dot(cand) * q.col(j);
    }
    const Scalar norm = cand.norm();
    if (norm > Scalar(0.5)) {
      q.col(filled++) = cand / norm;
    }
  }
}

// Hestenes one-sided Jacobi on a matrix with rows >= cols.
template <class Scalar>
SvdFactors<Scalar> one_sided_jacobi(Matrix<Scalar> a) {
  using std::abs;
  using std::sqrt;
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);

  const Scalar tol = rotation_tolerance<Scalar>();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar negligible = (eps * a.norm()) * (eps * a.norm());
  const long cap = sweep_cap(n);

  bool converged = false;
  for (long sweep = 0; sweep < cap && !converged; ++sweep) {
    converged = true;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar alpha = a.col(p).squaredNorm();
        const Scalar beta = a.col(q).squaredNorm();
        if (std::min(alpha, beta) <= negligible) continue;
        const Scalar gamma = a.col(p).dot(a.col(q));
        if (abs(gamma) <= tol * sqrt(alpha) * sqrt(beta)) continue;
        converged = false;

        const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
        const Scalar t = (zeta >= Scalar(0) ? Scalar(1) : Scalar(-1)) / (abs(zeta) + std::hypot(Scalar(1), zeta));
        const Scalar c = Scalar(1) / std::hypot(Scalar(1), t);
        const Scalar s = c * t;

        const Vector<Scalar> ap = a.col(p);
        a.col(p) = c * ap - s * a.col(q);
        a.col(q) = s * ap + c * a.col(q);
        const Vector<Scalar> vp = v.col(p);
        v.col(p) = c * vp - s * v.col(q);
        v.col(q) = s * vp + c * v.col(q);
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("svd: one-sided Jacobi did not converge within " + std::to_string(cap) + " sweeps");
  }

  Vector<Scalar> norms = a.colwise().norm().transpose();
  const auto order = descending_order<Scalar>(norms);
  const Scalar largest = norms.size() > 0 ? norms(order.front()) : Scalar(0);
  const Scalar zero_cut = static_cast<Scalar>(std::max(m, n)) * eps * largest;

  SvdFactors<Scalar> out;
  out.U = Matrix<Scalar>::Zero(m, n);
  out.S = Vector<Scalar>::Zero(n);
  out.V = Matrix<Scalar>(n, n);
  Index rank = 0;
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.V.col(k) = v.col(src);
    if (norms(src) > zero_cut && norms(src) > Scalar(0)) {
      out.S(k) = norms(src);
      out.U.col(k) = a.col(src) / norms(src);
      rank = k + 1;
    }
  }
  complete_orthonormal_basis(out.U, rank);
  fix_signs(out.V, &out.U);
  return out;
}

}  // namespace detail

/// Singular value decomposition by one-sided Jacobi rotations.
///
/// Singular vectors are sign-fixed so the largest-magnitude entry of each
/// right singular vector is positive (the left vector flips with it).
/// Singular values below max(m, n) * eps * s_max are reported as exact zeros
/// and their left vectors complete an orthonormal basis.
template <class Derived>
SvdFactors<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  detail::require_finite(x, "svd");
  if (x.rows() >= x.cols()) return detail::one_sided_jacobi<Scalar>(x);

  SvdFactors<Scalar> t = detail::one_sided_jacobi<Scalar>(x.transpose());
  SvdFactors<Scalar> out{std::move(t.V), std::move(t.S), std::move(t.U)};
  detail::fix_signs(out.V, &out.U);
  return out;
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvectors are sign-fixed (largest-magnitude entry positive).
template <class Derived>
EigenPairs<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& expr) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  const Matrix<Scalar> input = expr;
  detail::require_finite(input, "sym_eig");
  if (input.rows() != input.cols()) throw InvalidInputError("sym_eig: matrix is not square");
  const Scalar norm = input.norm();
  if ((input - input.transpose()).norm() > Scalar(1e-10) * std::max(Scalar(1), norm)) {
    throw InvalidInputError("sym_eig: matrix is not symmetric");
  }

  const Index n = input.rows();
  Matrix<Scalar> a = (input + input.transpose()) / Scalar(2);
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);
  const Scalar threshold = static_cast<Scalar>(n) * std::numeric_limits<Scalar>::epsilon() * norm;
  const long cap = detail::sweep_cap(n);

  bool converged = false;
  for (long sweep = 0; sweep < cap && !converged; ++sweep) {
    converged = true;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (abs(apq) <= threshold) continue;
        converged = false;

        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) / (abs(theta) + std::hypot(Scalar(1), theta));
        const Scalar c = Scalar(1) / std::hypot(Scalar(1), t);
        const Scalar s = c * t;

        const Vector<Scalar> cp = a.col(p);
        a.col(p) = c * cp - s * a.col(q);
        a.col(q) = s * cp + c * a.col(q);
        const RowVector<Scalar> rp = a.row(p);
        a.row(p) = c * rp - s * a.row(q);
        a.row(q) = s * rp + c * a.row(q);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);

        const Vector<Scalar> vp = v.col(p);
        v.col(p) = c * vp - s * v.col(q);
        v.col(q) = s * vp + c * v.col(q);
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("sym_eig: Jacobi did not converge within " + std::to_string(cap) + " sweeps");
  }

  const Vector<Scalar> diag = a.diagonal();
  const auto order = detail::descending_order<Scalar>(diag);
  EigenPairs<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = diag(src);
    out.vectors.col(k) = v.col(src);
  }
  detail::fix_signs<Scalar>(out.vectors, nullptr);
  return out;
}

/// Subtract the column means.
template <class Derived>
Centered<typename Derived::Scalar> center(const Eigen::MatrixBase<Derived>& expr) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = expr;
  if (x.size() == 0) throw InvalidInputError("center: empty matrix");
  Centered<Scalar> out;
  out.mean = x.colwise().mean();
  out.data = x.rowwise() - out.mean;
  return out;
}

/// Symmetric decorrelation (W W^T)^(-1/2) W, so the rows of the result are
/// orthonormal and span the same space as the rows of W.
template <class Derived>
Matrix<typename Derived::Scalar> orthogonalize(const Eigen::MatrixBase<Derived>& expr) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> w = expr;
  detail::require_finite(w, "orthogonalize");
  if (w.rows() != w.cols()) throw InvalidInputError("orthogonalize: matrix is not square");
  const Matrix<Scalar> gram = w * w.transpose();
  const EigenPairs<Scalar> eig = sym_eig((gram + gram.transpose()) / Scalar(2));
  if (eig.values.minCoeff() < Scalar(1e-12)) {
    throw DegenerateInputError("orthogonalize: matrix is rank deficient (smallest eigenvalue of W W^T below 1e-12)");
  }
  const Vector<Scalar> inv_sqrt = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose() * w;
}

}  // namespace dimred
