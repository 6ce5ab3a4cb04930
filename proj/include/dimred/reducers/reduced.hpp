#pragma once

#include <string>
#include <string_view>

#include "dimred/errors.hpp"
#include "dimred/matrix_core.hpp"

namespace dimred {

enum class ReducerKind { none, svd, pca, som, fastica };

inline std::string_view to_string(ReducerKind kind) {
  switch (kind) {
    case ReducerKind::none: return "none";
    case ReducerKind::svd: return "svd";
    case ReducerKind::pca: return "pca";
    case ReducerKind::som: return "som";
    case ReducerKind::fastica: return "fastica";
  }
  return "none";
}

inline ReducerKind reducer_from_string(std::string_view name) {
  if (name == "none") return ReducerKind::none;
  if (name == "svd") return ReducerKind::svd;
  if (name == "pca") return ReducerKind::pca;
  if (name == "som") return ReducerKind::som;
  if (name == "fastica") return ReducerKind::fastica;
  throw InvalidConfigError("unknown reducer '" + std::string(name) + "' (expected svd, pca, som, fastica or none)");
}

/// Rows of a dataset expressed in a reducer's output coordinates.
template <class Scalar>
struct ReducedDataset {
  Matrix<Scalar> data;
  ReducerKind reducer = ReducerKind::none;
  std::string source;  // dataset name the rows came from
  std::string config;  // short description of the reducer settings

  Index k() const { return data.cols(); }
  Index rows() const { return data.rows(); }
};

namespace detail {

template <class Derived>
void require_columns(const Eigen::MatrixBase<Derived>& x, Index expected, const char* what) {
  if (x.cols() != expected) {
    throw InvalidInputError(std::string(what) + ": expected " + std::to_string(expected) + " columns, got " +
                            std::to_string(x.cols()));
  }
}

}  // namespace detail

}  // namespace dimred
