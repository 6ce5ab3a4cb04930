#pragma once

// Kohonen self-organizing map with sequential (online) training.
//
// Each epoch visits the rows in a seeded random order. For every row the
// best-matching unit (BMU) is the node with the nearest prototype, and every
// node n moves by
//
//   lr(t) * exp(-|grid(n) - grid(BMU)|^2 / (2 radius(t)^2)) * (x - w_n)
//
// lr and radius decay exponentially from their initial values so that they
// reach the floors at t = epochs.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dimred/matrix_core.hpp"
#include "dimred/reducers/reduced.hpp"

namespace dimred {

struct SomOptions {
  Index width = 10;
  Index height = 10;
  int epochs = 100;
  double lr0 = 0.5;
  std::optional<double> radius0;  // defaults to half the larger grid side
  double lr_floor = 0.01;
  double radius_floor = 0.5;
  std::uint64_t seed = 0;

  double initial_radius() const { return radius0.value_or(0.5 * static_cast<double>(std::max(width, height))); }
};

template <class Scalar>
struct SomGrid {
  Index width = 0;
  Index height = 0;
  Matrix<Scalar> codebook;  // (width * height) x input dim, node = row * width + col
  // training_log[0] is the mean quantization error before training,
  // training_log[e] the error after epoch e.
  std::vector<Scalar> training_log;

  Index nodes() const { return codebook.rows(); }
  Index input_dim() const { return codebook.cols(); }
  Index col_of(Index node) const { return node % width; }
  Index row_of(Index node) const { return node / width; }
};

/// Node with the nearest prototype; lowest index wins ties.
template <class Scalar, class Derived>
Index best_matching_unit(const Matrix<Scalar>& codebook, const Eigen::MatrixBase<Derived>& row) {
  Index best = 0;
  Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
  for (Index n = 0; n < codebook.rows(); ++n) {
    const Scalar d2 = (codebook.row(n) - row).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = n;
    }
  }
  return best;
}

template <class Scalar, class Derived>
Scalar quantization_error(const Matrix<Scalar>& codebook, const Eigen::MatrixBase<Derived>& x) {
  Scalar total(0);
  for (Index i = 0; i < x.rows(); ++i) {
    total += (codebook.row(best_matching_unit(codebook, x.row(i))) - x.row(i)).norm();
  }
  return total / Scalar(x.rows());
}

namespace detail {

inline double decay(double start, double floor, int epochs, double t) {
  if (start <= floor || epochs <= 0) return start;
  const double tau = static_cast<double>(epochs) / std::log(start / floor);
  return std::max(floor, start * std::exp(-t / tau));
}

}  // namespace detail

template <class Derived>
SomGrid<typename Derived::Scalar> som_fit(const Eigen::MatrixBase<Derived>& input, const SomOptions& opt) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  if (x.rows() == 0 || x.cols() == 0) throw InvalidInputError("som: empty data");
  detail::require_finite(x, "som");
  if (opt.width < 1 || opt.height < 1 || opt.width * opt.height < 2) {
    throw InvalidConfigError("som: grid must have at least 2 nodes");
  }
  if (opt.epochs < 1) throw InvalidConfigError("som: epochs must be >= 1");
  if (!(opt.lr0 > 0.0 && opt.lr0 <= 1.0)) throw InvalidConfigError("som: lr0 must lie in (0, 1]");
  if (!(opt.initial_radius() >= 0.0)) throw InvalidConfigError("som: radius0 must be >= 0");

  std::mt19937_64 rng(opt.seed);
  const Index nodes = opt.width * opt.height;

  // Uniform initialisation inside the data's bounding box; a constant column
  // gets a unit margin on each side.
  SomGrid<Scalar> grid;
  grid.width = opt.width;
  grid.height = opt.height;
  grid.codebook.resize(nodes, x.cols());
  const RowVector<Scalar> lo = x.colwise().minCoeff();
  const RowVector<Scalar> hi = x.colwise().maxCoeff();
  for (Index j = 0; j < x.cols(); ++j) {
    double a = static_cast<double>(lo(j));
    double b = static_cast<double>(hi(j));
    if (!(b > a)) {
      a -= 1.0;
      b += 1.0;
    }
    std::uniform_real_distribution<double> dist(a, b);
    for (Index n = 0; n < nodes; ++n) grid.codebook(n, j) = static_cast<Scalar>(dist(rng));
  }
  grid.training_log.push_back(quantization_error(grid.codebook, x));

  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  const double radius0 = opt.initial_radius();

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const Scalar lr = static_cast<Scalar>(detail::decay(opt.lr0, opt.lr_floor, opt.epochs, epoch));
    const Scalar radius = static_cast<Scalar>(detail::decay(radius0, opt.radius_floor, opt.epochs, epoch));
    std::shuffle(order.begin(), order.end(), rng);

    for (const Index i : order) {
      const Index bmu = best_matching_unit(grid.codebook, x.row(i));
      const Scalar bc = static_cast<Scalar>(grid.col_of(bmu));
      const Scalar br = static_cast<Scalar>(grid.row_of(bmu));
      for (Index n = 0; n < nodes; ++n) {
        Scalar h;
        if (radius > Scalar(0)) {
          const Scalar dc = static_cast<Scalar>(grid.col_of(n)) - bc;
          const Scalar dr = static_cast<Scalar>(grid.row_of(n)) - br;
          h = std::exp(-(dc * dc + dr * dr) / (Scalar(2) * radius * radius));
        } else {
          h = n == bmu ? Scalar(1) : Scalar(0);
        }
        if (h == Scalar(0)) continue;
        grid.codebook.row(n) += lr * h * (x.row(i) - grid.codebook.row(n));
      }
    }
    grid.training_log.push_back(quantization_error(grid.codebook, x));
  }
  return grid;
}

/// Each row becomes the (column, row) grid coordinates of its BMU.
template <class Scalar, class Derived>
ReducedDataset<Scalar> som_encode(const SomGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& input) {
  const Matrix<Scalar> x = input;
  detail::require_columns(x, grid.input_dim(), "som_encode");
  ReducedDataset<Scalar> out;
  out.data.resize(x.rows(), 2);
  for (Index i = 0; i < x.rows(); ++i) {
    const Index bmu = best_matching_unit(grid.codebook, x.row(i));
    out.data(i, 0) = static_cast<Scalar>(grid.col_of(bmu));
    out.data(i, 1) = static_cast<Scalar>(grid.row_of(bmu));
  }
  out.reducer = ReducerKind::som;
  out.config = "som " + std::to_string(grid.width) + "x" + std::to_string(grid.height);
  return out;
}

}  // namespace dimred
