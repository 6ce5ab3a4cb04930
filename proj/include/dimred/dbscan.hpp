#pragma once

// DBSCAN over rows that mix numeric and nominal attributes. Nominal values
// are carried as integer codes in the same matrix; the distance counts a
// mismatch as 1 inside the Euclidean sum.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dimred/errors.hpp"
#include "dimred/matrix_core.hpp"

namespace dimred {

enum class ColumnKind { numeric, nominal };

struct DistanceSchema {
  std::vector<ColumnKind> kinds;

  static DistanceSchema all_numeric(Index columns) {
    return DistanceSchema{std::vector<ColumnKind>(static_cast<std::size_t>(columns), ColumnKind::numeric)};
  }
  Index size() const { return static_cast<Index>(kinds.size()); }
};

enum class PointRole : std::uint8_t { core, border, noise };

struct ClusterAssignment {
  static constexpr int kNoise = -1;

  std::vector<int> labels;  // 0..C-1, kNoise for noise
  std::vector<PointRole> roles;
  double eps = 0.0;
  Index min_pts = 0;
};

/// sqrt( sum over numeric (a_i - b_i)^2 + count of nominal mismatches )
template <class A, class B>
typename A::Scalar mixed_euclidean(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                                   const DistanceSchema& schema) {
  using Scalar = typename A::Scalar;
  if (a.size() != schema.size() || b.size() != schema.size()) {
    throw InvalidInputError("mixed_euclidean: row length does not match the distance schema (" +
                            std::to_string(schema.size()) + " columns)");
  }
  Scalar sum(0);
  for (Index i = 0; i < schema.size(); ++i) {
    if (schema.kinds[static_cast<std::size_t>(i)] == ColumnKind::numeric) {
      const Scalar d = a(i) - b(i);
      sum += d * d;
    } else if (a(i) != b(i)) {
      sum += Scalar(1);
    }
  }
  return std::sqrt(sum);
}

/// Classic DBSCAN. Neighbourhoods are closed balls (distance <= eps) that
/// include the query point. Rows are scanned in order, and a border point
/// reachable from several clusters keeps the first cluster that reaches it.
template <class Derived>
ClusterAssignment dbscan(const Eigen::MatrixBase<Derived>& input, double eps, Index min_pts,
                         const DistanceSchema& schema) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> data = input;
  if (!(eps > 0.0)) throw InvalidConfigError("dbscan: eps must be > 0, got " + std::to_string(eps));
  if (min_pts < 1) throw InvalidConfigError("dbscan: minPts must be >= 1, got " + std::to_string(min_pts));
  if (data.rows() == 0) throw InvalidInputError("dbscan: empty data");
  if (!data.allFinite()) throw InvalidInputError("dbscan: data contains NaN or Inf");
  if (data.cols() != schema.size()) {
    throw InvalidInputError("dbscan: data has " + std::to_string(data.cols()) + " columns but the schema declares " +
                            std::to_string(schema.size()));
  }

  constexpr int kUnvisited = -2;
  const Index n = data.rows();
  const Scalar radius = static_cast<Scalar>(eps);

  ClusterAssignment out;
  out.eps = eps;
  out.min_pts = min_pts;
  out.labels.assign(static_cast<std::size_t>(n), kUnvisited);
  out.roles.assign(static_cast<std::size_t>(n), PointRole::noise);

  std::vector<Index> neighbours;
  auto region = [&](Index p) {
    neighbours.clear();
    for (Index q = 0; q < n; ++q) {
      if (mixed_euclidean(data.row(p), data.row(q), schema) <= radius) neighbours.push_back(q);
    }
  };

  int cluster = 0;
  std::vector<Index> frontier;
  for (Index p = 0; p < n; ++p) {
    auto& label = out.labels[static_cast<std::size_t>(p)];
    if (label != kUnvisited) continue;
    region(p);
    if (static_cast<Index>(neighbours.size()) < min_pts) {
      label = ClusterAssignment::kNoise;
      continue;
    }
    label = cluster;
    out.roles[static_cast<std::size_t>(p)] = PointRole::core;
    frontier.assign(neighbours.begin(), neighbours.end());

    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const auto q = static_cast<std::size_t>(frontier[head]);
      if (out.labels[q] == ClusterAssignment::kNoise) {
        out.labels[q] = cluster;
        out.roles[q] = PointRole::border;
        continue;
      }
      if (out.labels[q] != kUnvisited) continue;
      out.labels[q] = cluster;
      region(static_cast<Index>(q));
      if (static_cast<Index>(neighbours.size()) >= min_pts) {
        out.roles[q] = PointRole::core;
        frontier.insert(frontier.end(), neighbours.begin(), neighbours.end());
      } else {
        out.roles[q] = PointRole::border;
      }
    }
    ++cluster;
  }
  return out;
}

/// performance-1: number of distinct non-noise labels.
inline std::size_t cluster_count(const ClusterAssignment& assignment) {
  std::set<int> ids;
  for (const int l : assignment.labels) {
    if (l != ClusterAssignment::kNoise) ids.insert(l);
  }
  return ids.size();
}

inline std::size_t noise_count(const ClusterAssignment& assignment) {
  std::size_t count = 0;
  for (const int l : assignment.labels) count += l == ClusterAssignment::kNoise ? 1 : 0;
  return count;
}

}  // namespace dimred
