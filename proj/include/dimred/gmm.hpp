#pragma once

// Diagonal-covariance Gaussian mixture fitted by expectation maximization,
// each run started from a seeded k-means solution. The best of several
// independent runs (highest final log-likelihood, lowest run index on ties)
// is returned.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dimred/errors.hpp"
#include "dimred/matrix_core.hpp"

namespace dimred {

struct EmOptions {
  Index k = 2;
  int max_runs = 5;
  int max_steps = 100;
  double quality = 1e-10;  // stop once |delta log-likelihood| < quality
  double variance_floor = 1e-9;
  std::uint64_t seed = 0;
};

template <class Scalar>
struct EmRun {
  std::uint64_t seed = 0;
  std::vector<Scalar> log_likelihood;  // entry 0 is the k-means start
  std::vector<int> reset_steps;        // steps where a collapsed component was re-seeded
  bool converged = false;

  Scalar final_log_likelihood() const { return log_likelihood.back(); }
};

template <class Scalar>
struct MixtureModel {
  Vector<Scalar> weights;    // k, sum to 1
  Matrix<Scalar> means;      // k x dim
  Matrix<Scalar> variances;  // k x dim, each >= variance floor
  std::vector<EmRun<Scalar>> runs;
  Index chosen_run = 0;
  Scalar mean_log_likelihood = Scalar(0);  // performance-2

  Index k() const { return weights.size(); }
  Index dim() const { return means.cols(); }
};

/// splitmix64 finaliser; maps (base seed, stream) to an independent seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace detail {

template <class Scalar, class Derived>
Matrix<Scalar> component_log_densities(const MixtureModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  const Scalar log_two_pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  Matrix<Scalar> out(x.rows(), m.k());
  for (Index c = 0; c < m.k(); ++c) {
    const RowVector<Scalar> inv_var = m.variances.row(c).cwiseInverse();
    const Scalar norm = -Scalar(0.5) * (Scalar(m.dim()) * log_two_pi + m.variances.row(c).array().log().sum());
    const Scalar log_w = std::log(m.weights(c));
    for (Index i = 0; i < x.rows(); ++i) {
      const Scalar maha = ((x.row(i) - m.means.row(c)).array().square() * inv_var.array()).sum();
      out(i, c) = log_w + norm - Scalar(0.5) * maha;
    }
  }
  return out;
}

// Normalises each row of log-joint densities in place into responsibilities
// and returns the total log-likelihood.
template <class Scalar>
Scalar normalise_rows(Matrix<Scalar>& log_joint) {
  Scalar total(0);
  for (Index i = 0; i < log_joint.rows(); ++i) {
    const Scalar peak = log_joint.row(i).maxCoeff();
    const Scalar lse = peak + std::log((log_joint.row(i).array() - peak).exp().sum());
    log_joint.row(i) = (log_joint.row(i).array() - lse).exp().matrix();
    total += lse;
  }
  return total;
}

template <class Scalar, class Derived>
void maximise(MixtureModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x, const Matrix<Scalar>& resp,
              Scalar floor) {
  const Scalar n = static_cast<Scalar>(x.rows());
  for (Index c = 0; c < m.k(); ++c) {
    const Scalar nk = resp.col(c).sum();
    m.weights(c) = nk / n;
    if (nk <= Scalar(0)) continue;
    m.means.row(c) = (resp.col(c).transpose() * x) / nk;
    const Matrix<Scalar> diff = x.rowwise() - m.means.row(c);
    m.variances.row(c) = ((resp.col(c).transpose() * diff.array().square().matrix()) / nk).cwiseMax(floor);
  }
  m.weights /= m.weights.sum();
}

}  // namespace detail

/// Lloyd's k-means from k seeded distinct rows (at most 100 iterations),
/// turned into a mixture: means = centroids, variances = per-cluster
/// per-dimension variances (floored), weights = cluster fractions. An empty
/// cluster is re-seeded at the point farthest from its current centroid.
template <class Derived>
MixtureModel<typename Derived::Scalar> kmeans_init(const Eigen::MatrixBase<Derived>& input, Index k,
                                                   std::uint64_t seed, double variance_floor = 1e-9) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  if (k < 1) throw InvalidConfigError("kmeans: k must be >= 1");
  if (k > x.rows()) {
    throw InvalidConfigError("kmeans: k=" + std::to_string(k) + " exceeds the number of rows (" +
                             std::to_string(x.rows()) + ")");
  }
  detail::require_finite(x, "kmeans");
  const Index n = x.rows();

  // Partial Fisher-Yates for k distinct row indices.
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Matrix<Scalar> centers(k, x.cols());
  for (Index c = 0; c < k; ++c) {
    std::uniform_int_distribution<Index> pick(c, n - 1);
    std::swap(idx[static_cast<std::size_t>(c)], idx[static_cast<std::size_t>(pick(rng))]);
    centers.row(c) = x.row(idx[static_cast<std::size_t>(c)]);
  }

  std::vector<Index> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Matrix<Scalar> sums = Matrix<Scalar>::Zero(k, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / Scalar(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      Index far = 0;
      Scalar far_d = -1;
      for (Index i = 0; i < n; ++i) {
        const Scalar d = (x.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers.row(c) = x.row(far);
      assign[static_cast<std::size_t>(far)] = c;
      changed = true;
    }
    if (!changed) break;
  }

  MixtureModel<Scalar> m;
  m.weights = Vector<Scalar>::Zero(k);
  m.means = centers;
  m.variances = Matrix<Scalar>::Zero(k, x.cols());
  for (Index i = 0; i < n; ++i) {
    const Index c = assign[static_cast<std::size_t>(i)];
    m.weights(c) += Scalar(1);
    m.variances.row(c) += (x.row(i) - centers.row(c)).array().square().matrix();
  }
  for (Index c = 0; c < k; ++c) {
    if (m.weights(c) > 0) m.variances.row(c) /= m.weights(c);
  }
  m.variances = m.variances.cwiseMax(Scalar(variance_floor));
  m.weights /= Scalar(n);
  return m;
}

/// Per-row posterior component probabilities (n x k).
template <class Scalar, class Derived>
Matrix<Scalar> responsibilities(const MixtureModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  Matrix<Scalar> r = detail::component_log_densities(m, x);
  detail::normalise_rows(r);
  return r;
}

template <class Scalar, class Derived>
Scalar log_likelihood(const MixtureModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
  Matrix<Scalar> r = detail::component_log_densities(m, x);
  return detail::normalise_rows(r);
}

template <class Derived>
MixtureModel<typename Derived::Scalar> em_fit(const Eigen::MatrixBase<Derived>& input, const EmOptions& opt) {
  using Scalar = typename Derived::Scalar;
  const Matrix<Scalar> x = input;
  if (opt.k < 1 || opt.k > x.rows()) {
    throw InvalidConfigError("em: k=" + std::to_string(opt.k) + " must lie in [1, rows=" + std::to_string(x.rows()) +
                             "]");
  }
  if (opt.max_runs < 1 || opt.max_steps < 1) throw InvalidConfigError("em: max runs and max steps must be >= 1");
  if (!(opt.quality > 0.0)) throw InvalidConfigError("em: quality must be > 0");
  detail::require_finite(x, "em");

  const Scalar floor = static_cast<Scalar>(opt.variance_floor);
  const RowVector<Scalar> global_var =
      (x.rowwise() - x.colwise().mean()).array().square().colwise().mean().matrix().cwiseMax(floor);

  MixtureModel<Scalar> best;
  std::vector<EmRun<Scalar>> runs;
  for (int r = 0; r < opt.max_runs; ++r) {
    EmRun<Scalar> run;
    run.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(r));
    MixtureModel<Scalar> m = kmeans_init(x, opt.k, run.seed, opt.variance_floor);

    Matrix<Scalar> resp = detail::component_log_densities(m, x);
    Scalar ll = detail::normalise_rows(resp);
    run.log_likelihood.push_back(ll);

    for (int step = 1; step <= opt.max_steps; ++step) {
      detail::maximise(m, x, resp, floor);
      for (Index c = 0; c < m.k(); ++c) {
        if (m.weights(c) >= Scalar(1e-12)) continue;
        // Collapsed component: move it onto the worst-explained row.
        Matrix<Scalar> dens = detail::component_log_densities(m, x);
        Index worst = 0;
        Scalar worst_ll = std::numeric_limits<Scalar>::infinity();
        for (Index i = 0; i < x.rows(); ++i) {
          const Scalar peak = dens.row(i).maxCoeff();
          const Scalar row_ll = peak + std::log((dens.row(i).array() - peak).exp().sum());
          if (row_ll < worst_ll) {
            worst_ll = row_ll;
            worst = i;
          }
        }
        m.means.row(c) = x.row(worst);
        m.variances.row(c) = global_var;
        m.weights(c) = Scalar(1) / Scalar(x.rows());
        m.weights /= m.weights.sum();
        run.reset_steps.push_back(step);
      }
      resp = detail::component_log_densities(m, x);
      const Scalar next = detail::normalise_rows(resp);
      run.log_likelihood.push_back(next);
      const bool done = std::abs(next - ll) < Scalar(opt.quality);
      ll = next;
      if (done) {
        run.converged = true;
        break;
      }
    }

    if (runs.empty() || ll > runs[static_cast<std::size_t>(best.chosen_run)].final_log_likelihood()) {
      best.weights = m.weights;
      best.means = m.means;
      best.variances = m.variances;
      best.chosen_run = r;
    }
    runs.push_back(std::move(run));
  }

  best.runs = std::move(runs);
  best.mean_log_likelihood = best.runs[static_cast<std::size_t>(best.chosen_run)].final_log_likelihood() /
                             static_cast<Scalar>(x.rows());
  return best;
}

}  // namespace dimred
