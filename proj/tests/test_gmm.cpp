#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "dimred/gmm.hpp"
#include "test_support.hpp"

using namespace dimred;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;

namespace {

MatrixXd blobs(std::mt19937_64& rng, Eigen::Index per, const MatrixXd& centers, double sigma) {
  std::normal_distribution<double> noise(0.0, sigma);
  MatrixXd x(per * centers.rows(), centers.cols());
  for (Eigen::Index b = 0; b < centers.rows(); ++b)
    for (Eigen::Index i = 0; i < per; ++i)
      for (Eigen::Index j = 0; j < centers.cols(); ++j) x(b * per + i, j) = centers(b, j) + noise(rng);
  return x;
}

bool monotone(const EmRun<double>& run) {
  const std::set<int> resets(run.reset_steps.begin(), run.reset_steps.end());
  for (std::size_t s = 1; s < run.log_likelihood.size(); ++s) {
    if (resets.count(static_cast<int>(s))) continue;
    if (run.log_likelihood[s] < run.log_likelihood[s - 1] - 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("kmeans_init with one component is the global mean") {
  std::mt19937_64 rng(1);
  const MatrixXd x = testing::random_matrix(rng, 30, 3);
  const auto m = kmeans_init(x, 1, 5);
  CHECK(m.weights(0) == 1.0);
  CHECK((m.means.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kmeans_init finds well-separated blob centres") {
  std::mt19937_64 rng(2);
  MatrixXd centers(2, 2);
  centers << 0, 0, 8, 8;
  const MatrixXd x = blobs(rng, 100, centers, 0.5);
  const auto m = kmeans_init(x, 2, 9);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const double d0 = (m.means.row(c) - centers.row(0)).norm();
    const double d1 = (m.means.row(c) - centers.row(1)).norm();
    CHECK(std::min(d0, d1) < 0.1);
  }
  CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kmeans_init is deterministic and validates k") {
  std::mt19937_64 rng(3);
  const MatrixXd x = testing::random_matrix(rng, 20, 2);
  const auto a = kmeans_init(x, 3, 42);
  const auto b = kmeans_init(x, 3, 42);
  CHECK(a.means == b.means);
  CHECK(a.variances == b.variances);
  CHECK_THROWS_AS(kmeans_init(x, 21, 1), InvalidConfigError);
}

TEST_CASE("kmeans_init re-seeds empty clusters from duplicate rows") {
  MatrixXd x(6, 1);
  x << 0, 0, 0, 0, 0, 5;
  // Every seed draws two rows; with five identical zeros one cluster often
  // starts empty and must be re-seeded at the far point.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = kmeans_init(x, 2, seed);
    CHECK(m.weights.minCoeff() > 0);
    CHECK((m.variances.array() >= 1e-9).all());
  }
}

TEST_CASE("em on one Gaussian recovers the sample statistics") {
  std::mt19937_64 rng(4);
  MatrixXd centers(1, 2);
  centers << 3, -1;
  const MatrixXd x = blobs(rng, 400, centers, 2.0);
  EmOptions opt;
  opt.k = 1;
  const auto m = em_fit(x, opt);
  const RowVectorXd mean = x.colwise().mean();
  const RowVectorXd var = (x.rowwise() - mean).array().square().colwise().mean();
  const double se_mean = 2.0 / std::sqrt(400.0);
  CHECK((m.means.row(0) - mean).cwiseAbs().maxCoeff() < 3 * se_mean);
  CHECK((m.variances.row(0) - var).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("em separates two blobs with the canonical parameters") {
  std::mt19937_64 rng(5);
  MatrixXd centers(2, 3);
  centers << 0, 0, 0, 6, 6, 6;
  const MatrixXd x = blobs(rng, 150, centers, 1.0);
  EmOptions opt;  // k = 2, 5 runs, 100 steps, quality 1e-10
  opt.seed = 17;
  const auto m = em_fit(x, opt);
  const MatrixXd r = responsibilities(m, x);
  for (Eigen::Index b = 0; b < 2; ++b) {
    Eigen::Index agree0 = 0;
    for (Eigen::Index i = 0; i < 150; ++i) agree0 += r(b * 150 + i, 0) > 0.5 ? 1 : 0;
    const Eigen::Index majority = std::max(agree0, 150 - agree0);
    CHECK(majority >= 149);  // >= 99%
  }
  CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.runs.size() == 5);
}

TEST_CASE("em traces are monotone and the best run is selected") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd x = testing::random_matrix(rng, 60, 3) + testing::random_matrix(rng, 60, 3).cwiseAbs2();
    EmOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto m = em_fit(x, opt);
    for (const auto& run : m.runs) CHECK(monotone(run));
    const auto& chosen = m.runs[static_cast<std::size_t>(m.chosen_run)];
    for (const auto& run : m.runs) CHECK(chosen.final_log_likelihood() >= run.final_log_likelihood());
    CHECK(m.mean_log_likelihood == doctest::Approx(log_likelihood(m, x) / 60.0).epsilon(1e-9));
    CHECK((m.variances.array() >= opt.variance_floor).all());
  }
}

TEST_CASE("em is deterministic for a seed") {
  std::mt19937_64 rng(7);
  const MatrixXd x = testing::random_matrix(rng, 40, 2);
  EmOptions opt;
  opt.seed = 3;
  const auto a = em_fit(x, opt);
  const auto b = em_fit(x, opt);
  CHECK(a.means == b.means);
  CHECK(a.variances == b.variances);
  CHECK(a.chosen_run == b.chosen_run);
}

TEST_CASE("em config validation") {
  const MatrixXd x = MatrixXd::Ones(3, 2);
  EmOptions opt;
  opt.k = 4;
  CHECK_THROWS_AS(em_fit(x, opt), InvalidConfigError);
  opt.k = 2;
  opt.quality = 0;
  CHECK_THROWS_AS(em_fit(x, opt), InvalidConfigError);
  opt.quality = 1e-10;
  opt.max_runs = 0;
  CHECK_THROWS_AS(em_fit(x, opt), InvalidConfigError);
}

TEST_CASE("em tolerates duplicated points through the variance floor") {
  MatrixXd x(20, 2);
  for (Eigen::Index i = 0; i < 20; ++i) {
    x(i, 0) = i < 10 ? 0.0 : 3.0;
    x(i, 1) = i < 10 ? 1.0 : 2.0;
  }
  const auto m = em_fit(x, EmOptions{});
  CHECK(std::isfinite(m.mean_log_likelihood));
  CHECK((m.variances.array() >= 1e-9).all());
}
