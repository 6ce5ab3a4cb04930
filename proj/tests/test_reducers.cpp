#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dimred/reducers/fastica.hpp"
#include "dimred/reducers/pca.hpp"
#include "dimred/reducers/som.hpp"
#include "dimred/reducers/svd_reduce.hpp"
#include "test_support.hpp"

using namespace dimred;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

MatrixXd sign_align(const MatrixXd& a, const MatrixXd& ref) {
  MatrixXd out = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (a.col(j).dot(ref.col(j)) < 0) out.col(j) = -out.col(j);
  return out;
}

MatrixXd sample_covariance(const MatrixXd& y) {
  const MatrixXd c = y.rowwise() - y.colwise().mean();
  return c.transpose() * c / static_cast<double>(y.rows());
}

// Two Gaussian clouds of `per` points around (0,0) and (10,10).
MatrixXd two_clouds(std::mt19937_64& rng, Eigen::Index per) {
  std::normal_distribution<double> noise(0.0, 0.5);
  MatrixXd x(2 * per, 2);
  for (Eigen::Index i = 0; i < 2 * per; ++i) {
    const double c = i < per ? 0.0 : 10.0;
    x(i, 0) = c + noise(rng);
    x(i, 1) = c + noise(rng);
  }
  return x;
}

}  // namespace

TEST_SUITE("pca") {
  TEST_CASE("rank-1 data on y = x keeps one diagonal component") {
    MatrixXd x(5, 2);
    x << -2, -2, -1, -1, 0, 0, 1, 1, 3, 3;
    const auto m = pca_fit(x, PcaCriterion::variance(0.95));
    REQUIRE(m.retained() == 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(m.basis(0, 0) == doctest::Approx(r).epsilon(1e-12));
    CHECK(m.basis(1, 0) == doctest::Approx(r).epsilon(1e-12));
    CHECK((pca_reconstruct(m, pca_encode(m, x)) - x).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("eigenvalues equal squared singular values of centered data over n-1") {
    std::mt19937_64 rng(50);
    const MatrixXd x = testing::random_matrix(rng, 50, 6);
    const auto m = pca_fit(x, PcaCriterion::components(6));
    const auto f = svd(center(x).data);
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(m.eigenvalues(i) - f.S(i) * f.S(i) / 49.0) < 1e-7);
  }

  TEST_CASE("encode maps the mean to zero and full dimension is lossless") {
    std::mt19937_64 rng(3);
    const MatrixXd x = testing::random_matrix(rng, 20, 4, 2.0);
    const auto m = pca_fit(x, PcaCriterion::components(4));
    CHECK(pca_encode(m, m.mean).data.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pca_reconstruct(m, pca_encode(m, x)) - x).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((pca_reconstruct(m, RowVectorXd::Zero(4)) - m.mean).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("reconstruction residual equals the discarded variance") {
    std::mt19937_64 rng(30);
    const MatrixXd x = testing::random_matrix(rng, 30, 5);
    for (const Eigen::Index d : {Eigen::Index{2}, Eigen::Index{3}}) {
      const auto m = pca_fit(x, PcaCriterion::components(d));
      const MatrixXd xhat = pca_reconstruct(m, pca_encode(m, x));
      double residual = 0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) residual += (x.row(i) - xhat.row(i)).squaredNorm();
      const double oracle = m.eigenvalues.tail(5 - d).sum() * 29.0;
      CHECK(std::abs(residual - oracle) <= 1e-6 * oracle);
      CHECK(std::abs((x - xhat).norm() - std::sqrt(oracle)) <= 1e-6 * std::sqrt(oracle));
      // Projection property.
      const MatrixXd again = pca_reconstruct(m, pca_encode(m, xhat));
      CHECK((again - xhat).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("reconstruction error is non-increasing in d and codes are uncorrelated") {
    std::mt19937_64 rng(8);
    const MatrixXd x = testing::random_matrix(rng, 40, 6) * testing::random_matrix(rng, 6, 6);
    double previous = std::numeric_limits<double>::infinity();
    for (Eigen::Index d = 1; d <= 6; ++d) {
      const auto m = pca_fit(x, PcaCriterion::components(d));
      const auto y = pca_encode(m, x);
      const double err = (x - pca_reconstruct(m, y)).norm();
      CHECK(err <= previous + 1e-12);
      previous = err;
      const MatrixXd cov = sample_covariance(y.data);
      const double scale = cov.diagonal().maxCoeff();
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          if (a != b) CHECK(std::abs(cov(a, b)) <= 1e-8 * scale);
    }
    CHECK(previous <= 1e-8);
  }

  TEST_CASE("threshold rule picks the smallest qualifying count") {
    VectorXd ev(4);
    ev << 5, 3, 1.5, 0.5;  // cumulative fractions .5 .8 .95 1
    CHECK(retained_for_threshold(ev, 0.5) == 1);
    CHECK(retained_for_threshold(ev, 0.85) == 3);
    CHECK(retained_for_threshold(ev, 0.95) == 3);
    CHECK(retained_for_threshold(ev, 0.99) == 4);
    CHECK(retained_for_threshold(ev, 1.0) == 4);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(pca_fit(MatrixXd::Ones(1, 3), PcaCriterion::variance(0.9)), DegenerateInputError);
    CHECK_THROWS_AS(pca_fit(MatrixXd::Random(4, 3), PcaCriterion::variance(0.0)), InvalidConfigError);
    CHECK_THROWS_AS(pca_fit(MatrixXd::Random(4, 3), PcaCriterion::variance(1.5)), InvalidConfigError);
    CHECK_THROWS_AS(pca_fit(MatrixXd::Random(4, 3), PcaCriterion::components(4)), InvalidConfigError);
    const auto m = pca_fit(MatrixXd::Random(6, 3), PcaCriterion::components(2));
    CHECK_THROWS_AS(pca_encode(m, MatrixXd::Random(2, 4)), InvalidInputError);
    CHECK_THROWS_AS(pca_reconstruct(m, MatrixXd::Random(2, 3)), InvalidInputError);
  }

  TEST_CASE("single precision instantiation") {
    Eigen::MatrixXf x(4, 2);
    x << 1, 2, 2, 4.1f, 3, 6, 4, 8.2f;
    const auto m = pca_fit(x, PcaCriterion::variance(0.95f));
    CHECK(m.retained() == 1);
  }
}

TEST_SUITE("svd_reduce") {
  TEST_CASE("full-rank projection is an isometry") {
    std::mt19937_64 rng(12);
    const MatrixXd x = testing::random_matrix(rng, 15, 4);
    const auto y = svd_reduce(x, 4);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.rows(); ++j)
        CHECK(std::abs((x.row(i) - x.row(j)).norm() - (y.data.row(i) - y.data.row(j)).norm()) < 1e-8);
  }

  TEST_CASE("matches PCA encodings on centered data") {
    std::mt19937_64 rng(40);
    const MatrixXd x = testing::random_matrix(rng, 40, 6);
    const auto s = svd_reduce(x, 2);
    const auto p = pca_encode(pca_fit(x, PcaCriterion::components(2)), x);
    CHECK((sign_align(s.data, p.data) - p.data).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(s.k() == 2);
    CHECK(s.rows() == 40);
  }

  TEST_CASE("svd_fit/svd_transform reproduce the training coordinates") {
    std::mt19937_64 rng(41);
    const MatrixXd x = testing::random_matrix(rng, 25, 5);
    const auto model = svd_fit(x, 3);
    CHECK((svd_transform(model, x).data - svd_reduce(x, 3).data).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("k out of range") {
    CHECK_THROWS_AS(svd_reduce(MatrixXd::Random(5, 3), 0), InvalidConfigError);
    CHECK_THROWS_AS(svd_reduce(MatrixXd::Random(5, 3), 4), InvalidConfigError);
    CHECK_THROWS_AS(svd_reduce(MatrixXd::Random(2, 3), 3), InvalidConfigError);
  }
}

TEST_SUITE("som") {
  TEST_CASE("single training point pulls every prototype towards it") {
    MatrixXd x(1, 3);
    x << 1.0, -2.0, 0.5;
    SomOptions opt;
    opt.width = 3;
    opt.height = 2;
    opt.epochs = 60;
    opt.seed = 1;
    const auto grid = som_fit(x, opt);
    CHECK(grid.training_log.back() < grid.training_log.front());
    for (Eigen::Index n = 0; n < grid.nodes(); ++n) CHECK((grid.codebook.row(n) - x.row(0)).norm() < 0.5);
  }

  TEST_CASE("two separated clouds land on different nodes") {
    std::mt19937_64 rng(70);
    const MatrixXd x = two_clouds(rng, 40);
    SomOptions opt;
    opt.width = 2;
    opt.height = 1;
    opt.epochs = 50;
    opt.seed = 7;
    const auto grid = som_fit(x, opt);
    const RowVectorXd c0 = x.topRows(40).colwise().mean();
    const RowVectorXd c1 = x.bottomRows(40).colwise().mean();
    auto nearest = [&](Eigen::Index node) {
      return (grid.codebook.row(node) - c0).norm() < (grid.codebook.row(node) - c1).norm() ? 0 : 1;
    };
    CHECK(nearest(0) != nearest(1));

    const auto codes = som_encode(grid, x);
    CHECK(codes.data.row(0) != codes.data.row(79));
    for (Eigen::Index i = 1; i < 40; ++i) CHECK(codes.data.row(i) == codes.data.row(0));
    for (Eigen::Index i = 41; i < 80; ++i) CHECK(codes.data.row(i) == codes.data.row(40));
  }

  TEST_CASE("encoding is structural and a prototype maps to its own node") {
    std::mt19937_64 rng(71);
    const MatrixXd x = testing::random_matrix(rng, 60, 4);
    SomOptions opt;
    opt.width = 4;
    opt.height = 3;
    opt.epochs = 10;
    opt.seed = 3;
    const auto grid = som_fit(x, opt);
    const auto y = som_encode(grid, x);
    CHECK(y.k() == 2);
    CHECK(y.rows() == 60);
    for (Eigen::Index i = 0; i < 60; ++i) {
      CHECK(y.data(i, 0) == std::floor(y.data(i, 0)));
      CHECK(y.data(i, 0) >= 0);
      CHECK(y.data(i, 0) < 4);
      CHECK(y.data(i, 1) >= 0);
      CHECK(y.data(i, 1) < 3);
    }
    for (Eigen::Index n = 0; n < grid.nodes(); ++n) {
      const auto own = som_encode(grid, grid.codebook.row(n));
      CHECK(own.data(0, 0) == static_cast<double>(grid.col_of(n)));
      CHECK(own.data(0, 1) == static_cast<double>(grid.row_of(n)));
    }
    CHECK(grid.training_log.size() == 11);
    CHECK(grid.training_log.back() <= grid.training_log.front());
  }

  TEST_CASE("identical seed gives a bit-identical codebook") {
    std::mt19937_64 rng(72);
    const MatrixXd x = testing::random_matrix(rng, 30, 3);
    SomOptions opt;
    opt.width = 3;
    opt.height = 3;
    opt.epochs = 5;
    opt.seed = 99;
    CHECK(som_fit(x, opt).codebook == som_fit(x, opt).codebook);
    opt.seed = 100;
    CHECK(som_fit(x, opt).codebook != som_fit(MatrixXd(x), SomOptions{3, 3, 5, 0.5, {}, 0.01, 0.5, 99}).codebook);
  }

  TEST_CASE("zero radius only moves the winner") {
    MatrixXd x(1, 1);
    x << 5.0;
    SomOptions opt;
    opt.width = 2;
    opt.height = 1;
    opt.epochs = 3;
    opt.radius0 = 0.0;
    const auto grid = som_fit(x, opt);
    CHECK(grid.training_log.back() < grid.training_log.front());
  }

  TEST_CASE("errors") {
    SomOptions opt;
    CHECK_THROWS_AS(som_fit(MatrixXd(0, 2), opt), InvalidInputError);
    opt.width = 1;
    opt.height = 1;
    CHECK_THROWS_AS(som_fit(MatrixXd::Random(3, 2), opt), InvalidConfigError);
    opt.width = 2;
    opt.lr0 = 0.0;
    CHECK_THROWS_AS(som_fit(MatrixXd::Random(3, 2), opt), InvalidConfigError);
    opt.lr0 = 0.5;
    opt.epochs = 0;
    CHECK_THROWS_AS(som_fit(MatrixXd::Random(3, 2), opt), InvalidConfigError);
    opt.epochs = 1;
    const auto grid = som_fit(MatrixXd::Random(3, 2), opt);
    CHECK_THROWS_AS(som_encode(grid, MatrixXd::Random(3, 3)), InvalidInputError);
  }
}

TEST_SUITE("fastica") {
  TEST_CASE("white independent +-1 sources are a fixed point of the identity") {
    MatrixXd x(400, 2);
    for (Eigen::Index i = 0; i < 400; ++i) {
      x(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
      x(i, 1) = ((i / 2) % 2 == 0) ? 1.0 : -1.0;
    }
    IcaOptions<double> opt;
    opt.initial_unmixing = MatrixXd::Identity(2, 2);
    const auto m = fastica_fit(x, opt);
    CHECK(m.converged);
    const MatrixXd total = m.unmixing * m.whitening;
    CHECK((total.cwiseAbs() - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("recovers two mixed sources") {
    std::mt19937_64 rng(11);
    const MatrixXd s = testing::ica_sources(rng, 2000, 2);
    const MatrixXd mixing = testing::random_matrix(rng, 2, 2);
    const MatrixXd x = s * mixing.transpose();
    IcaOptions<double> opt;
    opt.seed = 11;
    const auto m = fastica_fit(x, opt);
    CHECK(m.converged);
    const auto y = fastica_transform(m, x);
    for (const double c : testing::greedy_match(s, y.data)) CHECK(c >= 0.95);
    CHECK((m.unmixing * m.unmixing.transpose() - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((sample_covariance(y.data) - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(fastica_transform(m, m.mean).data.cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("cube nonlinearity also separates sub-Gaussian sources") {
    std::mt19937_64 rng(12);
    const MatrixXd s = testing::ica_sources(rng, 2000, 3);
    const MatrixXd x = s * testing::random_matrix(rng, 3, 3).transpose();
    IcaOptions<double> opt;
    opt.nonlinearity = Nonlinearity::cube;
    opt.seed = 5;
    const auto m = fastica_fit(x, opt);
    for (const double c : testing::greedy_match(s, fastica_transform(m, x).data)) CHECK(c >= 0.95);
  }

  TEST_CASE("separates a mix of super- and sub-Gaussian sources") {
    std::mt19937_64 rng(15);
    std::exponential_distribution<double> expo(1.0);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    MatrixXd s(2000, 3);
    for (Eigen::Index i = 0; i < 2000; ++i) {
      s(i, 0) = (coin(rng) ? 1.0 : -1.0) * expo(rng);
      s(i, 1) = (coin(rng) ? 1.0 : -1.0) * expo(rng);
      s(i, 2) = uni(rng);
    }
    const MatrixXd x = s * testing::random_matrix(rng, 3, 3).transpose();
    IcaOptions<double> opt;
    opt.seed = 15;
    const auto m = fastica_fit(x, opt);
    CHECK(m.converged);
    for (const double c : testing::greedy_match(s, fastica_transform(m, x).data)) CHECK(c >= 0.95);
  }

  TEST_CASE("identical seed gives an identical model") {
    std::mt19937_64 rng(13);
    const MatrixXd x = testing::ica_sources(rng, 500, 2) * testing::random_matrix(rng, 2, 2);
    IcaOptions<double> opt;
    opt.seed = 4;
    const auto a = fastica_fit(x, opt);
    const auto b = fastica_fit(x, opt);
    CHECK(a.unmixing == b.unmixing);
    CHECK(a.whitening == b.whitening);
  }

  TEST_CASE("max_iter without convergence is reported, not thrown") {
    std::mt19937_64 rng(14);
    const MatrixXd x = testing::ica_sources(rng, 500, 3) * testing::random_matrix(rng, 3, 3);
    IcaOptions<double> opt;
    opt.max_iter = 1;
    opt.tol = 1e-15;
    const auto m = fastica_fit(x, opt);
    CHECK_FALSE(m.converged);
    CHECK(m.iterations == 1);
  }

  TEST_CASE("errors") {
    MatrixXd x = MatrixXd::Random(50, 3);
    x.col(2) = x.col(0) + x.col(1);
    CHECK_THROWS_AS(fastica_fit(x, IcaOptions<double>{}), DegenerateInputError);
    IcaOptions<double> opt;
    opt.components = 4;
    CHECK_THROWS_AS(fastica_fit(MatrixXd::Random(50, 3), opt), InvalidConfigError);
    opt.components = 2;
    const auto m = fastica_fit(MatrixXd::Random(50, 3), opt);
    CHECK(m.components() == 2);
    CHECK_THROWS_AS(fastica_transform(m, MatrixXd::Random(5, 2)), InvalidInputError);
    CHECK_THROWS_AS(fastica_fit(MatrixXd::Random(1, 3), IcaOptions<double>{}), DegenerateInputError);
  }

  TEST_CASE("rank check is relative to the data scale") {
    // An exactly proportional column at large magnitude leaves a rounding-level
    // eigenvalue far above any absolute floor.
    std::mt19937_64 rng(12);
    MatrixXd x = testing::random_matrix(rng, 200, 3, 1000.0);
    x.col(2) = 250.0 * x.col(0);
    CHECK_THROWS_AS(fastica_fit(x, IcaOptions<double>{}), DegenerateInputError);
    IcaOptions<double> two;
    two.components = 2;
    CHECK(fastica_fit(x, two).components() == 2);
  }
}
