#include <doctest.h>

#include <Eigen/Dense>

#include "fedpex/errors.hpp"
#include "fedpex/linalg.hpp"
#include "fedpex/rng.hpp"
#include "oracles.hpp"

using namespace fedpex;

namespace {

// lambda I + sum of `n` random outer products.
Eigen::MatrixXd random_gram(std::size_t d, std::size_t n, double lambda, Rng& rng) {
  Eigen::MatrixXd a = lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                          static_cast<Eigen::Index>(d));
  for (std::size_t s = 0; s < n; ++s) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    a += x * x.transpose();
  }
  return a;
}

Eigen::VectorXd random_vector(std::size_t d, Rng& rng) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(d));
  for (auto& v : y) v = rng.uniform(-2.0, 2.0);
  return y;
}

}  // namespace

TEST_CASE("cholesky of diagonal matrices") {
  CHECK(linalg::cholesky(Eigen::Matrix2d::Identity().eval()).isApprox(Eigen::Matrix2d::Identity()));
  const Eigen::Matrix2d l = linalg::cholesky(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix());
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 1) == doctest::Approx(3.0));
  CHECK(l(1, 0) == 0.0);
}

TEST_CASE("cholesky reconstructs random gram matrices") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_gram(1 + static_cast<std::size_t>(rep % 8), 10, 0.5, rng);
    const Eigen::MatrixXd l = linalg::cholesky(a);
    const double err = (l * l.transpose() - a).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-10 * (1.0 + a.cwiseAbs().maxCoeff()));
    CHECK(l.isLowerTriangular());
  }
}

TEST_CASE("cholesky rejects indefinite and non-square input") {
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(linalg::cholesky(bad), NotPositiveDefinite);
  CHECK_THROWS_AS(linalg::cholesky(Eigen::Matrix2d::Zero().eval()), NotPositiveDefinite);
  // Pivot below 1e-14 of the trace.
  CHECK_THROWS_AS(linalg::cholesky(Eigen::Vector2d(1.0, 1e-16).asDiagonal().toDenseMatrix()),
                  NotPositiveDefinite);
  CHECK_THROWS_AS(linalg::cholesky(Eigen::MatrixXd::Ones(2, 3)), ParameterError);
}

TEST_CASE("solve small systems") {
  const Eigen::Vector2d b(3, -1);
  CHECK(linalg::solve(Eigen::Matrix2d::Identity().eval(), b).isApprox(b));
  const Eigen::VectorXd x =
      linalg::solve(Eigen::Vector2d(2, 4).asDiagonal().toDenseMatrix(), Eigen::Vector2d(2, 8));
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(linalg::solve(Eigen::Matrix2d::Identity().eval(), Eigen::Vector3d(1, 2, 3)),
                  ParameterError);
}

TEST_CASE("solve residual on random systems") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep % 10);
    const auto a = random_gram(d, 3 * d, 0.1, rng);
    const auto b = random_vector(d, rng);
    const Eigen::VectorXd x = linalg::solve(a, b);
    CHECK((a * x - b).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("logdet of simple matrices") {
  CHECK(linalg::logdet(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(0.0));
  CHECK(linalg::logdet(Eigen::Vector2d(4, 9).asDiagonal().toDenseMatrix()) ==
        doctest::Approx(std::log(36.0)));
}

TEST_CASE("logdet agrees with cofactor expansion") {
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = rep % 2 == 0 ? 3 : 1 + static_cast<std::size_t>(rep % 6);
    const auto a = random_gram(d, 4, 0.3, rng);
    const double det = oracle::cofactor_det(a);
    CHECK(std::abs(std::exp(linalg::logdet(a)) - det) <= 1e-9 * std::abs(det));
  }
}

TEST_CASE("quadratic form examples") {
  CHECK(linalg::quad_form_inv(Eigen::Matrix2d::Identity().eval(), Eigen::Vector2d(3, 4)) ==
        doctest::Approx(25.0));
  CHECK(linalg::quad_form_inv(Eigen::Vector2d(25, 1).asDiagonal().toDenseMatrix(),
                              Eigen::Vector2d(5, 0)) == doctest::Approx(1.0));
}

TEST_CASE("quadratic form agrees with an explicit inverse") {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep % 7);
    const auto a = random_gram(d, 2 * d, 0.5, rng);
    const auto y = random_vector(d, rng);
    const double expect = y.dot(oracle::gauss_jordan_inverse(a) * y);
    const double got = linalg::quad_form_inv(a, y);
    CHECK(got >= 0.0);
    CHECK(std::abs(got - expect) <= 1e-10 * (1.0 + std::abs(expect)));
    CHECK(std::abs(got - y.dot(linalg::solve(a, y))) <= 1e-10 * (1.0 + std::abs(expect)));
  }
}

TEST_CASE("logdet never drops below d log lambda") {
  Rng rng(29);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep % 6);
    const double lambda = rng.uniform(1e-3, 2.0);
    const auto a = random_gram(d, static_cast<std::size_t>(rep % 5), lambda, rng);
    CHECK(linalg::logdet(a) >= static_cast<double>(d) * std::log(lambda) - 1e-9);
  }
}

TEST_CASE("rank-one growth never increases the quadratic form") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep % 6);
    const auto a = random_gram(d, d, 0.2, rng);
    const auto y = random_vector(d, rng);
    const auto x = random_vector(d, rng);
    const Eigen::MatrixXd grown = a + x * x.transpose();
    CHECK(linalg::quad_form_inv(grown, y) <= linalg::quad_form_inv(a, y) * (1.0 + 1e-12) + 1e-14);
  }
}

TEST_CASE("factor works for single precision") {
  const Eigen::Matrix3f a = Eigen::Vector3f(4.0f, 9.0f, 16.0f).asDiagonal();
  linalg::SpdFactor f(a);
  CHECK(f.logdet() == doctest::Approx(std::log(576.0)).epsilon(1e-5));
  CHECK(f.quad_form_inv(Eigen::Vector3f(2, 3, 4)) == doctest::Approx(3.0f));
  static_assert(std::is_same_v<decltype(f.logdet()), float>);
}
