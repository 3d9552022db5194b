#include <doctest.h>

#include "ebreg/linalg.hpp"

#include <cmath>

using namespace ebreg;

namespace {

Eigen::MatrixXd gaussian(Index n, Index p, std::uint64_t seed) {
  RandomSource rng(seed);
  Eigen::MatrixXd m(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = standard_normal(rng);
  return m;
}

Eigen::VectorXd gaussian_vec(Index n, std::uint64_t seed) { return gaussian(n, 1, seed).col(0); }

void check_same(const ModelFitd& a, const ModelFitd& b) {
  REQUIRE(a.model == b.model);
  CHECK(std::abs(a.rss - b.rss) <= 1e-10 + 1e-8 * std::abs(b.rss));
  const Eigen::VectorXd ba = a.sorted_beta(), bb = b.sorted_beta();
  REQUIRE(ba.size() == bb.size());
  for (Index k = 0; k < ba.size(); ++k) CHECK(std::abs(ba(k) - bb(k)) <= 1e-8 * (1.0 + std::abs(bb(k))));
}

}  // namespace

TEST_CASE("design matrix stores column norms") {
  const DesignMatrixd X(gaussian(30, 6, 1));
  CHECK(X.n() == 30);
  CHECK(X.p() == 6);
  for (Index j = 0; j < 6; ++j)
    CHECK(std::abs(X.column_sq_norms()(j) - X.col(j).squaredNorm()) <= 1e-12 * X.col(j).squaredNorm());
  CHECK_THROWS_AS(DesignMatrixd(Eigen::MatrixXd(0, 3)), ValidationError);
  CHECK_THROWS_AS(DesignMatrixd(Eigen::MatrixXd(3, 0)), ValidationError);
}

TEST_CASE("rank_of") {
  CHECK(rank_of(DesignMatrixd(Eigen::MatrixXd::Identity(3, 3))) == 3);
  Eigen::MatrixXd dup(2, 3);
  dup << 1, 2, 1, 3, 5, 3;
  CHECK(rank_of(DesignMatrixd(dup)) == 2);
  CHECK(rank_of(DesignMatrixd(gaussian(10, 50, 2))) == 10);
  CHECK(rank_of(DesignMatrixd(Eigen::MatrixXd::Zero(4, 4))) == 0);
}

TEST_CASE("fit_model on hand-solvable problems") {
  SUBCASE("empty model") {
    const DesignMatrixd X(gaussian(5, 2, 3));
    Eigen::VectorXd y(5);
    y << 1, 1, 2, 2, 0;  // ||y||^2 = 10
    const ModelFitd fit = fit_model(X, y, {});
    CHECK(fit.beta_hat.size() == 0);
    CHECK(fit.rss == doctest::Approx(10.0));
  }
  SUBCASE("saturated identity") {
    const DesignMatrixd X(Eigen::MatrixXd::Identity(2, 2));
    const Eigen::Vector2d y(1, 2);
    const ModelFitd fit = fit_model(X, y, {0, 1});
    CHECK(fit.sorted_beta()(0) == doctest::Approx(1.0));
    CHECK(fit.sorted_beta()(1) == doctest::Approx(2.0));
    CHECK(fit.rss == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("4x3 normal equations") {
    Eigen::MatrixXd m(4, 3);
    m << 1, 1, 0, 1, 2, 1, 1, 3, 0, 1, 4, 1;
    const DesignMatrixd X(m);
    const Eigen::Vector4d y(1, 3, 2, 5);
    // X'X = [4 10; 10 30], X'y = (11, 33) -> beta = (0, 1.1), rss = 2.7
    const ModelFitd fit = fit_model(X, y, {0, 1});
    CHECK(fit.sorted_beta()(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.sorted_beta()(1) == doctest::Approx(1.1));
    CHECK(fit.rss == doctest::Approx(2.7));
  }
  SUBCASE("collinear model is singular") {
    Eigen::MatrixXd m = gaussian(10, 3, 4);
    m.col(2) = m.col(0);
    const DesignMatrixd X(m);
    CHECK_THROWS_AS(fit_model(X, gaussian_vec(10, 5), {0, 2}), SingularModel);
  }
  SUBCASE("index out of range") {
    const DesignMatrixd X(gaussian(10, 3, 4));
    CHECK_THROWS_AS(fit_model(X, gaussian_vec(10, 5), {3}), std::out_of_range);
  }
}

TEST_CASE("extend_fit") {
  SUBCASE("orthonormal columns drop rss by y_j^2") {
    const DesignMatrixd X(Eigen::MatrixXd::Identity(4, 4));
    const Eigen::Vector4d y(1, -2, 3, 0.5);
    ModelFitd fit = fit_model(X, y, {});
    double rss = fit.rss;
    for (int j : {2, 0, 3}) {
      fit = extend_fit(fit, X, y, j);
      CHECK(rss - fit.rss == doctest::Approx(y(j) * y(j)));
      rss = fit.rss;
    }
  }
  SUBCASE("growth sequence matches refits") {
    const DesignMatrixd X(gaussian(20, 8, 6));
    const Eigen::VectorXd y = gaussian_vec(20, 7);
    ModelFitd fit = fit_model(X, y, {});
    for (int j : {2, 4, 0}) {
      fit = extend_fit(fit, X, y, j);
      check_same(fit, fit_model(X, y, fit.model));
    }
    CHECK(fit.model == Model{0, 2, 4});
  }
  SUBCASE("duplicate column is singular") {
    Eigen::MatrixXd m = gaussian(10, 3, 8);
    m.col(1) = 2.0 * m.col(0);
    const DesignMatrixd X(m);
    const Eigen::VectorXd y = gaussian_vec(10, 9);
    CHECK_THROWS_AS(extend_fit(fit_model(X, y, {0}), X, y, 1), SingularModel);
  }
  SUBCASE("adding an active column is rejected") {
    const DesignMatrixd X(gaussian(10, 3, 8));
    const Eigen::VectorXd y = gaussian_vec(10, 9);
    CHECK_THROWS_AS(extend_fit(fit_model(X, y, {0}), X, y, 0), ValidationError);
  }
}

TEST_CASE("drop_fit") {
  const DesignMatrixd X(gaussian(20, 8, 10));
  const Eigen::VectorXd y = gaussian_vec(20, 11);
  SUBCASE("drop the only variable") { check_same(drop_fit(fit_model(X, y, {3}), X, y, 3), fit_model(X, y, {})); }
  SUBCASE("drop then re-add round-trips") {
    const ModelFitd full = fit_model(X, y, {1, 3, 5, 6});
    check_same(extend_fit(drop_fit(full, X, y, 3), X, y, 3), full);
  }
  SUBCASE("drop a middle index") { check_same(drop_fit(fit_model(X, y, {1, 3, 5}), X, y, 3), fit_model(X, y, {1, 5})); }
  SUBCASE("downdate path for large models") {
    const DesignMatrixd Z(gaussian(60, 20, 12));
    const Eigen::VectorXd w = gaussian_vec(60, 13);
    ModelFitd fit = fit_model(Z, w, {});
    for (int j = 0; j < 14; ++j) fit = extend_fit(fit, Z, w, (j * 7) % 20);
    REQUIRE(fit.size() > kDropRefitThreshold);
    for (int j : {7, 0, 14, 11}) {
      fit = drop_fit(fit, Z, w, j);
      check_same(fit, fit_model(Z, w, fit.model));
    }
  }
}

TEST_CASE("random extend/drop sequences track refits") {
  const DesignMatrixd X(gaussian(50, 16, 14));
  const Eigen::VectorXd y = gaussian_vec(50, 15);
  RandomSource rng(16);
  ModelFitd fit = fit_model(X, y, {});
  for (int step = 0; step < 400; ++step) {
    const int j = static_cast<int>(rng() % 16);
    const double before = fit.rss;
    if (contains(fit.model, j)) {
      fit = drop_fit(fit, X, y, j);
      CHECK(fit.rss >= before - 1e-9 * (1.0 + before));
    } else {
      fit = extend_fit(fit, X, y, j);
      CHECK(fit.rss <= before + 1e-9 * (1.0 + before));
    }
    check_same(fit, fit_model(X, y, fit.model));
    // Pythagoras: rss + ||X_S beta||^2 = ||y||^2
    const Eigen::VectorXd yhat = X.columns(fit.model) * fit.sorted_beta();
    CHECK(std::abs(fit.rss + yhat.squaredNorm() - y.squaredNorm()) <= 1e-8 * y.squaredNorm());
  }
}

TEST_CASE("single precision instantiation") {
  const Eigen::MatrixXf m = gaussian(20, 4, 17).cast<float>();
  const DesignMatrix<float> X(m);
  const Eigen::VectorXf y = gaussian_vec(20, 18).cast<float>();
  const ModelFit<float> a = extend_fit(fit_model(X, y, {0}), X, y, 2);
  const ModelFit<float> b = fit_model(X, y, {0, 2});
  CHECK(a.rss == doctest::Approx(b.rss).epsilon(1e-4));
}
