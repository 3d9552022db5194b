#pragma once

#include "ebreg/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ebreg {

/// Dense design matrix with cached squared column norms. Immutable once built.
template <typename Scalar>
class DesignMatrix {
public:
  DesignMatrix() = default;

  explicit DesignMatrix(Matrix<Scalar> values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw ValidationError("design matrix needs n >= 1 and p >= 1");
    sq_norms_ = values_.colwise().squaredNorm().transpose();
  }

  Index n() const { return values_.rows(); }
  Index p() const { return values_.cols(); }
  const Matrix<Scalar>& values() const { return values_; }
  const Vector<Scalar>& column_sq_norms() const { return sq_norms_; }
  auto col(Index j) const { return values_.col(j); }

  Matrix<Scalar> columns(const Model& model) const {
    Matrix<Scalar> out(n(), static_cast<Index>(model.size()));
    for (std::size_t k = 0; k < model.size(); ++k) out.col(static_cast<Index>(k)) = values_.col(model[k]);
    return out;
  }

private:
  Matrix<Scalar> values_;
  Vector<Scalar> sq_norms_;
};

using DesignMatrixd = DesignMatrix<double>;

/// Least-squares state for one model.
///
/// The Cholesky factor is kept in insertion order (`columns`), which lets
/// extend_fit append a row instead of re-triangularizing. `model` holds the
/// same indices sorted. `beta_hat` and `xty` follow `columns`.
template <typename Scalar>
struct ModelFit {
  Model model;
  std::vector<int> columns;
  Matrix<Scalar> chol;   // lower triangular, chol * chol^T = X_S^T X_S
  Vector<Scalar> xty;    // X_S^T y
  Vector<Scalar> z;      // chol^{-1} xty
  Vector<Scalar> beta_hat;
  Scalar rss{0};
  Scalar yty{0};

  Index size() const { return static_cast<Index>(columns.size()); }

  /// Coefficients reordered to match `model`.
  Vector<Scalar> sorted_beta() const {
    Vector<Scalar> out(size());
    for (Index k = 0; k < size(); ++k) {
      auto pos = std::lower_bound(model.begin(), model.end(), columns[k]) - model.begin();
      out(pos) = beta_hat(k);
    }
    return out;
  }

  /// Scatter a coefficient vector in `columns` order into a length-p vector.
  Vector<Scalar> scatter(const Vector<Scalar>& coef, Index p) const {
    Vector<Scalar> out = Vector<Scalar>::Zero(p);
    for (Index k = 0; k < size(); ++k) out(columns[k]) = coef(k);
    return out;
  }
};

using ModelFitd = ModelFit<double>;

inline constexpr double kDefaultPivotTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-8;
inline constexpr Index kDropRefitThreshold = 8;

/// Numerical rank: count of singular values above tol * sigma_max.
template <typename Scalar>
Index rank_of(const DesignMatrix<Scalar>& X, Scalar tol = Scalar(kDefaultRankTol)) {
  if (!(tol > 0)) throw ValidationError("rank tolerance must be positive");
  Eigen::BDCSVD<Matrix<Scalar>> svd(X.values());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= Scalar(0)) return 0;
  const Scalar cut = tol * sv(0);
  Index r = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++r;
  return r;
}

namespace detail {

template <typename Scalar>
void refresh_solution(ModelFit<Scalar>& fit) {
  const Index s = fit.size();
  if (s == 0) {
    fit.z.resize(0);
    fit.beta_hat.resize(0);
    fit.rss = fit.yty;
    return;
  }
  auto L = fit.chol.template triangularView<Eigen::Lower>();
  fit.z = L.solve(fit.xty);
  fit.beta_hat = L.transpose().solve(fit.z);
  fit.rss = std::max(Scalar(0), fit.yty - fit.z.squaredNorm());
}

template <typename Scalar, typename Derived>
void check_index(const DesignMatrix<Scalar>& X, int j, const Eigen::MatrixBase<Derived>& y) {
  if (j < 0 || j >= X.p()) throw std::out_of_range("column index " + std::to_string(j) + " out of range");
  if (y.size() != X.n()) throw ValidationError("response length does not match design rows");
}

}  // namespace detail

/// Least-squares fit of y on the columns in S via a Cholesky factor of X_S^T X_S.
template <typename Scalar, typename Derived>
ModelFit<Scalar> fit_model(const DesignMatrix<Scalar>& X, const Eigen::MatrixBase<Derived>& y, const Model& S,
                           Scalar pivot_tol = Scalar(kDefaultPivotTol)) {
  ModelFit<Scalar> fit;
  fit.model = canonical(S);
  if (fit.model.size() != S.size()) throw ValidationError("model has repeated indices");
  for (int j : fit.model) detail::check_index(X, j, y);
  fit.columns = fit.model;
  fit.yty = y.squaredNorm();

  const Index s = fit.size();
  const Matrix<Scalar> XS = X.columns(fit.model);
  const Matrix<Scalar> gram = XS.transpose() * XS;
  fit.xty = XS.transpose() * y;

  fit.chol = Matrix<Scalar>::Zero(s, s);
  for (Index k = 0; k < s; ++k) {
    // Column-by-column Cholesky so the pivot is compared against ||x_k||^2.
    Scalar diag = gram(k, k) - fit.chol.row(k).head(k).squaredNorm();
    const Scalar scale = X.column_sq_norms()(fit.model[k]);
    if (!(diag > pivot_tol * scale))
      throw SingularModel("column " + std::to_string(fit.model[k] + 1) + " is collinear with the model");
    const Scalar d = std::sqrt(diag);
    fit.chol(k, k) = d;
    for (Index i = k + 1; i < s; ++i)
      fit.chol(i, k) = (gram(i, k) - fit.chol.row(i).head(k).dot(fit.chol.row(k).head(k))) / d;
  }
  detail::refresh_solution(fit);
  return fit;
}

/// Adds column j with a rank-one extension of the Cholesky factor.
template <typename Scalar, typename Derived>
ModelFit<Scalar> extend_fit(const ModelFit<Scalar>& fit, const DesignMatrix<Scalar>& X,
                            const Eigen::MatrixBase<Derived>& y, int j, Scalar pivot_tol = Scalar(kDefaultPivotTol)) {
  detail::check_index(X, j, y);
  if (contains(fit.model, j)) throw ValidationError("column " + std::to_string(j + 1) + " already in model");

  const Index s = fit.size();
  const auto xj = X.col(j);
  Vector<Scalar> cross(s);
  for (Index k = 0; k < s; ++k) cross(k) = X.col(fit.columns[k]).dot(xj);

  Vector<Scalar> l = cross;
  if (s > 0) fit.chol.template triangularView<Eigen::Lower>().solveInPlace(l);
  const Scalar scale = X.column_sq_norms()(j);
  const Scalar diag = scale - l.squaredNorm();
  if (!(diag > pivot_tol * scale))
    throw SingularModel("column " + std::to_string(j + 1) + " is collinear with the model");
  const Scalar d = std::sqrt(diag);
  const Scalar xjy = xj.dot(y);

  ModelFit<Scalar> out;
  out.model = with_index(fit.model, j);
  out.columns = fit.columns;
  out.columns.push_back(j);
  out.yty = fit.yty;

  out.chol = Matrix<Scalar>::Zero(s + 1, s + 1);
  out.chol.topLeftCorner(s, s) = fit.chol;
  out.chol.row(s).head(s) = l.transpose();
  out.chol(s, s) = d;

  out.xty.resize(s + 1);
  out.xty << fit.xty, xjy;
  out.z.resize(s + 1);
  out.z << fit.z, (xjy - l.dot(fit.z)) / d;

  out.beta_hat = out.chol.template triangularView<Eigen::Lower>().transpose().solve(out.z);
  out.rss = std::max(Scalar(0), out.yty - out.z.squaredNorm());
  return out;
}

/// Removes column j. Small models are refit; larger ones drop the row from the
/// factor and restore triangularity with Givens rotations.
template <typename Scalar, typename Derived>
ModelFit<Scalar> drop_fit(const ModelFit<Scalar>& fit, const DesignMatrix<Scalar>& X,
                          const Eigen::MatrixBase<Derived>& y, int j, Scalar pivot_tol = Scalar(kDefaultPivotTol)) {
  detail::check_index(X, j, y);
  auto where = std::find(fit.columns.begin(), fit.columns.end(), j);
  if (where == fit.columns.end()) throw ValidationError("column " + std::to_string(j + 1) + " not in model");

  const Index s = fit.size();
  if (s <= kDropRefitThreshold) return fit_model(X, y, without_index(fit.model, j), pivot_tol);

  const Index k = where - fit.columns.begin();
  Matrix<Scalar> M(s - 1, s);
  M.topRows(k) = fit.chol.topRows(k);
  M.bottomRows(s - 1 - k) = fit.chol.bottomRows(s - 1 - k);
  for (Index i = k; i < s - 1; ++i) {
    const Scalar a = M(i, i);
    const Scalar b = M(i, i + 1);
    const Scalar r = std::hypot(a, b);
    if (r == Scalar(0)) continue;
    const Scalar c = a / r;
    const Scalar sn = b / r;
    for (Index row = i; row < s - 1; ++row) {
      const Scalar u = M(row, i);
      const Scalar v = M(row, i + 1);
      M(row, i) = c * u + sn * v;
      M(row, i + 1) = -sn * u + c * v;
    }
    M(i, i + 1) = Scalar(0);
  }

  ModelFit<Scalar> out;
  out.model = without_index(fit.model, j);
  out.columns = fit.columns;
  out.columns.erase(out.columns.begin() + k);
  out.yty = fit.yty;
  out.chol = M.leftCols(s - 1).template triangularView<Eigen::Lower>();
  out.xty.resize(s - 1);
  out.xty << fit.xty.head(k), fit.xty.tail(s - 1 - k);
  detail::refresh_solution(out);
  return out;
}

}  // namespace ebreg
