#pragma once

#include "ebreg/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace ebreg {

/// Lasso solution reported on the original scale of X and y.
struct LassoFit {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  double lambda = 0.0;
  Index active_size = 0;
  double rss = 0.0;  // ||y - intercept - X beta||^2
  int sweeps = 0;
  std::vector<double> objective_trace;  // per sweep, filled when LassoOptions::trace_objective

  Model support() const;
};

struct LassoOptions {
  double tol = 1e-7;        // max coefficient change at convergence (standardized scale)
  int max_sweeps = 10000;
  bool standardize = true;  // center y, center and scale the columns
  bool trace_objective = false;
};

struct CvOptions {
  int folds = 5;
  int grid_size = 50;
  double min_ratio = 1e-3;
  int workers = 1;
};

/// Solves min (1/2n)||y - Xb||^2 + lambda ||b||_1 on the standardized problem
/// by cyclic coordinate descent with active-set passes.
LassoFit cd_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, const LassoOptions& opts = {});

/// A path stops once the residual sum of squares falls to this fraction of the
/// centered total sum of squares.
inline constexpr double kSaturationFraction = 1e-3;

/// Warm-started solutions for a decreasing lambda sequence. The result is
/// shorter than `lambdas` when the path saturates or a later solve fails to
/// converge.
std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas, const LassoOptions& opts = {});

/// max_j |x_j^T y| / n on the standardized problem; the smallest lambda with a zero solution.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool standardize = true);

/// Log-spaced grid from lambda_max down to min_ratio * lambda_max.
std::vector<double> lambda_grid(double lmax, int size, double min_ratio);

/// Lambda minimizing K-fold prediction error over the grid. Fold k holds rows
/// i with i % K == k. Grid points past a fold's saturation point count as
/// infinite error.
double select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts = {});

/// Lasso fit at the cross-validated lambda.
LassoFit lasso_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts = {});

/// rss / (n - active_size) for a lasso fit; throws DegenerateFit if n <= active_size.
double sigma2_from_fit(const LassoFit& fit, Index n);

/// Residual-mean-square estimate of sigma^2 from the cross-validated lasso fit.
double estimate_sigma2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts = {});

/// Largest KKT violation of `fit` on the standardized problem at fit.lambda.
double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit,
                     bool standardize = true);

/// Lasso objective (1/2n)||y - Xb||^2 + lambda ||b||_1 on the standardized problem.
double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit, double lambda,
                       bool standardize = true);

}  // namespace ebreg
