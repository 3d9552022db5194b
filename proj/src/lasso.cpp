#include "ebreg/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

namespace ebreg {

namespace {

struct Standardized {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::RowVectorXd mean;
  Eigen::VectorXd scale;
  double ymean = 0.0;
};

Standardized standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool on) {
  if (X.rows() != y.size()) throw ValidationError("response length does not match design rows");
  if (X.rows() < 1 || X.cols() < 1) throw ValidationError("lasso needs n >= 1 and p >= 1");
  Standardized out;
  const double n = static_cast<double>(X.rows());
  if (!on) {
    out.X = X;
    out.y = y;
    out.mean = Eigen::RowVectorXd::Zero(X.cols());
    out.scale = Eigen::VectorXd::Ones(X.cols());
    return out;
  }
  out.mean = X.colwise().mean();
  out.X = X.rowwise() - out.mean;
  out.scale = (out.X.colwise().squaredNorm() / n).cwiseSqrt().transpose();
  for (Index j = 0; j < X.cols(); ++j) {
    if (out.scale(j) > 0) {
      out.X.col(j) /= out.scale(j);
    } else {
      out.scale(j) = 1.0;  // constant column; stays zero and is never selected
    }
  }
  out.ymean = y.mean();
  out.y = y.array() - out.ymean;
  return out;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Coordinate descent on a standardized problem, warm-started from `b`.
int solve_standardized(const Standardized& s, double lambda, const LassoOptions& opts, Eigen::VectorXd& b,
                       Eigen::VectorXd& resid, std::vector<double>* trace = nullptr) {
  const Index p = s.X.cols();
  const double n = static_cast<double>(s.X.rows());
  const Eigen::VectorXd curv = s.X.colwise().squaredNorm().transpose() / n;

  auto update = [&](Index j) {
    if (curv(j) <= 0) return 0.0;
    const double old = b(j);
    const double g = s.X.col(j).dot(resid) / n + curv(j) * old;
    const double next = soft_threshold(g, lambda) / curv(j);
    const double delta = next - old;
    if (delta != 0.0) {
      resid.noalias() -= delta * s.X.col(j);
      b(j) = next;
    }
    return std::abs(delta);
  };

  auto record = [&] {
    if (trace) trace->push_back(resid.squaredNorm() / (2.0 * n) + lambda * b.lpNorm<1>());
  };

  int sweeps = 0;
  if (trace) record();
  while (true) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) max_change = std::max(max_change, update(j));
    ++sweeps;
    record();
    if (max_change < opts.tol) return sweeps;
    if (sweeps >= opts.max_sweeps) break;

    std::vector<Index> active;
    for (Index j = 0; j < p; ++j)
      if (b(j) != 0.0) active.push_back(j);
    while (sweeps < opts.max_sweeps) {
      double change = 0.0;
      for (Index j : active) change = std::max(change, update(j));
      ++sweeps;
      record();
      if (change < opts.tol) break;
    }
    if (sweeps >= opts.max_sweeps) break;
  }
  throw NonConvergence("lasso did not converge within " + std::to_string(opts.max_sweeps) + " sweeps");
}

LassoFit to_original_scale(const Standardized& s, const Eigen::VectorXd& b, const Eigen::VectorXd& resid,
                           double lambda, int sweeps) {
  LassoFit fit;
  fit.lambda = lambda;
  fit.beta = b.cwiseQuotient(s.scale);
  fit.intercept = s.ymean - s.mean.dot(fit.beta);
  fit.active_size = static_cast<Index>((b.array() != 0.0).count());
  fit.rss = resid.squaredNorm();
  fit.sweeps = sweeps;
  return fit;
}

// Same per-column dot as the coordinate update, so lambda = lambda_max thresholds to exactly zero.
double lambda_max_std(const Standardized& s) {
  const double n = static_cast<double>(s.X.rows());
  double out = 0.0;
  for (Index j = 0; j < s.X.cols(); ++j) out = std::max(out, std::abs(s.X.col(j).dot(s.y) / n));
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<Index>& rows) {
  Eigen::VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = y(rows[i]);
  return out;
}

}  // namespace

Model LassoFit::support() const {
  Model out;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) out.push_back(static_cast<int>(j));
  return out;
}

LassoFit cd_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, const LassoOptions& opts) {
  if (!(lambda >= 0)) throw ValidationError("lambda must be non-negative");
  const Standardized s = standardize(X, y, opts.standardize);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd resid = s.y;
  std::vector<double> trace;
  const int sweeps = solve_standardized(s, lambda, opts, b, resid, opts.trace_objective ? &trace : nullptr);
  LassoFit fit = to_original_scale(s, b, resid, lambda, sweeps);
  fit.objective_trace = std::move(trace);
  return fit;
}

std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas, const LassoOptions& opts) {
  const Standardized s = standardize(X, y, opts.standardize);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd resid = s.y;
  const double tss = s.y.squaredNorm();
  std::vector<LassoFit> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda >= 0)) throw ValidationError("lambda must be non-negative");
    int sweeps = 0;
    try {
      sweeps = solve_standardized(s, lambda, opts, b, resid);
    } catch (const NonConvergence&) {
      if (out.empty()) throw;
      break;
    }
    out.push_back(to_original_scale(s, b, resid, lambda, sweeps));
    if (resid.squaredNorm() <= kSaturationFraction * tss) break;
  }
  return out;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool standardize_columns) {
  return lambda_max_std(standardize(X, y, standardize_columns));
}

std::vector<double> lambda_grid(double lmax, int size, double min_ratio) {
  if (size < 1) throw ValidationError("lambda grid needs at least one point");
  if (!(min_ratio > 0 && min_ratio <= 1)) throw ValidationError("lambda grid ratio must lie in (0, 1]");
  std::vector<double> grid(static_cast<std::size_t>(size));
  if (size == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double step = std::log(min_ratio) / static_cast<double>(size - 1);
  for (int k = 0; k < size; ++k) grid[static_cast<std::size_t>(k)] = lmax * std::exp(step * k);
  return grid;
}

double select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts) {
  const Index n = X.rows();
  if (opts.folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (opts.folds > n) throw ValidationError("more folds than observations");
  const std::vector<double> grid = lambda_grid(lambda_max(X, y), opts.grid_size, opts.min_ratio);

  auto fold_errors = [&](int fold) {
    std::vector<Index> train, test;
    for (Index i = 0; i < n; ++i) (i % opts.folds == fold ? test : train).push_back(i);
    const Eigen::MatrixXd Xtr = take_rows(X, train);
    const Eigen::VectorXd ytr = take_rows(y, train);
    const Eigen::MatrixXd Xte = take_rows(X, test);
    const Eigen::VectorXd yte = take_rows(y, test);
    const std::vector<LassoFit> path = lasso_path(Xtr, ytr, grid);
    std::vector<double> err(grid.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < path.size(); ++k) {
      const Eigen::VectorXd pred = (Xte * path[k].beta).array() + path[k].intercept;
      err[k] = (yte - pred).squaredNorm();
    }
    return err;
  };

  std::vector<std::vector<double>> per_fold(static_cast<std::size_t>(opts.folds));
  if (opts.workers > 1) {
    std::vector<std::future<std::vector<double>>> jobs;
    for (int f = 0; f < opts.folds; ++f) {
      jobs.push_back(std::async(std::launch::async, fold_errors, f));
      if (static_cast<int>(jobs.size()) >= opts.workers || f + 1 == opts.folds) {
        const int first = f + 1 - static_cast<int>(jobs.size());
        for (std::size_t k = 0; k < jobs.size(); ++k) per_fold[static_cast<std::size_t>(first) + k] = jobs[k].get();
        jobs.clear();
      }
    }
  } else {
    for (int f = 0; f < opts.folds; ++f) per_fold[static_cast<std::size_t>(f)] = fold_errors(f);
  }

  // Summed in fold order so the result does not depend on scheduling.
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double total = 0.0;
    for (const auto& e : per_fold) total += e[k];
    if (total < best_err) {
      best_err = total;
      best = k;
    }
  }
  return grid[best];
}

LassoFit lasso_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts) {
  const double lambda = select_lambda(X, y, opts);
  // Solve along the grid down to the chosen lambda for a warm start.
  std::vector<double> grid = lambda_grid(lambda_max(X, y), opts.grid_size, opts.min_ratio);
  grid.erase(std::find_if(grid.begin(), grid.end(), [&](double l) { return l < lambda; }), grid.end());
  std::vector<LassoFit> path = lasso_path(X, y, grid);
  if (path.back().lambda == lambda) return std::move(path.back());
  return cd_lasso(X, y, lambda);
}

double sigma2_from_fit(const LassoFit& fit, Index n) {
  if (n <= fit.active_size)
    throw DegenerateFit("lasso active set (" + std::to_string(fit.active_size) + ") leaves no residual degrees of freedom");
  const double value = fit.rss / static_cast<double>(n - fit.active_size);
  return std::max(value, std::numeric_limits<double>::min());
}

double estimate_sigma2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& opts) {
  return sigma2_from_fit(lasso_cv(X, y, opts), X.rows());
}

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit, bool standardize_columns) {
  const Standardized s = standardize(X, y, standardize_columns);
  const Eigen::VectorXd b = fit.beta.cwiseProduct(s.scale);
  const Eigen::VectorXd resid = s.y - s.X * b;
  const Eigen::VectorXd grad = s.X.transpose() * resid / static_cast<double>(X.rows());
  double worst = 0.0;
  for (Index j = 0; j < b.size(); ++j) {
    const double v = b(j) != 0.0 ? std::abs(grad(j) - fit.lambda * (b(j) > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(grad(j)) - fit.lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& fit, double lambda,
                       bool standardize_columns) {
  const Standardized s = standardize(X, y, standardize_columns);
  const Eigen::VectorXd b = fit.beta.cwiseProduct(s.scale);
  const double n = static_cast<double>(X.rows());
  return (s.y - s.X * b).squaredNorm() / (2.0 * n) + lambda * b.lpNorm<1>();
}

}  // namespace ebreg
