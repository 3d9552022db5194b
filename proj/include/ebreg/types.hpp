#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebreg {

/* Column indices are 0-based internally; reports shift them to 1-based. */
using Index = Eigen::Index;

/// An active set of predictor columns, kept sorted ascending with no repeats.
using Model = std::vector<int>;

template <typename Scalar> using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RandomSource = std::mt19937_64;

class SingularModel : public std::runtime_error {
public:
  explicit SingularModel(const std::string& what) : std::runtime_error(what) {}
};

class InitSingular : public std::runtime_error {
public:
  explicit InitSingular(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateFit : public std::runtime_error {
public:
  explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

class TooLarge : public std::runtime_error {
public:
  explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

class DivideByZero : public std::domain_error {
public:
  explicit DivideByZero(const std::string& what) : std::domain_error(what) {}
};

class MalformedInput : public std::runtime_error {
public:
  explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration rejected before any computation ran.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Model helpers.
bool contains(const Model& model, int j);
Model with_index(Model model, int j);
Model without_index(Model model, int j);
bool is_subset(const Model& inner, const Model& outer);
Model canonical(Model model);
std::string to_string(const Model& model, int offset = 1);

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for stream `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

double standard_normal(RandomSource& rng);
double uniform01(RandomSource& rng);

/// log(C(n, k)) through log-gamma.
double log_binomial(double n, double k);
double log_gamma(double x);

/// Stable log(sum(exp(v))); -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& values);

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace ebreg
