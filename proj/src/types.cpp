#include "ebreg/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ebreg {

bool contains(const Model& model, int j) {
  return std::binary_search(model.begin(), model.end(), j);
}

Model with_index(Model model, int j) {
  auto it = std::lower_bound(model.begin(), model.end(), j);
  if (it == model.end() || *it != j) model.insert(it, j);
  return model;
}

Model without_index(Model model, int j) {
  auto it = std::lower_bound(model.begin(), model.end(), j);
  if (it != model.end() && *it == j) model.erase(it);
  return model;
}

bool is_subset(const Model& inner, const Model& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

Model canonical(Model model) {
  std::sort(model.begin(), model.end());
  model.erase(std::unique(model.begin(), model.end()), model.end());
  return model;
}

std::string to_string(const Model& model, int offset) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (k) out << ',';
    out << model[k] + offset;
  }
  out << '}';
  return out.str();
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(mix_seed(base) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

double uniform01(RandomSource& rng) {
  // 53 random mantissa bits; never returns 1.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(RandomSource& rng) {
  // Marsaglia polar method, one value per call so the stream stays stateless.
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_binomial(double n, double k) {
  if (k < 0 || k > n) return kNegInf;
  return log_gamma(n + 1) - log_gamma(k + 1) - log_gamma(n - k + 1);
}

double log_sum_exp(const std::vector<double>& values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double acc = 0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

}  // namespace ebreg
