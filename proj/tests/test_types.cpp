#include <doctest.h>

#include "ebreg/types.hpp"

#include <cmath>

using namespace ebreg;

TEST_CASE("model helpers keep models sorted") {
  Model m{1, 4, 7};
  CHECK(contains(m, 4));
  CHECK_FALSE(contains(m, 5));
  CHECK(with_index(m, 5) == Model{1, 4, 5, 7});
  CHECK(with_index(m, 4) == m);
  CHECK(without_index(m, 1) == Model{4, 7});
  CHECK(is_subset(Model{1, 7}, m));
  CHECK_FALSE(is_subset(Model{0, 1}, m));
  CHECK(canonical({3, 1, 3, 2}) == Model{1, 2, 3});
  CHECK(to_string(m) == "{2,5,8}");
  CHECK(to_string({}) == "{}");
}

TEST_CASE("derived seeds differ per stream and are stable") {
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("uniform and normal draws have the right moments") {
  RandomSource rng(11);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    CHECK((u >= 0.0 && u < 1.0));
    su += u;
    const double z = standard_normal(rng);
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(n));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("log helpers") {
  CHECK(log_binomial(5, 2) == doctest::Approx(std::log(10.0)));
  CHECK(log_binomial(1e6, 1) == doctest::Approx(std::log(1e6)));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)));
  CHECK(log_sum_exp({}) == kNegInf);
  CHECK(log_sum_exp({kNegInf, kNegInf}) == kNegInf);
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({-1000.0, kNegInf}) == doctest::Approx(-1000.0));
}
