#include <algorithm>
#include <cmath>
#include <random>

#include "calibra/variation.hpp"
#include "doctest.h"
#include "../support/random_data.hpp"

using namespace calibra;

namespace {

std::vector<double> uniform(std::size_t c) {
  return std::vector<double>(c, 1.0 / static_cast<double>(c));
}

std::vector<double> one_hot(std::size_t c, std::size_t k) {
  std::vector<double> p(c, 0.0);
  p[k] = 1.0;
  return p;
}

}  // namespace

TEST_CASE("entropy reference values") {
  // 40-digit mpmath values.
  CHECK(entropy(std::vector<double>{0.5, 0.25, 0.25}) ==
        doctest::Approx(0.9463946303571861556).epsilon(1e-15));
  CHECK(entropy(std::vector<double>{0.7, 0.3}) ==
        doctest::Approx(0.8812908992306926182).epsilon(1e-15));
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == 1.0);
}

TEST_CASE("confidence, wvr and iqv reference values") {
  CHECK(confidence(std::vector<double>{0.2, 0.5, 0.3}) == 0.5);
  CHECK(wvr(std::vector<double>{0.5, 0.25, 0.25}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(iqv(std::vector<double>{0.5, 0.25, 0.25}) == doctest::Approx(0.9375).epsilon(1e-15));
}

TEST_CASE("extremes are exact for every class count") {
  for (std::size_t c = 2; c <= 20; ++c) {
    CAPTURE(c);
    const auto u = uniform(c);
    CHECK(entropy(u) == 1.0);
    CHECK(wvr(u) == 1.0);
    CHECK(iqv(u) == 1.0);
    CHECK(confidence(u) == 1.0 / static_cast<double>(c));
    for (std::size_t k = 0; k < c; ++k) {
      const auto h = one_hot(c, k);
      CHECK(entropy(h) == 0.0);
      CHECK(wvr(h) == 0.0);
      CHECK(iqv(h) == 0.0);
      CHECK(confidence(h) == 1.0);
    }
  }
}

TEST_CASE("metrics are permutation invariant and within [0,1]") {
  std::mt19937_64 rng(5);
  const std::vector<VariationMetric> metrics{entropy_metric(), confidence_metric(), wvr_metric(),
                                             iqv_metric()};
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t c = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
    auto p = test_support::random_simplex(c, rng);
    auto shuffled = p;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (const auto& m : metrics) {
      const double v = m(p);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(m(shuffled) == v);
      CHECK(m.evaluate_sorted(sorted) == v);
    }
    CHECK(entropy(shuffled) == entropy(p));
    CHECK(iqv(shuffled) == iqv(p));
    CHECK(wvr(shuffled) == wvr(p));
  }
}

TEST_CASE("entropy is continuous at the simplex boundary") {
  for (std::size_t c : {2u, 3u, 10u}) {
    const double eps = 1e-12;
    std::vector<double> p(c, eps / static_cast<double>(c - 1));
    p[0] = 1.0 - eps;
    const double h = entropy(p);
    CHECK(std::isfinite(h));
    CHECK(h >= 0.0);
    CHECK(h < 1e-9);
  }
}

TEST_CASE("lookup by name") {
  for (const auto name : variation_names()) {
    const auto m = find_variation(name);
    REQUIRE(m);
    CHECK(m->name() == name);
  }
  CHECK_FALSE(find_variation("gini"));
}
