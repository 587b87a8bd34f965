#include <cmath>
#include <numeric>

#include "calibra/error.hpp"
#include "calibra/metrics.hpp"
#include "calibra/synthetic.hpp"
#include "doctest.h"

using namespace calibra;

namespace {

std::vector<double> dirichlet_mean(const std::vector<double>& alpha, std::size_t draws) {
  Rng rng(123);
  std::vector<double> mean(alpha.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto p = sample_dirichlet(alpha, rng);
    double sum = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      REQUIRE(p[k] >= 0.0);
      sum += p[k];
      mean[k] += p[k];
    }
    REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
  }
  for (auto& m : mean) m /= static_cast<double>(draws);
  return mean;
}

std::vector<double> label_frequencies(const std::vector<double>& p, std::size_t draws) {
  Rng rng(99);
  std::vector<double> freq(p.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) freq[sample_label(p, rng)] += 1.0;
  for (auto& f : freq) f /= static_cast<double>(draws);
  return freq;
}

}  // namespace

TEST_CASE("Dirichlet means") {
  const auto flat = dirichlet_mean({1, 1, 1}, 100'000);
  for (const double m : flat) CHECK(std::fabs(m - 1.0 / 3.0) < 0.01);
  const auto skew = dirichlet_mean({10, 1, 1}, 100'000);
  CHECK(std::fabs(skew[0] - 10.0 / 12.0) < 0.01);
  CHECK(std::fabs(skew[1] - 1.0 / 12.0) < 0.01);
  CHECK(std::fabs(skew[2] - 1.0 / 12.0) < 0.01);
  const auto small = dirichlet_mean({0.1, 0.1}, 20'000);
  CHECK(std::fabs(small[0] - 0.5) < 0.02);
}

TEST_CASE("categorical labels") {
  CHECK(label_frequencies({0.0, 0.0, 1.0}, 1000)[2] == 1.0);
  CHECK(std::fabs(label_frequencies({0.5, 0.5}, 100'000)[0] - 0.5) < 0.01);
  const auto f = label_frequencies({0.2, 0.3, 0.5}, 100'000);
  CHECK(std::fabs(f[0] - 0.2) < 0.01);
  CHECK(std::fabs(f[1] - 0.3) < 0.01);
  CHECK(std::fabs(f[2] - 0.5) < 0.01);
}

TEST_CASE("alpha validation and presets") {
  CHECK(alpha_preset("equal", 3) == std::vector<double>{1, 1, 1});
  CHECK(alpha_preset("skewed", 3) == std::vector<double>{10, 1, 1});
  CHECK(alpha_preset("2,0.5", 2) == std::vector<double>{2, 0.5});
  try {
    check_alpha(std::vector<double>{1.0, 0.0});
    FAIL("expected NonPositiveAlpha");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonPositiveAlpha);
  }
  CHECK_THROWS_AS(alpha_preset("1,2,3", 2), Error);
}

TEST_CASE("generation is a pure function of its DirichletSpec") {
  const DirichletSpec spec{{1, 1, 1}, 100, 42};
  const auto a = generate_calibrated_dataset(spec);
  const auto b = generate_calibrated_dataset(spec);
  CHECK(a == b);
  CHECK(a.size() == 100);
  CHECK(a.metadata().at("seed") == "42");
  CHECK(a.metadata().at("generator") == kGeneratorName);

  const DirichletSpec other{{1, 1, 1}, 100, 43};
  CHECK_FALSE(a == generate_calibrated_dataset(other));
}

TEST_CASE("thread count does not change the data") {
  const DirichletSpec spec{{10, 1, 1, 1}, 3 * kGenerationChunk + 17, 5};
  const auto one = generate_calibrated_dataset(spec, 1);
  CHECK(one == generate_calibrated_dataset(spec, 3));
  CHECK(one == generate_calibrated_dataset(spec, 8));
}

TEST_CASE("generated rows are valid probability vectors") {
  const auto ds = generate_calibrated_dataset({{0.3, 0.3, 0.3, 0.3, 0.3}, 20'000, 8});
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<double> p(ds.probs(i).begin(), ds.probs(i).end());
    CHECK_NOTHROW(ProbabilityVector{p});
    CHECK(ds.label(i) < 5);
  }
}

TEST_CASE("two-class accuracy matches the analytic value") {
  const auto ds = generate_calibrated_dataset({{1, 1}, 100'000, 17});
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto p = ds.probs(i);
    const std::size_t argmax = p[1] > p[0] ? 1 : 0;
    hits += argmax == ds.label(i);
  }
  CHECK(std::fabs(static_cast<double>(hits) / ds.size() - 0.75) < 0.01);
}

TEST_CASE("derived seeds differ across streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}
