#include <algorithm>
#include <numeric>
#include <random>

#include "calibra/dataset.hpp"
#include "calibra/error.hpp"
#include "doctest.h"
#include "../support/random_data.hpp"

using namespace calibra;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("validate_dataset accepts a minimal dataset") {
  const std::vector<RawPrediction> raw{{{0.5, 0.5}, 0}};
  const auto ds = validate_dataset(raw);
  CHECK(ds.size() == 1);
  CHECK(ds.num_classes() == 2);
}

TEST_CASE("validate_dataset errors") {
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{}); }) ==
        ErrorCode::kEmptyDataset);
  CHECK(code_of([] {
          validate_dataset(std::vector<RawPrediction>{{{0.5, 0.5}, 0}, {{0.2, 0.3, 0.5}, 1}});
        }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{{{0.7, 0.4}, 0}}); }) ==
        ErrorCode::kInvalidProbability);
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{{{-0.1, 1.1}, 0}}); }) ==
        ErrorCode::kInvalidProbability);
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{{{0.5, 0.5}, 2}}); }) ==
        ErrorCode::kLabelOutOfRange);
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{{{0.5, 0.5}, -1}}); }) ==
        ErrorCode::kLabelOutOfRange);
  CHECK(code_of([] { validate_dataset(std::vector<RawPrediction>{{{1.0}, 0}}); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("probabilities near the simplex are renormalized, exact ones kept") {
  std::vector<double> near{0.3, 0.7 + 5e-7};
  normalize_probabilities(near);
  CHECK(near[0] + near[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(near[0] < 0.3);

  std::vector<double> exact{0.1, 0.2, 0.7};
  const auto copy = exact;
  normalize_probabilities(exact);
  CHECK(exact == copy);

  std::vector<double> off{0.3, 0.7 + 2e-6};
  CHECK_THROWS_AS(normalize_probabilities(off), Error);
}

TEST_CASE("rank_prediction examples") {
  SUBCASE("plain sort") {
    const auto r = rank_prediction({ProbabilityVector({0.2, 0.5, 0.3}), 2});
    CHECK(r.q == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(r.class_order == std::vector<std::size_t>{1, 2, 0});
    CHECK(r.r == std::vector<std::uint8_t>{0, 1, 0});
  }
  SUBCASE("ties go to the lower class index") {
    const double third = 1.0 / 3.0;
    const auto r = rank_prediction({ProbabilityVector({third, third, third}), 1});
    CHECK(r.class_order == std::vector<std::size_t>{0, 1, 2});
    CHECK(r.r == std::vector<std::uint8_t>{0, 1, 0});
  }
  SUBCASE("two classes") {
    const auto r = rank_prediction({ProbabilityVector({0.9, 0.1}), 1});
    CHECK(r.q == std::vector<double>{0.9, 0.1});
    CHECK(r.r == std::vector<std::uint8_t>{0, 1});
  }
}

TEST_CASE("rank_prediction properties on random rows") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t c = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const auto p = test_support::random_simplex(c, rng);
    const std::size_t y = std::uniform_int_distribution<std::size_t>(0, c - 1)(rng);
    const auto ranked = rank_prediction({ProbabilityVector(p), y});

    // q is a non-increasing permutation of p.
    CHECK(std::is_sorted(ranked.q.begin(), ranked.q.end(), std::greater<>()));
    auto sorted_p = p;
    std::sort(sorted_p.begin(), sorted_p.end(), std::greater<>());
    CHECK(ranked.q == sorted_p);

    auto order = ranked.class_order;
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> iota(c);
    std::iota(iota.begin(), iota.end(), std::size_t{0});
    CHECK(order == iota);

    CHECK(std::accumulate(ranked.r.begin(), ranked.r.end(), 0) == 1);
    for (std::size_t k = 0; k < c; ++k) {
      CHECK((ranked.r[k] == 1) == (ranked.class_order[k] == y));
    }

    // Permutation equivariance on tie-free rows.
    std::vector<double> unique = p;
    std::sort(unique.begin(), unique.end());
    if (std::adjacent_find(unique.begin(), unique.end()) != unique.end()) continue;
    std::vector<std::size_t> perm(c);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted(c);
    for (std::size_t k = 0; k < c; ++k) permuted[perm[k]] = p[k];
    const auto again = rank_prediction({ProbabilityVector(permuted), perm[y]});
    CHECK(again.q == ranked.q);
    CHECK(again.r == ranked.r);
  }
}

TEST_CASE("DatasetBuilder fixes C and keeps rows") {
  DatasetBuilder b;
  b.add(std::vector<double>{0.25, 0.75}, 1);
  b.add(std::vector<double>{1.0, 0.0}, 0);
  CHECK_THROWS_AS(b.add(std::vector<double>{0.2, 0.3, 0.5}, 0), Error);
  const auto ds = std::move(b).build();
  CHECK(ds.size() == 2);
  CHECK(ds.label(0) == 1);
  CHECK(ds.probs(1)[0] == 1.0);
  const auto item = ds.item(0);
  CHECK(item.true_class == 1);
  CHECK(item.probs[1] == 0.75);
}
