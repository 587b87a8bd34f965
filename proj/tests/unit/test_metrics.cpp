#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "calibra/metrics.hpp"
#include "doctest.h"
#include "../oracle/brute_force.hpp"
#include "../support/random_data.hpp"

using namespace calibra;

namespace {

Dataset make(std::size_t c, const std::vector<std::pair<std::vector<double>, int>>& rows) {
  DatasetBuilder b(c);
  for (const auto& [p, y] : rows) b.add(p, y);
  return std::move(b).build();
}

double contribution_sum(const CalibrationReport& r) {
  double s = 0.0;
  for (const auto& b : r.bins) s += b.contribution;
  return s;
}

oracle::Binning to_oracle(BinningStrategy s) {
  return s == BinningStrategy::kEqualWidth ? oracle::Binning::kEqualWidth
                                           : oracle::Binning::kEqualFrequency;
}

}  // namespace

TEST_CASE("hand-enumerated examples") {
  SUBCASE("ECE") {
    const auto ds = make(2, {{{0.8, 0.2}, 0}, {{0.6, 0.4}, 1}});
    const auto r = compute_ece(ds, 1, BinningStrategy::kEqualWidth);
    CHECK(r.value == doctest::Approx(0.2).epsilon(1e-15));
    REQUIRE(r.bins.size() == 1);
    CHECK(*r.bins[0].predicted == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(*r.bins[0].observed == 0.5);
  }
  SUBCASE("UCE") {
    const auto ds = make(2, {{{0.5, 0.5}, 0}, {{0.5, 0.5}, 1}});
    const auto r = compute_uce(ds, 1, BinningStrategy::kEqualWidth);
    CHECK(r.value == 0.5);
    CHECK(*r.bins[0].predicted == 1.0);
    CHECK(*r.bins[0].observed == 0.5);
  }
  SUBCASE("VCE entropy") {
    const auto ds = make(2, {{{0.8, 0.2}, 0}, {{0.6, 0.4}, 0}});
    const auto r = compute_vce(ds, entropy_metric(), 1, BinningStrategy::kEqualWidth);
    CHECK(r.value == doctest::Approx(0.8812908992306926182).epsilon(1e-14));
    CHECK(*r.bins[0].observed == 0.0);
    CHECK(r.metric_name() == "vce:entropy");
  }
}

TEST_CASE("one-hot correct predictions score zero") {
  DatasetBuilder b(4);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> p(4, 0.0);
    p[i % 4] = 1.0;
    b.add(p, i % 4);
  }
  const auto ds = std::move(b).build();
  for (const auto strategy : {BinningStrategy::kEqualWidth, BinningStrategy::kEqualFrequency}) {
    CHECK(compute_ece(ds, 10, strategy).value == 0.0);
    CHECK(compute_uce(ds, 10, strategy).value == 0.0);
    CHECK(compute_vce(ds, entropy_metric(), 10, strategy).value == 0.0);
  }
}

TEST_CASE("VCE is zero when mean q matches rank frequencies") {
  // Two rows in one bin: q = [0.5, 0.5] each, labels at rank 1 and rank 2.
  const auto ds = make(2, {{{0.5, 0.5}, 0}, {{0.5, 0.5}, 1}});
  CHECK(compute_vce(ds, entropy_metric(), 3, BinningStrategy::kEqualWidth).value == 0.0);
}

TEST_CASE("empty bins are undefined and contribute nothing") {
  const auto ds = make(2, {{{0.95, 0.05}, 0}});
  const auto r = compute_ece(ds, 5, BinningStrategy::kEqualWidth);
  REQUIRE(r.bins.size() == 5);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK_FALSE(r.bins[k].predicted.has_value());
    CHECK_FALSE(r.bins[k].observed.has_value());
    CHECK(r.bins[k].contribution == 0.0);
    CHECK(r.bins[k].count == 0);
  }
  CHECK(r.bins[4].count == 1);
  CHECK(r.domain.lo == 0.5);
}

TEST_CASE("agreement with the brute-force oracle on random datasets") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tc = test_support::random_case(rng);
    for (const auto strategy : {BinningStrategy::kEqualWidth, BinningStrategy::kEqualFrequency}) {
      const auto ob = to_oracle(strategy);
      const double ece = compute_ece(tc.dataset, tc.bins, strategy).value;
      const double uce = compute_uce(tc.dataset, tc.bins, strategy).value;
      const double vce = compute_vce(tc.dataset, entropy_metric(), tc.bins, strategy).value;
      const double ece_ref = oracle::ece(tc.samples, tc.bins, ob);
      const double uce_ref = oracle::uce(tc.samples, tc.bins, ob);
      const double vce_ref = oracle::vce_entropy(tc.samples, tc.bins, ob);
      CAPTURE(trial);
      CHECK(std::fabs(ece - ece_ref) <= 1e-12);
      CHECK(std::fabs(uce - uce_ref) <= 1e-12);
      CHECK(std::fabs(vce - vce_ref) <= 1e-12);
      worst = std::max({worst, std::fabs(ece - ece_ref), std::fabs(uce - uce_ref),
                        std::fabs(vce - vce_ref)});
    }
  }
  MESSAGE("largest oracle gap: " << worst);
}

TEST_CASE("metric invariants on random datasets") {
  std::mt19937_64 rng(77);
  const std::vector<VariationMetric> variations{entropy_metric(), confidence_metric(),
                                                wvr_metric(), iqv_metric()};
  for (int trial = 0; trial < 300; ++trial) {
    const auto tc = test_support::random_case(rng, 80, 6, 10);
    const auto& ds = tc.dataset;
    for (const auto strategy : {BinningStrategy::kEqualWidth, BinningStrategy::kEqualFrequency}) {
      std::vector<CalibrationReport> reports{compute_ece(ds, tc.bins, strategy),
                                             compute_uce(ds, tc.bins, strategy)};
      for (const auto& v : variations) reports.push_back(compute_vce(ds, v, tc.bins, strategy));
      for (const auto& r : reports) {
        CHECK(r.value >= 0.0);
        CHECK(r.value <= 1.0);
        CHECK(contribution_sum(r) == r.value);
        std::size_t total = 0;
        for (const auto& b : r.bins) total += b.count;
        CHECK(total == ds.size());
      }
    }
  }
}

TEST_CASE("class relabeling leaves tie-free datasets unchanged") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(10, 60)(rng);
    std::vector<std::size_t> perm(c);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    DatasetBuilder a(c), b(c);
    std::exponential_distribution<double> e(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(c);
      double sum = 0.0;
      for (auto& x : p) sum += (x = e(rng));
      for (auto& x : p) x /= sum;
      const auto y = std::uniform_int_distribution<std::size_t>(0, c - 1)(rng);
      std::vector<double> q(c);
      for (std::size_t k = 0; k < c; ++k) q[perm[k]] = p[k];
      a.add(p, static_cast<std::int64_t>(y));
      b.add(q, static_cast<std::int64_t>(perm[y]));
    }
    const auto da = std::move(a).build();
    const auto db = std::move(b).build();
    for (const auto strategy : {BinningStrategy::kEqualWidth, BinningStrategy::kEqualFrequency}) {
      CHECK(compute_ece(da, 7, strategy).value == compute_ece(db, 7, strategy).value);
      CHECK(compute_uce(da, 7, strategy).value == compute_uce(db, 7, strategy).value);
      CHECK(compute_vce(da, entropy_metric(), 7, strategy).value ==
            compute_vce(db, entropy_metric(), 7, strategy).value);
    }
  }
}

TEST_CASE("row order does not matter for equal-width binning") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tc = test_support::random_case(rng, 40, 5, 8);
    std::vector<std::size_t> order(tc.dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    DatasetBuilder b(tc.dataset.num_classes());
    for (const auto i : order) b.add(tc.dataset.probs(i), tc.dataset.label(i));
    const auto shuffled = std::move(b).build();
    const auto s = BinningStrategy::kEqualWidth;
    CHECK(compute_ece(shuffled, tc.bins, s).value ==
          doctest::Approx(compute_ece(tc.dataset, tc.bins, s).value).epsilon(1e-13));
    CHECK(compute_vce(shuffled, entropy_metric(), tc.bins, s).value ==
          doctest::Approx(compute_vce(tc.dataset, entropy_metric(), tc.bins, s).value)
              .epsilon(1e-13));
  }
}

TEST_CASE("VCE(confidence) reduces to ECE for two classes") {
  std::mt19937_64 rng(4);
  DatasetBuilder b(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double p = u(rng);
    b.add(std::vector<double>{p, 1.0 - p}, u(rng) < p ? 0 : 1);
  }
  const auto ds = std::move(b).build();
  const auto check = check_ece_reduction(ds, 10, {0.5, 1.0});
  CHECK(check.all_modal);
  CHECK(check.max_modal_gap <= 1e-12);
  CHECK(std::fabs(check.vce - check.ece) <= 1e-12);
}
