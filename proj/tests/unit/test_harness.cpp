#include <cmath>
#include <filesystem>

#include "calibra/harness.hpp"
#include "calibra/io.hpp"
#include "calibra/synthetic.hpp"
#include "doctest.h"

using namespace calibra;

namespace {

ExperimentGrid small_grid() {
  ExperimentGrid g;
  g.sample_sizes = {10'000, 100'000};
  g.seeds = {0, 1, 2};
  return g;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("calibra_unit_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("metric spec names") {
  CHECK(MetricSpec::parse("vce").name() == "vce:entropy");
  CHECK(MetricSpec::parse("vce:iqv").variation == "iqv");
  CHECK(MetricSpec::parse("ece").kind == MetricKind::kEce);
  CHECK_THROWS(MetricSpec::parse("ece:entropy"));
  CHECK_THROWS(MetricSpec::parse("vce:gini"));
  CHECK_THROWS(MetricSpec::parse("mce"));
}

TEST_CASE("grid size arithmetic") {
  CHECK(small_grid().expected_rows() == 144);
  ExperimentGrid full;
  // 10^7 keeps 3 seeds; the rest keep 10.
  CHECK(full.expected_rows() == 2 * 2 * 2 * 3 * (3 * 10 + 3));
}

TEST_CASE("quantile type 7") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile({1, 2, 3, 4}, 0.75) == 3.25);
  CHECK(quantile({5}, 0.9) == 5.0);
}

TEST_CASE("small grid: shape, harness fidelity, reconstruction") {
  auto g = small_grid();
  g.sample_sizes = {2'000, 5'000};
  const auto result = run_grid(g);
  REQUIRE(result.rows.size() == g.expected_rows());
  CHECK(result.failures.empty());
  CHECK(result.summary.size() == g.expected_rows() / g.seeds.size());

  for (const auto& row : result.rows) {
    REQUIRE(row.value.has_value());
    CHECK(*row.value >= 0.0);
    CHECK(*row.value <= 1.0);
    CHECK(std::fabs(reconstruct_value(row.reliability) - *row.value) <= 1e-12);
  }

  // Spot-check rows against a direct single call on a regenerated dataset.
  for (std::size_t i = 0; i < result.rows.size(); i += 17) {
    const auto& row = result.rows[i];
    const auto ds = generate_calibrated_dataset(
        {alpha_preset(row.cell.alpha, row.cell.classes), row.cell.n, row.dataset_seed});
    const auto direct =
        evaluate(ds, MetricSpec::parse(row.cell.metric), g.num_bins, row.cell.binning);
    CHECK(direct.value == *row.value);
  }

  const auto again = run_grid(g, {.threads = 2});
  CHECK(grid_rows_csv(again) == grid_rows_csv(result));
  CHECK(grid_summary_csv(again) == grid_summary_csv(result));
}

TEST_CASE("failures are recorded, not dropped") {
  ExperimentGrid g;
  g.class_counts = {3};
  g.alpha_presets = {"equal"};
  g.sample_sizes = {5};
  g.binnings = {BinningStrategy::kEqualWidth, BinningStrategy::kEqualFrequency};
  g.metrics = {MetricSpec::parse("ece")};
  g.seeds = {0, 1};
  const auto result = run_grid(g);
  REQUIRE(result.rows.size() == 4);
  std::size_t failed = 0;
  for (const auto& row : result.rows) {
    if (row.cell.binning == BinningStrategy::kEqualFrequency) {
      CHECK_FALSE(row.value.has_value());
      CHECK(row.status.rfind("error:", 0) == 0);
      ++failed;
    } else {
      CHECK(row.value.has_value());
    }
  }
  CHECK(failed == 2);
  CHECK(result.failures.size() == 2);
}

TEST_CASE("grid output directory") {
  const auto dir = scratch_dir("grid");
  ExperimentGrid g;
  g.class_counts = {3};
  g.alpha_presets = {"equal"};
  g.sample_sizes = {1'000};
  g.seeds = {4};
  const auto result = run_grid(g, {.out_dir = dir});
  for (const char* f : {"results.csv", "results.json", "summary.csv", "summary.json",
                        "timings.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK_FALSE(std::filesystem::exists(dir / "results.journal.csv"));
  for (const auto& row : result.rows) {
    const auto table = reliability_from_json(read_text_file(dir / row.reliability_ref));
    CHECK(table == row.reliability);
  }
  const auto summary = read_grid_summary(dir / "summary.csv");
  REQUIRE(summary.size() == result.summary.size());
  CHECK(summary[0].median == result.summary[0].median);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reliability tables") {
  SUBCASE("single non-empty bin") {
    DatasetBuilder b(2);
    b.add(std::vector<double>{0.96, 0.04}, 0);
    b.add(std::vector<double>{0.98, 0.02}, 1);
    const auto report = compute_ece(std::move(b).build(), 10, BinningStrategy::kEqualWidth);
    const auto table = reliability_data(report);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].bin_index == 10);
    CHECK(table.rows[0].count == 2);
    CHECK(table.domain.lo == 0.5);
    CHECK(reconstruct_value(table) == report.value);
  }
  SUBCASE("calibrated data sits near the identity for ECE and VCE") {
    const auto ds = generate_calibrated_dataset({{1, 1, 1}, 1'000'000, 3});
    const auto ece = reliability_data(compute_ece(ds, 10, BinningStrategy::kEqualWidth));
    const auto vce = reliability_data(
        compute_vce(ds, entropy_metric(), 10, BinningStrategy::kEqualWidth));
    const auto uce = reliability_data(compute_uce(ds, 10, BinningStrategy::kEqualWidth));
    CHECK(max_bin_deviation(ece) < 0.02);
    CHECK(max_bin_deviation(vce) < 0.02);
    CHECK(max_bin_deviation(uce) > 0.2);
  }
}

TEST_CASE("binomial consistency of generated data") {
  const auto ds = generate_calibrated_dataset({{1, 1, 1}, 200'000, 21});
  const auto check = check_binomial_consistency(ds, 10);
  CHECK(check.bins_checked == 10);
  CHECK(check.bins_within >= 9);

  // Deliberately overconfident data fails.
  DatasetBuilder b(2);
  for (int i = 0; i < 10'000; ++i) b.add(std::vector<double>{0.9, 0.1}, i % 2);
  const auto bad = check_binomial_consistency(std::move(b).build(), 10);
  CHECK(bad.bins_within < bad.bins_checked);
}

TEST_CASE("self-tests pass") {
  for (const auto name : selftest_names()) {
    const auto r = run_selftest(name, 7);
    CAPTURE(r.message);
    CHECK(r.passed);
  }
  CHECK_THROWS(run_selftest("nonsense", 1));
}
