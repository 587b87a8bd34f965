#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calibra/binning.hpp"
#include "calibra/dataset.hpp"
#include "calibra/metrics.hpp"

namespace calibra {

// `ece`, `uce`, or `vce:<variation>` (plain `vce` means entropy).
struct MetricSpec {
  MetricKind kind = MetricKind::kEce;
  std::string variation;

  std::string name() const;
  static MetricSpec parse(std::string_view text);

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

CalibrationReport evaluate(const Dataset& ds, const MetricSpec& metric,
                           std::size_t num_bins, BinningStrategy strategy);

struct ExperimentGrid {
  std::vector<std::size_t> class_counts{3, 10};
  std::vector<std::string> alpha_presets{"equal", "skewed"};
  std::vector<std::size_t> sample_sizes{10'000, 100'000, 1'000'000, 10'000'000};
  std::vector<BinningStrategy> binnings{BinningStrategy::kEqualWidth,
                                        BinningStrategy::kEqualFrequency};
  std::size_t num_bins = 10;
  std::vector<MetricSpec> metrics{{MetricKind::kEce, ""},
                                  {MetricKind::kUce, ""},
                                  {MetricKind::kVce, "entropy"}};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // Sample sizes at or above this threshold only use the first
  // `large_n_replicates` seeds.
  std::size_t large_n = 10'000'000;
  std::size_t large_n_replicates = 3;
  bool keep_data = false;

  void validate() const;
  std::size_t seeds_for(std::size_t n) const;
  std::size_t expected_rows() const;
};

struct CellKey {
  std::size_t classes = 0;
  std::string alpha;
  std::size_t n = 0;
  BinningStrategy binning = BinningStrategy::kEqualWidth;
  std::string metric;

  // File-name-safe identifier, e.g. `C3_equal_N10000_equal-width_vce-entropy`.
  std::string slug() const;

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct ReliabilityRow {
  std::size_t bin_index = 0;  // 1-based
  double bin_center = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
  std::size_t count = 0;

  friend bool operator==(const ReliabilityRow&, const ReliabilityRow&) = default;
};

// Non-empty bins of a report as points against the identity reference line
// from (domain.lo, domain.lo) to (domain.hi, domain.hi).
struct ReliabilityTable {
  std::string metric;
  std::size_t n = 0;
  double value = 0.0;
  BinDomain domain;
  std::vector<ReliabilityRow> rows;

  friend bool operator==(const ReliabilityTable&, const ReliabilityTable&) = default;
};

ReliabilityTable reliability_data(const CalibrationReport& report);

// Recomputes the scalar metric from the table alone.
double reconstruct_value(const ReliabilityTable& table);

// Largest per-bin |observed - predicted|.
double max_bin_deviation(const ReliabilityTable& table);

struct GridRow {
  CellKey cell;
  std::uint64_t seed = 0;
  std::uint64_t dataset_seed = 0;
  std::optional<double> value;  // unset when the run failed
  std::string status = "ok";
  std::string reliability_ref;
  double wall_seconds = 0.0;
  ReliabilityTable reliability;
};

struct CellSummary {
  CellKey cell;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::vector<CellSummary> summary;
  std::vector<std::string> failures;

  const CellSummary* find(const CellKey& key) const;
};

struct GridOptions {
  // When set, results, summaries, reliability tables and a timing sidecar are
  // written here; completed cells are journaled as they finish.
  std::optional<std::filesystem::path> out_dir;
  unsigned threads = 1;
  std::function<void(const std::string&)> log;
};

std::uint64_t dataset_seed_for(std::uint64_t seed, std::size_t classes,
                               const std::string& alpha, std::size_t n);

GridResult run_grid(const ExperimentGrid& grid, const GridOptions& options = {});

// Linear-interpolated quantile (Hyndman-Fan type 7) of unsorted values.
double quantile(std::vector<double> values, double prob);

// Per-bin binomial check of confidence calibration.
struct BinomialConsistency {
  std::size_t bins_checked = 0;
  std::size_t bins_within = 0;
  std::vector<double> z_scores;  // per non-empty bin
};

BinomialConsistency check_binomial_consistency(const Dataset& ds,
                                               std::size_t num_bins,
                                               double max_z = 3.0);

struct SelfTestResult {
  bool passed = false;
  std::string message;
};

inline constexpr double kReductionTolerance = 1e-12;

// `reduction`: VCE(confidence) against ECE on a generated C=2 dataset with
// N=10^5 and shared edges over [1/2, 1]. `calibration`: binomial consistency
// of a generated C=3, equal-alpha, N=10^6 dataset (>= 9 of 10 bins within 3
// standard errors).
SelfTestResult run_selftest(std::string_view name, std::uint64_t seed);
std::vector<std::string_view> selftest_names();

// Worker count from CALIBRA_THREADS, defaulting to hardware concurrency.
unsigned default_thread_count();

}  // namespace calibra
