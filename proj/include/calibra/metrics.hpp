#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "calibra/binning.hpp"
#include "calibra/dataset.hpp"
#include "calibra/variation.hpp"

namespace calibra {

enum class MetricKind { kEce, kUce, kVce };

std::string_view to_string(MetricKind kind) noexcept;
std::optional<MetricKind> parse_metric(std::string_view name) noexcept;

// Per-bin diagnostics. For ECE predicted/observed are conf/acc, for UCE
// uncert/err, for VCE the variation of the mean ordered prediction and of the
// rank-frequency vector. Empty bins leave both unset and contribute 0.
struct BinDiagnostics {
  std::size_t bin_index = 0;  // 1-based
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  std::size_t count = 0;
  std::optional<double> predicted;
  std::optional<double> observed;
  double contribution = 0.0;

  friend bool operator==(const BinDiagnostics&, const BinDiagnostics&) = default;
};

struct CalibrationReport {
  MetricKind metric = MetricKind::kEce;
  std::string variation;  // set for VCE only
  BinningStrategy strategy = BinningStrategy::kEqualWidth;
  BinDomain domain;
  std::size_t n = 0;
  std::size_t num_bins = 0;
  double value = 0.0;
  std::vector<BinDiagnostics> bins;

  std::string metric_name() const;

  friend bool operator==(const CalibrationReport&,
                         const CalibrationReport&) = default;
};

// (count / N) |observed - predicted|; the single formula shared by reports and
// reliability tables so that reconstruction is exact.
double bin_contribution(std::size_t count, std::size_t n, double predicted,
                        double observed) noexcept;

// Default domain is [1/C, 1]. Ignored for equal-frequency binning.
CalibrationReport compute_ece(const Dataset& ds, std::size_t num_bins,
                              BinningStrategy strategy,
                              std::optional<BinDomain> domain = std::nullopt);

CalibrationReport compute_uce(const Dataset& ds, std::size_t num_bins,
                              BinningStrategy strategy);

CalibrationReport compute_vce(const Dataset& ds, const VariationMetric& metric,
                              std::size_t num_bins, BinningStrategy strategy,
                              BinDomain domain = {});

struct ReductionBin {
  std::size_t bin_index = 0;  // 1-based
  std::size_t count = 0;
  bool rank1_modal = false;
  double conf = 0.0;
  double acc = 0.0;
  double predicted_variation = 0.0;
  double observed_variation = 0.0;
};

// Side-by-side ECE and VCE(confidence) on identical equal-width edges.
struct ReductionCheck {
  std::vector<ReductionBin> bins;  // non-empty bins only
  double ece = 0.0;
  double vce = 0.0;
  bool all_modal = false;
  // Largest |P - conf| or |O - acc| over bins where rank 1 is modal.
  double max_modal_gap = 0.0;
};

ReductionCheck check_ece_reduction(const Dataset& ds, std::size_t num_bins,
                                   BinDomain domain);

}  // namespace calibra
