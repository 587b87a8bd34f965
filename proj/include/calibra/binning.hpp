#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace calibra {

enum class BinningStrategy { kEqualWidth, kEqualFrequency };

std::string_view to_string(BinningStrategy strategy) noexcept;
// Accepts `equal-width` and `equal-frequency`.
std::optional<BinningStrategy> parse_binning(std::string_view name) noexcept;

// Values within this distance of the domain are clamped into the end bins.
inline constexpr double kDomainTolerance = 1e-12;

struct BinDomain {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const BinDomain&, const BinDomain&) = default;
};

struct BinPartition {
  BinningStrategy strategy = BinningStrategy::kEqualWidth;
  // M + 1 boundaries. Strictly increasing for equal-width; for equal-frequency
  // they are informational midpoints and only non-decreasing.
  std::vector<double> edges;

  std::size_t num_bins() const noexcept {
    return edges.empty() ? 0 : edges.size() - 1;
  }
};

struct BinAssignment {
  BinPartition partition;
  // members[m] lists the sample indices of bin m (0-based), ascending.
  std::vector<std::vector<std::size_t>> members;
  // bin_of[i] is the 0-based bin of sample i.
  std::vector<std::uint32_t> bin_of;
  std::vector<double> values;
};

// Bin m (1-based) is (edge_{m-1}, edge_m]; a value equal to the domain
// minimum goes to bin 1.
BinAssignment equal_width_bins(std::span<const double> values,
                               std::size_t num_bins, BinDomain domain);

// Sorts by value (ties by sample index) and cuts into M contiguous chunks;
// the first N mod M chunks take one extra sample.
BinAssignment equal_frequency_bins(std::span<const double> values,
                                   std::size_t num_bins);

BinAssignment assign_bins(std::span<const double> values, std::size_t num_bins,
                          BinningStrategy strategy, BinDomain domain);

}  // namespace calibra
