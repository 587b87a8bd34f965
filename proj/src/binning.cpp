#include "calibra/binning.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "calibra/error.hpp"

namespace calibra {
namespace {

void check_bin_count(std::size_t num_bins) {
  if (num_bins < 1 || num_bins > (1u << 24)) {
    throw Error(ErrorCode::kInvalidBinCount,
                "bin count must be in [1, 2^24], got " + std::to_string(num_bins));
  }
}

void fill_members(BinAssignment& out, std::size_t num_bins) {
  std::vector<std::size_t> counts(num_bins, 0);
  for (const auto b : out.bin_of) ++counts[b];
  out.members.resize(num_bins);
  for (std::size_t m = 0; m < num_bins; ++m) out.members[m].reserve(counts[m]);
  for (std::size_t i = 0; i < out.bin_of.size(); ++i) {
    out.members[out.bin_of[i]].push_back(i);
  }
}

}  // namespace

std::string_view to_string(BinningStrategy strategy) noexcept {
  return strategy == BinningStrategy::kEqualWidth ? "equal-width"
                                                  : "equal-frequency";
}

std::optional<BinningStrategy> parse_binning(std::string_view name) noexcept {
  if (name == "equal-width") return BinningStrategy::kEqualWidth;
  if (name == "equal-frequency") return BinningStrategy::kEqualFrequency;
  return std::nullopt;
}

BinAssignment equal_width_bins(std::span<const double> values,
                               std::size_t num_bins, BinDomain domain) {
  check_bin_count(num_bins);
  if (!(domain.lo < domain.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "bin domain needs lo < hi");
  }

  BinAssignment out;
  out.partition.strategy = BinningStrategy::kEqualWidth;
  auto& edges = out.partition.edges;
  edges.resize(num_bins + 1);
  const double width = domain.hi - domain.lo;
  for (std::size_t k = 0; k <= num_bins; ++k) {
    edges[k] = domain.lo + static_cast<double>(k) * width /
                               static_cast<double>(num_bins);
  }
  edges.back() = domain.hi;

  out.values.assign(values.begin(), values.end());
  out.bin_of.resize(values.size());
  // Upper edges of bins 1..M-1; the last bin absorbs everything above.
  const auto inner_begin = edges.begin() + 1;
  const auto inner_end = edges.end() - 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= domain.lo - kDomainTolerance && v <= domain.hi + kDomainTolerance)) {
      throw Error(ErrorCode::kValueOutOfDomain,
                  "value " + std::to_string(v) + " at index " +
                      std::to_string(i) + " outside [" +
                      std::to_string(domain.lo) + ", " +
                      std::to_string(domain.hi) + "]");
    }
    // First upper edge >= v gives the right-closed bin.
    out.bin_of[i] = static_cast<std::uint32_t>(
        std::lower_bound(inner_begin, inner_end, v) - inner_begin);
  }
  fill_members(out, num_bins);
  return out;
}

BinAssignment equal_frequency_bins(std::span<const double> values,
                                   std::size_t num_bins) {
  check_bin_count(num_bins);
  const std::size_t n = values.size();
  if (n < num_bins) {
    throw Error(ErrorCode::kTooFewSamples,
                "equal-frequency binning needs at least " +
                    std::to_string(num_bins) + " samples, got " +
                    std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [values](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  BinAssignment out;
  out.partition.strategy = BinningStrategy::kEqualFrequency;
  out.values.assign(values.begin(), values.end());
  out.bin_of.resize(n);
  auto& edges = out.partition.edges;
  edges.resize(num_bins + 1);

  const std::size_t base = n / num_bins;
  const std::size_t extra = n % num_bins;
  std::size_t pos = 0;
  edges.front() = values[order.front()];
  for (std::size_t m = 0; m < num_bins; ++m) {
    const std::size_t size = base + (m < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) {
      out.bin_of[order[pos + k]] = static_cast<std::uint32_t>(m);
    }
    pos += size;
    if (m + 1 < num_bins) {
      edges[m + 1] = 0.5 * (values[order[pos - 1]] + values[order[pos]]);
    }
  }
  edges.back() = values[order.back()];
  fill_members(out, num_bins);
  return out;
}

BinAssignment assign_bins(std::span<const double> values, std::size_t num_bins,
                          BinningStrategy strategy, BinDomain domain) {
  return strategy == BinningStrategy::kEqualWidth
             ? equal_width_bins(values, num_bins, domain)
             : equal_frequency_bins(values, num_bins);
}

}  // namespace calibra
