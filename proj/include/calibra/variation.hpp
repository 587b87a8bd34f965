#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace calibra {

// Normalized Shannon entropy, -sum p_c log_C p_c, with 0 log 0 = 0.
double entropy(std::span<const double> p);
// Largest probability.
double confidence(std::span<const double> p);
// Wilcox's variation ratio normalized to [0,1]: C (1 - max p) / (C - 1).
double wvr(std::span<const double> p);
// Index of qualitative variation: C (1 - sum p^2) / (C - 1).
double iqv(std::span<const double> p);

// A map from the probability simplex onto [0,1] that ignores the order of its
// input. Instances are cheap values wrapping a plain function pointer.
class VariationMetric {
 public:
  // `on_sorted` must give the metric for a non-increasing input vector.
  using SortedFn = double (*)(std::span<const double>);

  constexpr VariationMetric(std::string_view name, SortedFn on_sorted) noexcept
      : name_(name), on_sorted_(on_sorted) {}

  std::string_view name() const noexcept { return name_; }

  // Any ordering of p.
  double operator()(std::span<const double> p) const;
  // p already sorted non-increasing; skips the copy-and-sort.
  double evaluate_sorted(std::span<const double> q) const {
    return on_sorted_(q);
  }

  friend bool operator==(const VariationMetric& a, const VariationMetric& b) {
    return a.name_ == b.name_;
  }

 private:
  std::string_view name_;
  SortedFn on_sorted_;
};

VariationMetric entropy_metric() noexcept;
VariationMetric confidence_metric() noexcept;
VariationMetric wvr_metric() noexcept;
VariationMetric iqv_metric() noexcept;

// Looks up `entropy`, `confidence`, `wvr` or `iqv`.
std::optional<VariationMetric> find_variation(std::string_view name) noexcept;
std::vector<std::string_view> variation_names();

}  // namespace calibra
