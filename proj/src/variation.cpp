#include "calibra/variation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace calibra {
namespace {

bool all_equal(std::span<const double> p) {
  return std::adjacent_find(p.begin(), p.end(), std::not_equal_to<>()) ==
         p.end();
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

double entropy_sorted(std::span<const double> q) {
  if (all_equal(q)) return 1.0;
  double sum = 0.0;
  for (const double p : q) {
    if (p > 0.0) sum -= p * std::log(p);
  }
  return clamp_unit(sum / std::log(static_cast<double>(q.size())));
}

double confidence_sorted(std::span<const double> q) { return q.front(); }

double wvr_sorted(std::span<const double> q) {
  if (all_equal(q)) return 1.0;
  const double c = static_cast<double>(q.size());
  return clamp_unit(c * (1.0 - q.front()) / (c - 1.0));
}

double iqv_sorted(std::span<const double> q) {
  if (all_equal(q)) return 1.0;
  double squares = 0.0;
  for (const double p : q) squares += p * p;
  const double c = static_cast<double>(q.size());
  return clamp_unit(c * (1.0 - squares) / (c - 1.0));
}

template <typename Fn>
double on_sorted_copy(std::span<const double> p, Fn fn) {
  constexpr std::size_t kInline = 32;
  if (p.size() <= kInline) {
    std::array<double, kInline> buf;
    std::copy(p.begin(), p.end(), buf.begin());
    std::sort(buf.begin(), buf.begin() + p.size(), std::greater<>());
    return fn(std::span<const double>(buf.data(), p.size()));
  }
  std::vector<double> buf(p.begin(), p.end());
  std::sort(buf.begin(), buf.end(), std::greater<>());
  return fn(buf);
}

}  // namespace

// Entropy and IQV are sums whose rounding depends on term order, so they are
// always evaluated on the sorted vector to be exactly permutation invariant.
double entropy(std::span<const double> p) {
  return on_sorted_copy(p, entropy_sorted);
}

double confidence(std::span<const double> p) {
  return *std::max_element(p.begin(), p.end());
}

double wvr(std::span<const double> p) {
  if (all_equal(p)) return 1.0;
  const double c = static_cast<double>(p.size());
  return clamp_unit(c * (1.0 - confidence(p)) / (c - 1.0));
}

double iqv(std::span<const double> p) { return on_sorted_copy(p, iqv_sorted); }

double VariationMetric::operator()(std::span<const double> p) const {
  return on_sorted_copy(p, on_sorted_);
}

VariationMetric entropy_metric() noexcept { return {"entropy", entropy_sorted}; }
VariationMetric confidence_metric() noexcept {
  return {"confidence", confidence_sorted};
}
VariationMetric wvr_metric() noexcept { return {"wvr", wvr_sorted}; }
VariationMetric iqv_metric() noexcept { return {"iqv", iqv_sorted}; }

std::optional<VariationMetric> find_variation(std::string_view name) noexcept {
  for (const auto& metric :
       {entropy_metric(), confidence_metric(), wvr_metric(), iqv_metric()}) {
    if (metric.name() == name) return metric;
  }
  return std::nullopt;
}

std::vector<std::string_view> variation_names() {
  return {"entropy", "confidence", "wvr", "iqv"};
}

}  // namespace calibra
