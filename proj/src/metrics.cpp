#include "calibra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "calibra/error.hpp"
#include "calibra/summation.hpp"

namespace calibra {
namespace {

// Ranks one row into `order` and copies the sorted probabilities into `q`.
void rank_row(std::span<const double> p, std::span<std::uint32_t> order,
              std::span<double> q) {
  rank_classes(p, order);
  for (std::size_t c = 0; c < p.size(); ++c) q[c] = p[order[c]];
}

struct BinPair {
  std::size_t count = 0;
  double predicted = 0.0;
  double observed = 0.0;
};

CalibrationReport make_report(MetricKind kind, const BinAssignment& bins,
                              BinDomain domain, std::size_t n,
                              const std::vector<BinPair>& pairs) {
  CalibrationReport report;
  report.metric = kind;
  report.strategy = bins.partition.strategy;
  report.domain = domain;
  report.n = n;
  report.num_bins = pairs.size();
  report.bins.reserve(pairs.size());
  const auto& edges = bins.partition.edges;
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    BinDiagnostics d;
    d.bin_index = m + 1;
    d.lower_edge = edges[m];
    d.upper_edge = edges[m + 1];
    d.count = pairs[m].count;
    if (d.count > 0) {
      d.predicted = pairs[m].predicted;
      d.observed = pairs[m].observed;
      d.contribution =
          bin_contribution(d.count, n, pairs[m].predicted, pairs[m].observed);
    }
    report.value += d.contribution;
    report.bins.push_back(d);
  }
  return report;
}

}  // namespace

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::kEce: return "ece";
    case MetricKind::kUce: return "uce";
    case MetricKind::kVce: return "vce";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view name) noexcept {
  if (name == "ece") return MetricKind::kEce;
  if (name == "uce") return MetricKind::kUce;
  if (name == "vce") return MetricKind::kVce;
  return std::nullopt;
}

std::string CalibrationReport::metric_name() const {
  std::string name(to_string(metric));
  if (metric == MetricKind::kVce) name += ":" + variation;
  return name;
}

double bin_contribution(std::size_t count, std::size_t n, double predicted,
                        double observed) noexcept {
  return static_cast<double>(count) / static_cast<double>(n) *
         std::abs(observed - predicted);
}

CalibrationReport compute_ece(const Dataset& ds, std::size_t num_bins,
                              BinningStrategy strategy,
                              std::optional<BinDomain> domain) {
  const std::size_t n = ds.size();
  const std::size_t c = ds.num_classes();
  const BinDomain dom =
      domain.value_or(BinDomain{1.0 / static_cast<double>(c), 1.0});

  std::vector<double> conf(n);
  std::vector<std::uint8_t> correct(n);
  std::vector<std::uint32_t> order(c);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = ds.probs(i);
    rank_classes(p, order);
    conf[i] = p[order[0]];
    correct[i] = order[0] == ds.label(i);
  }

  const auto bins = assign_bins(conf, num_bins, strategy, dom);
  std::vector<CompensatedSum> conf_sum(num_bins);
  std::vector<std::size_t> hits(num_bins, 0);
  std::vector<BinPair> pairs(num_bins);
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = bins.bin_of[i];
    conf_sum[m].add(conf[i]);
    hits[m] += correct[i];
    ++pairs[m].count;
  }
  for (std::size_t m = 0; m < num_bins; ++m) {
    if (pairs[m].count == 0) continue;
    const double count = static_cast<double>(pairs[m].count);
    pairs[m].predicted = conf_sum[m].value() / count;
    pairs[m].observed = static_cast<double>(hits[m]) / count;
  }
  return make_report(MetricKind::kEce, bins, dom, n, pairs);
}

CalibrationReport compute_uce(const Dataset& ds, std::size_t num_bins,
                              BinningStrategy strategy) {
  const std::size_t n = ds.size();
  const std::size_t c = ds.num_classes();
  const BinDomain dom{0.0, 1.0};
  const auto metric = entropy_metric();

  std::vector<double> uncert(n);
  std::vector<std::uint8_t> wrong(n);
  std::vector<std::uint32_t> order(c);
  std::vector<double> q(c);
  for (std::size_t i = 0; i < n; ++i) {
    rank_row(ds.probs(i), order, q);
    uncert[i] = metric.evaluate_sorted(q);
    wrong[i] = order[0] != ds.label(i);
  }

  const auto bins = assign_bins(uncert, num_bins, strategy, dom);
  std::vector<CompensatedSum> uncert_sum(num_bins);
  std::vector<std::size_t> misses(num_bins, 0);
  std::vector<BinPair> pairs(num_bins);
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = bins.bin_of[i];
    uncert_sum[m].add(uncert[i]);
    misses[m] += wrong[i];
    ++pairs[m].count;
  }
  for (std::size_t m = 0; m < num_bins; ++m) {
    if (pairs[m].count == 0) continue;
    const double count = static_cast<double>(pairs[m].count);
    pairs[m].predicted = uncert_sum[m].value() / count;
    pairs[m].observed = static_cast<double>(misses[m]) / count;
  }
  return make_report(MetricKind::kUce, bins, dom, n, pairs);
}

CalibrationReport compute_vce(const Dataset& ds, const VariationMetric& metric,
                              std::size_t num_bins, BinningStrategy strategy,
                              BinDomain domain) {
  const std::size_t n = ds.size();
  const std::size_t c = ds.num_classes();

  std::vector<double> stat(n);
  std::vector<std::uint32_t> rank(n);
  std::vector<std::uint32_t> order(c);
  std::vector<double> q(c);
  for (std::size_t i = 0; i < n; ++i) {
    rank_row(ds.probs(i), order, q);
    stat[i] = metric.evaluate_sorted(q);
    rank[i] = static_cast<std::uint32_t>(rank_of(order, ds.label(i)));
  }

  const auto bins = assign_bins(stat, num_bins, strategy, domain);

  // Row-major [bin][rank] accumulators for sum of q_i and sum of r_i.
  std::vector<CompensatedSum> q_sum(num_bins * c);
  std::vector<std::size_t> r_count(num_bins * c, 0);
  std::vector<BinPair> pairs(num_bins);
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = bins.bin_of[i];
    rank_row(ds.probs(i), order, q);
    for (std::size_t k = 0; k < c; ++k) q_sum[m * c + k].add(q[k]);
    ++r_count[m * c + rank[i]];
    ++pairs[m].count;
  }

  std::vector<double> mean_q(c);
  std::vector<double> rank_freq(c);
  for (std::size_t m = 0; m < num_bins; ++m) {
    if (pairs[m].count == 0) continue;
    const double count = static_cast<double>(pairs[m].count);
    for (std::size_t k = 0; k < c; ++k) {
      mean_q[k] = q_sum[m * c + k].value() / count;
      rank_freq[k] = static_cast<double>(r_count[m * c + k]) / count;
    }
    pairs[m].predicted = metric(mean_q);
    pairs[m].observed = metric(rank_freq);
  }
  auto report = make_report(MetricKind::kVce, bins, domain, n, pairs);
  report.variation = std::string(metric.name());
  return report;
}

ReductionCheck check_ece_reduction(const Dataset& ds, std::size_t num_bins,
                                   BinDomain domain) {
  const auto ece =
      compute_ece(ds, num_bins, BinningStrategy::kEqualWidth, domain);
  const auto vce = compute_vce(ds, confidence_metric(), num_bins,
                               BinningStrategy::kEqualWidth, domain);

  // Rank frequencies per bin decide whether rank 1 is the modal rank.
  const std::size_t c = ds.num_classes();
  std::vector<double> conf(ds.size());
  std::vector<std::uint32_t> rank(ds.size());
  std::vector<std::uint32_t> order(c);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto p = ds.probs(i);
    rank_classes(p, order);
    conf[i] = p[order[0]];
    rank[i] = static_cast<std::uint32_t>(rank_of(order, ds.label(i)));
  }
  const auto bins = equal_width_bins(conf, num_bins, domain);
  std::vector<std::size_t> r_count(num_bins * c, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ++r_count[bins.bin_of[i] * c + rank[i]];
  }

  ReductionCheck check;
  check.ece = ece.value;
  check.vce = vce.value;
  check.all_modal = true;
  for (std::size_t m = 0; m < num_bins; ++m) {
    const auto& e = ece.bins[m];
    const auto& v = vce.bins[m];
    if (e.count != v.count) {
      throw Error(ErrorCode::kInternal, "ECE and VCE bins disagree");
    }
    if (e.count == 0) continue;
    const auto first = r_count.begin() + static_cast<std::ptrdiff_t>(m * c);
    ReductionBin bin;
    bin.bin_index = m + 1;
    bin.count = e.count;
    bin.rank1_modal = *std::max_element(first, first + static_cast<std::ptrdiff_t>(c)) == *first;
    bin.conf = *e.predicted;
    bin.acc = *e.observed;
    bin.predicted_variation = *v.predicted;
    bin.observed_variation = *v.observed;
    if (bin.rank1_modal) {
      check.max_modal_gap =
          std::max({check.max_modal_gap, std::abs(bin.predicted_variation - bin.conf),
                    std::abs(bin.observed_variation - bin.acc)});
    } else {
      check.all_modal = false;
    }
    check.bins.push_back(bin);
  }
  return check;
}

}  // namespace calibra
