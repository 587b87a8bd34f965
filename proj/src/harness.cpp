#include "calibra/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "calibra/error.hpp"
#include "calibra/io.hpp"
#include "calibra/synthetic.hpp"

namespace calibra {
namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string slug_part(std::string_view text) {
  std::string out;
  for (const char ch : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ||
                      ch == '.';
    out += keep ? ch : '-';
  }
  return out;
}

// One generated dataset and every (binning, metric) evaluated on it.
struct Task {
  std::size_t classes;
  std::string alpha;
  std::size_t n;
  std::uint64_t seed;
  std::vector<std::size_t> row_slots;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string MetricSpec::name() const {
  std::string out(to_string(kind));
  if (kind == MetricKind::kVce) out += ":" + variation;
  return out;
}

MetricSpec MetricSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto kind = parse_metric(head);
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown metric `" + std::string(text) + "` (ece, uce, vce[:variation])");
  }
  MetricSpec spec{*kind, ""};
  if (*kind == MetricKind::kVce) {
    spec.variation =
        colon == std::string_view::npos ? "entropy" : std::string(text.substr(colon + 1));
    if (!find_variation(spec.variation)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown variation metric `" + spec.variation + "`");
    }
  } else if (colon != std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "only vce takes a variation metric: `" + std::string(text) + "`");
  }
  return spec;
}

CalibrationReport evaluate(const Dataset& ds, const MetricSpec& metric,
                           std::size_t num_bins, BinningStrategy strategy) {
  switch (metric.kind) {
    case MetricKind::kEce:
      return compute_ece(ds, num_bins, strategy);
    case MetricKind::kUce:
      return compute_uce(ds, num_bins, strategy);
    case MetricKind::kVce: {
      const auto v = find_variation(metric.variation);
      if (!v) {
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown variation metric `" + metric.variation + "`");
      }
      return compute_vce(ds, *v, num_bins, strategy);
    }
  }
  throw Error(ErrorCode::kInternal, "unhandled metric kind");
}

void ExperimentGrid::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(!class_counts.empty(), "grid needs at least one class count");
  require(!alpha_presets.empty(), "grid needs at least one alpha preset");
  require(!sample_sizes.empty(), "grid needs at least one sample size");
  require(!binnings.empty(), "grid needs at least one binning strategy");
  require(!metrics.empty(), "grid needs at least one metric");
  require(!seeds.empty(), "grid needs at least one seed");
  require(num_bins >= 1, "grid needs at least one bin");
  require(large_n_replicates >= 1, "large_n_replicates must be positive");
  for (const auto c : class_counts) require(c >= 2, "class counts must be >= 2");
  for (const auto n : sample_sizes) require(n >= 1, "sample sizes must be positive");
}

std::size_t ExperimentGrid::seeds_for(std::size_t n) const {
  return n >= large_n ? std::min(seeds.size(), large_n_replicates) : seeds.size();
}

std::size_t ExperimentGrid::expected_rows() const {
  std::size_t per_scenario = 0;
  for (const auto n : sample_sizes) per_scenario += seeds_for(n);
  return class_counts.size() * alpha_presets.size() * per_scenario *
         binnings.size() * metrics.size();
}

std::string CellKey::slug() const {
  return "C" + std::to_string(classes) + "_" + slug_part(alpha) + "_N" +
         std::to_string(n) + "_" + std::string(to_string(binning)) + "_" +
         slug_part(metric);
}

const CellSummary* GridResult::find(const CellKey& key) const {
  for (const auto& s : summary) {
    if (s.cell == key) return &s;
  }
  return nullptr;
}

ReliabilityTable reliability_data(const CalibrationReport& report) {
  ReliabilityTable table;
  table.metric = report.metric_name();
  table.n = report.n;
  table.value = report.value;
  table.domain = report.metric == MetricKind::kEce ? report.domain : BinDomain{0.0, 1.0};
  for (const auto& b : report.bins) {
    if (b.count == 0) continue;
    table.rows.push_back({b.bin_index, 0.5 * (b.lower_edge + b.upper_edge),
                          *b.predicted, *b.observed, b.count});
  }
  return table;
}

double reconstruct_value(const ReliabilityTable& table) {
  double value = 0.0;
  for (const auto& r : table.rows) {
    value += bin_contribution(r.count, table.n, r.predicted, r.observed);
  }
  return value;
}

double max_bin_deviation(const ReliabilityTable& table) {
  double worst = 0.0;
  for (const auto& r : table.rows) {
    worst = std::max(worst, std::abs(r.observed - r.predicted));
  }
  return worst;
}

std::uint64_t dataset_seed_for(std::uint64_t seed, std::size_t classes,
                               const std::string& alpha, std::size_t n) {
  const std::string key =
      "C=" + std::to_string(classes) + "|alpha=" + alpha + "|n=" + std::to_string(n);
  return derive_seed(seed, fnv1a(key));
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

GridResult run_grid(const ExperimentGrid& grid, const GridOptions& options) {
  grid.validate();

  // Canonical row order: classes, alpha, n, binning, metric, seed.
  GridResult result;
  std::vector<Task> tasks;
  const std::size_t per_task = grid.binnings.size() * grid.metrics.size();
  for (const auto classes : grid.class_counts) {
    for (const auto& alpha : grid.alpha_presets) {
      for (const auto n : grid.sample_sizes) {
        const std::size_t replicates = grid.seeds_for(n);
        const std::size_t base = result.rows.size();
        for (std::size_t b = 0; b < grid.binnings.size(); ++b) {
          for (std::size_t m = 0; m < grid.metrics.size(); ++m) {
            for (std::size_t s = 0; s < replicates; ++s) {
              GridRow row;
              row.cell = {classes, alpha, n, grid.binnings[b], grid.metrics[m].name()};
              row.seed = grid.seeds[s];
              row.dataset_seed = dataset_seed_for(row.seed, classes, alpha, n);
              row.status = "pending";
              result.rows.push_back(std::move(row));
            }
          }
        }
        for (std::size_t s = 0; s < replicates; ++s) {
          Task task{classes, alpha, n, grid.seeds[s], {}};
          task.row_slots.reserve(per_task);
          for (std::size_t k = 0; k < per_task; ++k) {
            task.row_slots.push_back(base + k * replicates + s);
          }
          tasks.push_back(std::move(task));
        }
      }
    }
  }

  const auto& out_dir = options.out_dir;
  std::ofstream journal;
  std::filesystem::path journal_path;
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir / "reliability", ec);
    if (grid.keep_data) std::filesystem::create_directories(*out_dir / "data", ec);
    if (ec) {
      throw Error(ErrorCode::kIoError,
                  "cannot create `" + out_dir->string() + "`: " + ec.message());
    }
    journal_path = *out_dir / "results.journal.csv";
    journal.open(journal_path, std::ios::binary | std::ios::trunc);
    if (!journal) {
      throw Error(ErrorCode::kIoError, "cannot open `" + journal_path.string() + "`");
    }
    journal << kGridColumns << '\n' << std::flush;
  }

  std::mutex append_mutex;
  auto run_task = [&](const Task& task, unsigned gen_threads) {
    const std::uint64_t ds_seed =
        dataset_seed_for(task.seed, task.classes, task.alpha, task.n);
    std::vector<std::string> written;
    try {
      const auto alpha = alpha_preset(task.alpha, task.classes);
      const auto ds = generate_calibrated_dataset({alpha, task.n, ds_seed}, gen_threads);
      if (out_dir && grid.keep_data) {
        write_predictions(ds, *out_dir / "data" /
                                  ("C" + std::to_string(task.classes) + "_" +
                                   slug_part(task.alpha) + "_N" + std::to_string(task.n) +
                                   "_s" + std::to_string(task.seed) + ".csv"));
      }
      for (std::size_t b = 0; b < grid.binnings.size(); ++b) {
        for (std::size_t m = 0; m < grid.metrics.size(); ++m) {
          auto& row = result.rows[task.row_slots[b * grid.metrics.size() + m]];
          const auto start = std::chrono::steady_clock::now();
          try {
            const auto report = evaluate(ds, grid.metrics[m], grid.num_bins, grid.binnings[b]);
            row.wall_seconds = seconds_since(start);
            row.value = report.value;
            row.status = "ok";
            row.reliability = reliability_data(report);
            if (out_dir) {
              row.reliability_ref = "reliability/" + row.cell.slug() + "_s" +
                                    std::to_string(row.seed) + ".json";
              write_text_file(*out_dir / row.reliability_ref,
                              reliability_to_json(row.reliability));
            }
          } catch (const std::exception& e) {
            row.wall_seconds = seconds_since(start);
            row.status = std::string("error: ") + e.what();
          }
        }
      }
    } catch (const std::exception& e) {
      for (const auto slot : task.row_slots) {
        result.rows[slot].status = std::string("error: ") + e.what();
      }
    }
    std::lock_guard lock(append_mutex);
    if (journal.is_open()) {
      for (const auto slot : task.row_slots) {
        journal << grid_row_csv_line(result.rows[slot]) << '\n';
      }
      journal.flush();
    }
    if (options.log) {
      options.log("C=" + std::to_string(task.classes) + " alpha=" + task.alpha +
                  " n=" + std::to_string(task.n) + " seed=" + std::to_string(task.seed) +
                  " done");
    }
  };

  const unsigned threads = std::max(1u, options.threads);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  const unsigned gen_threads = std::max(1u, threads / std::max(1u, workers));
  if (workers <= 1) {
    for (const auto& task : tasks) run_task(task, gen_threads);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
          run_task(tasks[k], gen_threads);
        }
      });
    }
  }

  // Rows of one cell are contiguous, ordered by seed.
  for (std::size_t i = 0; i < result.rows.size();) {
    std::size_t j = i;
    CellSummary summary;
    summary.cell = result.rows[i].cell;
    std::vector<double> values;
    while (j < result.rows.size() && result.rows[j].cell == summary.cell) {
      const auto& row = result.rows[j];
      if (row.value) {
        values.push_back(*row.value);
      } else {
        ++summary.failures;
        result.failures.push_back(summary.cell.slug() + " seed " +
                                  std::to_string(row.seed) + ": " + row.status);
      }
      ++j;
    }
    summary.replicates = values.size();
    summary.median = quantile(values, 0.5);
    summary.q1 = quantile(values, 0.25);
    summary.q3 = quantile(values, 0.75);
    result.summary.push_back(std::move(summary));
    i = j;
  }

  if (out_dir) {
    write_text_file(*out_dir / "results.csv", grid_rows_csv(result));
    write_text_file(*out_dir / "results.json", grid_rows_json(result));
    write_text_file(*out_dir / "summary.csv", grid_summary_csv(result));
    write_text_file(*out_dir / "summary.json", grid_summary_json(result));
    std::string timings = "classes,alpha,n,binning,metric,seed,wall_seconds\n";
    for (const auto& row : result.rows) {
      timings += std::to_string(row.cell.classes) + ",\"" + row.cell.alpha + "\"," +
                 std::to_string(row.cell.n) + "," + std::string(to_string(row.cell.binning)) +
                 "," + row.cell.metric + "," + std::to_string(row.seed) + "," +
                 format_double(row.wall_seconds) + "\n";
    }
    write_text_file(*out_dir / "timings.csv", timings);
    journal.close();
    std::error_code ec;
    std::filesystem::remove(journal_path, ec);
  }
  return result;
}

BinomialConsistency check_binomial_consistency(const Dataset& ds,
                                               std::size_t num_bins, double max_z) {
  const auto report = compute_ece(ds, num_bins, BinningStrategy::kEqualWidth);
  BinomialConsistency out;
  for (const auto& b : report.bins) {
    if (b.count == 0) continue;
    const double conf = *b.predicted;
    const double se = std::sqrt(conf * (1.0 - conf) / static_cast<double>(b.count));
    const double gap = *b.observed - conf;
    const double z = se > 0.0 ? gap / se
                              : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    out.z_scores.push_back(z);
    ++out.bins_checked;
    if (std::abs(z) <= max_z) ++out.bins_within;
  }
  return out;
}

SelfTestResult run_selftest(std::string_view name, std::uint64_t seed) {
  std::ostringstream msg;
  SelfTestResult result;
  if (name == "reduction") {
    const auto ds = generate_calibrated_dataset({{1.0, 1.0}, 100'000, seed});
    const auto check = check_ece_reduction(ds, 10, {0.5, 1.0});
    std::size_t modal = 0;
    for (const auto& b : check.bins) modal += b.rank1_modal;
    const double gap = std::abs(check.vce - check.ece);
    result.passed = check.max_modal_gap <= kReductionTolerance &&
                    (!check.all_modal || gap <= kReductionTolerance);
    msg << "bins with rank 1 modal: " << modal << "/" << check.bins.size()
        << "; max per-bin gap " << check.max_modal_gap << "; ECE " << check.ece
        << ", VCE(confidence) " << check.vce << ", |diff| " << gap
        << (check.all_modal ? "" : " (not compared: a bin is not rank-1 modal)");
  } else if (name == "calibration") {
    const auto ds = generate_calibrated_dataset({{1.0, 1.0, 1.0}, 1'000'000, seed});
    const auto check = check_binomial_consistency(ds, 10);
    result.passed = check.bins_checked == 10 && check.bins_within >= 9;
    msg << check.bins_within << "/" << check.bins_checked
        << " bins within 3 standard errors; z =";
    for (const double z : check.z_scores) msg << ' ' << format_double(std::round(z * 100) / 100);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown self-test `" + std::string(name) + "` (reduction, calibration)");
  }
  result.message = msg.str();
  return result;
}

std::vector<std::string_view> selftest_names() { return {"reduction", "calibration"}; }

unsigned default_thread_count() {
  if (const char* env = std::getenv("CALIBRA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace calibra
