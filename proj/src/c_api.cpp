#include "calibra/calibra.h"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "calibra/config.hpp"
#include "calibra/error.hpp"
#include "calibra/harness.hpp"
#include "calibra/io.hpp"
#include "calibra/plot.hpp"
#include "calibra/synthetic.hpp"

struct calibra_dataset {
  calibra::Dataset value;
};

struct calibra_report {
  calibra::CalibrationReport value;
};

struct calibra_grid_result {
  calibra::GridResult value;
};

namespace {

thread_local std::string g_last_error;

calibra_status fail(calibra_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

calibra_status status_for(calibra::ErrorCode code) {
  return static_cast<calibra_status>(static_cast<int>(code));
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
calibra_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return CALIBRA_OK;
  } catch (const calibra::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CALIBRA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CALIBRA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CALIBRA_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw calibra::Error(calibra::ErrorCode::kInvalidArgument, what);
}

std::optional<calibra::DataFormat> data_format(const char* name) {
  if (name == nullptr) return std::nullopt;
  const auto f = calibra::parse_data_format(name);
  if (!f) {
    throw calibra::Error(calibra::ErrorCode::kInvalidArgument,
                         std::string("unknown data format `") + name + "`");
  }
  return f;
}

std::optional<calibra::ReportFormat> report_format(const char* name) {
  if (name == nullptr) return std::nullopt;
  const auto f = calibra::parse_report_format(name);
  if (!f) {
    throw calibra::Error(calibra::ErrorCode::kInvalidArgument,
                         std::string("unknown report format `") + name + "`");
  }
  return f;
}

calibra::BinningStrategy to_strategy(calibra_binning b) {
  switch (b) {
    case CALIBRA_BINNING_EQUAL_WIDTH: return calibra::BinningStrategy::kEqualWidth;
    case CALIBRA_BINNING_EQUAL_FREQUENCY: return calibra::BinningStrategy::kEqualFrequency;
  }
  throw calibra::Error(calibra::ErrorCode::kInvalidArgument, "unknown binning strategy");
}

void copy_message(const std::string& text, char* buf, std::size_t size) {
  if (buf == nullptr || size == 0) return;
  const std::size_t len = std::min(text.size(), size - 1);
  std::memcpy(buf, text.data(), len);
  buf[len] = '\0';
}

}  // namespace

extern "C" {

const char* calibra_version(void) { return "1.0.0"; }

const char* calibra_last_error(void) { return g_last_error.c_str(); }

const char* calibra_status_name(calibra_status status) {
  if (status == CALIBRA_OK) return "Ok";
  if (status >= CALIBRA_ERR_EMPTY_DATASET && status <= CALIBRA_ERR_INTERNAL) {
    return calibra::error_code_name(static_cast<calibra::ErrorCode>(status));
  }
  return "Unknown";
}

int calibra_exit_code(calibra_status status) {
  switch (status) {
    case CALIBRA_OK: return 0;
    case CALIBRA_ERR_IO: return 2;
    case CALIBRA_ERR_INTERNAL: return 3;
    default: return status > CALIBRA_ERR_INTERNAL || status < 0 ? 3 : 1;
  }
}

void calibra_eval_options_init(calibra_eval_options* options) {
  if (options == nullptr) return;
  options->metric = CALIBRA_METRIC_VCE;
  options->variation = nullptr;
  options->bins = 10;
  options->binning = CALIBRA_BINNING_EQUAL_WIDTH;
  options->domain = CALIBRA_DOMAIN_DEFAULT;
}

void calibra_grid_options_init(calibra_grid_options* options) {
  if (options == nullptr) return;
  options->config_path = nullptr;
  options->out_dir = nullptr;
  options->threads = 0;
  options->keep_data = -1;
  options->verbose = 0;
}

calibra_status calibra_dataset_create(const double* probs, const int64_t* labels,
                                      size_t n, size_t classes, calibra_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(n == 0 || (probs != nullptr && labels != nullptr), "probs and labels required");
    calibra::DatasetBuilder builder(classes);
    builder.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      try {
        builder.add({probs + i * classes, classes}, labels[i]);
      } catch (const calibra::Error& e) {
        throw calibra::Error(e.code(), "row " + std::to_string(i) + ": " + e.what());
      }
    }
    *out = new calibra_dataset{std::move(builder).build()};
  });
}

calibra_status calibra_alpha_parse(const char* spec, size_t classes, double* out_alpha) {
  return guarded([&] {
    require(spec != nullptr && out_alpha != nullptr, "spec and out_alpha required");
    const auto alpha = calibra::alpha_preset(spec, classes);
    std::copy(alpha.begin(), alpha.end(), out_alpha);
  });
}

calibra_status calibra_dataset_generate(const double* alpha, size_t classes, size_t n,
                                        uint64_t seed, unsigned threads,
                                        calibra_dataset** out) {
  return guarded([&] {
    require(out != nullptr && alpha != nullptr, "alpha and out required");
    calibra::DirichletSpec spec{{alpha, alpha + classes}, n, seed};
    const unsigned workers = threads == 0 ? calibra::default_thread_count() : threads;
    *out = new calibra_dataset{calibra::generate_calibrated_dataset(spec, workers)};
  });
}

calibra_status calibra_dataset_read(const char* path, const char* format,
                                    calibra_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out required");
    *out = new calibra_dataset{calibra::read_predictions(path, data_format(format))};
  });
}

calibra_status calibra_dataset_write(const calibra_dataset* dataset, const char* path,
                                     const char* format) {
  return guarded([&] {
    require(dataset != nullptr && path != nullptr, "dataset and path required");
    calibra::write_predictions(dataset->value, path, data_format(format));
  });
}

size_t calibra_dataset_size(const calibra_dataset* dataset) {
  return dataset ? dataset->value.size() : 0;
}

size_t calibra_dataset_classes(const calibra_dataset* dataset) {
  return dataset ? dataset->value.num_classes() : 0;
}

calibra_status calibra_dataset_row(const calibra_dataset* dataset, size_t index,
                                   double* probs_out, int64_t* label_out) {
  return guarded([&] {
    require(dataset != nullptr, "dataset required");
    require(index < dataset->value.size(), "row index out of range");
    if (probs_out) {
      const auto p = dataset->value.probs(index);
      std::copy(p.begin(), p.end(), probs_out);
    }
    if (label_out) *label_out = static_cast<int64_t>(dataset->value.label(index));
  });
}

void calibra_dataset_destroy(calibra_dataset* dataset) { delete dataset; }

calibra_status calibra_evaluate(const calibra_dataset* dataset,
                                const calibra_eval_options* options,
                                calibra_report** out) {
  return guarded([&] {
    require(dataset != nullptr && options != nullptr && out != nullptr,
            "dataset, options and out required");
    const auto& ds = dataset->value;
    const auto strategy = to_strategy(options->binning);
    std::optional<calibra::BinDomain> domain;
    const double floor = 1.0 / static_cast<double>(ds.num_classes());
    switch (options->domain) {
      case CALIBRA_DOMAIN_DEFAULT: break;
      case CALIBRA_DOMAIN_UNIT: domain = calibra::BinDomain{0.0, 1.0}; break;
      case CALIBRA_DOMAIN_CLASS_FLOOR: domain = calibra::BinDomain{floor, 1.0}; break;
      default: require(false, "unknown bin domain");
    }
    calibra::CalibrationReport report;
    switch (options->metric) {
      case CALIBRA_METRIC_ECE:
        report = calibra::compute_ece(ds, options->bins, strategy, domain);
        break;
      case CALIBRA_METRIC_UCE:
        require(!domain || *domain == calibra::BinDomain{0.0, 1.0},
                "UCE bins entropy over [0, 1] only");
        report = calibra::compute_uce(ds, options->bins, strategy);
        break;
      case CALIBRA_METRIC_VCE: {
        const std::string name = options->variation ? options->variation : "entropy";
        const auto metric = calibra::find_variation(name);
        if (!metric) {
          throw calibra::Error(calibra::ErrorCode::kInvalidArgument,
                               "unknown variation metric `" + name + "`");
        }
        report = calibra::compute_vce(ds, *metric, options->bins, strategy,
                                      domain.value_or(calibra::BinDomain{}));
        break;
      }
      default:
        require(false, "unknown metric");
    }
    *out = new calibra_report{std::move(report)};
  });
}

double calibra_report_value(const calibra_report* report) {
  return report ? report->value.value : std::numeric_limits<double>::quiet_NaN();
}

size_t calibra_report_sample_count(const calibra_report* report) {
  return report ? report->value.n : 0;
}

size_t calibra_report_bin_count(const calibra_report* report) {
  return report ? report->value.bins.size() : 0;
}

calibra_status calibra_report_name(const calibra_report* report, char* buf, size_t size) {
  return guarded([&] {
    require(report != nullptr && buf != nullptr && size > 0, "report and buffer required");
    const auto name = report->value.metric_name();
    require(name.size() < size, "buffer too small");
    copy_message(name, buf, size);
  });
}

calibra_status calibra_report_bin(const calibra_report* report, size_t index,
                                  calibra_bin_info* out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "report and out required");
    require(index < report->value.bins.size(), "bin index out of range");
    const auto& b = report->value.bins[index];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = {b.bin_index,          b.lower_edge,
            b.upper_edge,         b.count,
            b.predicted ? 1 : 0,  b.predicted.value_or(nan),
            b.observed.value_or(nan), b.contribution};
  });
}

calibra_status calibra_report_write(const calibra_report* report, const char* path,
                                    const char* format) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "report and path required");
    calibra::write_report(report->value, path, report_format(format));
  });
}

calibra_status calibra_report_read(const char* path, const char* format,
                                   calibra_report** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out required");
    *out = new calibra_report{calibra::read_report(path, report_format(format))};
  });
}

calibra_status calibra_report_write_reliability(const calibra_report* report,
                                                const char* path) {
  return guarded([&] {
    require(report != nullptr && path != nullptr, "report and path required");
    calibra::write_text_file(path,
                             calibra::reliability_to_json(calibra::reliability_data(report->value)));
  });
}

void calibra_report_destroy(calibra_report* report) { delete report; }

calibra_status calibra_grid_run(const calibra_grid_options* options,
                                calibra_grid_result** out) {
  return guarded([&] {
    require(options != nullptr && options->config_path != nullptr && out != nullptr,
            "options with config_path and out required");
    auto grid = calibra::load_grid_config(options->config_path);
    if (options->keep_data >= 0) grid.keep_data = options->keep_data != 0;
    calibra::GridOptions run;
    if (options->out_dir) run.out_dir = std::filesystem::path(options->out_dir);
    run.threads = options->threads == 0 ? calibra::default_thread_count() : options->threads;
    if (options->verbose) {
      run.log = [](const std::string& line) { std::cerr << line << '\n'; };
    }
    *out = new calibra_grid_result{calibra::run_grid(grid, run)};
  });
}

size_t calibra_grid_result_rows(const calibra_grid_result* result) {
  return result ? result->value.rows.size() : 0;
}

size_t calibra_grid_result_failure_count(const calibra_grid_result* result) {
  return result ? result->value.failures.size() : 0;
}

const char* calibra_grid_result_failure(const calibra_grid_result* result, size_t index) {
  if (result == nullptr || index >= result->value.failures.size()) return nullptr;
  return result->value.failures[index].c_str();
}

void calibra_grid_result_destroy(calibra_grid_result* result) { delete result; }

calibra_status calibra_plot_convergence(const calibra_convergence_plot* plot) {
  return guarded([&] {
    require(plot != nullptr && plot->summary_path != nullptr &&
                plot->output_path != nullptr && plot->alpha != nullptr,
            "summary_path, alpha and output_path required");
    calibra::PlotSpec spec;
    spec.kind = calibra::PlotKind::kConvergence;
    spec.classes = plot->classes;
    spec.alpha = plot->alpha;
    spec.binning = to_strategy(plot->binning);
    spec.log_y = plot->log_y != 0;
    spec.output = plot->output_path;
    if (plot->series != nullptr) {
      std::stringstream list(plot->series);
      for (std::string item; std::getline(list, item, ',');) {
        if (!item.empty()) spec.series.push_back(item);
      }
    }
    calibra::emit_plot(spec, calibra::read_grid_summary(plot->summary_path));
  });
}

calibra_status calibra_plot_reliability(const char* input_path, const char* output_path) {
  return guarded([&] {
    require(input_path != nullptr && output_path != nullptr, "input and output required");
    const std::filesystem::path input(input_path);
    calibra::ReliabilityTable table;
    if (input.extension() == ".csv") {
      table = calibra::reliability_data(calibra::read_report(input));
    } else {
      const auto text = calibra::read_text_file(input);
      const bool is_table = text.find("\"rows\"") != std::string::npos;
      table = is_table ? calibra::reliability_from_json(text)
                       : calibra::reliability_data(
                             calibra::report_from_string(text, calibra::ReportFormat::kJson));
    }
    calibra::PlotSpec spec;
    spec.kind = calibra::PlotKind::kReliability;
    spec.output = output_path;
    calibra::emit_plot(spec, table);
  });
}

calibra_status calibra_selftest(const char* name, uint64_t seed, int* passed,
                                char* message, size_t message_size) {
  return guarded([&] {
    require(name != nullptr && passed != nullptr, "name and passed required");
    const auto result = calibra::run_selftest(name, seed);
    *passed = result.passed ? 1 : 0;
    copy_message(result.message, message, message_size);
  });
}

}  // extern "C"
