// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calibra/calibra.h"

namespace {

// Thrown by any failing C call; carries the status for the exit code.
struct CallFailed {
  calibra_status status;
};

void check(calibra_status status) {
  if (status != CALIBRA_OK) {
    std::cerr << "calibra: " << calibra_status_name(status) << ": "
              << calibra_last_error() << '\n';
    throw CallFailed{status};
  }
}

struct DatasetDeleter {
  void operator()(calibra_dataset* p) const { calibra_dataset_destroy(p); }
};
struct ReportDeleter {
  void operator()(calibra_report* p) const { calibra_report_destroy(p); }
};
struct GridDeleter {
  void operator()(calibra_grid_result* p) const { calibra_grid_result_destroy(p); }
};
using DatasetPtr = std::unique_ptr<calibra_dataset, DatasetDeleter>;
using ReportPtr = std::unique_ptr<calibra_report, ReportDeleter>;
using GridPtr = std::unique_ptr<calibra_grid_result, GridDeleter>;

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct GenArgs {
  std::size_t classes = 0;
  std::string alpha = "equal";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string format;
  unsigned threads = 0;
};

int run_gen(const GenArgs& a) {
  std::vector<double> alpha(a.classes);
  check(calibra_alpha_parse(a.alpha.c_str(), a.classes, alpha.data()));
  calibra_dataset* raw = nullptr;
  check(calibra_dataset_generate(alpha.data(), a.classes, a.n, a.seed, a.threads, &raw));
  DatasetPtr ds(raw);
  check(calibra_dataset_write(ds.get(), a.output.c_str(), or_null(a.format)));
  std::cout << "wrote " << calibra_dataset_size(ds.get()) << " samples (C=" << a.classes
            << ") to " << a.output << '\n';
  return 0;
}

struct EvalArgs {
  std::string metric;
  std::string variation = "entropy";
  std::size_t bins = 10;
  std::string binning = "equal-width";
  std::string input;
  std::string input_format;
  std::string output;
  std::string format;
  std::string ece_domain = "1/C";
  std::string vce_domain = "0-1";
  std::string reliability;
};

calibra_domain domain_from(const std::string& name) {
  return name == "1/C" ? CALIBRA_DOMAIN_CLASS_FLOOR : CALIBRA_DOMAIN_UNIT;
}

int run_eval(const EvalArgs& a) {
  calibra_dataset* raw = nullptr;
  check(calibra_dataset_read(a.input.c_str(), or_null(a.input_format), &raw));
  DatasetPtr ds(raw);

  calibra_eval_options opts;
  calibra_eval_options_init(&opts);
  opts.metric = a.metric == "ece"   ? CALIBRA_METRIC_ECE
                : a.metric == "uce" ? CALIBRA_METRIC_UCE
                                    : CALIBRA_METRIC_VCE;
  opts.variation = a.variation.c_str();
  opts.bins = a.bins;
  opts.binning = a.binning == "equal-width" ? CALIBRA_BINNING_EQUAL_WIDTH
                                            : CALIBRA_BINNING_EQUAL_FREQUENCY;
  if (opts.metric == CALIBRA_METRIC_ECE) opts.domain = domain_from(a.ece_domain);
  if (opts.metric == CALIBRA_METRIC_VCE) opts.domain = domain_from(a.vce_domain);

  calibra_report* rep = nullptr;
  check(calibra_evaluate(ds.get(), &opts, &rep));
  ReportPtr report(rep);
  if (!a.output.empty()) {
    check(calibra_report_write(report.get(), a.output.c_str(), or_null(a.format)));
  }
  if (!a.reliability.empty()) {
    check(calibra_report_write_reliability(report.get(), a.reliability.c_str()));
  }
  char name[64];
  check(calibra_report_name(report.get(), name, sizeof name));
  std::printf("%s = %.17g (N=%zu, M=%zu, %s)\n", name, calibra_report_value(report.get()),
              calibra_report_sample_count(report.get()), a.bins, a.binning.c_str());
  return 0;
}

struct GridArgs {
  std::string config;
  std::string out;
  unsigned threads = 0;
  bool keep_data = false;
  bool quiet = false;
};

int run_grid(const GridArgs& a) {
  calibra_grid_options opts;
  calibra_grid_options_init(&opts);
  opts.config_path = a.config.c_str();
  opts.out_dir = a.out.c_str();
  opts.threads = a.threads;
  opts.keep_data = a.keep_data ? 1 : -1;
  opts.verbose = a.quiet ? 0 : 1;
  calibra_grid_result* raw = nullptr;
  check(calibra_grid_run(&opts, &raw));
  GridPtr result(raw);
  const std::size_t failures = calibra_grid_result_failure_count(result.get());
  std::cout << "wrote " << calibra_grid_result_rows(result.get()) << " rows to " << a.out
            << '\n';
  for (std::size_t i = 0; i < failures; ++i) {
    std::cerr << "failed: " << calibra_grid_result_failure(result.get(), i) << '\n';
  }
  return failures == 0 ? 0 : 3;
}

struct PlotArgs {
  std::string kind = "convergence";
  std::string input;
  std::string output;
  std::size_t classes = 3;
  std::string alpha = "equal";
  std::string binning = "equal-width";
  std::string series;
  bool linear_y = false;
};

int run_plot(const PlotArgs& a) {
  if (a.kind == "reliability") {
    check(calibra_plot_reliability(a.input.c_str(), a.output.c_str()));
  } else {
    calibra_convergence_plot plot{};
    plot.summary_path = a.input.c_str();
    plot.classes = a.classes;
    plot.alpha = a.alpha.c_str();
    plot.binning = a.binning == "equal-width" ? CALIBRA_BINNING_EQUAL_WIDTH
                                              : CALIBRA_BINNING_EQUAL_FREQUENCY;
    plot.series = or_null(a.series);
    plot.log_y = a.linear_y ? 0 : 1;
    plot.output_path = a.output.c_str();
    check(calibra_plot_convergence(&plot));
  }
  std::cout << "wrote " << a.output << '\n';
  return 0;
}

int run_selftest(const std::string& name, std::uint64_t seed) {
  std::vector<std::string> names;
  if (name == "all") {
    names = {"reduction", "calibration"};
  } else {
    names = {name};
  }
  bool all_passed = true;
  for (const auto& n : names) {
    int passed = 0;
    char message[1024];
    check(calibra_selftest(n.c_str(), seed, &passed, message, sizeof message));
    std::cout << (passed ? "PASS " : "FAIL ") << n << ": " << message << '\n';
    all_passed = all_passed && passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calibra: calibration metrics (ECE, UCE, VCE) for probabilistic classifiers"};
  app.set_version_flag("--version", calibra_version());
  app.require_subcommand(1);

  const std::vector<std::string> metrics{"ece", "uce", "vce"};
  const std::vector<std::string> variations{"entropy", "confidence", "wvr", "iqv"};
  const std::vector<std::string> binnings{"equal-width", "equal-frequency"};

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a perfectly calibrated Dirichlet dataset");
  gen_cmd->add_option("--classes", gen.classes, "Number of classes C (>= 2)")->required();
  gen_cmd->add_option("--alpha", gen.alpha,
                      "Dirichlet concentration: equal, skewed (10,1,...,1) or a1,a2,...")
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Number of samples N")->required();
  gen_cmd->add_option("--seed", gen.seed, "64-bit generator seed")->capture_default_str();
  gen_cmd->add_option("--output", gen.output, "Output file (.csv or .jsonl)")->required();
  gen_cmd->add_option("--format", gen.format, "Output format (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  gen_cmd->add_option("--threads", gen.threads,
                      "Worker threads (0 = CALIBRA_THREADS or all cores)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compute a calibration metric on a prediction file");
  eval_cmd->add_option("--metric", ev.metric, "Metric")->required()->check(CLI::IsMember(metrics));
  eval_cmd->add_option("--variation", ev.variation, "Variation metric used by VCE")
      ->check(CLI::IsMember(variations))
      ->capture_default_str();
  eval_cmd->add_option("--bins", ev.bins, "Number of bins M")->capture_default_str();
  eval_cmd->add_option("--binning", ev.binning, "Binning strategy")
      ->check(CLI::IsMember(binnings))
      ->capture_default_str();
  eval_cmd->add_option("--input", ev.input, "Prediction file (.csv or .jsonl, 0-based labels)")
      ->required();
  eval_cmd->add_option("--input-format", ev.input_format, "Input format (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  eval_cmd->add_option("--output", ev.output, "Write the full report here");
  eval_cmd->add_option("--format", ev.format, "Report format (default: from extension)")
      ->check(CLI::IsMember({"json", "csv"}));
  eval_cmd->add_option("--ece-domain", ev.ece_domain, "Equal-width domain for ECE")
      ->check(CLI::IsMember({"1/C", "0-1"}))
      ->capture_default_str();
  eval_cmd->add_option("--vce-domain", ev.vce_domain, "Equal-width domain for VCE")
      ->check(CLI::IsMember({"1/C", "0-1"}))
      ->capture_default_str();
  eval_cmd->add_option("--reliability", ev.reliability, "Write the reliability table (JSON) here");

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Run an experiment grid from a config file");
  grid_cmd->add_option("--config", grid.config, "Grid config (.toml or .json)")->required();
  grid_cmd->add_option("--out", grid.out, "Output directory")->required();
  grid_cmd->add_option("--threads", grid.threads,
                       "Worker threads (0 = CALIBRA_THREADS or all cores)");
  grid_cmd->add_flag("--keep-data", grid.keep_data, "Persist every generated dataset");
  grid_cmd->add_flag("--quiet", grid.quiet, "No progress output");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG convergence or reliability plot");
  plot_cmd->add_option("--kind", plot.kind, "Plot kind")
      ->check(CLI::IsMember({"convergence", "reliability"}))
      ->capture_default_str();
  plot_cmd->add_option("--input", plot.input,
                       "summary.csv (convergence) or report / reliability JSON (reliability)")
      ->required();
  plot_cmd->add_option("--output", plot.output, "Output SVG path")->required();
  plot_cmd->add_option("--classes", plot.classes, "Scenario class count")->capture_default_str();
  plot_cmd->add_option("--alpha", plot.alpha, "Scenario alpha preset")->capture_default_str();
  plot_cmd->add_option("--binning", plot.binning, "Scenario binning")
      ->check(CLI::IsMember(binnings))
      ->capture_default_str();
  plot_cmd->add_option("--series", plot.series,
                       "Comma-separated metric series, e.g. ece,uce,vce:entropy (default: all)");
  plot_cmd->add_flag("--linear-y", plot.linear_y, "Linear instead of log10 y axis");

  std::string selftest_name;
  std::uint64_t selftest_seed = 7;
  auto* self_cmd = app.add_subcommand("selftest", "Run a built-in consistency check");
  self_cmd->add_option("name", selftest_name, "Check to run")
      ->required()
      ->check(CLI::IsMember({"reduction", "calibration", "all"}));
  self_cmd->add_option("--seed", selftest_seed, "Seed for generated data")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*eval_cmd) return run_eval(ev);
    if (*grid_cmd) return run_grid(grid);
    if (*plot_cmd) return run_plot(plot);
    if (*self_cmd) return run_selftest(selftest_name, selftest_seed);
  } catch (const CallFailed& f) {
    return calibra_exit_code(f.status);
  }
  return 3;
}
