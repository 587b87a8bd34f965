/*
 * C interface to the calibra library: calibration metrics (ECE, UCE, VCE),
 * synthetic perfectly calibrated datasets, the experiment grid and plots.
 *
 * Objects are opaque handles created by *_create / *_generate / *_read /
 * calibra_evaluate / calibra_grid_run and released by the matching *_destroy.
 * Every fallible call returns a calibra_status; on failure a human-readable
 * message is available from calibra_last_error() on the same thread until
 * the next failing call. Class indices are 0-based.
 */
#ifndef CALIBRA_CALIBRA_H_
#define CALIBRA_CALIBRA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CALIBRA_BUILDING)
#    define CALIBRA_API __declspec(dllexport)
#  else
#    define CALIBRA_API __declspec(dllimport)
#  endif
#else
#  define CALIBRA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum calibra_status {
  CALIBRA_OK = 0,
  CALIBRA_ERR_EMPTY_DATASET = 1,
  CALIBRA_ERR_DIMENSION_MISMATCH = 2,
  CALIBRA_ERR_INVALID_PROBABILITY = 3,
  CALIBRA_ERR_LABEL_OUT_OF_RANGE = 4,
  CALIBRA_ERR_VALUE_OUT_OF_DOMAIN = 5,
  CALIBRA_ERR_INVALID_BIN_COUNT = 6,
  CALIBRA_ERR_TOO_FEW_SAMPLES = 7,
  CALIBRA_ERR_NON_POSITIVE_ALPHA = 8,
  CALIBRA_ERR_PARSE = 9,
  CALIBRA_ERR_MISSING_SERIES = 10,
  CALIBRA_ERR_INVALID_ARGUMENT = 11,
  CALIBRA_ERR_IO = 12,
  CALIBRA_ERR_INTERNAL = 13
} calibra_status;

typedef enum calibra_metric {
  CALIBRA_METRIC_ECE = 0,
  CALIBRA_METRIC_UCE = 1,
  CALIBRA_METRIC_VCE = 2
} calibra_metric;

typedef enum calibra_binning {
  CALIBRA_BINNING_EQUAL_WIDTH = 0,
  CALIBRA_BINNING_EQUAL_FREQUENCY = 1
} calibra_binning;

/* Equal-width bin domain. DEFAULT is [1/C, 1] for ECE and [0, 1] otherwise. */
typedef enum calibra_domain {
  CALIBRA_DOMAIN_DEFAULT = 0,
  CALIBRA_DOMAIN_UNIT = 1,       /* [0, 1] */
  CALIBRA_DOMAIN_CLASS_FLOOR = 2 /* [1/C, 1] */
} calibra_domain;

typedef struct calibra_dataset calibra_dataset;
typedef struct calibra_report calibra_report;
typedef struct calibra_grid_result calibra_grid_result;

typedef struct calibra_eval_options {
  calibra_metric metric;
  const char* variation; /* VCE only: entropy, confidence, wvr, iqv; NULL = entropy */
  size_t bins;
  calibra_binning binning;
  calibra_domain domain;
} calibra_eval_options;

typedef struct calibra_bin_info {
  size_t bin_index; /* 1-based */
  double lower_edge;
  double upper_edge;
  size_t count;
  int defined; /* 0 for empty bins; predicted/observed are then NaN */
  double predicted;
  double observed;
  double contribution;
} calibra_bin_info;

typedef struct calibra_grid_options {
  const char* config_path; /* TOML or .json */
  const char* out_dir;     /* NULL keeps results in memory only */
  unsigned threads;        /* 0 = CALIBRA_THREADS or hardware concurrency */
  int keep_data;           /* -1 = as configured, 0 = no, 1 = yes */
  int verbose;             /* progress lines on stderr */
} calibra_grid_options;

typedef struct calibra_convergence_plot {
  const char* summary_path; /* summary.csv written by calibra_grid_run */
  size_t classes;
  const char* alpha;
  calibra_binning binning;
  const char* series; /* comma-separated metric names; NULL = all */
  int log_y;
  const char* output_path;
} calibra_convergence_plot;

CALIBRA_API const char* calibra_version(void);
CALIBRA_API const char* calibra_last_error(void);
CALIBRA_API const char* calibra_status_name(calibra_status status);
/* 0 success, 1 validation error, 2 IO error, 3 internal error. */
CALIBRA_API int calibra_exit_code(calibra_status status);

CALIBRA_API void calibra_eval_options_init(calibra_eval_options* options);
CALIBRA_API void calibra_grid_options_init(calibra_grid_options* options);

/* Datasets. probs is row-major n x classes. */
CALIBRA_API calibra_status calibra_dataset_create(const double* probs,
                                                  const int64_t* labels, size_t n,
                                                  size_t classes,
                                                  calibra_dataset** out);
CALIBRA_API calibra_status calibra_alpha_parse(const char* spec, size_t classes,
                                               double* out_alpha);
CALIBRA_API calibra_status calibra_dataset_generate(const double* alpha,
                                                    size_t classes, size_t n,
                                                    uint64_t seed, unsigned threads,
                                                    calibra_dataset** out);
/* format: "csv", "jsonl" or NULL to infer from the extension. */
CALIBRA_API calibra_status calibra_dataset_read(const char* path, const char* format,
                                                calibra_dataset** out);
CALIBRA_API calibra_status calibra_dataset_write(const calibra_dataset* dataset,
                                                 const char* path,
                                                 const char* format);
CALIBRA_API size_t calibra_dataset_size(const calibra_dataset* dataset);
CALIBRA_API size_t calibra_dataset_classes(const calibra_dataset* dataset);
CALIBRA_API calibra_status calibra_dataset_row(const calibra_dataset* dataset,
                                               size_t index, double* probs_out,
                                               int64_t* label_out);
CALIBRA_API void calibra_dataset_destroy(calibra_dataset* dataset);

/* Metrics. */
CALIBRA_API calibra_status calibra_evaluate(const calibra_dataset* dataset,
                                            const calibra_eval_options* options,
                                            calibra_report** out);
CALIBRA_API double calibra_report_value(const calibra_report* report);
CALIBRA_API size_t calibra_report_sample_count(const calibra_report* report);
CALIBRA_API size_t calibra_report_bin_count(const calibra_report* report);
/* Writes "ece", "uce" or "vce:<variation>" into buf (NUL-terminated). */
CALIBRA_API calibra_status calibra_report_name(const calibra_report* report,
                                               char* buf, size_t size);
CALIBRA_API calibra_status calibra_report_bin(const calibra_report* report,
                                              size_t index, calibra_bin_info* out);
/* format: "json", "csv" or NULL to infer from the extension. */
CALIBRA_API calibra_status calibra_report_write(const calibra_report* report,
                                                const char* path, const char* format);
CALIBRA_API calibra_status calibra_report_read(const char* path, const char* format,
                                               calibra_report** out);
CALIBRA_API calibra_status calibra_report_write_reliability(const calibra_report* report,
                                                            const char* path);
CALIBRA_API void calibra_report_destroy(calibra_report* report);

/* Experiment grid. */
CALIBRA_API calibra_status calibra_grid_run(const calibra_grid_options* options,
                                            calibra_grid_result** out);
CALIBRA_API size_t calibra_grid_result_rows(const calibra_grid_result* result);
CALIBRA_API size_t calibra_grid_result_failure_count(const calibra_grid_result* result);
CALIBRA_API const char* calibra_grid_result_failure(const calibra_grid_result* result,
                                                    size_t index);
CALIBRA_API void calibra_grid_result_destroy(calibra_grid_result* result);

/* Plots (SVG). */
CALIBRA_API calibra_status calibra_plot_convergence(const calibra_convergence_plot* plot);
/* input: a report (.json/.csv) or a reliability table JSON. */
CALIBRA_API calibra_status calibra_plot_reliability(const char* input_path,
                                                    const char* output_path);

/* Built-in checks: "reduction" (VCE with confidence vs ECE on C=2 data) and
 * "calibration" (per-bin binomial consistency of generated data). *passed is
 * set to 1 or 0 and a report is written into message. */
CALIBRA_API calibra_status calibra_selftest(const char* name, uint64_t seed,
                                            int* passed, char* message,
                                            size_t message_size);

#ifdef __cplusplus
}
#endif

#endif /* CALIBRA_CALIBRA_H_ */
