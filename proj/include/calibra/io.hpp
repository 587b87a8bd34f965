#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "calibra/dataset.hpp"
#include "calibra/harness.hpp"
#include "calibra/metrics.hpp"

namespace calibra {

inline constexpr int kSchemaVersion = 1;

enum class DataFormat { kCsv, kJsonLines };
enum class ReportFormat { kJson, kCsv };

// `csv`, `jsonl` / `json-lines` / `ndjson`.
std::optional<DataFormat> parse_data_format(std::string_view name) noexcept;
std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;
DataFormat infer_data_format(const std::filesystem::path& path) noexcept;
ReportFormat infer_report_format(const std::filesystem::path& path) noexcept;

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

// Prediction files. CSV: optional `# key: value` metadata lines, a header
// `<class names...>,label`, then one row of C probabilities and a 0-based
// label per line. JSON lines: an optional header object with `classes`,
// `class_names` and `metadata`, then `{"probs": [...], "label": k}` per line.
// Errors carry the 1-based line number.
Dataset read_predictions(std::istream& in, DataFormat format);
Dataset read_predictions(const std::filesystem::path& path,
                         std::optional<DataFormat> format = std::nullopt);
void write_predictions(const Dataset& ds, std::ostream& out, DataFormat format);
void write_predictions(const Dataset& ds, const std::filesystem::path& path,
                       std::optional<DataFormat> format = std::nullopt);

std::string report_to_string(const CalibrationReport& report, ReportFormat format);
CalibrationReport report_from_string(std::string_view text, ReportFormat format);
void write_report(const CalibrationReport& report,
                  const std::filesystem::path& path,
                  std::optional<ReportFormat> format = std::nullopt);
CalibrationReport read_report(const std::filesystem::path& path,
                              std::optional<ReportFormat> format = std::nullopt);

std::string reliability_to_json(const ReliabilityTable& table);
ReliabilityTable reliability_from_json(std::string_view text);

// Grid results table: one row per (cell, seed). Column layout is fixed.
inline constexpr std::string_view kGridColumns =
    "classes,alpha,n,binning,metric,seed,dataset_seed,value,status,reliability";
inline constexpr std::string_view kSummaryColumns =
    "classes,alpha,n,binning,metric,replicates,failures,median,q1,q3";

std::string grid_rows_csv(const GridResult& result);
std::string grid_rows_json(const GridResult& result);
std::string grid_summary_csv(const GridResult& result);
std::string grid_summary_json(const GridResult& result);
std::string grid_row_csv_line(const GridRow& row);
std::vector<CellSummary> grid_summary_from_csv(std::string_view text);
std::vector<CellSummary> read_grid_summary(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace calibra
