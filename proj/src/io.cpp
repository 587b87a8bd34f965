#include "calibra/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "calibra/error.hpp"
#include "json.hpp"

namespace calibra {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kUndefined = "undefined";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

bool try_parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return !text.empty() && res.ec == std::errc() &&
         res.ptr == text.data() + text.size();
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid " + std::string(what) + " `" + std::string(text) + "`");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                "invalid " + std::string(what) + " `" + std::string(text) + "`");
  }
  return value;
}

[[noreturn]] void rethrow_at_line(const Error& e, std::size_t line) {
  throw Error(e.code(), "line " + std::to_string(line) + ": " + e.what());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open `" + path.string() + "` for reading");
  }
  return in;
}

Dataset read_csv(std::istream& in) {
  DatasetBuilder builder;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> class_names;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data_or_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      if (!seen_data_or_header) {
        const auto body = trim(text.substr(1));
        const auto colon = body.find(':');
        if (colon != std::string_view::npos) {
          metadata[std::string(trim(body.substr(0, colon)))] =
              std::string(trim(body.substr(colon + 1)));
        }
      }
      continue;
    }
    try {
      const auto fields = split_csv(text);
      double probe = 0.0;
      if (!seen_data_or_header && !try_parse_double(fields.front(), probe)) {
        seen_data_or_header = true;
        if (fields.size() < 3 || fields.back() != "label") {
          throw Error(ErrorCode::kParseError,
                      "header must list the class columns followed by `label`");
        }
        class_names.assign(fields.begin(), fields.end() - 1);
        continue;
      }
      seen_data_or_header = true;
      if (fields.size() < 3) {
        throw Error(ErrorCode::kParseError, "expected at least 2 probabilities and a label");
      }
      if (!class_names.empty() && fields.size() != class_names.size() + 1) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "row has " + std::to_string(fields.size()) + " fields, header has " +
                        std::to_string(class_names.size() + 1));
      }
      row.resize(fields.size() - 1);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!try_parse_double(fields[c], row[c])) {
          throw Error(ErrorCode::kParseError, "invalid number `" + fields[c] + "`");
        }
      }
      builder.add(row, parse_int(fields.back(), "label"));
    } catch (const Error& e) {
      rethrow_at_line(e, line_no);
    }
  }
  auto ds = std::move(builder).build();
  for (auto& [k, v] : metadata) ds.set_metadata(k, v);
  if (!class_names.empty()) {
    bool defaults = true;
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      defaults = defaults && class_names[c] == "p" + std::to_string(c);
    }
    if (!defaults) ds.set_class_names(std::move(class_names));
  }
  return ds;
}

Dataset read_jsonl(std::istream& in) {
  DatasetBuilder builder;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> class_names;
  std::vector<double> row;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        throw Error(ErrorCode::kParseError, "not a JSON object");
      }
      if (first && !obj.contains("probs")) {
        first = false;
        if (obj.contains("classes")) {
          builder = DatasetBuilder(obj.at("classes").get<std::size_t>());
        }
        if (obj.contains("class_names")) {
          class_names = obj.at("class_names").get<std::vector<std::string>>();
        }
        if (obj.contains("metadata")) {
          for (const auto& [k, v] : obj.at("metadata").items()) {
            metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
          }
        }
        continue;
      }
      first = false;
      if (!obj.contains("probs") || !obj.contains("label")) {
        throw Error(ErrorCode::kParseError, "row needs `probs` and `label`");
      }
      row = obj.at("probs").get<std::vector<double>>();
      builder.add(row, obj.at("label").get<std::int64_t>());
    } catch (const Error& e) {
      rethrow_at_line(e, line_no);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  auto ds = std::move(builder).build();
  for (auto& [k, v] : metadata) ds.set_metadata(k, v);
  if (!class_names.empty()) ds.set_class_names(std::move(class_names));
  return ds;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(kUndefined);
}

std::optional<double> optional_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() != kUndefined) {
      throw Error(ErrorCode::kParseError, "unexpected string in numeric field");
    }
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<double> optional_from_text(std::string_view text) {
  if (trim(text) == kUndefined) return std::nullopt;
  return parse_double(text);
}

std::string optional_to_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string(kUndefined);
}

BinningStrategy binning_from(std::string_view name) {
  const auto b = parse_binning(name);
  if (!b) throw Error(ErrorCode::kParseError, "unknown binning `" + std::string(name) + "`");
  return *b;
}

MetricKind metric_from(std::string_view name) {
  const auto m = parse_metric(name);
  if (!m) throw Error(ErrorCode::kParseError, "unknown metric `" + std::string(name) + "`");
  return *m;
}

ordered_json report_json(const CalibrationReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = std::string(to_string(r.metric));
  j["variation"] = r.variation.empty() ? ordered_json(nullptr) : ordered_json(r.variation);
  j["binning"] = std::string(to_string(r.strategy));
  j["domain"] = {r.domain.lo, r.domain.hi};
  j["n"] = r.n;
  j["bins"] = r.num_bins;
  j["value"] = r.value;
  auto& diag = j["bin_diagnostics"] = ordered_json::array();
  for (const auto& b : r.bins) {
    diag.push_back({{"bin", b.bin_index},
                    {"lower_edge", b.lower_edge},
                    {"upper_edge", b.upper_edge},
                    {"count", b.count},
                    {"predicted", optional_number(b.predicted)},
                    {"observed", optional_number(b.observed)},
                    {"contribution", b.contribution}});
  }
  return j;
}

void check_schema(int version) {
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::kParseError,
                "unsupported schema_version " + std::to_string(version));
  }
}

CalibrationReport report_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  check_schema(j.at("schema_version").get<int>());
  CalibrationReport r;
  r.metric = metric_from(j.at("metric").get<std::string>());
  if (!j.at("variation").is_null()) r.variation = j.at("variation").get<std::string>();
  r.strategy = binning_from(j.at("binning").get<std::string>());
  r.domain = {j.at("domain").at(0).get<double>(), j.at("domain").at(1).get<double>()};
  r.n = j.at("n").get<std::size_t>();
  r.num_bins = j.at("bins").get<std::size_t>();
  r.value = j.at("value").get<double>();
  for (const auto& b : j.at("bin_diagnostics")) {
    BinDiagnostics d;
    d.bin_index = b.at("bin").get<std::size_t>();
    d.lower_edge = b.at("lower_edge").get<double>();
    d.upper_edge = b.at("upper_edge").get<double>();
    d.count = b.at("count").get<std::size_t>();
    d.predicted = optional_from_json(b.at("predicted"));
    d.observed = optional_from_json(b.at("observed"));
    d.contribution = b.at("contribution").get<double>();
    r.bins.push_back(d);
  }
  return r;
}

constexpr std::string_view kReportCsvColumns =
    "bin,lower_edge,upper_edge,count,predicted,observed,contribution";

std::string report_csv(const CalibrationReport& r) {
  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << '\n'
      << "# metric: " << to_string(r.metric) << '\n'
      << "# variation: " << r.variation << '\n'
      << "# binning: " << to_string(r.strategy) << '\n'
      << "# domain: " << format_double(r.domain.lo) << ' '
      << format_double(r.domain.hi) << '\n'
      << "# n: " << r.n << '\n'
      << "# bins: " << r.num_bins << '\n'
      << "# value: " << format_double(r.value) << '\n'
      << kReportCsvColumns << '\n';
  for (const auto& b : r.bins) {
    out << b.bin_index << ',' << format_double(b.lower_edge) << ','
        << format_double(b.upper_edge) << ',' << b.count << ','
        << optional_to_text(b.predicted) << ',' << optional_to_text(b.observed)
        << ',' << format_double(b.contribution) << '\n';
  }
  return out.str();
}

CalibrationReport report_from_csv(std::string_view text) {
  std::map<std::string, std::string, std::less<>> meta;
  CalibrationReport r;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        meta[std::string(trim(body.substr(0, colon)))] =
            std::string(trim(body.substr(colon + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (t != kReportCsvColumns) {
        throw Error(ErrorCode::kParseError, "unexpected report CSV header");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv(t);
    if (f.size() != 7) throw Error(ErrorCode::kParseError, "report row needs 7 fields");
    BinDiagnostics d;
    d.bin_index = parse_uint(f[0], "bin");
    d.lower_edge = parse_double(f[1]);
    d.upper_edge = parse_double(f[2]);
    d.count = parse_uint(f[3], "count");
    d.predicted = optional_from_text(f[4]);
    d.observed = optional_from_text(f[5]);
    d.contribution = parse_double(f[6]);
    r.bins.push_back(d);
  }
  auto need = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) {
      throw Error(ErrorCode::kParseError, std::string("report CSV lacks `") + key + "`");
    }
    return it->second;
  };
  check_schema(static_cast<int>(parse_int(need("schema_version"), "schema_version")));
  r.metric = metric_from(need("metric"));
  r.variation = meta.count("variation") ? meta["variation"] : "";
  r.strategy = binning_from(need("binning"));
  const auto& dom = need("domain");
  const auto space = dom.find(' ');
  if (space == std::string::npos) throw Error(ErrorCode::kParseError, "bad domain");
  r.domain = {parse_double(std::string_view(dom).substr(0, space)),
              parse_double(std::string_view(dom).substr(space + 1))};
  r.n = parse_uint(need("n"), "n");
  r.num_bins = parse_uint(need("bins"), "bins");
  r.value = parse_double(need("value"));
  return r;
}

ordered_json cell_json(const CellKey& k) {
  return {{"classes", k.classes},
          {"alpha", k.alpha},
          {"n", k.n},
          {"binning", std::string(to_string(k.binning))},
          {"metric", k.metric}};
}

std::string cell_csv(const CellKey& k) {
  return std::to_string(k.classes) + ',' + csv_field(k.alpha) + ',' +
         std::to_string(k.n) + ',' + std::string(to_string(k.binning)) + ',' +
         csv_field(k.metric);
}

}  // namespace

std::optional<DataFormat> parse_data_format(std::string_view name) noexcept {
  if (name == "csv") return DataFormat::kCsv;
  if (name == "jsonl" || name == "json-lines" || name == "ndjson") {
    return DataFormat::kJsonLines;
  }
  return std::nullopt;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

DataFormat infer_data_format(const std::filesystem::path& path) noexcept {
  const auto ext = path.extension();
  return ext == ".jsonl" || ext == ".ndjson" ? DataFormat::kJsonLines
                                             : DataFormat::kCsv;
}

ReportFormat infer_report_format(const std::filesystem::path& path) noexcept {
  return path.extension() == ".csv" ? ReportFormat::kCsv : ReportFormat::kJson;
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  if (!try_parse_double(text, value)) {
    throw Error(ErrorCode::kParseError, "invalid number `" + std::string(text) + "`");
  }
  return value;
}

Dataset read_predictions(std::istream& in, DataFormat format) {
  return format == DataFormat::kCsv ? read_csv(in) : read_jsonl(in);
}

Dataset read_predictions(const std::filesystem::path& path,
                         std::optional<DataFormat> format) {
  auto in = open_input(path);
  try {
    return read_predictions(in, format.value_or(infer_data_format(path)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_predictions(const Dataset& ds, std::ostream& out, DataFormat format) {
  const std::size_t c = ds.num_classes();
  std::string line;
  if (format == DataFormat::kCsv) {
    for (const auto& [k, v] : ds.metadata()) out << "# " << k << ": " << v << '\n';
    for (std::size_t k = 0; k < c; ++k) {
      out << (ds.class_names().empty() ? "p" + std::to_string(k)
                                       : csv_field(ds.class_names()[k]))
          << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
      line.clear();
      for (const double p : ds.probs(i)) {
        line += format_double(p);
        line += ',';
      }
      line += std::to_string(ds.label(i));
      line += '\n';
      out << line;
    }
  } else {
    ordered_json header;
    header["schema_version"] = kSchemaVersion;
    header["classes"] = c;
    if (!ds.class_names().empty()) header["class_names"] = ds.class_names();
    header["metadata"] = ordered_json::object();
    for (const auto& [k, v] : ds.metadata()) header["metadata"][k] = v;
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
      line = "{\"probs\":[";
      const auto p = ds.probs(i);
      for (std::size_t k = 0; k < c; ++k) {
        if (k) line += ',';
        line += format_double(p[k]);
      }
      line += "],\"label\":" + std::to_string(ds.label(i)) + "}\n";
      out << line;
    }
  }
}

void write_predictions(const Dataset& ds, const std::filesystem::path& path,
                       std::optional<DataFormat> format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open `" + path.string() + "` for writing");
  }
  write_predictions(ds, out, format.value_or(infer_data_format(path)));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing `" + path.string() + "`");
}

std::string report_to_string(const CalibrationReport& report, ReportFormat format) {
  return format == ReportFormat::kJson ? report_json(report).dump(2) + "\n"
                                       : report_csv(report);
}

CalibrationReport report_from_string(std::string_view text, ReportFormat format) {
  try {
    return format == ReportFormat::kJson ? report_from_json(text) : report_from_csv(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

void write_report(const CalibrationReport& report, const std::filesystem::path& path,
                  std::optional<ReportFormat> format) {
  write_text_file(path,
                  report_to_string(report, format.value_or(infer_report_format(path))));
}

CalibrationReport read_report(const std::filesystem::path& path,
                              std::optional<ReportFormat> format) {
  return report_from_string(read_text_file(path),
                            format.value_or(infer_report_format(path)));
}

std::string reliability_to_json(const ReliabilityTable& t) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = t.metric;
  j["n"] = t.n;
  j["value"] = t.value;
  j["domain"] = {t.domain.lo, t.domain.hi};
  j["reference_line"] = {{"from", {t.domain.lo, t.domain.lo}},
                         {"to", {t.domain.hi, t.domain.hi}},
                         {"style", "dashed"}};
  auto& rows = j["rows"] = ordered_json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"bin", r.bin_index},
                    {"center", r.bin_center},
                    {"predicted", r.predicted},
                    {"observed", r.observed},
                    {"count", r.count}});
  }
  return j.dump(2) + "\n";
}

ReliabilityTable reliability_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    check_schema(j.at("schema_version").get<int>());
    ReliabilityTable t;
    t.metric = j.at("metric").get<std::string>();
    t.n = j.at("n").get<std::size_t>();
    t.value = j.at("value").get<double>();
    t.domain = {j.at("domain").at(0).get<double>(), j.at("domain").at(1).get<double>()};
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("bin").get<std::size_t>(), r.at("center").get<double>(),
                        r.at("predicted").get<double>(), r.at("observed").get<double>(),
                        r.at("count").get<std::size_t>()});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string grid_row_csv_line(const GridRow& row) {
  return cell_csv(row.cell) + ',' + std::to_string(row.seed) + ',' +
         std::to_string(row.dataset_seed) + ',' +
         (row.value ? format_double(*row.value) : std::string()) + ',' +
         csv_field(row.status) + ',' + csv_field(row.reliability_ref);
}

std::string grid_rows_csv(const GridResult& result) {
  std::string out(kGridColumns);
  out += '\n';
  for (const auto& row : result.rows) {
    out += grid_row_csv_line(row);
    out += '\n';
  }
  return out;
}

std::string grid_rows_json(const GridResult& result) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  auto& rows = j["rows"] = ordered_json::array();
  for (const auto& row : result.rows) {
    auto r = cell_json(row.cell);
    r["seed"] = row.seed;
    r["dataset_seed"] = row.dataset_seed;
    r["value"] = row.value ? ordered_json(*row.value) : ordered_json(nullptr);
    r["status"] = row.status;
    r["reliability"] = row.reliability_ref;
    rows.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string grid_summary_csv(const GridResult& result) {
  std::string out(kSummaryColumns);
  out += '\n';
  for (const auto& s : result.summary) {
    out += cell_csv(s.cell) + ',' + std::to_string(s.replicates) + ',' +
           std::to_string(s.failures) + ',' + format_double(s.median) + ',' +
           format_double(s.q1) + ',' + format_double(s.q3) + '\n';
  }
  return out;
}

std::string grid_summary_json(const GridResult& result) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  auto& cells = j["cells"] = ordered_json::array();
  for (const auto& s : result.summary) {
    auto c = cell_json(s.cell);
    c["replicates"] = s.replicates;
    c["failures"] = s.failures;
    c["median"] = s.median;
    c["q1"] = s.q1;
    c["q3"] = s.q3;
    cells.push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

std::vector<CellSummary> grid_summary_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<CellSummary> out;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1) {
      if (t != kSummaryColumns) {
        throw Error(ErrorCode::kParseError, "line 1: unexpected summary header");
      }
      continue;
    }
    try {
      const auto f = split_csv(t);
      if (f.size() != 10) throw Error(ErrorCode::kParseError, "summary row needs 10 fields");
      CellSummary s;
      s.cell.classes = parse_uint(f[0], "classes");
      s.cell.alpha = f[1];
      s.cell.n = parse_uint(f[2], "n");
      s.cell.binning = binning_from(f[3]);
      s.cell.metric = f[4];
      s.replicates = parse_uint(f[5], "replicates");
      s.failures = parse_uint(f[6], "failures");
      s.median = parse_double(f[7]);
      s.q1 = parse_double(f[8]);
      s.q3 = parse_double(f[9]);
      out.push_back(std::move(s));
    } catch (const Error& e) {
      rethrow_at_line(e, line_no);
    }
  }
  return out;
}

std::vector<CellSummary> read_grid_summary(const std::filesystem::path& path) {
  return grid_summary_from_csv(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot open `" + tmp.string() + "` for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "failed writing `" + tmp.string() + "`");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot move `" + tmp.string() + "` to `" + path.string() + "`: " + ec.message());
  }
}

}  // namespace calibra
