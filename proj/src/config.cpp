#include "calibra/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <variant>

#include "calibra/error.hpp"
#include "calibra/io.hpp"
#include "json.hpp"

namespace calibra {
namespace {

using Scalar = std::variant<std::int64_t, double, bool, std::string>;
using Value = std::variant<Scalar, std::vector<Scalar>>;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "config line " + std::to_string(line) + ": " + what);
}

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  std::map<std::string, Value> read() {
    std::map<std::string, Value> out;
    while (skip_blank_lines()) {
      if (peek() == '[') {
        const auto table = read_table_header();
        if (table != "grid") fail(line_, "unknown table [" + table + "]");
        continue;
      }
      const auto key = read_key();
      skip_inline_space();
      if (peek() != '=') fail(line_, "expected `=` after `" + key + "`");
      ++pos_;
      skip_inline_space();
      const std::size_t key_line = line_;
      Value v = peek() == '[' ? Value(read_array()) : Value(read_scalar());
      if (!out.emplace(key, std::move(v)).second) fail(key_line, "duplicate key `" + key + "`");
      skip_inline_space();
      skip_comment();
      if (pos_ < text_.size() && peek() != '\n' && peek() != '\r') {
        fail(line_, "trailing characters after value");
      }
    }
    return out;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_inline_space() {
    while (peek() == ' ' || peek() == '\t') ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (pos_ < text_.size() && peek() != '\n') ++pos_;
    }
  }

  // Skips whitespace, newlines and comments; false at end of input.
  bool skip_blank_lines() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\r') {
        ++pos_;
      } else if (peek() == '\n') {
        ++pos_;
        ++line_;
      } else {
        return pos_ < text_.size();
      }
    }
  }

  std::string read_table_header() {
    ++pos_;
    std::string name;
    while (pos_ < text_.size() && peek() != ']' && peek() != '\n') name += text_[pos_++];
    if (peek() != ']') fail(line_, "unterminated table header");
    ++pos_;
    const auto first = name.find_first_not_of(" \t");
    const auto last = name.find_last_not_of(" \t");
    return first == std::string::npos ? "" : name.substr(first, last - first + 1);
  }

  std::string read_key() {
    std::string key;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
           peek() == '-') {
      key += text_[pos_++];
    }
    if (key.empty()) fail(line_, "expected a key");
    return key;
  }

  Scalar read_scalar() {
    if (peek() == '"') {
      ++pos_;
      std::string s;
      while (pos_ < text_.size() && peek() != '"') {
        if (peek() == '\n') fail(line_, "unterminated string");
        if (peek() == '\\' && pos_ + 1 < text_.size()) ++pos_;
        s += text_[pos_++];
      }
      if (peek() != '"') fail(line_, "unterminated string");
      ++pos_;
      return s;
    }
    std::string token;
    while (pos_ < text_.size() && std::string_view(" \t\r\n,]#").find(peek()) ==
                                      std::string_view::npos) {
      token += text_[pos_++];
    }
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (const char ch : token) {
      if (ch != '_') digits += ch;
    }
    std::int64_t i = 0;
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (!digits.empty() && res.ec == std::errc() && res.ptr == digits.data() + digits.size()) {
      return i;
    }
    double d = 0.0;
    res = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (!digits.empty() && res.ec == std::errc() && res.ptr == digits.data() + digits.size()) {
      return d;
    }
    fail(line_, "cannot parse value `" + token + "`");
  }

  std::vector<Scalar> read_array() {
    ++pos_;
    std::vector<Scalar> items;
    for (;;) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        return items;
      }
      if (pos_ >= text_.size()) fail(line_, "unterminated array");
      items.push_back(read_scalar());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail(line_, "expected `,` or `]` in array");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

const std::set<std::string, std::less<>> kKnownKeys = {
    "class_counts", "alpha_presets", "sample_sizes", "binnings", "bins", "metrics",
    "seeds", "replicates", "base_seed", "large_n", "large_n_replicates", "keep_data"};

std::uint64_t as_uint(const Scalar& s, std::string_view key) {
  if (const auto* i = std::get_if<std::int64_t>(&s); i && *i >= 0) {
    return static_cast<std::uint64_t>(*i);
  }
  // Permit 1e6-style floats when they are exact non-negative integers.
  if (const auto* d = std::get_if<double>(&s);
      d && *d >= 0 && *d == std::floor(*d) && *d < 1.8e19) {
    return static_cast<std::uint64_t>(*d);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "`" + std::string(key) + "` needs non-negative integers");
}

std::string as_string(const Scalar& s, std::string_view key) {
  if (const auto* str = std::get_if<std::string>(&s)) return *str;
  throw Error(ErrorCode::kInvalidArgument, "`" + std::string(key) + "` needs strings");
}

const std::vector<Scalar>& as_array(const Value& v, std::string_view key) {
  if (const auto* a = std::get_if<std::vector<Scalar>>(&v)) return *a;
  throw Error(ErrorCode::kInvalidArgument, "`" + std::string(key) + "` must be an array");
}

const Scalar& as_scalar(const Value& v, std::string_view key) {
  if (const auto* s = std::get_if<Scalar>(&v)) return *s;
  throw Error(ErrorCode::kInvalidArgument, "`" + std::string(key) + "` must be a scalar");
}

ExperimentGrid grid_from_values(const std::map<std::string, Value>& values) {
  ExperimentGrid grid;
  for (const auto& [key, _] : values) {
    if (!kKnownKeys.contains(key)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key `" + key + "`");
    }
  }
  auto get = [&](const char* key) -> const Value* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("class_counts")) {
    grid.class_counts.clear();
    for (const auto& s : as_array(*v, "class_counts")) {
      grid.class_counts.push_back(as_uint(s, "class_counts"));
    }
  }
  if (const auto* v = get("alpha_presets")) {
    grid.alpha_presets.clear();
    for (const auto& s : as_array(*v, "alpha_presets")) {
      grid.alpha_presets.push_back(as_string(s, "alpha_presets"));
    }
  }
  if (const auto* v = get("sample_sizes")) {
    grid.sample_sizes.clear();
    for (const auto& s : as_array(*v, "sample_sizes")) {
      grid.sample_sizes.push_back(as_uint(s, "sample_sizes"));
    }
  }
  if (const auto* v = get("binnings")) {
    grid.binnings.clear();
    for (const auto& s : as_array(*v, "binnings")) {
      const auto name = as_string(s, "binnings");
      const auto b = parse_binning(name);
      if (!b) throw Error(ErrorCode::kInvalidArgument, "unknown binning `" + name + "`");
      grid.binnings.push_back(*b);
    }
  }
  if (const auto* v = get("bins")) grid.num_bins = as_uint(as_scalar(*v, "bins"), "bins");
  if (const auto* v = get("metrics")) {
    grid.metrics.clear();
    for (const auto& s : as_array(*v, "metrics")) {
      grid.metrics.push_back(MetricSpec::parse(as_string(s, "metrics")));
    }
  }
  const auto* seeds = get("seeds");
  const auto* replicates = get("replicates");
  if (seeds && replicates) {
    throw Error(ErrorCode::kInvalidArgument, "give either `seeds` or `replicates`, not both");
  }
  if (seeds) {
    grid.seeds.clear();
    for (const auto& s : as_array(*seeds, "seeds")) grid.seeds.push_back(as_uint(s, "seeds"));
  } else if (replicates) {
    const auto count = as_uint(as_scalar(*replicates, "replicates"), "replicates");
    std::uint64_t base = 0;
    if (const auto* b = get("base_seed")) base = as_uint(as_scalar(*b, "base_seed"), "base_seed");
    grid.seeds.clear();
    for (std::uint64_t r = 0; r < count; ++r) grid.seeds.push_back(base + r);
  } else if (get("base_seed")) {
    throw Error(ErrorCode::kInvalidArgument, "`base_seed` requires `replicates`");
  }
  if (const auto* v = get("large_n")) grid.large_n = as_uint(as_scalar(*v, "large_n"), "large_n");
  if (const auto* v = get("large_n_replicates")) {
    grid.large_n_replicates = as_uint(as_scalar(*v, "large_n_replicates"), "large_n_replicates");
  }
  if (const auto* v = get("keep_data")) {
    const auto* b = std::get_if<bool>(&as_scalar(*v, "keep_data"));
    if (!b) throw Error(ErrorCode::kInvalidArgument, "`keep_data` must be true or false");
    grid.keep_data = *b;
  }
  grid.validate();
  return grid;
}

Scalar scalar_from_json(const nlohmann::json& j, const std::string& key) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorCode::kInvalidArgument, "unsupported value for `" + key + "`");
}

}  // namespace

ExperimentGrid parse_grid_toml(std::string_view text) {
  return grid_from_values(TomlReader(text).read());
}

ExperimentGrid parse_grid_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "config must be a JSON object");
  std::map<std::string, Value> values;
  for (const auto& [key, v] : j.items()) {
    if (v.is_array()) {
      std::vector<Scalar> items;
      for (const auto& e : v) items.push_back(scalar_from_json(e, key));
      values.emplace(key, std::move(items));
    } else {
      values.emplace(key, scalar_from_json(v, key));
    }
  }
  return grid_from_values(values);
}

ExperimentGrid load_grid_config(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return path.extension() == ".json" ? parse_grid_json(text) : parse_grid_toml(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace calibra
