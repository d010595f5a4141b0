#include "sparse_bandit_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sparse_bandit::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

const KeySpec* find_key(const Schema& schema, std::string_view key) {
  for (const auto& k : schema) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string_view rest = s;
  while (true) {
    const auto comma = rest.find(',');
    out.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  return v;
}

// Accepts "key=value", checks the key against the schema.
std::pair<std::string, std::string> split_assignment(std::string_view line,
                                                     const Schema& schema,
                                                     const std::string& origin) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(origin + ": expected key=value, got '" + std::string(line) + "'");
  }
  const std::string key(trim(line.substr(0, eq)));
  const std::string value(trim(line.substr(eq + 1)));
  if (!valid_key(key)) throw ConfigError(origin + ": malformed key '" + key + "'");
  if (!find_key(schema, key)) throw ConfigError(origin + ": unknown key '" + key + "'");
  return {key, value};
}

}  // namespace

void Config::set(const std::string& key, std::string value, std::string origin) {
  entries_[key] = Entry{std::move(value), std::move(origin)};
}

bool Config::contains(const std::string& key) const { return entries_.count(key) > 0; }

const std::string& Config::value(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second.value;
}

const std::string& Config::origin(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second.origin;
}

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string where = it == entries_.end() ? "" : it->second.origin + ": ";
  throw ConfigError(where + "key '" + key + "': " + what);
}

std::string Config::get_string(const std::string& key) const {
  const std::string& v = value(key);
  if (v.empty()) fail(key, "empty value");
  return v;
}

double Config::get_double(const std::string& key) const {
  const auto v = parse_number<double>(value(key));
  if (!v) fail(key, "expected a finite number, got '" + value(key) + "'");
  return *v;
}

long Config::get_long(const std::string& key) const {
  const auto v = parse_number<long>(value(key));
  if (!v) fail(key, "expected an integer, got '" + value(key) + "'");
  return *v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = value(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(key, "expected true or false, got '" + v + "'");
}

std::vector<long> Config::get_long_list(const std::string& key) const {
  std::vector<long> out;
  for (const auto& item : split_list(value(key))) {
    const auto v = parse_number<long>(item);
    if (!v) fail(key, "expected a comma-separated integer list, got '" + value(key) + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(value(key))) {
    const auto v = parse_number<double>(item);
    if (!v) fail(key, "expected a comma-separated number list, got '" + value(key) + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  auto out = split_list(value(key));
  for (const auto& s : out) {
    if (s.empty()) fail(key, "empty list item in '" + value(key) + "'");
  }
  return out;
}

std::optional<double> Config::get_double_or_auto(const std::string& key) const {
  if (value(key) == "auto") return std::nullopt;
  const auto v = parse_number<double>(value(key));
  if (!v) fail(key, "expected a number or 'auto', got '" + value(key) + "'");
  return *v;
}

bool Config::operator==(const Config& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  return std::equal(entries_.begin(), entries_.end(), other.entries_.begin(),
                    [](const auto& a, const auto& b) {
                      return a.first == b.first && a.second.value == b.second.value;
                    });
}

Config parse_config(std::string_view text, const Schema& schema,
                    const std::string& source) {
  Config config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const std::string origin = source + ":" + std::to_string(line_no);
    auto [key, value] = split_assignment(line, schema, origin);
    if (config.contains(key)) {
      throw ConfigError(origin + ": duplicate key '" + key + "' (first set at " +
                        config.origin(key) + ")");
    }
    config.set(key, std::move(value), origin);
  }
  return config;
}

Config load_config(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), schema, path);
}

void apply_override(Config& config, std::string_view assignment, const Schema& schema) {
  auto [key, value] = split_assignment(trim(assignment), schema, "--set");
  config.set(key, std::move(value), "--set " + key);
}

Config resolve(const Config& config, const Schema& schema) {
  Config out = config;
  for (const auto& k : schema) {
    if (out.contains(k.key)) continue;
    if (k.required) throw ConfigError("missing required key '" + k.key + "'");
    out.set(k.key, k.default_value, "default");
  }
  return out;
}

std::string serialize(const Config& config) {
  std::string out;
  for (const auto& [key, entry] : config.entries()) {
    if (entry.value.find('\n') != std::string::npos || trim(entry.value) != entry.value) {
      throw ConfigError("key '" + key + "': value cannot be serialized losslessly");
    }
    out += key + "=" + entry.value + "\n";
  }
  return out;
}

std::string describe(const Schema& schema) {
  std::size_t width = 0;
  for (const auto& k : schema) width = std::max(width, k.key.size());
  std::ostringstream os;
  os << "Config keys (key = default):\n";
  for (const auto& k : schema) {
    os << "  " << k.key << std::string(width - k.key.size(), ' ') << " = "
       << (k.required ? std::string("<required>") : k.default_value) << "  "
       << k.help << '\n';
  }
  return os.str();
}

}  // namespace sparse_bandit::cli
