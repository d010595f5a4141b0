#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sparse_bandit::cli {

/// Invalid configuration; the message carries the origin ("file:line" or
/// "--set") of the offending entry when there is one.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string key;
  std::string default_value;  // ignored when required
  std::string help;
  bool required = false;
};

using Schema = std::vector<KeySpec>;

/// Flat dot-namespaced key=value configuration.
class Config {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // where the value came from, for error messages
  };

  void set(const std::string& key, std::string value, std::string origin);
  bool contains(const std::string& key) const;
  const std::string& value(const std::string& key) const;
  const std::string& origin(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<long> get_long_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  /// Number, or nullopt for the literal "auto".
  std::optional<double> get_double_or_auto(const std::string& key) const;

  /// Equality of keys and values; origins are ignored.
  bool operator==(const Config& other) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  std::map<std::string, Entry> entries_;
};

/// Parses config text. Blank lines and lines whose first non-space character
/// is '#' are skipped; every other line must be key=value with a known key.
Config parse_config(std::string_view text, const Schema& schema,
                    const std::string& source = "<config>");
Config load_config(const std::string& path, const Schema& schema);

/// "key=value" from --set; the key must be in the schema.
void apply_override(Config& config, std::string_view assignment,
                    const Schema& schema);

/// Fills defaults; throws naming the first missing required key.
Config resolve(const Config& config, const Schema& schema);

/// One key=value line per entry, in key order.
std::string serialize(const Config& config);

/// Key list with defaults for --help.
std::string describe(const Schema& schema);

}  // namespace sparse_bandit::cli
