#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hylo {

/// Scalar or (possibly nested) array from the TOML subset.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, std::int64_t, double, std::string, Array> data;

  bool is_number() const noexcept;
  std::string to_toml() const;
};

/// Sections, `key = value` pairs, scalars and arrays; `#` comments. Keys
/// are stored flattened as "section.key".
class Config {
 public:
  /// Throws ConfigError naming the line on malformed input.
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Applies "section.key=value"; a value that does not parse as a TOML
  /// scalar or array is taken as a bare string.
  void set(std::string_view assignment);
  void set(const std::string& key, ConfigValue value);

  bool has(const std::string& key) const;
  const ConfigValue& at(const std::string& key) const;  // throws ConfigError
  std::vector<std::string> keys() const;

  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string string(const std::string& key) const;
  /// Flattens nested arrays; a scalar becomes a one-element list.
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  std::string to_toml() const;

 private:
  std::map<std::string, ConfigValue> values_;
};

/// Parses one value; throws std::invalid_argument when it is not valid.
ConfigValue parse_config_value(std::string_view text);

}  // namespace hylo
