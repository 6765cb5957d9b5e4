#include "hylomorph/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hylomorph/errors.hpp"

namespace hylo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : s_(text) {}

  ConfigValue parse_all() {
    ConfigValue v = value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(what + " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  ConfigValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '[') return array();
    if (c == '"') return ConfigValue{quoted()};
    return bare();
  }

  ConfigValue array() {
    ++pos_;
    ConfigValue::Array items;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return ConfigValue{std::move(items)};
    }
    for (;;) {
      items.push_back(value());
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          break;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']'");
    }
    return ConfigValue{std::move(items)};
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  ConfigValue bare() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("missing value");
    if (tok == "true") return ConfigValue{true};
    if (tok == "false") return ConfigValue{false};
    std::string digits;
    for (char c : tok) {
      if (c != '_') digits.push_back(c);
    }
    const char* b = digits.data();
    const char* e = b + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(b, e, i);
      if (ec == std::errc() && p == e) return ConfigValue{i};
    }
    const char* fb = (*b == '+') ? b + 1 : b;
    double d = 0.0;
    auto [p, ec] = std::from_chars(fb, e, d);
    if (ec == std::errc() && p == e) return ConfigValue{d};
    pos_ = start;
    fail("cannot parse value '" + tok + "'");
  }
};

// Bracket depth outside strings and comments, to join multi-line arrays.
int bracket_balance(std::string_view line) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '#') break;
    if (c == '"') in_string = true;
    else if (c == '[') ++depth;
    else if (c == ']') --depth;
  }
  return depth;
}

void flatten_numbers(const ConfigValue& v, const std::string& key, std::vector<double>& out) {
  if (const auto* arr = std::get_if<ConfigValue::Array>(&v.data)) {
    for (const ConfigValue& e : *arr) flatten_numbers(e, key, out);
  } else if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
    out.push_back(static_cast<double>(*i));
  } else if (const auto* d = std::get_if<double>(&v.data)) {
    out.push_back(*d);
  } else {
    throw ConfigError(key, "expected numbers");
  }
}

}  // namespace

bool ConfigValue::is_number() const noexcept {
  return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
}

std::string ConfigValue::to_toml() const {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const {
      std::string out = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
          out += "\\n";
          continue;
        }
        out.push_back(c);
      }
      return out + "\"";
    }
    std::string operator()(const Array& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ", ";
        out += a[i].to_toml();
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, data);
}

ConfigValue parse_config_value(std::string_view text) {
  return ValueParser(text).parse_all();
}

Config Config::parse(std::string_view text) {
  Config cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const int first_line = lineno;
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = "line " + std::to_string(first_line);
    if (t.front() == '[') {
      const std::size_t close = t.find(']');
      if (close == std::string_view::npos) throw ConfigError(where, "unterminated section header");
      const std::string_view rest = trim(t.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') throw ConfigError(where, "text after section header");
      const std::string_view name = trim(t.substr(1, close - 1));
      if (!valid_key(name)) throw ConfigError(where, "invalid section name");
      section = std::string(name);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where, "expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError(where, "invalid key '" + key + "'");
    std::string body(trim(t.substr(eq + 1)));
    int depth = bracket_balance(body);
    while (depth > 0 && std::getline(in, line)) {
      ++lineno;
      body += "\n" + line;
      depth += bracket_balance(line);
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) throw ConfigError(full, "duplicate key at " + where);
    try {
      cfg.values_[full] = parse_config_value(body);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(full, std::string(e.what()) + " (" + where + ")");
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), "override must be key=value");
  const std::string key(trim(assignment.substr(0, eq)));
  if (!valid_key(key)) throw ConfigError(key, "invalid override key");
  const std::string_view text = trim(assignment.substr(eq + 1));
  ConfigValue v;
  try {
    v = parse_config_value(text);
  } catch (const std::invalid_argument&) {
    v.data = std::string(text);
  }
  values_[key] = std::move(v);
}

void Config::set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const ConfigValue& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

double Config::number(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  throw ConfigError(key, "expected a number");
}

std::int64_t Config::integer(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return *i;
  throw ConfigError(key, "expected an integer");
}

bool Config::boolean(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* b = std::get_if<bool>(&v.data)) return *b;
  throw ConfigError(key, "expected true or false");
}

std::string Config::string(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  throw ConfigError(key, "expected a string");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  flatten_numbers(at(key), key, out);
  return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const {
  const ConfigValue& v = at(key);
  std::vector<std::int64_t> out;
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return {*i};
  const auto* arr = std::get_if<ConfigValue::Array>(&v.data);
  if (!arr) throw ConfigError(key, "expected an integer or an integer array");
  for (const ConfigValue& e : *arr) {
    const auto* i = std::get_if<std::int64_t>(&e.data);
    if (!i) throw ConfigError(key, "expected integers");
    out.push_back(*i);
  }
  return out;
}

std::vector<std::string> Config::strings(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (const auto* s = std::get_if<std::string>(&v.data)) return {*s};
  const auto* arr = std::get_if<ConfigValue::Array>(&v.data);
  if (!arr) throw ConfigError(key, "expected a string or a string array");
  std::vector<std::string> out;
  for (const ConfigValue& e : *arr) {
    const auto* s = std::get_if<std::string>(&e.data);
    if (!s) throw ConfigError(key, "expected strings");
    out.push_back(*s);
  }
  return out;
}

std::string Config::to_toml() const {
  std::map<std::string, std::vector<std::pair<std::string, const ConfigValue*>>> sections;
  for (const auto& [k, v] : values_) {
    const std::size_t dot = k.find('.');
    if (dot == std::string::npos) sections[""].emplace_back(k, &v);
    else sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), &v);
  }
  std::string out;
  for (const auto& [name, entries] : sections) {
    if (!name.empty()) {
      if (!out.empty()) out += "\n";
      out += "[" + name + "]\n";
    }
    for (const auto& [k, v] : entries) out += k + " = " + v->to_toml() + "\n";
  }
  return out;
}

}  // namespace hylo
