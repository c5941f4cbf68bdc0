// Typed access to parsed TOML tables with dotted field paths in errors.
// Internal to the library.

#ifndef GASNET_SRC_CONFIG_READER_HPP
#define GASNET_SRC_CONFIG_READER_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/toml_lite.hpp"

namespace gasnet::detail {

using toml::Table;
using toml::Value;

/// Typed access to one table with dotted field paths for diagnostics.
class Reader {
public:
  Reader(const Table& table, std::string path) : t_(table), path_(std::move(path)) {}

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const Value& require(std::string_view key) const {
    const Value* v = t_.find(key);
    if (!v) throw ConfigError(field(key), "required field missing");
    return *v;
  }

  double number(std::string_view key) const { return as_number(require(key), field(key)); }

  std::optional<double> opt_number(std::string_view key) const {
    const Value* v = t_.find(key);
    if (!v) return std::nullopt;
    return as_number(*v, field(key));
  }

  int integer(std::string_view key) const { return as_integer(require(key), field(key)); }

  std::optional<int> opt_integer(std::string_view key) const {
    const Value* v = t_.find(key);
    if (!v) return std::nullopt;
    return as_integer(*v, field(key));
  }

  std::string string(std::string_view key) const { return as_string(require(key), field(key)); }

  std::optional<std::string> opt_string(std::string_view key) const {
    const Value* v = t_.find(key);
    if (!v) return std::nullopt;
    return as_string(*v, field(key));
  }

  void reject_unknown(std::initializer_list<std::string_view> allowed) const {
    for (const auto& k : t_.keys)
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ConfigError(field(k), "unknown field");
  }

  static double as_number(const Value& v, const std::string& f) {
    if (!v.is_number())
      throw ConfigError(f, std::string("expected number, got ") + toml::type_name(v) +
                               " (line " + std::to_string(v.line) + ")");
    return std::get<double>(v.data);
  }
  static int as_integer(const Value& v, const std::string& f) {
    const double x = as_number(v, f);
    if (x != std::floor(x) || std::abs(x) > 1e9)
      throw ConfigError(f, "expected integer (line " + std::to_string(v.line) + ")");
    return static_cast<int>(x);
  }
  static std::string as_string(const Value& v, const std::string& f) {
    if (!v.is_string())
      throw ConfigError(f, std::string("expected string, got ") + toml::type_name(v) +
                               " (line " + std::to_string(v.line) + ")");
    return std::get<std::string>(v.data);
  }

private:
  const Table& t_;
  std::string path_;
};

inline const Table& table_at(const Table& root, std::string_view key) {
  const Value* v = root.find(key);
  if (!v) throw ConfigError(std::string(key), "required section missing");
  if (!v->is_table())
    throw ConfigError(std::string(key), "expected [" + std::string(key) + "] section");
  return std::get<Table>(v->data);
}

inline std::vector<const Table*> tables_at(const Table& root, std::string_view key) {
  std::vector<const Table*> out;
  const Value* v = root.find(key);
  if (!v) return out;
  if (!v->is_array())
    throw ConfigError(std::string(key), "expected [[" + std::string(key) + "]] entries");
  for (const auto& item : std::get<toml::Array>(v->data)) {
    if (!item.is_table())
      throw ConfigError(std::string(key), "expected table entries");
    out.push_back(&std::get<Table>(item.data));
  }
  return out;
}

inline std::vector<double> number_array(const Value& v, const std::string& f) {
  if (!v.is_array()) throw ConfigError(f, "expected array of numbers");
  std::vector<double> out;
  for (const auto& item : std::get<toml::Array>(v.data))
    out.push_back(Reader::as_number(item, f));
  return out;
}

}  // namespace gasnet::detail

#endif  // GASNET_SRC_CONFIG_READER_HPP
