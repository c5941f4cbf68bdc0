// Reader for the TOML subset used by scenario and sweep files.
//
// Supported: `# comments`, `[table]`, `[[array-of-tables]]`, `key = value`
// with bare or quoted keys, and values that are numbers, booleans, basic
// strings, arrays (may span lines) and single-line inline tables. Dotted
// keys, dates and multi-line strings are not supported.

#ifndef GASNET_TOML_LITE_HPP
#define GASNET_TOML_LITE_HPP

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gasnet::toml {

struct Value;

/// Insertion-ordered key/value table.
struct Table {
  std::vector<std::string> keys;
  std::vector<Value> values;

  const Value* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
};

using Array = std::vector<Value>;

struct Value {
  int line = 0;
  std::variant<double, bool, std::string, Array, Table> data;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_table() const { return std::holds_alternative<Table>(data); }
};

/// Parses a document into its root table. `[t]` headers become table-valued
/// entries and `[[t]]` headers become arrays of tables. Throws ParseError.
Table parse(std::string_view text);

/// Type name used in diagnostics ("number", "string", ...).
const char* type_name(const Value& v);

}  // namespace gasnet::toml

#endif  // GASNET_TOML_LITE_HPP
