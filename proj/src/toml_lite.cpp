#include "gasnet/toml_lite.hpp"

#include <cctype>
#include <cstdlib>

#include "gasnet/error.hpp"

namespace gasnet::toml {

const Value* Table::find(std::string_view key) const {
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i] == key) return &values[i];
  return nullptr;
}

const char* type_name(const Value& v) {
  switch (v.data.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    case 3: return "array";
    default: return "table";
  }
}

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table run() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      end_of_line();
    }
    return root;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        get();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() { skip_blank_lines(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    get();
  }

  std::string key() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    std::string k;
    while (!eof() && is_bare_key_char(peek())) k += get();
    if (k.empty()) fail("expected a key");
    return k;
  }

  Table* header(Table& root) {
    get();  // '['
    const bool array = peek() == '[';
    if (array) get();
    const std::string name = key();
    skip_spaces();
    if (peek() != ']') fail("expected ']' after table name '" + name + "'");
    get();
    if (array) {
      if (peek() != ']') fail("expected ']]' after table name '" + name + "'");
      get();
    }
    Value* slot = nullptr;
    for (std::size_t i = 0; i < root.keys.size(); ++i)
      if (root.keys[i] == name) slot = &root.values[i];
    if (array) {
      if (!slot) {
        root.keys.push_back(name);
        root.values.push_back(Value{line_, Array{}});
        slot = &root.values.back();
      } else if (!slot->is_array()) {
        fail("'" + name + "' already defined as a non-array");
      }
      auto& arr = std::get<Array>(slot->data);
      arr.push_back(Value{line_, Table{}});
      return &std::get<Table>(arr.back().data);
    }
    if (slot) fail("duplicate table [" + name + "]");
    root.keys.push_back(name);
    root.values.push_back(Value{line_, Table{}});
    return &std::get<Table>(root.values.back().data);
  }

  void key_value(Table& table) {
    const int line = line_;
    const std::string k = key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key '" + k + "'");
    get();
    skip_spaces();
    if (table.contains(k)) throw ParseError(line, "duplicate key '" + k + "'");
    Value v = value();
    table.keys.push_back(k);
    table.values.push_back(std::move(v));
  }

  Value value() {
    const int line = line_;
    const char c = peek();
    if (c == '"') return Value{line, basic_string()};
    if (c == '[') return Value{line, array()};
    if (c == '{') return Value{line, inline_table()};
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return Value{line, true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return Value{line, false};
    }
    return Value{line, number()};
  }

  double number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                      peek() == '.' || peek() == 'e' || peek() == 'E' ||
                      peek() == '_' ||
                      ((peek() == '+' || peek() == '-') &&
                       (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
      ++pos_;
    std::string token;
    for (std::size_t i = start; i < pos_; ++i)
      if (text_[i] != '_') token += text_[i];
    if (token.empty() || token == "+" || token == "-")
      fail("expected a value");
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) fail("malformed number '" + token + "'");
    return v;
  }

  std::string basic_string() {
    get();  // opening quote
    std::string s;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case '"': s += '"'; break;
          case '\\': s += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + e + "'");
        }
      } else {
        s += c;
      }
    }
    return s;
  }

  Array array() {
    get();  // '['
    Array out;
    skip_array_space();
    if (peek() == ']') {
      get();
      return out;
    }
    while (true) {
      skip_array_space();
      if (peek() == ']') {  // trailing comma
        get();
        return out;
      }
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  Table inline_table() {
    get();  // '{'
    Table t;
    skip_spaces();
    if (peek() == '}') {
      get();
      return t;
    }
    while (true) {
      key_value(t);
      skip_spaces();
      if (peek() == ',') {
        get();
        skip_spaces();
        continue;
      }
      if (peek() == '}') {
        get();
        return t;
      }
      fail("expected ',' or '}' in inline table");
    }
  }
};

}  // namespace

Table parse(std::string_view text) { return Parser(text).run(); }

}  // namespace gasnet::toml
