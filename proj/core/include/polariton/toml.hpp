#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polariton::toml {

// Minimal TOML subset: [table] headers, scalar key = value pairs (integer,
// float, boolean, basic string), '#' comments. No arrays, nested tables or
// date-times -- the config schema does not use them and anything outside the
// subset is a parse error rather than a silent skip.

struct Value {
  enum class Type { integer, floating, boolean, string };
  Type type = Type::integer;
  std::int64_t as_int = 0;
  double as_double = 0;
  bool as_bool = false;
  std::string as_string;
  int line = 0;

  double number() const {
    return type == Type::integer ? static_cast<double>(as_int) : as_double;
  }
  bool is_number() const { return type == Type::integer || type == Type::floating; }
};

using Table = std::map<std::string, Value>;

struct Document {
  // Key "" holds root-level pairs that appear before any table header.
  std::map<std::string, Table> tables;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

Document parse(std::string_view text);
Document parse_file(const std::string& path);  // throws ParseError / std::runtime_error on I/O

}  // namespace polariton::toml
