#include "polariton/toml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace polariton::toml {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Removes a trailing comment, honouring quotes.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (ch == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

Value parse_string(std::string_view raw, int line) {
  Value v;
  v.type = Value::Type::string;
  v.line = line;
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    char ch = raw[i];
    if (ch == '\\') {
      if (i + 1 >= raw.size() - 1) throw ParseError("dangling escape in string", line);
      char esc = raw[++i];
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw ParseError("unsupported escape in string", line);
      }
    } else if (ch == '"') {
      throw ParseError("unexpected quote inside string", line);
    } else {
      out.push_back(ch);
    }
  }
  v.as_string = std::move(out);
  return v;
}

Value parse_value(std::string_view raw, int line) {
  raw = trim(raw);
  if (raw.empty()) throw ParseError("missing value", line);

  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ParseError("unterminated string", line);
    return parse_string(raw, line);
  }
  if (raw == "true" || raw == "false") {
    Value v;
    v.type = Value::Type::boolean;
    v.as_bool = (raw == "true");
    v.line = line;
    return v;
  }

  // Numeric. TOML permits '_' separators between digits; dropping them all is
  // close enough for this subset.
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    if (c != '_') cleaned.push_back(c);
  }

  const bool looks_float = cleaned.find_first_of(".eE") != std::string::npos;
  const char* begin = cleaned.data();
  const char* end = cleaned.data() + cleaned.size();

  if (!looks_float) {
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(begin, end, i);
    if (ec == std::errc() && ptr == end) {
      Value v;
      v.type = Value::Type::integer;
      v.as_int = i;
      v.line = line;
      return v;
    }
  }
  double d = 0;
  auto [ptr, ec] = std::from_chars(begin, end, d);
  if (ec == std::errc() && ptr == end) {
    Value v;
    v.type = Value::Type::floating;
    v.as_double = d;
    v.line = line;
    return v;
  }
  throw ParseError("cannot parse value '" + std::string(raw) + "'", line);
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  std::string current;  // root table
  doc.tables[current];

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated table header", line_no);
      std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) throw ParseError("invalid table name", line_no);
      current = std::string(name);
      if (doc.tables.count(current) && current != "")
        throw ParseError("duplicate table [" + current + "]", line_no);
      doc.tables[current];
      continue;
    }

    std::size_t eq = std::string_view::npos;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);

    std::string key{trim(line.substr(0, eq))};
    if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", line_no);

    Table& table = doc.tables[current];
    if (table.count(key))
      throw ParseError("duplicate key '" + key + "' in [" + current + "]", line_no);
    table[key] = parse_value(line.substr(eq + 1), line_no);
  }

  // Drop an unused empty root table so iteration sees only real tables.
  if (doc.tables.count("") && doc.tables[""].empty()) doc.tables.erase("");
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace polariton::toml
