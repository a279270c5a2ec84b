#include "polariton/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace polariton {

std::string format_sig9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string curve_to_csv(const EfficiencyCurve& curve) {
  std::string out = "control_us,efficiency,std_error\n";
  for (const auto& p : curve.points) {
    out += format_sig9(p.control_s * 1e6);
    out += ',';
    out += format_sig9(p.efficiency);
    out += ',';
    out += format_sig9(p.std_error);
    out += '\n';
  }
  return out;
}

void write_curve_csv(const std::string& path, const EfficiencyCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << curve_to_csv(curve);
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

double parse_number(const std::string& s, int line_no) {
  std::string t = s;
  // trim spaces
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.pop_back();
  if (t == "nan") return std::nan("");
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw CsvFormatError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

EfficiencyCurve read_curve_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "control_us,efficiency,std_error") {
    throw CsvFormatError(path + ": expected header control_us,efficiency,std_error");
  }
  EfficiencyCurve curve;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 3) {
      throw CsvFormatError(path + ": line " + std::to_string(line_no) + ": expected 3 columns");
    }
    curve.points.push_back({parse_number(fields[0], line_no) * 1e-6,
                            parse_number(fields[1], line_no), parse_number(fields[2], line_no)});
  }
  return curve;
}

Dataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw CsvFormatError("empty dataset");
  line = strip_cr(line);

  bool has_sigma = false;
  if (line == "t_us,y,sigma" || line == "control_us,efficiency,std_error") {
    has_sigma = true;
  } else if (line == "t_us,y") {
    has_sigma = false;
  } else {
    throw CsvFormatError("expected header t_us,y[,sigma] or control_us,efficiency,std_error");
  }

  Dataset data;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_line(line);
    const std::size_t expected = has_sigma ? 3 : 2;
    if (fields.size() != expected) {
      throw CsvFormatError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(expected) + " columns");
    }
    DataPoint p;
    p.t = parse_number(fields[0], line_no);
    p.y = parse_number(fields[1], line_no);
    p.sigma = has_sigma ? parse_number(fields[2], line_no) : 0.0;
    if (std::isnan(p.t) || std::isnan(p.y)) continue;  // NaN-flagged rows are skipped
    data.points.push_back(p);
  }
  return data;
}

Dataset read_dataset_csv(const std::string& path) { return parse_dataset_csv(read_file(path)); }

Dataset curve_to_dataset(const EfficiencyCurve& curve) {
  Dataset data;
  for (const auto& p : curve.points) {
    if (std::isnan(p.efficiency)) continue;
    data.points.push_back({p.control_s * 1e6, p.efficiency, p.std_error});
  }
  return data;
}

}  // namespace polariton
