#include "polariton/config_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "polariton/toml.hpp"

namespace polariton {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Reader {
  const toml::Document& doc;
  std::vector<ConfigError>& errors;

  const toml::Value* find(const std::string& table, const std::string& key) const {
    auto t = doc.tables.find(table);
    if (t == doc.tables.end()) return nullptr;
    auto k = t->second.find(key);
    if (k == t->second.end()) return nullptr;
    return &k->second;
  }

  std::optional<double> number(const std::string& table, const std::string& key,
                               bool required = true) {
    const toml::Value* v = find(table, key);
    if (!v) {
      if (required) errors.push_back({table + "." + key, "missing required key", 0});
      return std::nullopt;
    }
    if (!v->is_number()) {
      errors.push_back({table + "." + key, "expected a number", 0});
      return std::nullopt;
    }
    return v->number();
  }

  std::optional<std::int64_t> integer(const std::string& table, const std::string& key) {
    const toml::Value* v = find(table, key);
    if (!v) {
      errors.push_back({table + "." + key, "missing required key", 0});
      return std::nullopt;
    }
    if (v->type != toml::Value::Type::integer) {
      errors.push_back({table + "." + key, "expected an integer", v->number()});
      return std::nullopt;
    }
    return v->as_int;
  }

  std::optional<int> sign(const std::string& table, const std::string& key) {
    auto i = integer(table, key);
    if (!i) return std::nullopt;
    if (*i != 1 && *i != -1) {
      errors.push_back({table + "." + key, "propagation sign must be +1 or -1",
                        static_cast<double>(*i)});
      return std::nullopt;
    }
    return static_cast<int>(*i);
  }
};

const std::set<std::string>& known_keys(const std::string& table) {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"ensemble", {"temperature_uk", "n_atoms", "n_shots", "seed"}},
      {"lasers",
       {"lambda_signal_nm", "lambda_coupling_nm", "lambda_r3_nm", "lambda_r4_nm", "sign_signal",
        "sign_coupling", "sign_r3", "sign_r4", "omega3_mhz", "omega4_mhz", "delta_mhz",
        "omega_r_mhz"}},
      {"rydberg", {"tau_r1_us", "tau_r2_us"}},
      {"protocol", {"t_s_us", "t_w_us"}},
      {"od", {"od0", "tau_od_us"}},
  };
  static const std::set<std::string> empty;
  auto it = schema.find(table);
  return it == schema.end() ? empty : it->second;
}

}  // namespace

ConfigLoadResult load_config_text(std::string_view text) {
  ConfigLoadResult result;

  toml::Document doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::ParseError& e) {
    result.errors.push_back({"(file)", e.what(), 0});
    return result;
  }

  static const std::set<std::string> known_tables = {"ensemble", "lasers", "rydberg", "protocol",
                                                     "od"};
  for (const auto& [table, entries] : doc.tables) {
    if (!known_tables.count(table)) {
      result.errors.push_back({table.empty() ? "(root)" : table, "unknown table", 0});
      continue;
    }
    for (const auto& [key, value] : entries) {
      if (!known_keys(table).count(key)) {
        result.errors.push_back({table + "." + key, "unknown key", 0});
      }
    }
  }
  for (const auto& table : known_tables) {
    if (!doc.tables.count(table)) {
      result.errors.push_back({table, "missing table", 0});
    }
  }
  if (!result.errors.empty()) return result;

  Reader r{doc, result.errors};
  ExperimentConfig c;

  if (auto v = r.number("ensemble", "temperature_uk")) c.temperature_k = *v * 1e-6;
  if (auto v = r.integer("ensemble", "n_atoms")) c.n_atoms = *v;
  if (auto v = r.integer("ensemble", "n_shots")) c.n_shots = *v;
  if (auto v = r.integer("ensemble", "seed")) {
    if (*v < 0) {
      result.errors.push_back({"ensemble.seed", "seed must be non-negative",
                               static_cast<double>(*v)});
    } else {
      c.seed = static_cast<std::uint64_t>(*v);
    }
  }

  if (auto v = r.number("lasers", "lambda_signal_nm")) c.lambda_signal_m = *v * 1e-9;
  if (auto v = r.number("lasers", "lambda_coupling_nm")) c.lambda_coupling_m = *v * 1e-9;
  if (auto v = r.number("lasers", "lambda_r3_nm")) c.lambda_r3_m = *v * 1e-9;
  if (auto v = r.number("lasers", "lambda_r4_nm")) c.lambda_r4_m = *v * 1e-9;
  if (auto v = r.sign("lasers", "sign_signal")) c.sign_signal = *v;
  if (auto v = r.sign("lasers", "sign_coupling")) c.sign_coupling = *v;
  if (auto v = r.sign("lasers", "sign_r3")) c.sign_r3 = *v;
  if (auto v = r.sign("lasers", "sign_r4")) c.sign_r4 = *v;
  if (auto v = r.number("lasers", "omega3_mhz")) c.omega3_rad_s = kTwoPi * *v * 1e6;
  if (auto v = r.number("lasers", "omega4_mhz")) c.omega4_rad_s = kTwoPi * *v * 1e6;
  if (auto v = r.number("lasers", "delta_mhz")) c.delta_rad_s = kTwoPi * *v * 1e6;
  if (auto v = r.number("lasers", "omega_r_mhz", /*required=*/false))
    c.omega_r_override_rad_s = kTwoPi * *v * 1e6;

  if (auto v = r.number("rydberg", "tau_r1_us")) c.tau_r1_s = *v * 1e-6;
  if (auto v = r.number("rydberg", "tau_r2_us")) c.tau_r2_s = *v * 1e-6;

  if (auto v = r.number("protocol", "t_s_us")) c.t_s_s = *v * 1e-6;
  if (auto v = r.number("protocol", "t_w_us")) c.t_w_s = *v * 1e-6;

  if (auto v = r.number("od", "od0")) c.od0 = *v;
  if (auto v = r.number("od", "tau_od_us")) c.tau_od_s = *v * 1e-6;

  if (!result.errors.empty()) return result;
  result.config = c;
  return result;
}

ConfigLoadResult load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigLoadResult r;
    r.errors.push_back({"(file)", "cannot open config file: " + path, 0});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str());
}

}  // namespace polariton
