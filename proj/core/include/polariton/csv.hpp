#pragma once

#include <stdexcept>
#include <string>

#include "polariton/efficiency.hpp"
#include "polariton/fitting.hpp"

namespace polariton {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 9 significant digits, "nan"/"inf" spelled out.
std::string format_sig9(double v);

/// Header `control_us,efficiency,std_error`, one row per point, control in
/// microseconds, LF line endings.
std::string curve_to_csv(const EfficiencyCurve& curve);
void write_curve_csv(const std::string& path, const EfficiencyCurve& curve);
EfficiencyCurve read_curve_csv(const std::string& path);

/// Accepts `t_us,y[,sigma]` and the curve header above.
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);

/// Rows with NaN values dropped; sigma copied from std_error.
Dataset curve_to_dataset(const EfficiencyCurve& curve);

}  // namespace polariton
