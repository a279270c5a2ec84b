#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/csv.hpp"
#include "polariton/efficiency.hpp"
#include "polariton/fitting.hpp"

namespace polariton {

// Named scenarios. Each is fully determined by (config file, scenario, seed):
//   fig1b - analytic efficiency vs storage time, free decay and protocol at
//           the optimal wait per point
//   fig3a - Monte Carlo protocol vs storage time with OD readout loss, raw
//           and corrected, plus a free-decay reference and decay-model fits
//   fig3b - OD vs storage time plus its Gaussian fit
//   fig4  - Monte Carlo efficiency vs wait time at fixed storage time, with
//           the analytic curve and a free-decay reference
//   fit   - fit an external CSV dataset
//   sweep - generic 1D scan (storage or wait time; analytic or Monte Carlo)
enum class Scenario { fig1b, fig3a, fig3b, fig4, fit, sweep };

std::string scenario_token(Scenario s);
std::optional<Scenario> scenario_from_token(std::string_view token);

enum class SweepParam { storage_time, wait_time };
enum class Engine { analytic, monte_carlo };

struct ScenarioOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool no_decay = false;
  bool ideal_pulses = false;
  std::optional<int> points;
  std::optional<double> tmin_us;
  std::optional<double> tmax_us;
  OdReadoutMap od_map = OdReadoutMap::saturating;
  bool weighted = false;  // use std errors as fit weights
  std::optional<FitModelKind> fit_model;
  SweepParam sweep_param = SweepParam::storage_time;
  McMode sweep_mode = McMode::protocol;
  Engine sweep_engine = Engine::monte_carlo;
  int max_threads = 0;
};

struct RunManifest {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::vector<std::string> outputs;   // file names relative to out_dir
  std::vector<std::string> warnings;
  double wall_ms = 0;
  std::string json;  // complete manifest document as written to manifest.json
};

class ConfigFailure : public std::runtime_error {
 public:
  ConfigFailure(const std::string& what, std::vector<ConfigError> errors)
      : std::runtime_error(what), errors_(std::move(errors)) {}
  const std::vector<ConfigError>& errors() const { return errors_; }

 private:
  std::vector<ConfigError> errors_;
};

/// Divide all efficiencies and std errors by the curve's own point.
EfficiencyCurve normalize(const EfficiencyCurve& curve, std::size_t reference_index);
/// Divide by an external reference value (e.g. another curve's first point).
EfficiencyCurve normalize(const EfficiencyCurve& curve, double reference_value);

/// Runs a config-driven scenario (everything except `fit`). Writes one CSV
/// per curve plus manifest.json into options.out_dir.
/// Throws ConfigFailure (bad config), GeometryError, IoError.
RunManifest run_scenario(Scenario scenario, const std::string& config_path,
                         const ScenarioOptions& options);

struct FitRun {
  RunManifest manifest;
  FitResult fit;
};

/// The `fit` scenario: dataset CSV in, fit.json + manifest.json out.
FitRun run_fit_scenario(const std::string& dataset_path, const ScenarioOptions& options);

}  // namespace polariton
