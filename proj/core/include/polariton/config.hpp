#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polariton {

/// Full description of one simulated run. All fields are SI; frequencies are
/// angular (omega = 2*pi*nu). Propagation directions are signed scalars along
/// the cloud axis (the experiment is quasi one-dimensional).
struct ExperimentConfig {
  double temperature_k = 40e-6;

  double lambda_signal_m = 852e-9;
  double lambda_coupling_m = 509e-9;
  double lambda_r3_m = 509e-9;
  double lambda_r4_m = 509e-9;
  int sign_signal = +1;
  int sign_coupling = -1;
  int sign_r3 = -1;
  int sign_r4 = +1;

  double omega3_rad_s = 0;
  double omega4_rad_s = 0;
  double delta_rad_s = 0;
  // When set, forces the two-photon Rabi frequency instead of omega3*omega4/(2*delta).
  std::optional<double> omega_r_override_rad_s;

  double tau_r1_s = 0;
  double tau_r2_s = 0;

  double t_s_s = 0;  // storage time
  double t_w_s = 0;  // wait between the two mapping pulses

  std::int64_t n_atoms = 1;
  std::int64_t n_shots = 1;
  std::uint64_t seed = 0;

  double od0 = 1.0;
  double tau_od_s = 1.0;
};

struct ConfigError {
  std::string field;
  std::string message;
  double observed = 0.0;
};

struct ValidationOutcome;

/// Proof token that a config passed validation. Immutable; cheap to copy.
class ValidatedConfig {
 public:
  const ExperimentConfig& get() const { return cfg_; }
  const ExperimentConfig* operator->() const { return &cfg_; }

 private:
  explicit ValidatedConfig(const ExperimentConfig& cfg) : cfg_(cfg) {}
  friend struct ValidationOutcome;
  friend ValidationOutcome validate(const ExperimentConfig&);
  ExperimentConfig cfg_;
};

struct ValidationOutcome {
  std::optional<ValidatedConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }

  static ValidationOutcome success(const ExperimentConfig& cfg) {
    ValidationOutcome out;
    out.config = ValidatedConfig(cfg);
    return out;
  }
};

/// Checks every invariant and reports the complete list of violations.
ValidationOutcome validate(const ExperimentConfig& cfg);

/// Re-validating an already validated config is the identity.
inline ValidationOutcome validate(const ValidatedConfig& cfg) {
  return ValidationOutcome::success(cfg.get());
}

/// 1D Maxwell-Boltzmann velocity width sqrt(kB*T/m) along the cloud axis.
double sigma_v(const ValidatedConfig& cfg);

/// Cs cloud at 40 uK with the counter-propagating 852/509 nm storage pair and
/// a counter-propagating 509/509 nm mapping pair. Lifetimes and OD parameters
/// are literature-scale placeholders. Matches configs/cesium_40uk.toml.
ExperimentConfig example_config();

}  // namespace polariton
