#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/config.hpp"

namespace polariton {

// Config file schema (strict: unknown tables/keys are errors, they are almost
// always typos in physics parameters). File units: uK, nm, MHz, us; Rabi
// frequencies and the detuning are given as linear frequencies nu and
// converted to omega = 2*pi*nu internally.
//
//   [ensemble]  temperature_uk, n_atoms, n_shots, seed
//   [lasers]    lambda_signal_nm, lambda_coupling_nm, lambda_r3_nm, lambda_r4_nm,
//               sign_signal, sign_coupling, sign_r3, sign_r4,
//               omega3_mhz, omega4_mhz, delta_mhz, omega_r_mhz (optional)
//   [rydberg]   tau_r1_us, tau_r2_us
//   [protocol]  t_s_us, t_w_us
//   [od]        od0, tau_od_us

struct ConfigLoadResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

ConfigLoadResult load_config_text(std::string_view text);
ConfigLoadResult load_config_file(const std::string& path);

}  // namespace polariton
