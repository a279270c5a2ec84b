#include "polariton/config.hpp"

#include <cmath>
#include <numbers>

#include "polariton/constants.hpp"

namespace polariton {

namespace {

void require(std::vector<ConfigError>& errors, bool ok, const std::string& field,
             const std::string& message, double observed) {
  if (!ok) errors.push_back({field, message, observed});
}

}  // namespace

ValidationOutcome validate(const ExperimentConfig& c) {
  std::vector<ConfigError> errors;

  require(errors, c.temperature_k > 0, "temperature", "temperature must be positive",
          c.temperature_k);

  require(errors, c.lambda_signal_m > 0, "lambda_signal", "wavelength must be positive",
          c.lambda_signal_m);
  require(errors, c.lambda_coupling_m > 0, "lambda_coupling", "wavelength must be positive",
          c.lambda_coupling_m);
  require(errors, c.lambda_r3_m > 0, "lambda_r3", "wavelength must be positive", c.lambda_r3_m);
  require(errors, c.lambda_r4_m > 0, "lambda_r4", "wavelength must be positive", c.lambda_r4_m);

  auto sign_ok = [](int s) { return s == 1 || s == -1; };
  require(errors, sign_ok(c.sign_signal), "sign_signal", "propagation sign must be +1 or -1",
          c.sign_signal);
  require(errors, sign_ok(c.sign_coupling), "sign_coupling", "propagation sign must be +1 or -1",
          c.sign_coupling);
  require(errors, sign_ok(c.sign_r3), "sign_r3", "propagation sign must be +1 or -1", c.sign_r3);
  require(errors, sign_ok(c.sign_r4), "sign_r4", "propagation sign must be +1 or -1", c.sign_r4);

  if (sign_ok(c.sign_signal) && sign_ok(c.sign_coupling)) {
    require(errors, c.sign_signal == -c.sign_coupling, "sign_coupling",
            "signal and coupling beams must counter-propagate", c.sign_coupling);
  }
  if (sign_ok(c.sign_r3) && sign_ok(c.sign_r4)) {
    require(errors, c.sign_r3 == -c.sign_r4, "sign_r4",
            "rephasing beams must counter-propagate", c.sign_r4);
  }
  if (sign_ok(c.sign_r3) && sign_ok(c.sign_coupling)) {
    require(errors, c.sign_r3 == c.sign_coupling, "sign_r3",
            "rephasing leg 3 must co-propagate with the coupling beam", c.sign_r3);
  }

  require(errors, c.omega3_rad_s > 0, "omega3", "Rabi frequency must be positive", c.omega3_rad_s);
  require(errors, c.omega4_rad_s > 0, "omega4", "Rabi frequency must be positive", c.omega4_rad_s);
  require(errors, c.delta_rad_s > 0, "delta", "detuning must be positive", c.delta_rad_s);
  if (c.omega_r_override_rad_s) {
    require(errors, *c.omega_r_override_rad_s > 0, "omega_r",
            "Rabi frequency override must be positive", *c.omega_r_override_rad_s);
  }

  require(errors, c.tau_r1_s > 0, "tau_r1", "lifetime must be positive", c.tau_r1_s);
  require(errors, c.tau_r2_s > 0, "tau_r2", "lifetime must be positive", c.tau_r2_s);

  require(errors, c.t_s_s >= 0, "t_s", "storage time must be non-negative", c.t_s_s);
  require(errors, c.t_w_s >= 0, "t_w", "wait time must be non-negative", c.t_w_s);

  require(errors, c.n_atoms >= 1, "n_atoms", "at least one atom required",
          static_cast<double>(c.n_atoms));
  require(errors, c.n_shots >= 1, "n_shots", "at least one shot required",
          static_cast<double>(c.n_shots));

  require(errors, c.od0 > 0, "od0", "optical depth must be positive", c.od0);
  require(errors, c.tau_od_s > 0, "tau_od", "OD decay time must be positive", c.tau_od_s);

  if (!errors.empty()) {
    ValidationOutcome out;
    out.errors = std::move(errors);
    return out;
  }
  return ValidationOutcome::success(c);
}

double sigma_v(const ValidatedConfig& cfg) {
  return std::sqrt(constants.boltzmann_j_per_k * cfg->temperature_k / constants.cesium_mass_kg);
}

ExperimentConfig example_config() {
  ExperimentConfig c;
  c.temperature_k = 40e-6;
  c.lambda_signal_m = 852e-9;
  c.lambda_coupling_m = 509e-9;
  c.lambda_r3_m = 509e-9;
  c.lambda_r4_m = 509e-9;
  c.sign_signal = +1;
  c.sign_coupling = -1;
  c.sign_r3 = -1;
  c.sign_r4 = +1;
  c.omega3_rad_s = 2 * std::numbers::pi * 21e6;
  c.omega4_rad_s = 2 * std::numbers::pi * 32e6;
  c.delta_rad_s = 2 * std::numbers::pi * 335e6;
  c.tau_r1_s = 150e-6;  // placeholder lifetimes, not measured values
  c.tau_r2_s = 180e-6;
  c.t_s_s = 7e-6;
  c.t_w_s = 0.909e-6;
  c.n_atoms = 4000;
  c.n_shots = 400;
  c.seed = 20240917;
  c.od0 = 5.0;
  c.tau_od_s = 30e-6;
  return c;
}

}  // namespace polariton
