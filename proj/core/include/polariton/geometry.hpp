#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "polariton/config.hpp"

namespace polariton {

/// Closed-form quantities derived from a validated config. Wavevectors are
/// signed along the cloud axis; all phase formulas below use the signed
/// values, so mirror-image beam layouts give mirrored (physically identical)
/// phases.
struct DerivedGeometry {
  double k_rad_m = 0;       // wavevector written into the stored excitation
  double k_r_rad_m = 0;     // two-photon wavevector of the mapping pulse pair
  double omega_r_rad_s = 0; // effective two-photon Rabi frequency
  double t_pi_s = 0;        // pi-pulse duration pi/omega_r
  double sigma_v_m_s = 0;   // 1D thermal velocity width
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-photon Rabi frequency omega3*omega4/(2*delta).
/// Throws std::domain_error when delta == 0.
double effective_rabi(double omega3_rad_s, double omega4_rad_s, double delta_rad_s);

/// Far-detuned condition for the two-photon reduction (delta >= 5*max(omega3, omega4)).
bool rabi_far_detuned(double omega3_rad_s, double omega4_rad_s, double delta_rad_s);

struct Wavevectors {
  double k_rad_m;
  double k_r_rad_m;

  double k_magnitude() const { return k_rad_m < 0 ? -k_rad_m : k_rad_m; }
  double k_r_magnitude() const { return k_r_rad_m < 0 ? -k_r_rad_m : k_r_rad_m; }
  int k_sign() const { return k_rad_m < 0 ? -1 : 1; }
  int k_r_sign() const { return k_r_rad_m < 0 ? -1 : 1; }
};

/// k   = sign_signal*2pi/lambda_signal + sign_coupling*2pi/lambda_coupling
/// k_r = sign_r3*2pi/lambda_r3 - sign_r4*2pi/lambda_r4
/// (absorb one photon from each storage beam; absorb from leg 3, emit into leg 4).
Wavevectors wavevectors(const ValidatedConfig& cfg);

/// Throws GeometryError when k/k_r <= 0 (no usable wait time exists then).
DerivedGeometry derive_geometry(const ValidatedConfig& cfg,
                                std::vector<std::string>* warnings = nullptr);

struct WaitTime {
  double t_w_s;
  bool usable;  // false when the formula gives a negative wait
};

/// t_opt = k*t_s/k_r - pi/omega_r.
WaitTime optimal_wait(double t_s_s, const DerivedGeometry& g);

/// Phase imprinted by the first mapping pulse: -pi/2 - k_r*v*pi/(2*omega_r).
double phi1(double v_m_s, const DerivedGeometry& g);

/// Phase imprinted by the second mapping pulse:
/// -pi/2 + k_r*v*pi/(2*omega_r) + k_r*v*(t_w + pi/omega_r).
double phi2(double v_m_s, double t_w_s, const DerivedGeometry& g);

/// phi1 + phi2 in closed form: -pi + k_r*v*(t_w + pi/omega_r).
double first_order_net_phase(double v_m_s, double t_w_s, const DerivedGeometry& g);

/// The phi1/phi2 expansions hold for |k_r*v| < omega_r.
bool first_order_valid(double v_m_s, const DerivedGeometry& g);

/// |k_r| sigma_v / omega_r: thermal Doppler detuning in units of the drive.
double doppler_ratio(const DerivedGeometry& g);

/// Created-minus-required phase at retrieval: v*(k*t_s - k_r*(t_w + pi/omega_r)).
/// Vanishes for every v at t_w = optimal_wait(t_s).
double residual_mismatch(double v_m_s, double t_s_s, double t_w_s, const DerivedGeometry& g);

/// Plain-text diagnostics table, one quantity per line with SI units.
std::string describe(const DerivedGeometry& g);

}  // namespace polariton
