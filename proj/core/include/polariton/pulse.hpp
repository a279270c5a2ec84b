#pragma once

#include <complex>

#include "polariton/geometry.hpp"

namespace polariton {

/// Internal state of one atom on the {|r1>, |r2>} manifold. Norm may drop
/// below one once amplitude damping is applied.
struct AtomState {
  std::complex<double> c1{1.0, 0.0};
  std::complex<double> c2{0.0, 0.0};
  double norm_sq() const { return std::norm(c1) + std::norm(c2); }
};

/// Unitary for one rectangular two-photon pulse in the rotating frame,
/// H = delta/2 sigma_z + omega_r/2 (cos(chi) sigma_x + sin(chi) sigma_y),
/// U = exp(-i H tau). Basis order (|r1>, |r2>). chi carries the spatial
/// phase of the drive, delta the per-atom Doppler detuning.
struct TwoLevelPropagator {
  std::complex<double> u11, u12, u21, u22;

  double omega_r_rad_s = 0;
  double detuning_rad_s = 0;
  double duration_s = 0;
  double spatial_phase_rad = 0;

  AtomState apply(const AtomState& s) const {
    return {u11 * s.c1 + u12 * s.c2, u21 * s.c1 + u22 * s.c2};
  }
  /// Max-norm of U^dagger U - I.
  double unitarity_defect() const;
  /// |<r2|U|r1>|^2 = omega_r^2/W^2 * sin^2(W tau/2), W = sqrt(omega_r^2 + delta^2).
  double transfer_probability() const { return std::norm(u21); }
};

TwoLevelPropagator pulse_propagator(double omega_r_rad_s, double detuning_rad_s,
                                    double duration_s, double spatial_phase_rad);

/// Fixed-step RK4 integration of the same Hamiltonian; independent check of
/// the closed form. Throws std::invalid_argument for step <= 0.
AtomState ode_oracle(double omega_r_rad_s, double detuning_rad_s, double duration_s,
                     double spatial_phase_rad, const AtomState& initial, double step_s);

struct SequenceResult {
  std::complex<double> amplitude;  // final |r1> amplitude, atom started in |r1>
  double exact_phase_rad;          // unwrapped against the first-order prediction
};

/// Full pulse-wait-pulse composition for one atom moving at velocity v.
/// Exact within the two-level reduction: the drive's spatial phase at the
/// pulse boundaries enters through co-moving frame factors, the drift during
/// each pulse through the Doppler detuning k_r*v. The result is independent
/// of the atom's initial position and of when the first pulse fires, so t_s
/// only labels the retrieval instant.
SequenceResult sequence_phase(double v_m_s, double t_s_s, double t_w_s,
                              const DerivedGeometry& g);

/// Hot-path form of sequence_phase: final |r1> amplitude only.
std::complex<double> sequence_r1_amplitude(double omega_r_rad_s, double detuning_rad_s,
                                           double t_pi_s, double t_w_s);

/// True when pulse-wait-pulse fits inside the storage window.
inline bool sequence_fits(double t_s_s, double t_w_s, const DerivedGeometry& g) {
  return t_w_s >= 0.0 && t_s_s >= t_w_s + 2.0 * g.t_pi_s;
}

}  // namespace polariton
