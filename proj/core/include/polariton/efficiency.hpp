#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polariton/geometry.hpp"

namespace polariton {

struct EfficiencyPoint {
  double control_s = 0;   // t_s or t_w, seconds
  double efficiency = 0;  // in [0, 1] for physical curves; NaN marks unusable points
  double std_error = 0;   // 0 for analytic values
};

struct EfficiencyCurve {
  std::string control_name;  // "t_s" or "t_w"
  std::vector<EfficiencyPoint> points;
};

/// Storage-time split between the two Rydberg levels. Half of each mapping
/// pulse is attributed to each level.
struct DecayBudget {
  double time_in_r1_s = 0;
  double time_in_r2_s = 0;

  static DecayBudget free_decay(double t_s_s);
  /// Throws std::invalid_argument when the sequence does not fit in t_s.
  static DecayBudget protocol(double t_s_s, double t_w_s, double t_pi_s);
};

struct DecayParams {
  double tau_r1_s = 0;
  double tau_r2_s = 0;
};

double decay_envelope(const DecayBudget& budget, const DecayParams& decay);

enum class OdReadoutMap { saturating, linear };

struct ODModel {
  double od0 = 1.0;
  double tau_od_s = 1.0;
  OdReadoutMap readout_map = OdReadoutMap::saturating;
};

/// od0 * exp(-(t_s/tau_od)^2).
double od(double t_s_s, const ODModel& model);

/// Signal produced by a cloud of optical depth d: (1 - e^{-d/2})^2 or d.
double od_readout(double d, OdReadoutMap map);

/// Undo the readout loss: corrected = raw * g(od0)/g(od(t_s)), std_error
/// scaled by the same factor. Throws std::domain_error when od(t_s) < 1e-6.
EfficiencyPoint od_correction(const EfficiencyPoint& raw, const ODModel& model);

/// Gaussian dephasing of the stored excitation, exp(-k^2 sigma_v^2 t_s^2),
/// times exp(-t_s/tau_r1) unless decay is disabled.
double analytic_free_decay(double t_s_s, const DerivedGeometry& g, const DecayParams& decay,
                           bool include_decay = true);

struct AnalyticOptions {
  bool include_pulse_fidelity = true;
  bool include_decay = true;
  int quadrature_points = 64;
};

/// Velocity-averaged transfer probability of one mapping pulse,
/// <omega_r^2/W^2 sin^2(W t_pi/2)> over v ~ N(0, sigma_v^2).
double mean_pulse_transfer(const DerivedGeometry& g, int quadrature_points = 64);

/// First-order model: exp(-sigma_v^2 (k t_s - k_r (t_w + pi/omega_r))^2)
/// x <transfer>^2 x decay envelope. Throws std::invalid_argument when the
/// sequence does not fit inside t_s.
double analytic_protocol(double t_s_s, double t_w_s, const DerivedGeometry& g,
                         const DecayParams& decay, const AnalyticOptions& options = {});

enum class McMode { free_decay, protocol };

struct McOptions {
  bool ideal_pulses = false;    // unit-amplitude first-order phases instead of exact pulses
  bool disable_decay = false;
  bool zero_velocities = false; // test hook: freeze the whole ensemble
  double global_phase_rad = 0;  // test hook: extra global phase on every amplitude
  int max_threads = 0;          // 0 = default
};

struct McJob {
  McMode mode = McMode::free_decay;
  double t_s_s = 0;
  double t_w_s = 0;  // protocol mode only
  std::int64_t n_atoms = 1;
  std::int64_t n_shots = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // substream, e.g. scan grid index
  McOptions options;
};

/// Monte Carlo retrieval efficiency: mean over shots of the squared collective
/// overlap |(1/N) sum_j c_j e^{-i k v_j t_s}|^2, velocities drawn i.i.d. from
/// N(0, sigma_v^2) per shot via counter-based streams. Bit-identical results
/// for identical (seed, stream, n_atoms, n_shots) at any thread count.
EfficiencyPoint mc_efficiency(const DerivedGeometry& g, const DecayParams& decay,
                              const McJob& job);

}  // namespace polariton
