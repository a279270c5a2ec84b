#include "polariton/efficiency.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "polariton/parallel.hpp"
#include "polariton/pulse.hpp"
#include "polariton/quadrature.hpp"
#include "polariton/rng.hpp"

namespace polariton {

DecayBudget DecayBudget::free_decay(double t_s) {
  if (t_s < 0) throw std::invalid_argument("DecayBudget: negative storage time");
  return {t_s, 0.0};
}

DecayBudget DecayBudget::protocol(double t_s, double t_w, double t_pi) {
  const double in_r2 = t_w + t_pi;
  const double in_r1 = t_s - in_r2;
  if (t_w < 0 || in_r1 < t_pi) {
    throw std::invalid_argument("sequence does not fit inside the storage window");
  }
  return {in_r1, in_r2};
}

double decay_envelope(const DecayBudget& budget, const DecayParams& decay) {
  return std::exp(-budget.time_in_r1_s / decay.tau_r1_s - budget.time_in_r2_s / decay.tau_r2_s);
}

double od(double t_s, const ODModel& model) {
  const double u = t_s / model.tau_od_s;
  return model.od0 * std::exp(-u * u);
}

double od_readout(double d, OdReadoutMap map) {
  switch (map) {
    case OdReadoutMap::saturating: {
      const double a = 1.0 - std::exp(-0.5 * d);
      return a * a;
    }
    case OdReadoutMap::linear:
      return d;
  }
  return d;
}

EfficiencyPoint od_correction(const EfficiencyPoint& raw, const ODModel& model) {
  const double d = od(raw.control_s, model);
  if (d < 1e-6) throw std::domain_error("od_correction diverges: od below 1e-6");
  const double factor = od_readout(model.od0, model.readout_map) / od_readout(d, model.readout_map);
  return {raw.control_s, raw.efficiency * factor, raw.std_error * factor};
}

double analytic_free_decay(double t_s, const DerivedGeometry& g, const DecayParams& decay,
                           bool include_decay) {
  if (t_s < 0) throw std::invalid_argument("analytic_free_decay: negative storage time");
  const double arg = g.k_rad_m * g.sigma_v_m_s * t_s;
  double eff = std::exp(-arg * arg);
  if (include_decay) eff *= std::exp(-t_s / decay.tau_r1_s);
  return eff;
}

double mean_pulse_transfer(const DerivedGeometry& g, int quadrature_points) {
  const double omega = g.omega_r_rad_s;
  const double t_pi = g.t_pi_s;
  const double k_r = g.k_r_rad_m;
  return gaussian_expectation(g.sigma_v_m_s, quadrature_points, [&](double v) {
    const double delta = k_r * v;
    const double w = std::hypot(omega, delta);
    const double s = std::sin(0.5 * w * t_pi);
    const double ratio = omega / w;
    return ratio * ratio * s * s;
  });
}

double analytic_protocol(double t_s, double t_w, const DerivedGeometry& g,
                         const DecayParams& decay, const AnalyticOptions& options) {
  if (!sequence_fits(t_s, t_w, g)) {
    throw std::invalid_argument("sequence does not fit inside the storage window");
  }
  const double mismatch =
      g.sigma_v_m_s *
      (g.k_rad_m * t_s - g.k_r_rad_m * (t_w + std::numbers::pi / g.omega_r_rad_s));
  double eff = std::exp(-mismatch * mismatch);
  if (options.include_pulse_fidelity) {
    const double p = mean_pulse_transfer(g, options.quadrature_points);
    eff *= p * p;
  }
  if (options.include_decay) {
    eff *= decay_envelope(DecayBudget::protocol(t_s, t_w, g.t_pi_s), decay);
  }
  return eff;
}

EfficiencyPoint mc_efficiency(const DerivedGeometry& g, const DecayParams& decay,
                              const McJob& job) {
  if (job.n_atoms < 1 || job.n_shots < 1) {
    throw std::invalid_argument("mc_efficiency: need at least one atom and one shot");
  }
  const bool protocol = job.mode == McMode::protocol;
  if (protocol && !sequence_fits(job.t_s_s, job.t_w_s, g)) {
    throw std::invalid_argument("sequence does not fit inside the storage window");
  }

  // Decay enters as deterministic amplitude damping, identical for all atoms.
  double amp_damp = 1.0;
  if (!job.options.disable_decay) {
    const DecayBudget budget = protocol
                                   ? DecayBudget::protocol(job.t_s_s, job.t_w_s, g.t_pi_s)
                                   : DecayBudget::free_decay(job.t_s_s);
    amp_damp = std::exp(-0.5 * budget.time_in_r1_s / decay.tau_r1_s -
                        0.5 * budget.time_in_r2_s / decay.tau_r2_s);
  }
  const std::complex<double> damp_phase =
      amp_damp * std::polar(1.0, job.options.global_phase_rad);

  const std::uint64_t key = rng::stream_key(job.seed, job.stream);
  const double sigma = job.options.zero_velocities ? 0.0 : g.sigma_v_m_s;
  const double k = g.k_rad_m;
  const double k_r = g.k_r_rad_m;
  const double t_s = job.t_s_s;
  const double t_w = job.t_w_s;
  const auto n_atoms = job.n_atoms;
  const double inv_n = 1.0 / static_cast<double>(n_atoms);

  std::vector<double> shot_eff(static_cast<std::size_t>(job.n_shots));

  parallel_for(job.n_shots, job.options.max_threads, [&](std::int64_t shot) {
    thread_local std::vector<std::complex<double>> overlap;
    overlap.resize(static_cast<std::size_t>(n_atoms));

    for (std::int64_t j = 0; j < n_atoms; ++j) {
      const double v = sigma * rng::standard_normal(key, static_cast<std::uint64_t>(shot),
                                                    static_cast<std::uint64_t>(j));
      std::complex<double> c;
      if (!protocol) {
        c = 1.0;
      } else if (job.options.ideal_pulses) {
        c = std::polar(1.0, first_order_net_phase(v, t_w, g));
      } else {
        c = sequence_r1_amplitude(g.omega_r_rad_s, k_r * v, g.t_pi_s, t_w);
      }
      // overlap with the phase-matched readout state
      overlap[static_cast<std::size_t>(j)] = c * damp_phase * std::polar(1.0, -k * v * t_s);
    }
    const std::complex<double> z = rng::pairwise_sum(std::span<const std::complex<double>>(
                                       overlap.data(), overlap.size())) *
                                   inv_n;
    shot_eff[static_cast<std::size_t>(shot)] = std::norm(z);
  });

  const double n = static_cast<double>(job.n_shots);
  const double mean = rng::pairwise_sum(std::span<const double>(shot_eff)) / n;

  double std_error = 0.0;
  if (job.n_shots > 1) {
    std::vector<double> sq(shot_eff.size());
    for (std::size_t i = 0; i < shot_eff.size(); ++i) {
      const double d = shot_eff[i] - mean;
      sq[i] = d * d;
    }
    const double var = rng::pairwise_sum(std::span<const double>(sq)) / (n - 1.0);
    std_error = std::sqrt(var / n);
  }

  return {job.t_s_s, mean, std_error};
}

}  // namespace polariton
