#include "polariton/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace polariton {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double effective_rabi(double omega3, double omega4, double delta) {
  if (delta == 0.0) throw std::domain_error("effective_rabi: delta must be nonzero");
  return omega3 * omega4 / (2.0 * delta);
}

bool rabi_far_detuned(double omega3, double omega4, double delta) {
  return delta >= 5.0 * std::max(omega3, omega4);
}

Wavevectors wavevectors(const ValidatedConfig& cfg) {
  const auto& c = cfg.get();
  const double k = c.sign_signal * kTwoPi / c.lambda_signal_m +
                   c.sign_coupling * kTwoPi / c.lambda_coupling_m;
  const double k_r = c.sign_r3 * kTwoPi / c.lambda_r3_m - c.sign_r4 * kTwoPi / c.lambda_r4_m;
  return {k, k_r};
}

DerivedGeometry derive_geometry(const ValidatedConfig& cfg, std::vector<std::string>* warnings) {
  const auto& c = cfg.get();
  DerivedGeometry g;

  const Wavevectors kv = wavevectors(cfg);
  g.k_rad_m = kv.k_rad_m;
  g.k_r_rad_m = kv.k_r_rad_m;
  if (!(g.k_rad_m / g.k_r_rad_m > 0.0)) {
    throw GeometryError("protocol geometry invalid: k/k_r must be positive");
  }

  if (c.omega_r_override_rad_s) {
    g.omega_r_rad_s = *c.omega_r_override_rad_s;
  } else {
    g.omega_r_rad_s = effective_rabi(c.omega3_rad_s, c.omega4_rad_s, c.delta_rad_s);
    if (warnings && !rabi_far_detuned(c.omega3_rad_s, c.omega4_rad_s, c.delta_rad_s)) {
      warnings->push_back(
          "two-photon reduction marginal: delta < 5*max(omega3, omega4)");
    }
  }
  g.t_pi_s = kPi / g.omega_r_rad_s;
  g.sigma_v_m_s = sigma_v(cfg);
  return g;
}

WaitTime optimal_wait(double t_s_s, const DerivedGeometry& g) {
  const double t_w = g.k_rad_m * t_s_s / g.k_r_rad_m - kPi / g.omega_r_rad_s;
  return {t_w, t_w >= 0.0};
}

double phi1(double v, const DerivedGeometry& g) {
  return -kPi / 2.0 - g.k_r_rad_m * v * kPi / (2.0 * g.omega_r_rad_s);
}

double phi2(double v, double t_w, const DerivedGeometry& g) {
  return -kPi / 2.0 + g.k_r_rad_m * v * kPi / (2.0 * g.omega_r_rad_s) +
         g.k_r_rad_m * v * (t_w + kPi / g.omega_r_rad_s);
}

double first_order_net_phase(double v, double t_w, const DerivedGeometry& g) {
  return -kPi + g.k_r_rad_m * v * (t_w + kPi / g.omega_r_rad_s);
}

double residual_mismatch(double v, double t_s, double t_w, const DerivedGeometry& g) {
  return v * (g.k_rad_m * t_s - g.k_r_rad_m * (t_w + kPi / g.omega_r_rad_s));
}

bool first_order_valid(double v, const DerivedGeometry& g) {
  return std::abs(g.k_r_rad_m * v) < g.omega_r_rad_s;
}

double doppler_ratio(const DerivedGeometry& g) {
  return std::abs(g.k_r_rad_m) * g.sigma_v_m_s / g.omega_r_rad_s;
}

std::string describe(const DerivedGeometry& g) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "k        = %+.9e rad/m\n"
                "k_r      = %+.9e rad/m\n"
                "k/k_r    = %.9f\n"
                "omega_r  = %.9e rad/s (2pi x %.6f MHz)\n"
                "t_pi     = %.9e s\n"
                "sigma_v  = %.9e m/s\n"
                "1/(|k|sigma_v)   = %.9e s\n"
                "1/(|k_r|sigma_v) = %.9e s\n"
                "|k_r|sigma_v/omega_r = %.6f\n",
                g.k_rad_m, g.k_r_rad_m, g.k_rad_m / g.k_r_rad_m, g.omega_r_rad_s,
                g.omega_r_rad_s / (2e6 * kPi), g.t_pi_s, g.sigma_v_m_s,
                1.0 / (std::abs(g.k_rad_m) * g.sigma_v_m_s),
                1.0 / (std::abs(g.k_r_rad_m) * g.sigma_v_m_s), doppler_ratio(g));
  return buf;
}

}  // namespace polariton
