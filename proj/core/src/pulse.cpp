#include "polariton/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polariton {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

struct Mat2 {
  std::complex<double> a11, a12, a21, a22;
};

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

/// exp(i*global) * diag(1, e^{i*left2}) * R * diag(1, e^{i*right2})
Mat2 frame_sandwich(const TwoLevelPropagator& r, double global, double left2, double right2) {
  const std::complex<double> g = std::polar(1.0, global);
  const std::complex<double> l = std::polar(1.0, left2);
  const std::complex<double> q = std::polar(1.0, right2);
  return {g * r.u11, g * r.u12 * q, g * l * r.u21, g * l * r.u22 * q};
}

}  // namespace

double TwoLevelPropagator::unitarity_defect() const {
  // U^dagger U entries.
  const std::complex<double> d11 = std::conj(u11) * u11 + std::conj(u21) * u21 - 1.0;
  const std::complex<double> d12 = std::conj(u11) * u12 + std::conj(u21) * u22;
  const std::complex<double> d21 = std::conj(u12) * u11 + std::conj(u22) * u21;
  const std::complex<double> d22 = std::conj(u12) * u12 + std::conj(u22) * u22 - 1.0;
  return std::max(std::max(std::abs(d11), std::abs(d12)),
                  std::max(std::abs(d21), std::abs(d22)));
}

TwoLevelPropagator pulse_propagator(double omega_r, double delta, double tau, double chi) {
  if (tau < 0) throw std::invalid_argument("pulse_propagator: negative duration");

  TwoLevelPropagator p;
  p.omega_r_rad_s = omega_r;
  p.detuning_rad_s = delta;
  p.duration_s = tau;
  p.spatial_phase_rad = chi;

  const double w = std::hypot(omega_r, delta);
  const double half = 0.5 * w * tau;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const double nz = w > 0 ? delta / w : 0.0;
  const double nx = w > 0 ? omega_r / w : 0.0;

  // U = cos(W tau/2) I - i sin(W tau/2) (n . sigma)
  p.u11 = {c, -nz * s};
  p.u22 = {c, +nz * s};
  const std::complex<double> offdiag = -kI * (nx * s);
  p.u21 = offdiag * std::polar(1.0, +chi);
  p.u12 = offdiag * std::polar(1.0, -chi);
  return p;
}

AtomState ode_oracle(double omega_r, double delta, double tau, double chi,
                     const AtomState& initial, double step) {
  if (step <= 0) throw std::invalid_argument("ode_oracle: step must be positive");

  const std::complex<double> coupling = 0.5 * omega_r * std::polar(1.0, chi);
  const double half_delta = 0.5 * delta;

  // dpsi/dt = -i H psi with H = [[delta/2, conj(g)], [g, -delta/2]], g = omega_r/2 e^{i chi}
  auto deriv = [&](const AtomState& s) -> AtomState {
    return {-kI * (half_delta * s.c1 + std::conj(coupling) * s.c2),
            -kI * (coupling * s.c1 - half_delta * s.c2)};
  };

  const auto n = static_cast<std::int64_t>(std::ceil(tau / step));
  const double h = n > 0 ? tau / static_cast<double>(n) : 0.0;

  AtomState y = initial;
  for (std::int64_t i = 0; i < n; ++i) {
    const AtomState k1 = deriv(y);
    const AtomState y2{y.c1 + 0.5 * h * k1.c1, y.c2 + 0.5 * h * k1.c2};
    const AtomState k2 = deriv(y2);
    const AtomState y3{y.c1 + 0.5 * h * k2.c1, y.c2 + 0.5 * h * k2.c2};
    const AtomState k3 = deriv(y3);
    const AtomState y4{y.c1 + h * k3.c1, y.c2 + h * k3.c2};
    const AtomState k4 = deriv(y4);
    y.c1 += h / 6.0 * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1);
    y.c2 += h / 6.0 * (k1.c2 + 2.0 * k2.c2 + 2.0 * k3.c2 + k4.c2);
  }
  return y;
}

std::complex<double> sequence_r1_amplitude(double omega_r, double delta, double t_pi,
                                           double t_w) {
  // Collapsed form of the two-pulse composition below:
  //   M11 = e^{i delta tau} [ r11^2 - (omega_r/W)^2 sin^2(W tau/2) e^{i delta t_w} ]
  const double w = std::hypot(omega_r, delta);
  const double half = 0.5 * w * t_pi;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const double nz = w > 0 ? delta / w : 0.0;
  const double nx = w > 0 ? omega_r / w : 0.0;

  const std::complex<double> r11{c, -nz * s};
  const std::complex<double> flip = -(nx * s) * (nx * s) * std::polar(1.0, delta * t_w);
  return std::polar(1.0, delta * t_pi) * (r11 * r11 + flip);
}

SequenceResult sequence_phase(double v, double /*t_s_s*/, double t_w, const DerivedGeometry& g) {
  const double tau = g.t_pi_s;
  const double delta = g.k_r_rad_m * v;
  const double t_b = tau + t_w;  // second pulse start, first pulse fires at t = 0

  const TwoLevelPropagator r = pulse_propagator(g.omega_r_rad_s, delta, tau, 0.0);

  // Each pulse in the frame co-moving with the drive phase -k_r*x(t):
  // global phase delta*tau/2, boundary factors diag(1, e^{-i k_r x}) at the
  // pulse edges. Between pulses the frame evolution is the identity.
  const Mat2 p1 = frame_sandwich(r, 0.5 * delta * tau, -delta * tau, 0.0);
  const Mat2 p2 = frame_sandwich(r, 0.5 * delta * tau, -delta * (t_b + tau), delta * t_b);
  const Mat2 m = mul(p2, p1);

  const double first_order = first_order_net_phase(v, t_w, g);
  const double phase = first_order + std::arg(m.a11 * std::polar(1.0, -first_order));
  return {m.a11, phase};
}

}  // namespace polariton
