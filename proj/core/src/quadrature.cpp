#include "polariton/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polariton {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");

  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const double pi_m4 = std::pow(std::numbers::pi, -0.25);
  const int half = (n + 1) / 2;
  double z = 0, z_prev1 = 0, z_prev2 = 0;

  for (int i = 0; i < half; ++i) {
    // Initial guesses for the largest roots, then step inward from the
    // previous two roots.
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * z_prev2;
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * z_prev2;
    } else {
      z = 2.0 * z - z_prev2;
    }

    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      // Orthonormal Hermite functions: p1 holds H~_n(z).
      double p1 = pi_m4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }

    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];

    z_prev2 = z_prev1;
    z_prev1 = z;
  }

  // Nodes ascending.
  for (int i = 0; i < n / 2; ++i) {
    std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
    std::swap(rule.weights[i], rule.weights[n - 1 - i]);
  }
  return rule;
}

double gaussian_expectation(double sigma, int n, const std::function<double(double)>& f) {
  const GaussHermiteRule rule = gauss_hermite(n);
  const double scale = std::numbers::sqrt2 * sigma;
  double acc = 0;
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(scale * rule.nodes[i]);
  return acc / std::sqrt(std::numbers::pi);
}

}  // namespace polariton
