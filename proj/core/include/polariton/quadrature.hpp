#pragma once

#include <functional>
#include <vector>

namespace polariton {

/// Gauss-Hermite rule for the weight exp(-x^2) on (-inf, inf):
/// integral of exp(-x^2) f(x) dx ~= sum_i weights[i] * f(nodes[i]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes via Newton iteration on the orthonormal Hermite recurrence.
GaussHermiteRule gauss_hermite(int n);

/// Expectation of f(X) for X ~ N(0, sigma^2) using an n-point rule.
double gaussian_expectation(double sigma, int n, const std::function<double(double)>& f);

}  // namespace polariton
