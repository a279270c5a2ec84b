#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polariton {

// Decay-curve models. CLI/file tokens in parentheses:
//   offset_gaussian    (M1): A + B exp(-(t/tau)^2)
//   offset_exponential (M2): A + B exp(-t/tau)
//   scaled_gaussian    (M3): od0 exp(-(t/tau)^2), optional additive offset
enum class FitModelKind { offset_gaussian, offset_exponential, scaled_gaussian };

struct FitModel {
  FitModelKind kind = FitModelKind::offset_gaussian;
  bool with_offset = false;  // scaled_gaussian only: adds trailing parameter A

  int n_params() const;
  std::vector<std::string> param_names() const;
  int tau_index() const;
  double eval(double t, std::span<const double> params) const;
};

std::string model_token(FitModelKind kind);
std::optional<FitModelKind> model_from_token(std::string_view token);

struct DataPoint {
  double t = 0;
  double y = 0;
  double sigma = 0;  // 0 = no uncertainty given
};

struct Dataset {
  std::vector<DataPoint> points;
  bool all_sigmas_positive() const;
};

enum class Weighting { automatic, on, off };

struct FitOptions {
  Weighting weighting = Weighting::automatic;  // automatic: weight iff all sigmas > 0
  int max_iterations = 200;
  bool record_trace = false;  // store the accepted objective after each step
};

enum class FitStatus { converged, max_iterations, damping_overflow };

struct FitResult {
  FitModel model;
  std::vector<std::string> param_names;
  std::vector<double> params;      // user space; tau (not log tau)
  std::vector<double> std_errors;  // same order; inf when not identifiable
  double residual_norm = 0;        // sqrt(sum of squared (weighted) residuals)
  double gradient_inf_norm = 0;
  int n_iterations = 0;
  bool converged = false;
  FitStatus status = FitStatus::converged;
  std::vector<double> objective_trace;

  double param(std::string_view name) const;
  double std_error(std::string_view name) const;
};

/// Throws std::invalid_argument when dataset invariants fail
/// (>= p+1 points, non-negative strictly increasing t).
void validate_dataset(const Dataset& data, const FitModel& model);

/// Damped Gauss-Newton (Levenberg-Marquardt) with analytic Jacobians.
/// tau stays positive through the internal reparameterization tau = e^theta.
/// initial_guess, when given, lists parameters in param_names() order.
FitResult fit(const Dataset& data, const FitModel& model,
              std::optional<std::vector<double>> initial_guess = std::nullopt,
              const FitOptions& options = {});

/// y_i - model(t_i), divided by sigma_i when weighting resolves to on.
/// Does not require sorted data (the norm is permutation invariant).
std::vector<double> residuals(const Dataset& data, const FitModel& model,
                              std::span<const double> params,
                              Weighting weighting = Weighting::automatic);

/// Deterministic default start: A = min(y), B = max(y) - min(y),
/// tau = first t where y - A drops below B/e.
std::vector<double> default_initial_guess(const Dataset& data, const FitModel& model);

std::string to_text(const FitResult& result);
std::string to_json(const FitResult& result);

}  // namespace polariton
