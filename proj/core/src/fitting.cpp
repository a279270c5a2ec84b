#include "polariton/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polariton {

namespace {

constexpr double kStepTolerance = 1e-10;
constexpr double kGradientTolerance = 1e-12;
constexpr double kMaxDamping = 1e12;

bool weighted_resolved(const Dataset& data, Weighting w) {
  switch (w) {
    case Weighting::on:
      if (!data.all_sigmas_positive()) {
        throw std::invalid_argument("weighted fit requested but some sigmas are not positive");
      }
      return true;
    case Weighting::off:
      return false;
    case Weighting::automatic:
      return data.all_sigmas_positive();
  }
  return false;
}

// Internal parameter vector: tau replaced by theta = log(tau).
Eigen::VectorXd to_internal(const FitModel& model, std::span<const double> user) {
  Eigen::VectorXd p(model.n_params());
  for (int i = 0; i < model.n_params(); ++i) p[i] = user[static_cast<std::size_t>(i)];
  const int ti = model.tau_index();
  if (!(p[ti] > 0)) throw std::invalid_argument("tau must be positive");
  p[ti] = std::log(p[ti]);
  return p;
}

std::vector<double> to_user(const FitModel& model, const Eigen::VectorXd& internal) {
  std::vector<double> p(internal.data(), internal.data() + internal.size());
  p[static_cast<std::size_t>(model.tau_index())] = std::exp(internal[model.tau_index()]);
  return p;
}

double eval_internal(const FitModel& model, double t, const Eigen::VectorXd& p) {
  const double tau = std::exp(p[model.tau_index()]);
  switch (model.kind) {
    case FitModelKind::offset_gaussian: {
      const double u = t / tau;
      return p[0] + p[1] * std::exp(-u * u);
    }
    case FitModelKind::offset_exponential:
      return p[0] + p[1] * std::exp(-t / tau);
    case FitModelKind::scaled_gaussian: {
      const double u = t / tau;
      double y = p[0] * std::exp(-u * u);
      if (model.with_offset) y += p[2];
      return y;
    }
  }
  return 0;
}

// d(model)/d(internal params); the tau column already includes dtau/dtheta = tau.
void jacobian_row(const FitModel& model, double t, const Eigen::VectorXd& p, double* row) {
  const double tau = std::exp(p[model.tau_index()]);
  switch (model.kind) {
    case FitModelKind::offset_gaussian: {
      const double u = t / tau;
      const double e = std::exp(-u * u);
      row[0] = 1.0;
      row[1] = e;
      row[2] = p[1] * e * 2.0 * u * u;  // B e^{-u^2} * 2 t^2 / tau^2
      break;
    }
    case FitModelKind::offset_exponential: {
      const double u = t / tau;
      const double e = std::exp(-u);
      row[0] = 1.0;
      row[1] = e;
      row[2] = p[1] * e * u;
      break;
    }
    case FitModelKind::scaled_gaussian: {
      const double u = t / tau;
      const double e = std::exp(-u * u);
      row[0] = e;
      row[1] = p[0] * e * 2.0 * u * u;
      if (model.with_offset) row[2] = 1.0;
      break;
    }
  }
}

}  // namespace

int FitModel::n_params() const {
  if (kind == FitModelKind::scaled_gaussian) return with_offset ? 3 : 2;
  return 3;
}

std::vector<std::string> FitModel::param_names() const {
  switch (kind) {
    case FitModelKind::offset_gaussian:
    case FitModelKind::offset_exponential:
      return {"A", "B", "tau"};
    case FitModelKind::scaled_gaussian:
      return with_offset ? std::vector<std::string>{"od0", "tau", "A"}
                         : std::vector<std::string>{"od0", "tau"};
  }
  return {};
}

int FitModel::tau_index() const {
  return kind == FitModelKind::scaled_gaussian ? 1 : 2;
}

double FitModel::eval(double t, std::span<const double> params) const {
  Eigen::VectorXd p(n_params());
  for (int i = 0; i < n_params(); ++i) p[i] = params[static_cast<std::size_t>(i)];
  p[tau_index()] = std::log(p[tau_index()]);
  return eval_internal(*this, t, p);
}

std::string model_token(FitModelKind kind) {
  switch (kind) {
    case FitModelKind::offset_gaussian: return "M1";
    case FitModelKind::offset_exponential: return "M2";
    case FitModelKind::scaled_gaussian: return "M3";
  }
  return "?";
}

std::optional<FitModelKind> model_from_token(std::string_view token) {
  if (token == "M1" || token == "m1") return FitModelKind::offset_gaussian;
  if (token == "M2" || token == "m2") return FitModelKind::offset_exponential;
  if (token == "M3" || token == "m3") return FitModelKind::scaled_gaussian;
  return std::nullopt;
}

bool Dataset::all_sigmas_positive() const {
  if (points.empty()) return false;
  return std::all_of(points.begin(), points.end(), [](const DataPoint& p) { return p.sigma > 0; });
}

void validate_dataset(const Dataset& data, const FitModel& model) {
  const int p = model.n_params();
  if (static_cast<int>(data.points.size()) < p + 1) {
    throw std::invalid_argument("dataset needs at least " + std::to_string(p + 1) + " points");
  }
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    if (data.points[i].t < 0) throw std::invalid_argument("dataset t values must be non-negative");
    if (i > 0 && !(data.points[i].t > data.points[i - 1].t)) {
      throw std::invalid_argument("dataset t values must be strictly increasing");
    }
  }
}

std::vector<double> default_initial_guess(const Dataset& data, const FitModel& model) {
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();
  for (const auto& p : data.points) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  const bool has_offset = model.kind != FitModelKind::scaled_gaussian || model.with_offset;
  const double offset = has_offset ? ymin : 0.0;
  const double amplitude = has_offset ? (ymax - ymin) : ymax;

  double tau = 0;
  const double threshold = amplitude / std::numbers::e;
  for (const auto& p : data.points) {
    if (p.t > 0 && p.y - offset < threshold) {
      tau = p.t;
      break;
    }
  }
  if (!(tau > 0)) tau = data.points.back().t;
  if (!(tau > 0)) tau = 1.0;

  switch (model.kind) {
    case FitModelKind::offset_gaussian:
    case FitModelKind::offset_exponential:
      return {offset, amplitude, tau};
    case FitModelKind::scaled_gaussian:
      return model.with_offset ? std::vector<double>{amplitude, tau, offset}
                               : std::vector<double>{amplitude, tau};
  }
  return {};
}

std::vector<double> residuals(const Dataset& data, const FitModel& model,
                              std::span<const double> params, Weighting weighting) {
  if (static_cast<int>(params.size()) != model.n_params()) {
    throw std::invalid_argument("wrong number of parameters for model");
  }
  const bool weighted = weighted_resolved(data, weighting);
  std::vector<double> r(data.points.size());
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    const auto& p = data.points[i];
    r[i] = p.y - model.eval(p.t, params);
    if (weighted) r[i] /= p.sigma;
  }
  return r;
}

FitResult fit(const Dataset& data, const FitModel& model,
              std::optional<std::vector<double>> initial_guess, const FitOptions& options) {
  validate_dataset(data, model);
  const bool weighted = weighted_resolved(data, options.weighting);
  const int np = model.n_params();
  const auto n = static_cast<Eigen::Index>(data.points.size());

  std::vector<double> guess = initial_guess ? *initial_guess
                                            : default_initial_guess(data, model);
  if (static_cast<int>(guess.size()) != np) {
    throw std::invalid_argument("initial guess has wrong number of parameters");
  }
  Eigen::VectorXd p = to_internal(model, guess);

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = data.points[static_cast<std::size_t>(i)].sigma;
    w[i] = weighted ? 1.0 / (s * s) : 1.0;
  }

  auto objective_parts = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) -> double {
    double chi2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pt = data.points[static_cast<std::size_t>(i)];
      r[i] = pt.y - eval_internal(model, pt.t, q);
      chi2 += w[i] * r[i] * r[i];
    }
    return chi2;
  };

  Eigen::VectorXd r(n);
  double chi2 = objective_parts(p, r);

  FitResult result;
  result.model = model;
  result.param_names = model.param_names();
  if (options.record_trace) result.objective_trace.push_back(chi2);

  Eigen::MatrixXd jac(n, np);
  double lambda = 1e-3;
  bool converged = false;
  FitStatus status = FitStatus::max_iterations;
  double grad_inf = std::numeric_limits<double>::infinity();
  int iterations = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    iterations = iter + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row[3] = {0, 0, 0};
      jacobian_row(model, data.points[static_cast<std::size_t>(i)].t, p, row);
      for (int j = 0; j < np; ++j) jac(i, j) = row[j];
    }
    const Eigen::MatrixXd jtwj =
        jac.transpose() * w.asDiagonal() * jac;  // np x np, small
    const Eigen::VectorXd jtwr = jac.transpose() * (w.array() * r.array()).matrix();
    grad_inf = jtwr.lpNorm<Eigen::Infinity>();
    if (grad_inf < kGradientTolerance) {
      converged = true;
      status = FitStatus::converged;
      break;
    }

    // Escalate damping until a step decreases the objective.
    bool stepped = false;
    while (lambda <= kMaxDamping) {
      Eigen::VectorXd damp = jtwj.diagonal();
      const double floor_value = 1e-12 * damp.maxCoeff() + 1e-300;
      for (int i = 0; i < np; ++i) damp[i] = std::max(damp[i], floor_value);

      Eigen::MatrixXd lhs = jtwj;
      lhs.diagonal() += lambda * damp;
      const Eigen::VectorXd step = lhs.ldlt().solve(jtwr);
      if (step.allFinite()) {
        const Eigen::VectorXd candidate = p + step;
        Eigen::VectorXd r_new(n);
        const double chi2_new = objective_parts(candidate, r_new);
        if (std::isfinite(chi2_new) && chi2_new <= chi2) {
          double rel_step = 0;
          for (int i = 0; i < np; ++i) {
            rel_step = std::max(rel_step, std::abs(step[i]) / std::max(std::abs(p[i]), 1e-12));
          }
          p = candidate;
          r = r_new;
          chi2 = chi2_new;
          if (options.record_trace) result.objective_trace.push_back(chi2);
          lambda = std::max(lambda / 3.0, 1e-14);
          stepped = true;
          if (rel_step < kStepTolerance) {
            converged = true;
            status = FitStatus::converged;
          }
          break;
        }
      }
      lambda *= 10.0;
    }

    if (!stepped) {
      status = FitStatus::damping_overflow;
      break;
    }
    if (converged) break;
  }
  if (converged) status = FitStatus::converged;

  // Covariance from the normal equations at the final point.
  Eigen::MatrixXd jtwj_final;
  {
    for (Eigen::Index i = 0; i < n; ++i) {
      double row[3] = {0, 0, 0};
      jacobian_row(model, data.points[static_cast<std::size_t>(i)].t, p, row);
      for (int j = 0; j < np; ++j) jac(i, j) = row[j];
    }
    jtwj_final = jac.transpose() * w.asDiagonal() * jac;
    const Eigen::VectorXd jtwr = jac.transpose() * (w.array() * r.array()).matrix();
    grad_inf = jtwr.lpNorm<Eigen::Infinity>();
  }

  result.params = to_user(model, p);
  result.std_errors.assign(static_cast<std::size_t>(np),
                           std::numeric_limits<double>::infinity());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(jtwj_final);
  if (lu.isInvertible()) {
    Eigen::MatrixXd cov = lu.inverse();
    if (!weighted) {
      const int dof = static_cast<int>(n) - np;
      const double s2 = dof > 0 ? chi2 / dof : 0.0;
      cov *= s2;
    }
    for (int i = 0; i < np; ++i) {
      double se = cov(i, i) > 0 ? std::sqrt(cov(i, i)) : 0.0;
      if (i == model.tau_index()) se *= result.params[static_cast<std::size_t>(i)];
      result.std_errors[static_cast<std::size_t>(i)] = se;
    }
  }

  result.residual_norm = std::sqrt(chi2);
  result.gradient_inf_norm = grad_inf;
  result.n_iterations = iterations;
  result.converged = converged;
  result.status = status;
  return result;
}

double FitResult::param(std::string_view name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return params[i];
  }
  throw std::out_of_range("no such parameter: " + std::string(name));
}

double FitResult::std_error(std::string_view name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return std_errors[i];
  }
  throw std::out_of_range("no such parameter: " + std::string(name));
}

namespace {

const char* status_token(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::damping_overflow: return "damping_overflow";
  }
  return "?";
}

}  // namespace

std::string to_text(const FitResult& result) {
  std::ostringstream out;
  char buf[64];
  out << "model = " << model_token(result.model.kind) << "\n";
  out << "converged = " << (result.converged ? "true" : "false") << "\n";
  out << "status = " << status_token(result.status) << "\n";
  out << "n_iterations = " << result.n_iterations << "\n";
  std::snprintf(buf, sizeof(buf), "%.10g", result.residual_norm);
  out << "residual_norm = " << buf << "\n";
  for (std::size_t i = 0; i < result.param_names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g", result.params[i]);
    out << result.param_names[i] << " = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.10g", result.std_errors[i]);
    out << result.param_names[i] << "_std_error = " << buf << "\n";
  }
  return out.str();
}

std::string to_json(const FitResult& result) {
  nlohmann::ordered_json j;
  j["model"] = model_token(result.model.kind);
  if (result.model.kind == FitModelKind::scaled_gaussian) {
    j["with_offset"] = result.model.with_offset;
  }
  j["converged"] = result.converged;
  j["status"] = status_token(result.status);
  j["n_iterations"] = result.n_iterations;
  j["residual_norm"] = result.residual_norm;
  j["gradient_inf_norm"] = result.gradient_inf_norm;
  nlohmann::ordered_json params, errors;
  for (std::size_t i = 0; i < result.param_names.size(); ++i) {
    params[result.param_names[i]] = result.params[i];
    const double se = result.std_errors[i];
    if (std::isfinite(se)) {
      errors[result.param_names[i]] = se;
    } else {
      errors[result.param_names[i]] = "inf";
    }
  }
  j["params"] = params;
  j["std_errors"] = errors;
  return j.dump(2);
}

}  // namespace polariton
