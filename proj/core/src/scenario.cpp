#include "polariton/scenario.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "polariton/config_io.hpp"
#include "polariton/geometry.hpp"
#include "polariton/pulse.hpp"
#include "polariton/version.hpp"

namespace polariton {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  return v;
}

struct Context {
  ValidatedConfig config;
  DerivedGeometry geometry;
  DecayParams decay;
  ODModel od_model;
  std::uint64_t seed;
  ScenarioOptions options;
  std::vector<std::string> warnings;
};

Context make_context(const std::string& config_path, const ScenarioOptions& options) {
  ConfigLoadResult loaded = load_config_file(config_path);
  if (!loaded.ok()) throw ConfigFailure("invalid config file", loaded.errors);

  ExperimentConfig cfg = *loaded.config;
  if (options.seed) cfg.seed = *options.seed;

  ValidationOutcome outcome = validate(cfg);
  if (!outcome.ok()) throw ConfigFailure("config validation failed", outcome.errors);

  std::vector<std::string> warnings;
  DerivedGeometry geometry = derive_geometry(*outcome.config, &warnings);

  return Context{*outcome.config,
                 geometry,
                 DecayParams{cfg.tau_r1_s, cfg.tau_r2_s},
                 ODModel{cfg.od0, cfg.tau_od_s, options.od_map},
                 cfg.seed,
                 options,
                 std::move(warnings)};
}

McJob make_job(const Context& ctx, McMode mode, double t_s, double t_w, std::uint64_t stream) {
  McJob job;
  job.mode = mode;
  job.t_s_s = t_s;
  job.t_w_s = t_w;
  job.n_atoms = ctx.config->n_atoms;
  job.n_shots = ctx.config->n_shots;
  job.seed = ctx.seed;
  job.stream = stream;
  job.options.ideal_pulses = ctx.options.ideal_pulses;
  job.options.disable_decay = ctx.options.no_decay;
  job.options.max_threads = ctx.options.max_threads;
  return job;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["temperature_k"] = c.temperature_k;
  j["lambda_signal_m"] = c.lambda_signal_m;
  j["lambda_coupling_m"] = c.lambda_coupling_m;
  j["lambda_r3_m"] = c.lambda_r3_m;
  j["lambda_r4_m"] = c.lambda_r4_m;
  j["sign_signal"] = c.sign_signal;
  j["sign_coupling"] = c.sign_coupling;
  j["sign_r3"] = c.sign_r3;
  j["sign_r4"] = c.sign_r4;
  j["omega3_rad_s"] = c.omega3_rad_s;
  j["omega4_rad_s"] = c.omega4_rad_s;
  j["delta_rad_s"] = c.delta_rad_s;
  if (c.omega_r_override_rad_s) {
    j["omega_r_override_rad_s"] = *c.omega_r_override_rad_s;
  } else {
    j["omega_r_override_rad_s"] = nullptr;
  }
  j["tau_r1_s"] = c.tau_r1_s;
  j["tau_r2_s"] = c.tau_r2_s;
  j["t_s_s"] = c.t_s_s;
  j["t_w_s"] = c.t_w_s;
  j["n_atoms"] = c.n_atoms;
  j["n_shots"] = c.n_shots;
  j["seed"] = c.seed;
  j["od0"] = c.od0;
  j["tau_od_s"] = c.tau_od_s;
  return j;
}

json geometry_json(const DerivedGeometry& g) {
  json j;
  j["k_rad_m"] = g.k_rad_m;
  j["k_r_rad_m"] = g.k_r_rad_m;
  j["k_over_k_r"] = g.k_rad_m / g.k_r_rad_m;
  j["omega_r_rad_s"] = g.omega_r_rad_s;
  j["t_pi_s"] = g.t_pi_s;
  j["sigma_v_m_s"] = g.sigma_v_m_s;
  return j;
}

struct Emitter {
  fs::path dir;
  std::vector<std::string> outputs;

  void curve(const std::string& name, const EfficiencyCurve& c) {
    try {
      write_curve_csv((dir / name).string(), c);
    } catch (const fs::filesystem_error& e) {
      throw IoError(e.what());
    }
    outputs.push_back(name);
  }

  void text(const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + (dir / name).string());
    out << content;
    if (!out) throw IoError("write failed: " + (dir / name).string());
    outputs.push_back(name);
  }
};

FitOptions scenario_fit_options(const Context& ctx) {
  FitOptions fo;
  fo.weighting = ctx.options.weighted ? Weighting::on : Weighting::off;
  return fo;
}

// ---- scenario bodies -------------------------------------------------------

void run_fig1b(const Context& ctx, Emitter& em, json& extra) {
  const double tmin = ctx.options.tmin_us.value_or(0.0) * 1e-6;
  const double tmax = ctx.options.tmax_us.value_or(20.0) * 1e-6;
  const int n = ctx.options.points.value_or(81);
  const auto grid = linspace(tmin, tmax, n);

  AnalyticOptions ao;
  ao.include_pulse_fidelity = !ctx.options.ideal_pulses;
  ao.include_decay = !ctx.options.no_decay;

  EfficiencyCurve free_curve{"t_s", {}};
  EfficiencyCurve protocol_curve{"t_s", {}};
  for (double ts : grid) {
    free_curve.points.push_back(
        {ts, analytic_free_decay(ts, ctx.geometry, ctx.decay, ao.include_decay), 0.0});
    const WaitTime wt = optimal_wait(ts, ctx.geometry);
    double eff = kNaN;
    if (wt.usable && sequence_fits(ts, wt.t_w_s, ctx.geometry)) {
      eff = analytic_protocol(ts, wt.t_w_s, ctx.geometry, ctx.decay, ao);
    }
    protocol_curve.points.push_back({ts, eff, std::isnan(eff) ? kNaN : 0.0});
  }
  em.curve("free_analytic.csv", free_curve);
  em.curve("protocol_analytic.csv", protocol_curve);
  extra["grid"] = {{"tmin_us", tmin * 1e6}, {"tmax_us", tmax * 1e6}, {"points", n}};
}

void run_fig3a(const Context& ctx, Emitter& em, json& extra) {
  const double tmin = ctx.options.tmin_us.value_or(0.0) * 1e-6;
  const double tmax = ctx.options.tmax_us.value_or(20.0) * 1e-6;
  const int n = ctx.options.points.value_or(40);
  const auto grid = linspace(tmin, tmax, n);

  EfficiencyCurve free_curve{"t_s", {}};
  EfficiencyCurve raw{"t_s", {}};
  EfficiencyCurve corrected{"t_s", {}};
  const double g0 = od_readout(ctx.od_model.od0, ctx.od_model.readout_map);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ts = grid[i];
    const EfficiencyPoint f =
        mc_efficiency(ctx.geometry, ctx.decay, make_job(ctx, McMode::free_decay, ts, 0, i));
    free_curve.points.push_back(f);

    const WaitTime wt = optimal_wait(ts, ctx.geometry);
    if (wt.usable && sequence_fits(ts, wt.t_w_s, ctx.geometry)) {
      EfficiencyPoint p = mc_efficiency(ctx.geometry, ctx.decay,
                                        make_job(ctx, McMode::protocol, ts, wt.t_w_s, 100000 + i));
      // what a detector behind the thinning cloud sees
      const double loss = od_readout(od(ts, ctx.od_model), ctx.od_model.readout_map) / g0;
      EfficiencyPoint attenuated{ts, p.efficiency * loss, p.std_error * loss};
      raw.points.push_back(attenuated);
      corrected.points.push_back(od_correction(attenuated, ctx.od_model));
    } else {
      raw.points.push_back({ts, kNaN, kNaN});
      corrected.points.push_back({ts, kNaN, kNaN});
    }
  }

  em.curve("free.csv", free_curve);
  em.curve("protocol_raw.csv", raw);
  em.curve("protocol_corrected.csv", corrected);

  // Presentation convention: everything scaled to the first usable protocol point.
  double reference = kNaN;
  for (const auto& p : raw.points) {
    if (!std::isnan(p.efficiency) && p.efficiency > 0) {
      reference = p.efficiency;
      break;
    }
  }
  json fits;
  if (!std::isnan(reference)) {
    const EfficiencyCurve free_n = normalize(free_curve, reference);
    const EfficiencyCurve raw_n = normalize(raw, reference);
    const EfficiencyCurve corrected_n = normalize(corrected, reference);
    em.curve("free_normalized.csv", free_n);
    em.curve("protocol_raw_normalized.csv", raw_n);
    em.curve("protocol_corrected_normalized.csv", corrected_n);

    const FitOptions fo = scenario_fit_options(ctx);
    auto try_fit = [&](const EfficiencyCurve& curve, FitModelKind kind, const char* name) {
      Dataset data = curve_to_dataset(curve);
      FitOptions local = fo;
      if (local.weighting == Weighting::on) {
        // Points with zero sampling variance (e.g. t_s = 0) would demand
        // infinite weight; floor them against the largest error instead.
        double largest = 0;
        for (const auto& p : data.points) largest = std::max(largest, p.sigma);
        if (largest <= 0) {
          local.weighting = Weighting::off;
        } else {
          for (auto& p : data.points) p.sigma = std::max(p.sigma, 1e-3 * largest);
        }
      }
      const FitModel model{kind, false};
      if (static_cast<int>(data.points.size()) >= model.n_params() + 1) {
        const FitResult r = fit(data, model, std::nullopt, local);
        fits[name] = json::parse(to_json(r));
      }
    };
    try_fit(free_n, FitModelKind::offset_gaussian, "free_decay");
    try_fit(raw_n, FitModelKind::offset_exponential, "protocol_raw");
    try_fit(corrected_n, FitModelKind::offset_exponential, "protocol_corrected");
    if (!fits.is_null()) em.text("fits.json", fits.dump(2) + "\n");
  }

  extra["grid"] = {{"tmin_us", tmin * 1e6}, {"tmax_us", tmax * 1e6}, {"points", n}};
  extra["normalization_reference"] = reference;
  if (!fits.is_null()) extra["fits"] = fits;
}

void run_fig3b(const Context& ctx, Emitter& em, json& extra) {
  const double tmin = ctx.options.tmin_us.value_or(0.0) * 1e-6;
  const double tmax = ctx.options.tmax_us.value_or(20.0) * 1e-6;
  const int n = ctx.options.points.value_or(41);
  const auto grid = linspace(tmin, tmax, n);

  EfficiencyCurve od_curve{"t_s", {}};
  for (double ts : grid) od_curve.points.push_back({ts, od(ts, ctx.od_model), 0.0});
  em.curve("od.csv", od_curve);

  const FitResult r =
      fit(curve_to_dataset(od_curve), FitModel{FitModelKind::scaled_gaussian, false});
  em.text("od_fit.json", to_json(r) + "\n");

  extra["grid"] = {{"tmin_us", tmin * 1e6}, {"tmax_us", tmax * 1e6}, {"points", n}};
  extra["od_fit"] = json::parse(to_json(r));
}

void run_fig4(const Context& ctx, Emitter& em, json& extra) {
  const double ts = ctx.config->t_s_s;
  const WaitTime wt = optimal_wait(ts, ctx.geometry);
  const double width = 1.0 / (std::abs(ctx.geometry.k_r_rad_m) * ctx.geometry.sigma_v_m_s);
  const double tmin = ctx.options.tmin_us
                          ? *ctx.options.tmin_us * 1e-6
                          : std::max(0.0, wt.t_w_s - 3.0 * width);
  const double tmax = ctx.options.tmax_us ? *ctx.options.tmax_us * 1e-6 : wt.t_w_s + 3.0 * width;
  const int n = ctx.options.points.value_or(41);
  const auto grid = linspace(tmin, tmax, n);

  AnalyticOptions ao;
  ao.include_pulse_fidelity = !ctx.options.ideal_pulses;
  ao.include_decay = !ctx.options.no_decay;

  EfficiencyCurve mc{"t_w", {}};
  EfficiencyCurve analytic{"t_w", {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tw = grid[i];
    if (tw >= 0 && sequence_fits(ts, tw, ctx.geometry)) {
      EfficiencyPoint p =
          mc_efficiency(ctx.geometry, ctx.decay, make_job(ctx, McMode::protocol, ts, tw, i));
      p.control_s = tw;
      mc.points.push_back(p);
      analytic.points.push_back({tw, analytic_protocol(ts, tw, ctx.geometry, ctx.decay, ao), 0.0});
    } else {
      mc.points.push_back({tw, kNaN, kNaN});
      analytic.points.push_back({tw, kNaN, kNaN});
    }
  }
  em.curve("protocol_mc.csv", mc);
  em.curve("protocol_analytic.csv", analytic);

  EfficiencyPoint free_ref =
      mc_efficiency(ctx.geometry, ctx.decay, make_job(ctx, McMode::free_decay, ts, 0, 500000));
  EfficiencyCurve free_curve{"t_w", {}};
  for (double tw : grid) {
    free_curve.points.push_back({tw, free_ref.efficiency, free_ref.std_error});
  }
  em.curve("free_reference.csv", free_curve);

  extra["grid"] = {{"tmin_us", tmin * 1e6}, {"tmax_us", tmax * 1e6}, {"points", n}};
  extra["t_s_us"] = ts * 1e6;
  extra["t_opt_us"] = wt.t_w_s * 1e6;
  extra["motional_halfwidth_us"] = width * 1e6;
}

void run_sweep(const Context& ctx, Emitter& em, json& extra) {
  const bool over_tw = ctx.options.sweep_param == SweepParam::wait_time;
  const double ts_fixed = ctx.config->t_s_s;
  const WaitTime wt = optimal_wait(ts_fixed, ctx.geometry);
  const double width = 1.0 / (std::abs(ctx.geometry.k_r_rad_m) * ctx.geometry.sigma_v_m_s);

  const double tmin = ctx.options.tmin_us ? *ctx.options.tmin_us * 1e-6
                                          : (over_tw ? std::max(0.0, wt.t_w_s - 3.0 * width) : 0.0);
  const double tmax = ctx.options.tmax_us ? *ctx.options.tmax_us * 1e-6
                                          : (over_tw ? wt.t_w_s + 3.0 * width : 20e-6);
  const int n = ctx.options.points.value_or(41);
  const auto grid = linspace(tmin, tmax, n);

  AnalyticOptions ao;
  ao.include_pulse_fidelity = !ctx.options.ideal_pulses;
  ao.include_decay = !ctx.options.no_decay;

  const McMode mode = ctx.options.sweep_mode;
  EfficiencyCurve curve{over_tw ? "t_w" : "t_s", {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double control = grid[i];
    const double ts = over_tw ? ts_fixed : control;
    double tw = over_tw ? control : ctx.config->t_w_s;
    if (mode == McMode::protocol && !over_tw) {
      const WaitTime w = optimal_wait(ts, ctx.geometry);
      tw = w.t_w_s;  // track the optimum over a storage-time sweep
    }

    double eff = kNaN;
    double err = kNaN;
    const bool usable = mode == McMode::free_decay || (tw >= 0 && sequence_fits(ts, tw, ctx.geometry));
    if (usable) {
      if (ctx.options.sweep_engine == Engine::analytic) {
        eff = mode == McMode::protocol
                  ? analytic_protocol(ts, tw, ctx.geometry, ctx.decay, ao)
                  : analytic_free_decay(ts, ctx.geometry, ctx.decay, ao.include_decay);
        err = 0.0;
      } else {
        const EfficiencyPoint p =
            mc_efficiency(ctx.geometry, ctx.decay, make_job(ctx, mode, ts, tw, i));
        eff = p.efficiency;
        err = p.std_error;
      }
    }
    curve.points.push_back({control, eff, err});
  }
  em.curve("sweep.csv", curve);

  extra["grid"] = {{"tmin_us", tmin * 1e6}, {"tmax_us", tmax * 1e6}, {"points", n}};
  extra["param"] = over_tw ? "t_w" : "t_s";
  extra["mode"] = ctx.options.sweep_mode == McMode::protocol ? "protocol" : "free";
  extra["engine"] = ctx.options.sweep_engine == Engine::analytic ? "analytic" : "mc";
}

json options_json(const ScenarioOptions& o) {
  json j;
  j["no_decay"] = o.no_decay;
  j["ideal_pulses"] = o.ideal_pulses;
  j["od_map"] = o.od_map == OdReadoutMap::saturating ? "saturating" : "linear";
  j["weighted"] = o.weighted;
  return j;
}

}  // namespace

std::string scenario_token(Scenario s) {
  switch (s) {
    case Scenario::fig1b: return "fig1b";
    case Scenario::fig3a: return "fig3a";
    case Scenario::fig3b: return "fig3b";
    case Scenario::fig4: return "fig4";
    case Scenario::fit: return "fit";
    case Scenario::sweep: return "sweep";
  }
  return "?";
}

std::optional<Scenario> scenario_from_token(std::string_view token) {
  if (token == "fig1b") return Scenario::fig1b;
  if (token == "fig3a") return Scenario::fig3a;
  if (token == "fig3b") return Scenario::fig3b;
  if (token == "fig4") return Scenario::fig4;
  if (token == "fit") return Scenario::fit;
  if (token == "sweep") return Scenario::sweep;
  return std::nullopt;
}

EfficiencyCurve normalize(const EfficiencyCurve& curve, std::size_t reference_index) {
  if (reference_index >= curve.points.size()) {
    throw std::invalid_argument("normalize: reference index out of range");
  }
  return normalize(curve, curve.points[reference_index].efficiency);
}

EfficiencyCurve normalize(const EfficiencyCurve& curve, double reference_value) {
  if (!(reference_value > 0)) {
    throw std::invalid_argument("normalize: reference efficiency must be positive");
  }
  EfficiencyCurve out = curve;
  for (auto& p : out.points) {
    p.efficiency /= reference_value;
    p.std_error /= reference_value;
  }
  return out;
}

RunManifest run_scenario(Scenario scenario, const std::string& config_path,
                         const ScenarioOptions& options) {
  if (scenario == Scenario::fit) {
    throw std::invalid_argument("run_scenario: use run_fit_scenario for the fit scenario");
  }
  const auto start = std::chrono::steady_clock::now();

  Context ctx = make_context(config_path, options);

  Emitter em;
  em.dir = options.out_dir;
  std::error_code ec;
  fs::create_directories(em.dir, ec);
  if (ec) throw IoError("cannot create output directory " + options.out_dir + ": " + ec.message());

  json extra;
  switch (scenario) {
    case Scenario::fig1b: run_fig1b(ctx, em, extra); break;
    case Scenario::fig3a: run_fig3a(ctx, em, extra); break;
    case Scenario::fig3b: run_fig3b(ctx, em, extra); break;
    case Scenario::fig4: run_fig4(ctx, em, extra); break;
    case Scenario::sweep: run_sweep(ctx, em, extra); break;
    case Scenario::fit: break;
  }

  const auto stop = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start).count();

  json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kVersion;
  manifest["scenario"] = scenario_token(scenario);
  manifest["seed"] = ctx.seed;
  manifest["config_path"] = config_path;
  manifest["config"] = config_json(ctx.config.get());
  manifest["geometry"] = geometry_json(ctx.geometry);
  manifest["options"] = options_json(options);
  if (extra.is_object()) {
    for (auto& [key, value] : extra.items()) manifest[key] = value;
  }
  manifest["outputs"] = em.outputs;
  manifest["warnings"] = ctx.warnings;
  manifest["wall_ms"] = wall_ms;

  RunManifest result;
  result.scenario = scenario_token(scenario);
  result.seed = ctx.seed;
  result.out_dir = options.out_dir;
  result.outputs = em.outputs;
  result.warnings = ctx.warnings;
  result.wall_ms = wall_ms;
  result.json = manifest.dump(2) + "\n";

  std::ofstream mf(fs::path(options.out_dir) / "manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot write manifest.json");
  mf << result.json;
  return result;
}

FitRun run_fit_scenario(const std::string& dataset_path, const ScenarioOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (!options.fit_model) {
    throw std::invalid_argument("fit scenario requires a model (--model M1|M2|M3)");
  }

  Dataset data;
  try {
    data = read_dataset_csv(dataset_path);
  } catch (const CsvFormatError& e) {
    throw ConfigFailure(e.what(), {{"(dataset)", e.what(), 0}});
  }

  FitOptions fo;
  fo.weighting = options.weighted ? Weighting::on : Weighting::off;
  const FitModel model{*options.fit_model, false};
  FitResult result;
  try {
    result = fit(data, model, std::nullopt, fo);
  } catch (const std::invalid_argument& e) {
    throw ConfigFailure(e.what(), {{"(dataset)", e.what(), 0}});
  }

  Emitter em;
  em.dir = options.out_dir;
  std::error_code ec;
  fs::create_directories(em.dir, ec);
  if (ec) throw IoError("cannot create output directory " + options.out_dir + ": " + ec.message());
  em.text("fit.json", to_json(result) + "\n");

  const auto stop = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start).count();

  json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kVersion;
  manifest["scenario"] = "fit";
  manifest["dataset_path"] = dataset_path;
  manifest["model"] = model_token(model.kind);
  manifest["weighted"] = options.weighted;
  manifest["n_points"] = data.points.size();
  manifest["fit"] = json::parse(to_json(result));
  manifest["outputs"] = em.outputs;
  manifest["wall_ms"] = wall_ms;

  FitRun run;
  run.fit = result;
  run.manifest.scenario = "fit";
  run.manifest.out_dir = options.out_dir;
  run.manifest.outputs = em.outputs;
  run.manifest.wall_ms = wall_ms;
  run.manifest.json = manifest.dump(2) + "\n";

  std::ofstream mf(fs::path(options.out_dir) / "manifest.json", std::ios::binary);
  if (!mf) throw IoError("cannot write manifest.json");
  mf << run.manifest.json;
  return run;
}

}  // namespace polariton
