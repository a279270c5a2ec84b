#include "polariton/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polariton/config_io.hpp"
#include "polariton/geometry.hpp"
#include "polariton/pulse.hpp"
#include "polariton/scenario.hpp"
#include "polariton/toml.hpp"
#include "polariton/version.hpp"

namespace polariton {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::string od_map_token = "saturating";
};

void attach_common(CLI::App* cmd, ScenarioOptions& o, CommonFlags& flags) {
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_flag("--no-decay", o.no_decay, "Disable the Rydberg-decay envelope");
  cmd->add_flag("--ideal-pulses", o.ideal_pulses,
                "Perfect unit-fidelity mapping pulses (first-order phases)");
  cmd->add_option("--points", o.points, "Grid points");
  cmd->add_option("--tmin", o.tmin_us, "Grid start, microseconds");
  cmd->add_option("--tmax", o.tmax_us, "Grid end, microseconds");
  cmd->add_option("--od-map", flags.od_map_token, "OD readout map: saturating|linear")
      ->check(CLI::IsMember({"saturating", "linear"}));
  cmd->add_flag("--weighted", o.weighted, "Weight fits by the std_error column");
}

void print_errors(const std::vector<ConfigError>& errors) {
  for (const auto& e : errors) {
    std::fprintf(stderr, "config error: %s: %s (observed %g)\n", e.field.c_str(),
                 e.message.c_str(), e.observed);
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int run_config_scenario(Scenario scenario, const std::string& config_path,
                        const ScenarioOptions& options) {
  const RunManifest manifest = run_scenario(scenario, config_path, options);
  print_warnings(manifest.warnings);
  std::printf("%s: wrote %zu file(s) + manifest.json to %s (%.0f ms)\n",
              manifest.scenario.c_str(), manifest.outputs.size(), manifest.out_dir.c_str(),
              manifest.wall_ms);
  return kExitOk;
}

ValidatedConfig load_validated(const std::string& path) {
  ConfigLoadResult loaded = load_config_file(path);
  if (!loaded.ok()) throw ConfigFailure("invalid config file", loaded.errors);
  ValidationOutcome outcome = validate(*loaded.config);
  if (!outcome.ok()) throw ConfigFailure("config validation failed", outcome.errors);
  return *outcome.config;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{std::string(kToolName) +
               " - collective-excitation motional-dephasing simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct SubSpec {
    Scenario scenario;
    CLI::App* cmd;
    std::string config_path;
    ScenarioOptions options;
    CommonFlags flags;
  };
  std::vector<std::unique_ptr<SubSpec>> subs;

  auto add_scenario = [&](Scenario s, const char* help) -> SubSpec& {
    auto spec = std::make_unique<SubSpec>();
    spec->scenario = s;
    spec->cmd = app.add_subcommand(scenario_token(s), help);
    spec->cmd->add_option("config", spec->config_path, "TOML config file")->required();
    attach_common(spec->cmd, spec->options, spec->flags);
    subs.push_back(std::move(spec));
    return *subs.back();
  };

  add_scenario(Scenario::fig1b,
               "Analytic efficiency vs storage time (free decay and protocol)");
  add_scenario(Scenario::fig3a,
               "Monte Carlo protocol vs storage time with OD loss, raw/corrected, plus fits");
  add_scenario(Scenario::fig3b, "Optical depth vs storage time plus Gaussian fit");
  add_scenario(Scenario::fig4, "Monte Carlo efficiency vs wait time at fixed storage time");
  SubSpec& sweep = add_scenario(Scenario::sweep, "Generic 1D scan");
  std::string sweep_param = "t_s";
  std::string sweep_mode = "protocol";
  std::string sweep_engine = "mc";
  sweep.cmd->add_option("--param", sweep_param, "Scan variable: t_s|t_w")
      ->check(CLI::IsMember({"t_s", "t_w"}));
  sweep.cmd->add_option("--mode", sweep_mode, "free|protocol")
      ->check(CLI::IsMember({"free", "protocol"}));
  sweep.cmd->add_option("--engine", sweep_engine, "analytic|mc")
      ->check(CLI::IsMember({"analytic", "mc"}));

  // fit: dataset instead of config
  ScenarioOptions fit_options;
  std::string fit_dataset;
  std::string fit_model_token;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a CSV dataset to a decay model");
  fit_cmd->add_option("dataset", fit_dataset, "CSV dataset (t_us,y[,sigma])")->required();
  fit_cmd->add_option("--model", fit_model_token, "M1|M2|M3")->required();
  fit_cmd->add_option("--out", fit_options.out_dir, "Output directory")->capture_default_str();
  fit_cmd->add_flag("--weighted", fit_options.weighted, "Weight by the sigma column");

  // debug helpers
  CLI::App* prop_cmd = app.add_subcommand("propagator", "Print one pulse propagator");
  double prop_omega_mhz = 1.0, prop_delta_mhz = 0.0, prop_chi = 0.0;
  std::optional<double> prop_tau_us;
  prop_cmd->add_option("--omega-r-mhz", prop_omega_mhz, "Rabi frequency nu, MHz")->required();
  prop_cmd->add_option("--delta-mhz", prop_delta_mhz, "Detuning nu, MHz");
  prop_cmd->add_option("--tau-us", prop_tau_us, "Duration, us (default: pi pulse)");
  prop_cmd->add_option("--chi-rad", prop_chi, "Spatial phase, rad");

  CLI::App* geom_cmd = app.add_subcommand("geometry", "Print derived geometry");
  std::string geom_config;
  geom_cmd->add_option("config", geom_config, "TOML config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (prop_cmd->parsed()) {
      const double omega = 2 * std::numbers::pi * prop_omega_mhz * 1e6;
      const double delta = 2 * std::numbers::pi * prop_delta_mhz * 1e6;
      const double tau = prop_tau_us ? *prop_tau_us * 1e-6 : std::numbers::pi / omega;
      const TwoLevelPropagator u = pulse_propagator(omega, delta, tau, prop_chi);
      std::printf("omega_r = %.9e rad/s, delta = %.9e rad/s, tau = %.9e s, chi = %.9e rad\n",
                  omega, delta, tau, prop_chi);
      std::printf("U11 = %+.12e %+.12ei\n", u.u11.real(), u.u11.imag());
      std::printf("U12 = %+.12e %+.12ei\n", u.u12.real(), u.u12.imag());
      std::printf("U21 = %+.12e %+.12ei\n", u.u21.real(), u.u21.imag());
      std::printf("U22 = %+.12e %+.12ei\n", u.u22.real(), u.u22.imag());
      std::printf("transfer probability = %.12e\n", u.transfer_probability());
      std::printf("unitarity defect = %.3e\n", u.unitarity_defect());
      return kExitOk;
    }

    if (geom_cmd->parsed()) {
      const ValidatedConfig cfg = load_validated(geom_config);
      std::vector<std::string> warnings;
      const DerivedGeometry g = derive_geometry(cfg, &warnings);
      print_warnings(warnings);
      std::fputs(describe(g).c_str(), stdout);
      const WaitTime wt = optimal_wait(cfg->t_s_s, g);
      std::printf("t_opt(t_s = %.9e s) = %.9e s%s\n", cfg->t_s_s, wt.t_w_s,
                  wt.usable ? "" : " (unusable: negative)");
      return kExitOk;
    }

    if (fit_cmd->parsed()) {
      const auto kind = model_from_token(fit_model_token);
      if (!kind) {
        std::fprintf(stderr, "config error: unknown model '%s' (expected M1|M2|M3)\n",
                     fit_model_token.c_str());
        return kExitConfig;
      }
      fit_options.fit_model = *kind;
      const FitRun run = run_fit_scenario(fit_dataset, fit_options);
      std::fputs(to_text(run.fit).c_str(), stdout);
      std::printf("wrote %s/fit.json\n", run.manifest.out_dir.c_str());
      return kExitOk;
    }

    for (const auto& spec : subs) {
      if (!spec->cmd->parsed()) continue;
      ScenarioOptions options = spec->options;
      options.od_map = spec->flags.od_map_token == "linear" ? OdReadoutMap::linear
                                                            : OdReadoutMap::saturating;
      if (spec->scenario == Scenario::sweep) {
        options.sweep_param =
            sweep_param == "t_w" ? SweepParam::wait_time : SweepParam::storage_time;
        options.sweep_mode = sweep_mode == "free" ? McMode::free_decay : McMode::protocol;
        options.sweep_engine = sweep_engine == "analytic" ? Engine::analytic : Engine::monte_carlo;
      }
      return run_config_scenario(spec->scenario, spec->config_path, options);
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitConfig;
  } catch (const ConfigFailure& e) {
    print_errors(e.errors());
    return kExitConfig;
  } catch (const toml::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}

}  // namespace polariton
