#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <cstdlib>

#include "polariton/cli.hpp"
#include "polariton/config_io.hpp"
#include "polariton/csv.hpp"
#include "polariton/geometry.hpp"
#include "polariton/parallel.hpp"
#include "polariton/scenario.hpp"

using namespace polariton;
namespace fs = std::filesystem;

namespace {

const std::string kConfigPath = std::string(POLARITON_SOURCE_DIR) + "/configs/cesium_40uk.toml";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("polariton_test_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fast variant of the shipped config for scenario tests.
std::string write_small_config(const TempDir& dir, int n_atoms = 400, int n_shots = 60) {
  std::string text = slurp(kConfigPath);
  auto replace_value = [&](const std::string& key, const std::string& value) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    const auto eol = text.find('\n', pos);
    text.replace(pos, eol - pos, key + " = " + value);
  };
  replace_value("n_atoms", std::to_string(n_atoms));
  replace_value("n_shots", std::to_string(n_shots));
  const fs::path p = dir.path / "config.toml";
  std::ofstream out(p, std::ios::binary);
  out << text;
  out.close();
  return p.string();
}

int run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"polariton-echo"};
  argv.insert(argv.end(), args.begin(), args.end());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("shipped config loads and validates") {
  const auto loaded = load_config_file(kConfigPath);
  REQUIRE(loaded.ok());
  CHECK(validate(*loaded.config).ok());
}

TEST_CASE("normalize by index and by value") {
  EfficiencyCurve c{"t_s", {{0, 0.5, 0.05}, {1e-6, 0.25, 0.02}, {2e-6, 0.1, 0.01}}};
  const EfficiencyCurve n = normalize(c, std::size_t{0});
  CHECK(n.points[0].efficiency == doctest::Approx(1.0));
  CHECK(n.points[1].efficiency == doctest::Approx(0.5));
  CHECK(n.points[0].std_error == doctest::Approx(0.1));

  const EfficiencyCurve again = normalize(n, std::size_t{0});
  for (std::size_t i = 0; i < n.points.size(); ++i) {
    CHECK(again.points[i].efficiency == doctest::Approx(n.points[i].efficiency));
  }

  const EfficiencyCurve by_value = normalize(c, 0.5);
  CHECK(by_value.points[2].efficiency == doctest::Approx(0.2));

  CHECK_THROWS_AS(normalize(c, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(normalize(c, std::size_t{99}), std::invalid_argument);
}

TEST_CASE("csv round trip and formatting") {
  TempDir dir("csv");
  EfficiencyCurve c{"t_s", {{1.5e-6, 0.123456789123, 0.001}, {2e-6, NAN, NAN}}};
  const std::string path = (dir.path / "curve.csv").string();
  write_curve_csv(path, c);

  const std::string text = slurp(path);
  CHECK(text.find("control_us,efficiency,std_error\n") == 0);
  CHECK(text.find("0.123456789") != std::string::npos);  // 9 significant digits
  CHECK(text.find("nan") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);  // LF endings

  const EfficiencyCurve back = read_curve_csv(path);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[0].control_s == doctest::Approx(1.5e-6));
  CHECK(back.points[0].efficiency == doctest::Approx(0.123456789));
  CHECK(std::isnan(back.points[1].efficiency));

  const Dataset data = curve_to_dataset(back);
  CHECK(data.points.size() == 1);  // NaN row dropped
}

TEST_CASE("dataset csv accepts both headers") {
  TempDir dir("dataset");
  const fs::path a = dir.path / "a.csv";
  std::ofstream(a) << "t_us,y,sigma\n0,1.0,0.05\n1,0.8,0.04\n";
  const Dataset da = read_dataset_csv(a.string());
  REQUIRE(da.points.size() == 2);
  CHECK(da.points[1].sigma == doctest::Approx(0.04));

  const fs::path b = dir.path / "b.csv";
  std::ofstream(b) << "t_us,y\n0,1.0\n1,0.8\n";
  CHECK(read_dataset_csv(b.string()).points[1].sigma == 0.0);

  const fs::path c = dir.path / "c.csv";
  std::ofstream(c) << "time,value\n0,1\n";
  CHECK_THROWS_AS(read_dataset_csv(c.string()), CsvFormatError);
}

TEST_CASE("fig1b scenario produces analytic curves") {
  TempDir dir("fig1b");
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.points = 21;
  const RunManifest manifest = run_scenario(Scenario::fig1b, kConfigPath, options);
  CHECK(manifest.scenario == "fig1b");

  const auto free_curve = read_curve_csv((fs::path(options.out_dir) / "free_analytic.csv").string());
  const auto protocol = read_curve_csv((fs::path(options.out_dir) / "protocol_analytic.csv").string());
  REQUIRE(free_curve.points.size() == 21);
  REQUIRE(protocol.points.size() == 21);

  const auto loaded = load_config_file(kConfigPath);
  const auto cfg = *validate(*loaded.config).config;
  const auto g = derive_geometry(cfg);
  const DecayParams decay{cfg->tau_r1_s, cfg->tau_r2_s};

  for (const auto& p : free_curve.points) {
    CHECK(p.efficiency ==
          doctest::Approx(analytic_free_decay(p.control_s, g, decay)).epsilon(1e-8));
  }
  // early grid points cannot host the pulse pair: NaN-flagged, later ones real
  CHECK(std::isnan(protocol.points[0].efficiency));
  CHECK(!std::isnan(protocol.points.back().efficiency));
  for (const auto& p : protocol.points) {
    if (!std::isnan(p.efficiency)) {
      CHECK(p.efficiency >= 0.0);
      CHECK(p.efficiency <= 1.0);
    }
  }

  // manifest is valid json with the expected fields
  const auto j = nlohmann::json::parse(manifest.json);
  CHECK(j["scenario"] == "fig1b");
  CHECK(j["geometry"].contains("k_rad_m"));
  CHECK(j["config"]["temperature_k"].get<double>() == doctest::Approx(40e-6));
  CHECK(j["outputs"].size() == manifest.outputs.size());
}

TEST_CASE("fig1b protocol plateau with decay disabled") {
  TempDir dir("fig1b_nodecay");
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.points = 16;
  options.tmin_us = 5.0;
  options.tmax_us = 20.0;
  options.no_decay = true;
  run_scenario(Scenario::fig1b, kConfigPath, options);

  const auto protocol =
      read_curve_csv((fs::path(options.out_dir) / "protocol_analytic.csv").string());
  double lo = 2, hi = -1;
  for (const auto& p : protocol.points) {
    REQUIRE(!std::isnan(p.efficiency));
    lo = std::min(lo, p.efficiency);
    hi = std::max(hi, p.efficiency);
  }
  CHECK(hi - lo < 1e-12);  // pulse-fidelity plateau, storage-time independent
}

TEST_CASE("fig3b scenario fits the od model it generated") {
  TempDir dir("fig3b");
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  const RunManifest manifest = run_scenario(Scenario::fig3b, kConfigPath, options);

  const auto j = nlohmann::json::parse(manifest.json);
  CHECK(j["od_fit"]["params"]["od0"].get<double>() == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(j["od_fit"]["params"]["tau"].get<double>() == doctest::Approx(30.0).epsilon(1e-6));

  const auto od_curve = read_curve_csv((fs::path(options.out_dir) / "od.csv").string());
  CHECK(od_curve.points[0].efficiency == doctest::Approx(5.0));
}

TEST_CASE("fig3a raw and corrected curves honour the od round trip") {
  TempDir dir("fig3a");
  const std::string config = write_small_config(dir, 300, 40);
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.points = 12;
  options.tmax_us = 15.0;
  const RunManifest manifest = run_scenario(Scenario::fig3a, config, options);

  const fs::path out = options.out_dir;
  const auto raw = read_curve_csv((out / "protocol_raw.csv").string());
  const auto corrected = read_curve_csv((out / "protocol_corrected.csv").string());
  const auto raw_norm = read_curve_csv((out / "protocol_raw_normalized.csv").string());

  const auto loaded = load_config_file(kConfigPath);
  const ODModel model{loaded.config->od0, loaded.config->tau_od_s, OdReadoutMap::saturating};

  std::size_t first_finite = raw.points.size();
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    const auto& r = raw.points[i];
    const auto& c = corrected.points[i];
    if (std::isnan(r.efficiency)) {
      CHECK(std::isnan(c.efficiency));
      continue;
    }
    if (first_finite == raw.points.size()) first_finite = i;
    const EfficiencyPoint redo = od_correction({r.control_s, r.efficiency, r.std_error}, model);
    CHECK(c.efficiency == doctest::Approx(redo.efficiency).epsilon(1e-9));
  }
  REQUIRE(first_finite < raw.points.size());
  CHECK(raw_norm.points[first_finite].efficiency == doctest::Approx(1.0).epsilon(1e-9));

  const auto j = nlohmann::json::parse(manifest.json);
  CHECK(j.contains("fits"));
  CHECK(j["fits"].contains("free_decay"));
  CHECK(j["fits"].contains("protocol_corrected"));
}

TEST_CASE("fig4 scenario peaks near the optimal wait") {
  TempDir dir("fig4");
  const std::string config = write_small_config(dir, 800, 80);
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.points = 21;
  const RunManifest manifest = run_scenario(Scenario::fig4, config, options);

  const fs::path out = options.out_dir;
  const auto mc = read_curve_csv((out / "protocol_mc.csv").string());
  const auto analytic = read_curve_csv((out / "protocol_analytic.csv").string());
  const auto free_ref = read_curve_csv((out / "free_reference.csv").string());
  REQUIRE(mc.points.size() == 21);
  REQUIRE(analytic.points.size() == 21);
  REQUIRE(free_ref.points.size() == 21);

  const auto j = nlohmann::json::parse(manifest.json);
  const double topt = j["t_opt_us"].get<double>() * 1e-6;

  std::size_t best = 0;
  for (std::size_t i = 1; i < mc.points.size(); ++i) {
    if (mc.points[i].efficiency > mc.points[best].efficiency) best = i;
  }
  const double grid_step = mc.points[1].control_s - mc.points[0].control_s;
  CHECK(std::abs(mc.points[best].control_s - topt) <= 2 * grid_step);

  // free reference is one value replicated across the grid
  for (const auto& p : free_ref.points) {
    CHECK(p.efficiency == doctest::Approx(free_ref.points[0].efficiency));
  }
}

TEST_CASE("sweep analytic free decay matches the closed form") {
  TempDir dir("sweep");
  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.points = 9;
  options.sweep_engine = Engine::analytic;
  options.sweep_mode = McMode::free_decay;
  run_scenario(Scenario::sweep, kConfigPath, options);

  const auto curve = read_curve_csv((fs::path(options.out_dir) / "sweep.csv").string());
  const auto loaded = load_config_file(kConfigPath);
  const auto cfg = *validate(*loaded.config).config;
  const auto g = derive_geometry(cfg);
  const DecayParams decay{cfg->tau_r1_s, cfg->tau_r2_s};
  for (const auto& p : curve.points) {
    // 9 significant digits survive the CSV round trip
    CHECK(p.efficiency ==
          doctest::Approx(analytic_free_decay(p.control_s, g, decay)).epsilon(1e-8));
  }
}

TEST_CASE("double runs are byte identical across thread counts") {
  TempDir dir("determinism");
  const std::string config = write_small_config(dir, 300, 40);

  auto run_once = [&](const std::string& sub, int threads) {
    ScenarioOptions options;
    options.out_dir = (dir.path / sub).string();
    options.points = 7;
    options.max_threads = threads;
    return run_scenario(Scenario::fig4, config, options);
  };
  const RunManifest a = run_once("a", 1);
  const RunManifest b = run_once("b", 4);
  const RunManifest c = run_once("c", 4);
  REQUIRE(a.outputs == b.outputs);
  for (const auto& name : a.outputs) {
    const std::string fa = slurp(fs::path(a.out_dir) / name);
    const std::string fb = slurp(fs::path(b.out_dir) / name);
    const std::string fc = slurp(fs::path(c.out_dir) / name);
    CHECK(fa == fb);
    CHECK(fb == fc);
  }
}

TEST_CASE("seed override changes monte carlo outputs") {
  TempDir dir("seeds");
  const std::string config = write_small_config(dir, 300, 40);
  ScenarioOptions options;
  options.out_dir = (dir.path / "s1").string();
  options.points = 5;
  run_scenario(Scenario::fig4, config, options);
  options.out_dir = (dir.path / "s2").string();
  options.seed = 999;
  run_scenario(Scenario::fig4, config, options);
  CHECK(slurp(dir.path / "s1" / "protocol_mc.csv") != slurp(dir.path / "s2" / "protocol_mc.csv"));
}

TEST_CASE("fit scenario recovers a planted decay constant") {
  TempDir dir("fitrun");
  std::ofstream data(dir.path / "data.csv");
  data << "t_us,y,sigma\n";
  for (int i = 0; i < 15; ++i) {
    const double t = 12.0 * i / 14.0;
    const double y = 0.05 + 0.95 * std::exp(-(t / 3.29) * (t / 3.29));
    data << format_sig9(t) << ',' << format_sig9(y) << ",0.01\n";
  }
  data.close();

  ScenarioOptions options;
  options.out_dir = (dir.path / "out").string();
  options.fit_model = FitModelKind::offset_gaussian;
  const FitRun run = run_fit_scenario((dir.path / "data.csv").string(), options);
  CHECK(run.fit.param("tau") == doctest::Approx(3.29).epsilon(1e-6));
  CHECK(fs::exists(fs::path(options.out_dir) / "fit.json"));
  CHECK(fs::exists(fs::path(options.out_dir) / "manifest.json"));

  ScenarioOptions missing_model;
  missing_model.out_dir = (dir.path / "out2").string();
  CHECK_THROWS_AS(run_fit_scenario((dir.path / "data.csv").string(), missing_model),
                  std::invalid_argument);
}

TEST_CASE("cli end to end") {
  TempDir dir("cli");
  const std::string out = (dir.path / "out").string();

  CHECK(run_cli({"fig3b", kConfigPath.c_str(), "--out", out.c_str()}) == 0);
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  CHECK(fs::exists(fs::path(out) / "od.csv"));

  // geometry + propagator debug commands
  CHECK(run_cli({"geometry", kConfigPath.c_str()}) == 0);
  CHECK(run_cli({"propagator", "--omega-r-mhz", "1.0", "--delta-mhz", "0.2"}) == 0);

  // fit happy path straight off a scenario output
  const std::string fit_out = (dir.path / "fit_out").string();
  CHECK(run_cli({"fit", (fs::path(out) / "od.csv").string().c_str(), "--model", "M3", "--out",
                 fit_out.c_str()}) == 0);
  CHECK(fs::exists(fs::path(fit_out) / "fit.json"));
}

TEST_CASE("environment variable caps worker threads") {
  ::setenv("POLARITON_ECHO_THREADS", "2", 1);
  CHECK(env_thread_cap() == 2);
  CHECK(effective_threads(8) == 2);
  ::unsetenv("POLARITON_ECHO_THREADS");
  CHECK(env_thread_cap() == 0);
  CHECK(effective_threads(8) == 8);
}

TEST_CASE("cli exit codes") {
  TempDir dir("cli_err");

  // malformed config -> 2
  const fs::path bad = dir.path / "bad.toml";
  std::ofstream(bad) << "[ensemble]\ntemperature_uk = -4\n";
  CHECK(run_cli({"fig3b", bad.string().c_str(), "--out", (dir.path / "o").string().c_str()}) == 2);

  // unknown key -> 2
  const fs::path typo = dir.path / "typo.toml";
  std::ofstream(typo) << slurp(kConfigPath) << "\nmystery_knob = 1\n";
  CHECK(run_cli({"fig3b", typo.string().c_str(), "--out", (dir.path / "o2").string().c_str()}) ==
        2);

  // missing config file -> 2 (config error, not I/O: nothing was written yet)
  CHECK(run_cli({"fig3b", (dir.path / "absent.toml").string().c_str()}) == 2);

  // unwritable output dir -> 3
  CHECK(run_cli({"fig3b", kConfigPath.c_str(), "--out", "/proc/polariton_echo_forbidden"}) == 3);

  // fit without a usable model token -> 2
  const fs::path data = dir.path / "d.csv";
  std::ofstream(data) << "t_us,y\n0,1\n1,0.5\n2,0.3\n3,0.2\n4,0.18\n";
  CHECK(run_cli({"fit", data.string().c_str(), "--model", "M7", "--out",
                 (dir.path / "o3").string().c_str()}) == 2);
}
