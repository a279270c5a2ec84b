#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polariton/config.hpp"
#include "polariton/geometry.hpp"

using namespace polariton;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

ValidatedConfig reference() {
  const auto outcome = validate(example_config());
  REQUIRE(outcome.ok());
  return *outcome.config;
}

// Same physics viewed with the axis flipped: k and k_r come out positive.
ValidatedConfig mirrored() {
  ExperimentConfig c = example_config();
  c.sign_signal = -1;
  c.sign_coupling = +1;
  c.sign_r3 = +1;
  c.sign_r4 = -1;
  const auto outcome = validate(c);
  REQUIRE(outcome.ok());
  return *outcome.config;
}

ValidatedConfig with_override(ValidatedConfig base, double omega_r) {
  ExperimentConfig c = base.get();
  c.omega_r_override_rad_s = omega_r;
  const auto outcome = validate(c);
  REQUIRE(outcome.ok());
  return *outcome.config;
}

}  // namespace

TEST_CASE("effective Rabi frequency") {
  const double o3 = kTwoPi * 21e6, o4 = kTwoPi * 32e6, d = kTwoPi * 335e6;
  const double omega_r = effective_rabi(o3, o4, d);
  CHECK(omega_r == doctest::Approx(kTwoPi * 1.0029850746268658e6).epsilon(1e-12));
  CHECK(std::abs(omega_r / (kTwoPi * 1e6) - 1.0) < 0.01);  // within 1% of the round value

  CHECK(effective_rabi(0, o4, d) == 0.0);
  CHECK(effective_rabi(kTwoPi * 10e6, kTwoPi * 10e6, kTwoPi * 100e6) ==
        doctest::Approx(kTwoPi * 0.5e6).epsilon(1e-12));
  CHECK_THROWS_AS(effective_rabi(o3, o4, 0.0), std::domain_error);

  CHECK(rabi_far_detuned(o3, o4, d));
  CHECK(!rabi_far_detuned(o3, o4, 4 * o4));
}

TEST_CASE("wavevectors of the reference layout") {
  const auto kv = wavevectors(reference());
  CHECK(kv.k_magnitude() == doctest::Approx(4969544.813918938).epsilon(1e-12));
  CHECK(kv.k_r_magnitude() == doctest::Approx(24688350.912297).epsilon(1e-12));
  CHECK(kv.k_sign() == -1);
  CHECK(kv.k_r_sign() == -1);
  CHECK(kv.k_rad_m / kv.k_r_rad_m == doctest::Approx(343.0 / 1704.0).epsilon(1e-12));
  // reference orientation points both along -z; mirrored flips both
  CHECK(kv.k_rad_m < 0);
  CHECK(kv.k_r_rad_m < 0);
  const auto mirror = wavevectors(mirrored());
  CHECK(mirror.k_rad_m == doctest::Approx(-kv.k_rad_m));
  CHECK(mirror.k_r_rad_m == doctest::Approx(-kv.k_r_rad_m));
}

TEST_CASE("co-propagating storage beams add wavevectors") {
  ExperimentConfig c = example_config();
  c.sign_coupling = +1;  // hypothetical: breaks validation, compute directly
  const double expect = kTwoPi * (1.0 / 852e-9 + 1.0 / 509e-9);
  CHECK(!validate(c).ok());
  // magnitude check through the formula itself
  const double k = c.sign_signal * kTwoPi / c.lambda_signal_m +
                   c.sign_coupling * kTwoPi / c.lambda_coupling_m;
  CHECK(k == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("geometry rejects layouts without a usable wait time") {
  ExperimentConfig c = example_config();
  std::swap(c.lambda_signal_m, c.lambda_coupling_m);  // signal bluer than coupling
  const auto outcome = validate(c);
  REQUIRE(outcome.ok());  // validation passes; the ratio check is geometric
  CHECK_THROWS_AS(derive_geometry(*outcome.config), GeometryError);
}

TEST_CASE("derived geometry uses the override when present") {
  const auto g = derive_geometry(reference());
  CHECK(g.omega_r_rad_s == doctest::Approx(kTwoPi * 1.0029850746268658e6).epsilon(1e-12));
  CHECK(g.t_pi_s == doctest::Approx(std::numbers::pi / g.omega_r_rad_s));

  const auto forced = derive_geometry(with_override(reference(), kTwoPi * 1e6));
  CHECK(forced.omega_r_rad_s == doctest::Approx(kTwoPi * 1e6));
  CHECK(forced.t_pi_s == doctest::Approx(0.5e-6).epsilon(1e-12));
}

TEST_CASE("optimal wait anchors") {
  const auto g = derive_geometry(with_override(reference(), kTwoPi * 1e6));

  const WaitTime w7 = optimal_wait(7e-6, g);
  CHECK(w7.usable);
  CHECK(w7.t_w_s == doctest::Approx(0.9090375586854459e-6).epsilon(1e-11));
  CHECK(std::abs(w7.t_w_s - 0.91e-6) < 0.02e-6);

  const WaitTime w279 = optimal_wait(2.79e-6, g);
  CHECK(w279.t_w_s == doctest::Approx(0.06160211267605628e-6).epsilon(1e-9));

  // root of the formula
  const double ts_root = (g.k_r_rad_m / g.k_rad_m) * (std::numbers::pi / g.omega_r_rad_s);
  CHECK(std::abs(optimal_wait(ts_root, g).t_w_s) < 1e-18);

  const WaitTime w0 = optimal_wait(0.0, g);
  CHECK(!w0.usable);
  CHECK(w0.t_w_s < 0);
}

TEST_CASE("optimal wait is affine with slope k/k_r") {
  const auto g = derive_geometry(reference());
  const double slope = g.k_rad_m / g.k_r_rad_m;
  for (double t1 : {1e-6, 5e-6, 20e-6}) {
    const double t2 = t1 + 3.7e-6;
    const double measured =
        (optimal_wait(t2, g).t_w_s - optimal_wait(t1, g).t_w_s) / (t2 - t1);
    CHECK(measured == doctest::Approx(slope).epsilon(1e-9));
  }
}

TEST_CASE("pulse phases at zero velocity") {
  const auto g = derive_geometry(reference());
  CHECK(phi1(0.0, g) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(phi2(0.0, 0.909e-6, g) == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("phi1 velocity term (mirrored layout, forced round Rabi)") {
  const auto g = derive_geometry(with_override(mirrored(), kTwoPi * 1e6));
  CHECK(g.k_r_rad_m > 0);
  const double value = phi1(0.05, g);
  CHECK(value == doctest::Approx(-std::numbers::pi / 2 - 0.3086043864037125).epsilon(1e-9));
  // odd symmetry of the velocity-dependent part
  for (double v : {0.01, 0.05, 0.2}) {
    CHECK(phi1(v, g) + phi1(-v, g) == doctest::Approx(-std::numbers::pi).epsilon(1e-12));
  }
}

TEST_CASE("net two-pulse phase identity") {
  const auto g = derive_geometry(reference());
  for (double v : {-1.0, -0.13, 0.0, 0.05, 0.9}) {
    for (double tw : {0.0, 0.909e-6, 5e-6, 100e-6}) {
      const double identity = phi1(v, g) + phi2(v, tw, g) + std::numbers::pi -
                              g.k_r_rad_m * v * (tw + std::numbers::pi / g.omega_r_rad_s);
      CHECK(std::abs(identity) < 1e-12);
      CHECK(phi1(v, g) + phi2(v, tw, g) ==
            doctest::Approx(first_order_net_phase(v, tw, g)).epsilon(1e-12));
    }
  }
}

TEST_CASE("net phase anchor at the optimal wait") {
  const auto g = derive_geometry(with_override(mirrored(), kTwoPi * 1e6));
  const double net_plus_pi = phi1(0.05, g) + phi2(0.05, 0.909e-6, g) + std::numbers::pi;
  CHECK(net_plus_pi == doctest::Approx(1.7392943217713237).epsilon(1e-9));
  CHECK(std::abs(net_plus_pi - 1.740) < 1e-3);
}

TEST_CASE("residual mismatch vanishes at the optimal wait") {
  const auto g = derive_geometry(reference());
  for (double ts : {0.0, 0.5e-6, 7e-6, 33e-6, 100e-6}) {
    const WaitTime w = optimal_wait(ts, g);
    for (double v : {1.0, -1.0}) {
      CHECK(std::abs(residual_mismatch(v, ts, w.t_w_s, g)) < 1e-12);
    }
  }
  CHECK(residual_mismatch(0.0, 7e-6, 1e-6, g) == 0.0);
}

TEST_CASE("residual mismatch anchor and linearity") {
  const auto g = derive_geometry(with_override(mirrored(), kTwoPi * 1e6));
  const double topt = optimal_wait(7e-6, g).t_w_s;
  const double r = residual_mismatch(0.05, 7e-6, topt + 0.5e-6, g);
  CHECK(r == doctest::Approx(-0.6172087728074254).epsilon(1e-9));

  for (double a : {-3.0, 0.5, 7.0}) {
    CHECK(residual_mismatch(a * 0.05, 7e-6, topt + 0.5e-6, g) ==
          doctest::Approx(a * r).epsilon(1e-15));
  }
}

TEST_CASE("geometry diagnostics table") {
  const auto g = derive_geometry(reference());
  const std::string table = describe(g);
  CHECK(table.find("k_r") != std::string::npos);
  CHECK(table.find("sigma_v") != std::string::npos);
  CHECK(table.find("omega_r") != std::string::npos);
}

TEST_CASE("first-order validity window") {
  const auto g = derive_geometry(reference());
  // thermal cloud sits comfortably inside the expansion's validity range
  CHECK(doppler_ratio(g) == doctest::Approx(0.195971).epsilon(1e-4));
  CHECK(first_order_valid(g.sigma_v_m_s, g));
  CHECK(first_order_valid(-3 * g.sigma_v_m_s, g));
  const double v_edge = g.omega_r_rad_s / std::abs(g.k_r_rad_m);
  CHECK(!first_order_valid(1.01 * v_edge, g));
}

TEST_CASE("marginal detuning raises a warning") {
  ExperimentConfig c = example_config();
  c.delta_rad_s = 4.0 * c.omega4_rad_s;
  const auto outcome = validate(c);
  REQUIRE(outcome.ok());
  std::vector<std::string> warnings;
  derive_geometry(*outcome.config, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("marginal") != std::string::npos);
}
