#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "whichpath/collision.hpp"
#include "whichpath/emission_field.hpp"

using namespace whichpath;
using testing::check_close;
constexpr double pi = std::numbers::pi;

namespace {

CollisionConfig free_decay(double dt, std::size_t steps) {
  CollisionConfig cfg;
  cfg.dt = dt;
  cfg.n_steps_bin1 = steps;
  cfg.n_steps_bin2 = 0;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  CollisionConfig cfg = free_decay(0.02, 1000);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = free_decay(1e-2, 700);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = free_decay(1e-2, 800);
  CHECK_NOTHROW(cfg.validate());
  cfg.pulses = {{100, PulseSpec(pi / 2, 0)}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n_steps_bin2 = 100;
  CHECK_NOTHROW(cfg.validate());
  cfg.pulses = {{100, PulseSpec(pi / 2, 0)}, {50, PulseSpec(pi / 2, 0)}};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("ramsey config requires an on-grid boundary") {
  CHECK_THROWS_AS(ramsey_collision_config({1.0, std::log(2.0), 0.0}, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(ramsey_collision_config({1.0, 0.0, 0.0}, 1e-3), std::invalid_argument);
  const CollisionConfig cfg = ramsey_collision_config({1.0, 0.5, 1.0}, 1e-3);
  CHECK(cfg.n_steps_bin1 == 500);
  CHECK(cfg.n_steps_bin2 == 8000);
  CHECK(cfg.pulses.size() == 2);
  CHECK(cfg.pulses[1].first == 500);
}

TEST_CASE("sector overflow") {
  CollisionConfig cfg = free_decay(1e-3, 3000);
  cfg.n_steps_bin2 = 8000;
  cfg.pulses = {{0, PulseSpec(pi / 2, 0)}, {1000, PulseSpec(pi / 2, 0)}, {2000, PulseSpec(pi / 2, 0)}};
  CHECK_THROWS_AS(run_collision(cfg), std::runtime_error);
  cfg.max_photons_tracked = 3;
  CHECK_NOTHROW(run_collision(cfg));
}

TEST_CASE("pure decay from the excited state") {
  CollisionConfig cfg = free_decay(1e-3, 8000);
  cfg.pulses = {{0, PulseSpec(pi, 0)}};
  const ModeRecord r = run_collision(cfg);
  for (Eigen::Index k : {0, 100, 1000, 5000}) {
    const double t = r.time(k);
    check_close(r.excited_population(k), std::exp(-t), 10 * 1e-3 * t * std::exp(-t) + 1e-15);
    // exact discrete law
    check_close(r.excited_population(k), std::pow(1 - 1e-3, static_cast<double>(k)), 1e-13);
  }
  CHECK(r.norm_drift < 8000 * 1e-14);
}

TEST_CASE("single pi/2 pulse") {
  CollisionConfig cfg = free_decay(1e-3, 8000);
  cfg.pulses = {{0, PulseSpec(pi / 2, 0)}};
  const ModeRecord r = run_collision(cfg);
  for (Eigen::Index k : {0, 500, 2000, 7000}) {
    const double t = r.time(k);
    check_close(r.excited_population(k), std::exp(-t) / 2, 1e-3 * t + 1e-15);
    check_close(std::abs(r.dipole(k)), std::exp(-t / 2) / 2, 1e-3 * t + 1e-15);
  }
}

TEST_CASE("flux matches input-output") {
  const double dt = 1e-3;
  const ModeRecord r = run_collision(ramsey_collision_config({1.0, 1.0, 0.7}, dt));
  double worst = 0;
  for (Eigen::Index k = 0; k < r.flux.size(); ++k)
    worst = std::max(worst, std::abs(r.flux(k) - r.excited_population(k) * dt));
  CHECK(worst < 1e-15);
  // <b_k> = sqrt(gamma dt) <sigma_->
  for (Eigen::Index k : {10, 900, 1500})
    check_close(r.mode_amplitude(k), std::sqrt(dt) * r.dipole(k), 1e-15);
}

TEST_CASE("norm drift stays below n_steps * 1e-14") {
  for (double x : {0.25, 1.0, 2.0}) {
    const ModeRecord r = run_collision(ramsey_collision_config({1.0, x, 2.0}, 1e-3));
    CHECK(r.norm_drift < static_cast<double>(r.time.size()) * 1e-14);
  }
}

TEST_CASE("p_e just after the second pulse") {
  const RamseyConfig c(1.0, 1.0, 2.0);
  const double dt = 1e-3;
  const ModeRecord r = run_collision(ramsey_collision_config(c, dt));
  check_close(r.excited_population(1000), pe_plus(c), 1e-3);
}

TEST_CASE("coarse-grained example at ln 2, pi/3") {
  const double x = std::log(2.0);
  const RamseyConfig c(1.0, x, pi / 3);
  const double dt = x / 693;
  const CoarseGrained g = coarse_grain_bins(run_collision(ramsey_collision_config(c, dt)), x);
  REQUIRE(g.w_plus);
  check_close(std::norm(*g.w_plus), 0.71429, 5e-3);
  check_close(g.pe_minus, 0.25, 1e-3);
  REQUIRE(g.w_minus);
  check_close(*g.w_minus, 1 / std::sqrt(1.5), 1e-3);
  CHECK(g.leakage < 1e-15);
  CHECK(g.packet_fidelity > 1 - 1e-6);
}

TEST_CASE("special phase and first plateau") {
  for (double x : {0.5, 1.5}) {
    const RamseyConfig c(1.0, x, 0.0);
    const CoarseGrained g = coarse_grain_bins(run_collision(ramsey_collision_config(c, 1e-3)), x);
    REQUIRE(g.w_plus);
    check_close(std::abs(*g.w_plus), std::sqrt(1 - std::exp(-x)), 1e-3);
    check_close(g.v1, 0.5, 1e-12);
    REQUIRE(g.v2);
    check_close(*g.v2, *second_plateau(c), 1e-3);
  }
}

TEST_CASE("coarse graining rejects a boundary off the pulse step") {
  const ModeRecord r = run_collision(ramsey_collision_config({1.0, 0.5, 0.0}, 1e-3));
  CHECK_THROWS_AS(coarse_grain_bins(r, 0.5004), std::invalid_argument);
  CHECK_THROWS_AS(coarse_grain_bins(r, 0.6), std::invalid_argument);
}

TEST_CASE("oracle quantity names") {
  CHECK(to_string(OracleQuantity::pe_plus) == "pe_plus");
  CHECK(to_string(OracleQuantity::w_plus_squared) == "w_plus_squared");
  CHECK(to_string(OracleQuantity::v2) == "v2");
}

TEST_CASE("Neville extrapolation is exact on polynomials") {
  const std::vector<double> h{0.4, 0.2, 0.1};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 - 2 * x + 5 * x * x);
  check_close(extrapolate_to_zero(h, v), 3.0, 1e-13);
  CHECK_THROWS_AS(extrapolate_to_zero({0.1}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("Richardson check on p_e+ and |w+|^2") {
  const RamseyConfig c(1.0, 1.0, 2 * pi / 3);
  for (OracleQuantity q : {OracleQuantity::pe_plus, OracleQuantity::w_plus_squared, OracleQuantity::v2}) {
    const ConvergenceReport r = richardson_check(c, {1e-3, 5e-4, 2.5e-4}, q);
    CHECK(r.monotone);
    for (std::size_t i = 1; i < r.errors.size(); ++i) check_close(r.errors[i - 1] / r.errors[i], 2.0, 0.02);
    CHECK(r.extrapolated_error < 1e-6);
    CHECK(r.errors[0] < 1e-2);
  }
  CHECK_THROWS_AS(richardson_check(c, {1e-3, 5e-4}, OracleQuantity::pe_plus), std::invalid_argument);
}

TEST_CASE("first plateau is exact at every step size") {
  const RamseyConfig c(1.0, 0.5, 1.0);
  const ConvergenceReport r = richardson_check(c, {1e-3, 5e-4, 2.5e-4}, OracleQuantity::v1);
  for (double e : r.errors) CHECK(e < 1e-13);
  CHECK(std::isinf(r.min_order()));
}
