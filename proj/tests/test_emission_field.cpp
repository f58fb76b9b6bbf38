#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "whichpath/emission_field.hpp"
#include "whichpath/numerics.hpp"

using namespace whichpath;
using testing::check_close;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

TEST_CASE("first-bin amplitude endpoints") {
  const RamseyConfig c(2.0, 0.7, 1.0);
  Eigen::ArrayXd t(2);
  t << 0.0, 0.7 * (1 - 1e-12);
  const Eigen::ArrayXcd b = amplitude_profile(c, t);
  check_close(b(0), cd(std::sqrt(2.0) / 2), 1e-15);
  check_close(b(1), cd(std::sqrt(2.0) * std::exp(-0.7) / 2), 1e-12);
}

TEST_CASE("second-bin bracket") {
  for (double phi : {0.0, pi}) check_close(second_bin_bracket({1.0, 0.0, phi}), cd(0.0), 1e-15);
  for (double phi : {0.4, 5.0}) check_close(second_bin_bracket({1.0, 0.0, phi}), cd(0.0, -std::sin(phi)), 1e-15);
  for (double phi : {0.0, 1.0, pi}) check_close(std::abs(second_bin_bracket({1.0, 50.0, phi})), 1.0, 1e-12);
  const double x = 0.9, phi = 2.2, a = std::exp(-x / 2);
  check_close(second_bin_bracket({1.0, x, phi}), cd(1 - a * a, -a * std::sin(phi)), 1e-15);
}

TEST_CASE("intensity examples") {
  Eigen::ArrayXd t0(1);
  t0 << 0.0;
  check_close(intensity_profile({3.0, 1.0, 0.0}, t0)(0), 1.5, 1e-15);

  // just after the second pulse: gamma p_e^+
  Eigen::ArrayXd tb(1);
  tb << 0.0;
  check_close(intensity_profile({1.0, 0.0, 0.0}, tb)(0), 1.0, 1e-15);
  tb << 50.0;
  check_close(intensity_profile({1.0, 50.0, 0.0}, tb)(0), 0.5, 1e-10);
  const RamseyConfig c(1.0, 0.6, 1.3);
  tb << 0.6;
  check_close(intensity_profile(c, tb)(0), pe_plus(c), 1e-15);
}

TEST_CASE("no emission for the effective identity sequence") {
  const RamseyConfig c(1.0, 0.0, pi);
  check_close(emitted_photons(c, TimeBin::first), 0.0, 0.0);
  check_close(emitted_photons(c, TimeBin::second), 0.0, 1e-30);
}

TEST_CASE("photon number in the first bin") {
  for (double x : {0.1, 1.0, 3.0}) {
    const RamseyConfig c(1.0, x, 0.3);
    check_close(emitted_photons(c, TimeBin::first, 20001), -std::expm1(-x) / 2, 1e-8);
  }
}

TEST_CASE("energy bookkeeping") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.05, 3.0), phi(0.0, 2 * pi);
  for (int i = 0; i < 50; ++i) {
    const RamseyConfig c(1.0, x(rng), phi(rng));
    const double total = emitted_photons(c, TimeBin::first, 20001, 8.0) + emitted_photons(c, TimeBin::second, 20001, 30.0);
    const double expected = 0.5 - pe_minus(c) + pe_plus(c);
    check_close(total, expected, 1e-6);
    CHECK(total >= 0);
    CHECK(total <= 2);
  }
}

TEST_CASE("formula and state-evolution routes agree on the grid") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(0.0, 4.0), phi(0.0, 2 * pi);
  for (int i = 0; i < 40; ++i) {
    const RamseyConfig c(1.0, x(rng), phi(rng));
    const Eigen::ArrayXd grid = default_grid(c, 801);
    const TemporalProfile f = temporal_profile(c, grid, Route::formula);
    const TemporalProfile e = temporal_profile(c, grid, Route::state_evolution);
    CHECK((f.amplitude - e.amplitude).abs().maxCoeff() < 1e-12);
    CHECK((f.intensity - e.intensity).abs().maxCoeff() < 1e-12);
    CHECK((f.intensity - f.amplitude.abs2() + 1e-12).minCoeff() >= 0);
  }
}

TEST_CASE("grid validation") {
  Eigen::ArrayXd bad(3);
  bad << 0.0, 0.2, 0.1;
  CHECK_THROWS_AS(amplitude_profile({1.0, 0.5, 0.0}, bad), std::invalid_argument);
  bad << -0.1, 0.0, 0.1;
  CHECK_THROWS_AS(intensity_profile({1.0, 0.5, 0.0}, bad), std::invalid_argument);
  CHECK_THROWS_AS(default_grid({1.0, 0.5, 0.0}, 1), std::invalid_argument);
}

TEST_CASE("boundary sample belongs to the second bin") {
  const RamseyConfig c(1.0, 1.0, 0.0);
  Eigen::ArrayXd t(1);
  t << 1.0;
  check_close(intensity_profile(c, t)(0), pe_plus(c), 1e-15);
  CHECK(analytic_visibility(c, t)(0) == *second_plateau(c));
}

TEST_CASE("mzi counts examples") {
  const RamseyConfig c(1.0, 1.2, 0.8);
  const Eigen::ArrayXd grid = default_grid(c, 101);
  const TemporalProfile p = temporal_profile(c, grid);

  const MziCounts in_phase = mzi_counts(p, p, 0.0);
  check_close(in_phase.mu3(0) / in_phase.mu4(0), 3.0, 1e-12);
  CHECK(((in_phase.mu3 + in_phase.mu4) - 4 * p.intensity).abs().maxCoeff() < 1e-15);
  CHECK(in_phase.mu4.minCoeff() >= -1e-15);

  const MziCounts quadrature = mzi_counts(p, p, pi / 2);
  CHECK((quadrature.mu3 - quadrature.mu4).abs().maxCoeff() < 1e-15);

  TemporalProfile vac = p;
  vac.amplitude.setZero();
  vac.intensity.setZero();
  const MziCounts dark = mzi_counts(vac, vac, 0.0);
  CHECK(dark.mu3.abs().maxCoeff() == 0.0);
  CHECK(dark.mu4.abs().maxCoeff() == 0.0);

  TemporalProfile shifted = p;
  shifted.time(3) += 1e-9;
  CHECK_THROWS_AS(mzi_counts(p, shifted, 0.0), std::invalid_argument);
}

TEST_CASE("visibility plateaus") {
  for (double phi : {0.0, 0.9, pi / 2, pi, 4.0}) {
    const RamseyConfig c(1.0, 1.42, phi);
    const VisibilityTrace tr = visibility_trace(c, default_grid(c));
    CHECK(tr.v1 == 0.5);
    REQUIRE(tr.v2);
    const double wp2 = std::norm(*w_plus(c));
    check_close(*tr.v2, wp2 * (1 - pe_plus(c)), 1e-12);
    for (Eigen::Index i = 0; i < tr.time.size(); ++i) {
      if (!tr.valid(i)) continue;
      if (tr.time(i) < c.delta_t)
        check_close(tr.v(i), 0.5, 1e-10);
      else
        check_close(tr.v(i), *tr.v2, 1e-10);
    }
    check_close(*plateau_ratio(tr), 2 * wp2 * (1 - pe_plus(c)), 1e-12);
    check_close(w_plus_from_ratio(*plateau_ratio(tr), pe_plus(c)), std::sqrt(wp2), 1e-12);
  }
}

TEST_CASE("special-phase second plateau") {
  for (double x : {0.2, 1.0, 2.5}) {
    const double v2 = *second_plateau({1.0, x, 0.0});
    check_close(v2, (1 - std::exp(-x)) * (1 - std::exp(-x / 2)) / 2, 1e-14);
  }
}

TEST_CASE("plateau limits") {
  for (double phi : {0.0, 1.0, 2.0}) {
    check_close(*second_plateau({1.0, 60.0, phi}), 0.5, 1e-12);
    const VisibilityTrace tr = visibility_trace({1.0, 60.0, phi}, Eigen::ArrayXd::LinSpaced(5, 0, 1));
    check_close(*plateau_ratio(tr), 1.0, 1e-12);
  }
  // phi = 0: v2/v1 ~ (3/2) x^2 as x -> 0
  double prev = 1.0;
  for (double x : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double ratio = 2 * *second_plateau({1.0, x, 0.0});
    CHECK(ratio < prev);
    check_close(ratio / (x * x), 0.5, 0.5 * 2 * x);
    prev = ratio;
  }
}

TEST_CASE("visibility masks dark samples") {
  const RamseyConfig c(1.0, 0.0, pi);
  const VisibilityTrace tr = visibility_trace(c, default_grid(c, 11));
  CHECK_FALSE(tr.valid.any());
  CHECK_FALSE(tr.v2.has_value());
  CHECK_FALSE(plateau_ratio(tr).has_value());
}

TEST_CASE("plateau ratio rejects a zero first plateau") {
  VisibilityTrace tr;
  tr.v1 = 0;
  CHECK_THROWS_AS(plateau_ratio(tr), std::domain_error);
}

TEST_CASE("pointwise identity v * intensity = |amplitude|^2") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(0.0, 4.0), phi(0.0, 2 * pi);
  for (int i = 0; i < 30; ++i) {
    const RamseyConfig c(1.0, x(rng), phi(rng));
    const Eigen::ArrayXd grid = default_grid(c, 501);
    const TemporalProfile p = temporal_profile(c, grid);
    const VisibilityTrace tr = visibility_trace(c, grid);
    const Eigen::ArrayXd analytic = analytic_visibility(c, grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
      if (!tr.valid(k)) continue;
      CHECK(std::abs(tr.v(k) * p.intensity(k) - std::norm(p.amplitude(k))) < 1e-10);
      CHECK(std::abs(tr.v(k) - analytic(k)) < 1e-10);
    }
  }
}

TEST_CASE("measured plateaus average each bin") {
  const RamseyConfig c(1.0, 0.5, 2.0);
  const VisibilityTrace tr = visibility_trace(c, default_grid(c));
  const MeasuredPlateaus m = measured_plateaus(tr);
  REQUIRE(m.v1);
  REQUIRE(m.v2);
  check_close(*m.v1, 0.5, 1e-12);
  check_close(*m.v2, *tr.v2, 1e-10);
}

TEST_CASE("trapezoid helper") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(1001, 0.0, 1.0);
  check_close(trapezoid(x, x * x), 1.0 / 3, 1e-6);
}
