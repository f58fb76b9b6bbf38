#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "whichpath/decoherence.hpp"

using namespace whichpath;
using testing::check_close;
constexpr double pi = std::numbers::pi;
const double ln2 = std::log(2.0);

TEST_CASE("spec validation") {
  SpectralDiffusionSpec d;
  d.delta = -0.1;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d.delta = 0.1;
  d.n_samples = 0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);

  SpinModelSpec s;
  s.p = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.p = 0.5;
  s.w = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("diffusion with zero width is the ideal absorption") {
  SpectralDiffusionSpec spec;
  for (Averaging mode : {Averaging::closed_form, Averaging::monte_carlo}) {
    spec.mode = mode;
    for (double phi : {0.0, 1.0, pi}) {
      const RamseyConfig c(1.0, 0.8, phi);
      CHECK(absorption_with_diffusion(c, spec).value == doctest::Approx(absorption(c)).epsilon(1e-15));
    }
  }
}

TEST_CASE("diffusion damping factor at delta = 0.6, gamma dt = 1") {
  check_close(diffusion_damping_closed({1.0, 1.0, 0.0}, 0.6), std::exp(-0.18), 1e-15);
  check_close(diffusion_damping_closed({1.0, 1.0, 0.0}, 0.6), 0.83527, 5e-6);
  SpectralDiffusionSpec spec;
  spec.delta = 0.6;
  const RamseyConfig c(1.0, 1.0, 0.0);
  const double expected = 0.5 - pe_minus(c) + std::exp(-0.18) * sigma_minus(c);
  check_close(absorption_with_diffusion(c, spec).value, expected, 1e-15);
  // delta in units of gamma: same physics at gamma = 2, delta_t = 1/2
  check_close(diffusion_damping_closed({2.0, 0.5, 0.0}, 0.6), std::exp(-0.18), 1e-15);
}

TEST_CASE("diffusion Monte Carlo agrees with the closed form") {
  SpectralDiffusionSpec spec;
  spec.delta = 0.6;
  spec.mode = Averaging::monte_carlo;
  spec.n_samples = 200'000;
  spec.seed = 42;
  for (double x : {0.5, 1.0, 1.5}) {
    const RamseyConfig c(1.0, x, 0.4);
    const Estimate d = diffusion_damping(c, spec, 4);
    CHECK(d.samples == spec.n_samples);
    CHECK(std::abs(d.value - diffusion_damping_closed(c, 0.6)) < 3 * d.std_error);
    const Estimate a = absorption_with_diffusion(c, spec, 4);
    SpectralDiffusionSpec closed = spec;
    closed.mode = Averaging::closed_form;
    CHECK(std::abs(a.value - absorption_with_diffusion(c, closed).value) < 3 * a.std_error);
  }
}

TEST_CASE("Monte Carlo is independent of the thread count") {
  SpectralDiffusionSpec spec;
  spec.delta = 0.6;
  spec.mode = Averaging::monte_carlo;
  spec.n_samples = 50'001;
  const RamseyConfig c(1.0, 1.0, 0.0);
  const Estimate one = diffusion_damping(c, spec, 1);
  for (unsigned t : {2u, 3u, 8u}) {
    const Estimate many = diffusion_damping(c, spec, t);
    CHECK(many.value == one.value);
    CHECK(many.std_error == one.std_error);
  }
  spec.seed = 2;
  CHECK(diffusion_damping(c, spec, 1).value != one.value);
}

TEST_CASE("Monte Carlo propagates worker exceptions") {
  CHECK_THROWS_AS(monte_carlo_mean(20'000, 1, 4,
                                   [](SampleStream& s) -> double {
                                     if (s() % 1000 == 0) throw std::runtime_error("boom");
                                     return 0.0;
                                   }),
                  std::runtime_error);
}

TEST_CASE("sample streams are keyed by seed and index") {
  SampleStream a(1, 5), b(1, 5), c(1, 6), d(2, 5);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("peak shift") {
  SpectralDiffusionSpec spec;
  check_close(peak_shift_with_diffusion(spec), 2 * ln2, 1e-12);
  check_close(peak_shift_with_diffusion(spec, 2.0), ln2, 1e-12);
  spec.delta = 0.6;
  const double shifted = peak_shift_with_diffusion(spec);
  CHECK(shifted < 2 * ln2);
  CHECK(shifted > 0);
  // frozen value of the numerical argmax
  check_close(shifted, 0.7323733438, 1e-9);

  // brute-force argmax on a fine grid
  double best_t = 0, best = -1;
  for (double t = 0; t < 3; t += 1e-5) {
    const double v = 0.5 - std::exp(-t) / 2 + std::exp(-0.18 * t * t) * std::exp(-t / 2) / 2;
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  check_close(shifted, best_t, 2e-5);
}

TEST_CASE("peak shift decreases with the wandering width") {
  double prev = 10;
  for (double d : {0.0, 0.2, 0.6, 1.0, 2.0, 5.0, 20.0}) {
    SpectralDiffusionSpec spec;
    spec.delta = d;
    const double t = peak_shift_with_diffusion(spec);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("Overhauser sampling") {
  SpinModelSpec spec;
  spec.w = 0;
  SampleStream s(1, 0);
  const OverhauserSample zero = sample_overhauser(spec, s, 3.0);
  CHECK(zero.omega == 0.0);
  CHECK(zero.c_t == std::complex<double>(1.0));

  spec.w = 1.7;
  const Estimate omega2 = monte_carlo_mean(1'000'000, 3, 8, [&](SampleStream& st) {
    const double w = sample_overhauser(spec, st, 0.0).omega;
    return w * w;
  });
  CHECK(std::abs(omega2.value - 3 * 1.7 * 1.7) < 3 * omega2.std_error);
  const Estimate cos_theta = monte_carlo_mean(1'000'000, 4, 8, [&](SampleStream& st) {
    return std::cos(sample_overhauser(spec, st, 0.0).theta);
  });
  CHECK(std::abs(cos_theta.value) < 3 * cos_theta.std_error);
}

TEST_CASE("precession coefficients are normalized") {
  SpinModelSpec spec;
  spec.w = 2.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    SampleStream s(9, i);
    const OverhauserSample o = sample_overhauser(spec, s, 0.37 * static_cast<double>(i % 17));
    check_close(std::norm(o.c_t) + std::norm(o.s_t), 1.0, 1e-12);
    CHECK(o.phi >= 0);
    CHECK(o.phi < 2 * pi);
  }
}

TEST_CASE("Merkulov correlation closed form") {
  CHECK(spin_correlation_closed(1.0, 0.0) == 1.0);
  check_close(spin_correlation_closed(1.0, 100.0), 1.0 / 3, 1e-15);
  check_close(spin_correlation_closed(0.5, 1.0), 0.774582, 1e-6);
  check_close(spin_correlation_closed(1.0, 0.5), 0.77458, 1e-5);
  check_close(spin_correlation_closed(std::sqrt(2.0), 1.0), 0.08808, 1e-5);
  check_close(spin_correlation_closed(1.0, 1.0), 1.0 / 3, 1e-15);
}

TEST_CASE("Merkulov correlation stays positive") {
  double lowest = 1;
  double at = 0;
  for (double x = 0; x <= 10; x += 1e-4) {
    const double c = spin_correlation_closed(1.0, x);
    CHECK(c > 0);
    CHECK(c <= 1);
    if (c < lowest) {
      lowest = c;
      at = x;
    }
  }
  check_close(at, std::sqrt(3.0), 1e-4);
  check_close(lowest, (1 - 4 * std::exp(-1.5)) / 3, 1e-8);
}

TEST_CASE("Merkulov Monte Carlo") {
  SpinModelSpec spec;
  spec.n_samples = 200'000;
  spec.seed = 5;
  spec.w = 0;
  const Estimate still = spin_correlation_mc(spec, 1.0);
  CHECK(still.value == 1.0);
  CHECK(still.std_error == 0.0);
  spec.w = 1.0;
  for (double t : {0.5, std::sqrt(2.0), 3.0}) {
    const Estimate e = spin_correlation_mc(spec, t, 4);
    CHECK(std::abs(e.value - spin_correlation_closed(1.0, t)) < 4 * e.std_error);
  }
}

TEST_CASE("spin homodyne visibility") {
  SpinModelSpec spec;
  spec.w = 0;
  for (double p : {0.0, 0.3, 0.5, 1.0}) {
    spec.p = p;
    check_close(spin_homodyne_visibility(spec, Averaging::closed_form).value, 1 - p, 1e-15);
  }
  spec.tau_p = 1.0;
  spec.w = 0.5;
  spec.p = 0.5;
  check_close(spin_homodyne_visibility(spec, Averaging::closed_form).value, 0.38729, 1e-5);

  spec.n_samples = 200'000;
  const Estimate mc = spin_homodyne_visibility(spec, Averaging::monte_carlo, 4);
  CHECK(std::abs(mc.value - 0.5 * spin_correlation_closed(0.5, 1.0)) < 4 * mc.std_error);

  spec.p = 1.0;
  check_close(spin_homodyne_visibility(spec, Averaging::monte_carlo, 4).value, 0.0, 1e-15);
  spec.p = 0.0;
  CHECK_THROWS_AS(spin_homodyne_visibility(spec, Averaging::monte_carlo), std::domain_error);
}

TEST_CASE("spin cross term is the same for both initial spins") {
  SpinModelSpec spec;
  spec.w = 1.3;
  for (std::uint64_t i = 0; i < 500; ++i) {
    SampleStream s(17, i);
    const OverhauserSample o = sample_overhauser(spec, s, 1.0);
    const double p = 0.1 + 0.8 * static_cast<double>(i) / 500;
    const auto up = homodyne_cross_term(o, p, SpinInit::up);
    const auto down = homodyne_cross_term(o, p, SpinInit::down);
    check_close(std::abs(up - down), 0.0, 1e-15);
    check_close(up, {(std::norm(o.c_t) - std::norm(o.s_t)) * p / 2 * (1 - p), 0.0}, 1e-15);
  }
}

TEST_CASE("spin factor scales the whole trace") {
  const RamseyConfig c(1.0, 1.42, 1.0);
  const VisibilityTrace tr = visibility_trace(c, default_grid(c, 201));
  SpinModelSpec spec;
  spec.w = 0;
  const VisibilityTrace same = apply_spin_factor(tr, spec);
  CHECK((same.v - tr.v).abs().maxCoeff() == 0.0);

  spec.w = 0.5;
  spec.tau_p = 1.0;
  const VisibilityTrace scaled = apply_spin_factor(tr, spec);
  check_close(scaled.v1, 0.38729, 1e-5);
  check_close(*plateau_ratio(scaled), *plateau_ratio(tr), 1e-12);
}

TEST_CASE("spin lifetime inversion") {
  CHECK(infer_spin_lifetime(1.0, 12.5).w == 0.0);
  const SpinLifetime l = infer_spin_lifetime(0.7, 12.5);
  check_close(spin_correlation_closed(l.w, 12.5), 0.7, 1e-8);
  CHECK(1 / l.w > 0.8 * 25);
  CHECK(1 / l.w < 1.2 * 25);
  CHECK_FALSE(l.near_branch_limit);

  const SpinLifetime edge = infer_spin_lifetime(1.0 / 3 + 1e-9, 12.5);
  CHECK(edge.near_branch_limit);
  check_close(spin_correlation_closed(edge.w, 12.5), 1.0 / 3 + 1e-9, 1e-8);

  CHECK_THROWS_AS(infer_spin_lifetime(1.0 / 3, 12.5), std::domain_error);
  CHECK_THROWS_AS(infer_spin_lifetime(1.2, 12.5), std::domain_error);
  CHECK_THROWS_AS(infer_spin_lifetime(0.7, 0.0), std::invalid_argument);
}
