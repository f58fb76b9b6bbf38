#include "whichpath/emission_field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "whichpath/numerics.hpp"

namespace whichpath {

namespace {

// Intensities at or below this (in units of gamma) are treated as zero.
constexpr double kDarkIntensity = 1e-15;

void require_grid(const Eigen::ArrayXd& grid) {
  if (!is_sorted(grid)) throw std::invalid_argument("time grid must be sorted");
  if (grid.size() > 0 && grid(0) < 0) throw std::invalid_argument("time grid must start at t >= 0");
}

struct Sample {
  std::complex<double> amplitude;
  double intensity;
};

Sample formula_sample(const RamseyConfig& cfg, double t, TimeBin bin) {
  const double g = cfg.gamma;
  const double root_g = std::sqrt(g);
  if (bin == TimeBin::first) {
    return {root_g * std::exp(-g * t / 2) / 2, g * std::exp(-g * t) / 2};
  }
  const double tau = t - cfg.delta_t;
  const double x = cfg.decay_exponent();
  const auto bracket = second_bin_bracket(cfg);
  const auto amplitude = root_g * std::polar(std::exp(-g * tau / 2), cfg.phi_r) / 2.0 * bracket;
  const double a = std::exp(-x / 2);
  const double intensity_bracket =
      (-std::expm1(-x) + std::norm(1.0 + std::polar(a, -cfg.phi_r))) / 2;
  return {amplitude, g * std::exp(-g * tau) / 2 * intensity_bracket};
}

Sample evolved_sample(const RamseyConfig& cfg, const RamseyStates& states, double t, TimeBin bin) {
  const double root_g = std::sqrt(cfg.gamma);
  JointState state;
  if (bin == TimeBin::first) {
    state = apply_pulse(initial_ground(), PulseSpec(std::numbers::pi / 2, 0.0));
    state = apply_decay(state, DecaySpec(cfg.gamma, t, TimeBin::first));
  } else {
    state = apply_decay(states.after, DecaySpec(cfg.gamma, t - cfg.delta_t, TimeBin::second));
  }
  // input-output: <b(t)> = sqrt(gamma) <sigma_->_t, <b^dag b> = gamma p_e(t)
  return {root_g * dipole(state), cfg.gamma * excited_population(state)};
}

template <typename Fn>
void for_each_sample(const RamseyConfig& cfg, const Eigen::ArrayXd& grid, Route route, Fn&& fn) {
  cfg.validate();
  require_grid(grid);
  const RamseyStates states = route == Route::state_evolution ? evolve_sequence(cfg) : RamseyStates{};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double t = grid(i);
    const TimeBin bin = t < cfg.delta_t ? TimeBin::first : TimeBin::second;
    fn(i, route == Route::formula ? formula_sample(cfg, t, bin) : evolved_sample(cfg, states, t, bin));
  }
}

}  // namespace

Eigen::ArrayXd default_grid(const RamseyConfig& cfg, Eigen::Index samples, double span) {
  if (samples < 2) throw std::invalid_argument("grid needs at least two samples");
  return Eigen::ArrayXd::LinSpaced(samples, 0.0, cfg.delta_t + span / cfg.gamma);
}

std::complex<double> second_bin_bracket(const RamseyConfig& cfg) {
  const double x = cfg.decay_exponent();
  const double a = std::exp(-x / 2);
  const auto up = std::polar(a, cfg.phi_r);
  const auto down = std::polar(a, -cfg.phi_r);
  return (-std::expm1(-x) + (1.0 - up) * (1.0 + down)) / 2.0;
}

Eigen::ArrayXcd amplitude_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid, Route route) {
  Eigen::ArrayXcd out(grid.size());
  for_each_sample(cfg, grid, route, [&](Eigen::Index i, const Sample& s) { out(i) = s.amplitude; });
  return out;
}

Eigen::ArrayXd intensity_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid, Route route) {
  Eigen::ArrayXd out(grid.size());
  for_each_sample(cfg, grid, route, [&](Eigen::Index i, const Sample& s) { out(i) = s.intensity; });
  return out;
}

TemporalProfile temporal_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid, Route route) {
  TemporalProfile p;
  p.time = grid;
  p.amplitude.resize(grid.size());
  p.intensity.resize(grid.size());
  p.bin_boundary = cfg.delta_t;
  for_each_sample(cfg, grid, route, [&](Eigen::Index i, const Sample& s) {
    p.amplitude(i) = s.amplitude;
    p.intensity(i) = s.intensity;
  });
  return p;
}

MziCounts mzi_counts(const TemporalProfile& a, const TemporalProfile& b, double phi_hom) {
  if (a.time.size() != b.time.size() || !(a.time == b.time).all())
    throw std::invalid_argument("profiles must share the same time grid");
  const std::complex<double> phase = std::polar(1.0, -phi_hom);
  const Eigen::ArrayXd cross = 2.0 * (phase * a.amplitude.conjugate() * b.amplitude).real();
  const Eigen::ArrayXd direct = a.intensity + b.intensity;
  return {direct + cross, direct - cross};
}

std::optional<double> second_plateau(const RamseyConfig& cfg) {
  const double p = pe_plus(cfg);
  if (p <= tolerance::degenerate_weight) return std::nullopt;
  return std::norm(sigma_plus(cfg)) / p;
}

Eigen::ArrayXd analytic_visibility(const RamseyConfig& cfg, const Eigen::ArrayXd& grid) {
  require_grid(grid);
  const double v2 = second_plateau(cfg).value_or(0.0);
  return (grid < cfg.delta_t).select(Eigen::ArrayXd::Constant(grid.size(), 0.5),
                                     Eigen::ArrayXd::Constant(grid.size(), v2));
}

VisibilityTrace visibility_trace(const RamseyConfig& cfg, const Eigen::ArrayXd& grid, double phi_hom) {
  const TemporalProfile profile = temporal_profile(cfg, grid);
  const MziCounts counts = mzi_counts(profile, profile, phi_hom);
  VisibilityTrace trace;
  trace.time = grid;
  trace.phi_hom = phi_hom;
  trace.bin_boundary = cfg.delta_t;
  trace.valid = profile.intensity > kDarkIntensity * cfg.gamma;
  const Eigen::ArrayXd total = counts.mu3 + counts.mu4;
  trace.v = trace.valid.select((counts.mu3 - counts.mu4).abs() / total, 0.0);
  trace.v1 = 0.5;
  trace.v2 = second_plateau(cfg);
  return trace;
}

std::optional<double> plateau_ratio(const VisibilityTrace& trace) {
  if (trace.v1 == 0) throw std::domain_error("first plateau is zero");
  if (!trace.v2) return std::nullopt;
  return *trace.v2 / trace.v1;
}

double w_plus_from_ratio(double ratio, double pe_plus_) {
  if (!(pe_plus_ < 1)) throw std::domain_error("ratio does not determine w+ at p_e+ = 1");
  return std::sqrt(ratio / (2 * (1 - pe_plus_)));
}

MeasuredPlateaus measured_plateaus(const VisibilityTrace& trace) {
  double sums[2] = {0, 0};
  int counts[2] = {0, 0};
  for (Eigen::Index i = 0; i < trace.time.size(); ++i) {
    if (!trace.valid(i)) continue;
    const int bin = trace.time(i) < trace.bin_boundary ? 0 : 1;
    sums[bin] += trace.v(i);
    ++counts[bin];
  }
  MeasuredPlateaus out;
  if (counts[0] > 0) out.v1 = sums[0] / counts[0];
  if (counts[1] > 0) out.v2 = sums[1] / counts[1];
  return out;
}

double emitted_photons(const RamseyConfig& cfg, TimeBin bin, Eigen::Index samples, double span) {
  cfg.validate();
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  const double lo = bin == TimeBin::first ? 0.0 : cfg.delta_t;
  const double hi = bin == TimeBin::first ? cfg.delta_t : cfg.delta_t + span / cfg.gamma;
  const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(samples, lo, hi);
  Eigen::ArrayXd intensity(samples);
  for (Eigen::Index i = 0; i < samples; ++i) intensity(i) = formula_sample(cfg, t(i), bin).intensity;
  return trapezoid(t, intensity);
}

}  // namespace whichpath
