#include "whichpath/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace whichpath {

RamseyConfig::RamseyConfig(double gamma_, double delta_t_, double phi_r_, double tau_p_)
    : gamma(gamma_), delta_t(delta_t_), phi_r(phi_r_), tau_p(tau_p_) {
  validate();
}

void RamseyConfig::validate() const {
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  if (!(delta_t >= 0)) throw std::invalid_argument("delta_t must be non-negative");
  if (!std::isfinite(phi_r)) throw std::invalid_argument("phi_r must be finite");
  if (!(tau_p > delta_t)) throw std::invalid_argument("tau_p must exceed delta_t");
}

std::optional<double> WhichPathReport::wp_after() const {
  if (!formula.w_plus) return std::nullopt;
  return 1.0 - std::abs(*formula.w_plus);
}

namespace {

bool degenerate(double p) {
  return p <= tolerance::degenerate_weight || 1.0 - p <= tolerance::degenerate_weight;
}

}  // namespace

double pe_minus(const RamseyConfig& cfg) { return std::exp(-cfg.decay_exponent()) / 2; }

double w_minus(const RamseyConfig& cfg) { return 1.0 / std::sqrt(2.0 * (1.0 - pe_minus(cfg))); }

double sigma_minus(const RamseyConfig& cfg) {
  const double p = pe_minus(cfg);
  return w_minus(cfg) * std::sqrt(p * (1.0 - p));
}

double absorption(const RamseyConfig& cfg) {
  return 0.5 - pe_minus(cfg) + sigma_minus(cfg) * std::cos(cfg.phi_r);
}

double pe_plus(const RamseyConfig& cfg) {
  return (1.0 + std::exp(-cfg.decay_exponent() / 2) * std::cos(cfg.phi_r)) / 2;
}

namespace {

// e^{-i phi}(1 - e^{-x} + i e^{-x/2} sin phi) / 2, i.e. sqrt(p(1-p)) w^+.
std::complex<double> scaled_w_plus(const RamseyConfig& cfg) {
  const double x = cfg.decay_exponent();
  const std::complex<double> inner(-std::expm1(-x), std::exp(-x / 2) * std::sin(cfg.phi_r));
  return std::polar(1.0, -cfg.phi_r) * inner / 2.0;
}

}  // namespace

std::optional<std::complex<double>> w_plus(const RamseyConfig& cfg) {
  const double p = pe_plus(cfg);
  if (degenerate(p)) return std::nullopt;
  return scaled_w_plus(cfg) / std::sqrt((1.0 - p) * p);
}

std::complex<double> sigma_plus(const RamseyConfig& cfg) { return std::conj(scaled_w_plus(cfg)); }

double check_eq7(const RamseyConfig& cfg) {
  const auto w = w_plus(cfg);
  if (!w) return std::numeric_limits<double>::infinity();
  const double pp = pe_plus(cfg);
  const double pm = pe_minus(cfg);
  const double wm = w_minus(cfg);
  const double s = std::sin(cfg.phi_r);
  const double lhs = pp * (1.0 - pp) * std::norm(*w);
  const double rhs = (0.5 - pm) * (0.5 - pm) + pm * (1.0 - pm) * wm * wm * s * s;
  return std::abs(lhs - rhs);
}

std::optional<double> w_plus_from_relation(double pe_minus_, double w_minus_, double phi_r) {
  const double coherence = std::sqrt(pe_minus_ * (1.0 - pe_minus_)) * w_minus_;
  const double pp = 0.5 + coherence * std::cos(phi_r);
  if (degenerate(pp)) return std::nullopt;
  const double s = std::sin(phi_r);
  const double rhs = (0.5 - pe_minus_) * (0.5 - pe_minus_) + coherence * coherence * s * s;
  return std::sqrt(rhs / (pp * (1.0 - pp)));
}

std::optional<double> w_plus_balanced(double w_minus_, double phi_r) {
  if (!(w_minus_ > 0 && w_minus_ <= 1.0 + tolerance::input))
    throw std::invalid_argument("w_minus must lie in (0, 1]");
  const double c = std::cos(phi_r);
  const double denom = 1.0 - w_minus_ * w_minus_ * c * c;
  if (denom <= tolerance::degenerate_weight) return std::nullopt;
  return w_minus_ * std::abs(std::sin(phi_r)) / std::sqrt(denom);
}

RamseyStates evolve_sequence(const RamseyConfig& cfg) {
  constexpr double half_pi = std::numbers::pi / 2;
  JointState state = apply_pulse(initial_ground(), PulseSpec(half_pi, 0.0));
  state = apply_decay(state, DecaySpec(cfg.gamma, cfg.delta_t, TimeBin::first));
  return {state, apply_pulse(state, PulseSpec(half_pi, cfg.phi_r))};
}

RouteValues formula_route(const RamseyConfig& cfg) {
  RouteValues r;
  r.pe_minus = pe_minus(cfg);
  r.pe_plus = pe_plus(cfg);
  r.delta_p = absorption(cfg);
  r.w_minus = w_minus(cfg);
  r.sigma_minus = sigma_minus(cfg);
  r.sigma_plus = sigma_plus(cfg);
  r.w_plus = w_plus(cfg);
  return r;
}

RouteValues evolved_route(const RamseyConfig& cfg) {
  const auto [before, after] = evolve_sequence(cfg);
  RouteValues r;
  r.pe_minus = excited_population(before);
  r.pe_plus = excited_population(after);
  r.delta_p = r.pe_plus - r.pe_minus;
  r.sigma_minus = dipole(before);
  r.sigma_plus = dipole(after);
  const auto w_before = pointer_states(before).overlap();
  if (w_before) r.w_minus = w_before->real();
  r.w_plus = pointer_states(after).overlap();
  return r;
}

double route_discrepancy(const RouteValues& a, const RouteValues& b) {
  if (a.w_plus.has_value() != b.w_plus.has_value()) return std::numeric_limits<double>::infinity();
  double d = std::max({std::abs(a.pe_minus - b.pe_minus), std::abs(a.pe_plus - b.pe_plus),
                       std::abs(a.delta_p - b.delta_p),
                       std::abs(a.sigma_minus - b.sigma_minus),
                       std::abs(a.sigma_plus - b.sigma_plus)});
  if (a.w_minus && b.w_minus) d = std::max(d, std::abs(*a.w_minus - *b.w_minus));
  if (a.w_plus) d = std::max(d, std::abs(*a.w_plus - *b.w_plus));
  return d;
}

WhichPathReport full_report(const RamseyConfig& cfg) {
  cfg.validate();
  WhichPathReport report;
  report.formula = formula_route(cfg);
  report.evolved = evolved_route(cfg);
  report.max_discrepancy = route_discrepancy(report.formula, report.evolved);
  return report;
}

}  // namespace whichpath
