#ifndef WHICHPATH_RAMSEY_HPP
#define WHICHPATH_RAMSEY_HPP

// Closed-form which-path observables of the two-pulse sequence
//   |g> --pi/2(0)--> decay for delta_t into bin 1 --pi/2(phi_r)--> ...
// evaluated twice: from the closed-form expressions and by evolving a
// JointState. `full_report` runs both and records their discrepancy.

#include <complex>
#include <optional>

#include "whichpath/joint_state.hpp"

namespace whichpath {

struct RamseyConfig {
  double gamma = 1.0;
  double delta_t = 0.0;
  double phi_r = 0.0;
  double tau_p = 61.76;  // 12.5 ns in units of a 202.4 ps lifetime

  RamseyConfig() = default;
  RamseyConfig(double gamma_, double delta_t_, double phi_r_, double tau_p_ = 61.76);

  double decay_exponent() const { return gamma * delta_t; }
  void validate() const;
};

// Both routes report these; `w_plus` is empty when the state after the second
// pulse has p_e in {0, 1} and the overlap of the pointer states is undefined.
struct RouteValues {
  double pe_minus = 0;
  double pe_plus = 0;
  double delta_p = 0;
  std::optional<double> w_minus;     // empty only when p_e^- underflows on the evolved route
  std::complex<double> sigma_minus;  // <sigma_-> just before the second pulse
  std::complex<double> sigma_plus;   // <sigma_-> just after it
  std::optional<std::complex<double>> w_plus;
};

struct WhichPathReport {
  RouteValues formula;
  RouteValues evolved;
  double max_discrepancy = 0;

  double pe_minus() const { return formula.pe_minus; }
  double pe_plus() const { return formula.pe_plus; }
  double delta_p() const { return formula.delta_p; }
  double w_minus() const { return *formula.w_minus; }
  const std::optional<std::complex<double>>& w_plus() const { return formula.w_plus; }

  /// 1 - w^- and 1 - |w^+|.
  double wp_before() const { return 1.0 - *formula.w_minus; }
  std::optional<double> wp_after() const;
};

double pe_minus(const RamseyConfig& cfg);
double w_minus(const RamseyConfig& cfg);
/// Dipole before the second pulse, w^- sqrt(p_e^-(1-p_e^-)); real for this sequence.
double sigma_minus(const RamseyConfig& cfg);
/// Excited-population change during the second pulse.
double absorption(const RamseyConfig& cfg);
double pe_plus(const RamseyConfig& cfg);
/// <phi_e^+|phi_g^+>; empty when p_e^+ is 0 or 1.
std::optional<std::complex<double>> w_plus(const RamseyConfig& cfg);
/// <sigma_-> right after the second pulse, sqrt(p_e^+(1-p_e^+)) conj(w^+), valid
/// also at the degenerate points.
std::complex<double> sigma_plus(const RamseyConfig& cfg);

/// |p(1-p)|w+|^2 - (1/2-p^-)^2 - p^-(1-p^-)(w^-)^2 sin^2 phi_r| evaluated with
/// the closed forms. Infinity when w^+ is undefined.
double check_eq7(const RamseyConfig& cfg);

/// |w^+| from the before/after relation with p_e^- and w^- treated as free
/// parameters; p_e^+ = 1/2 + sqrt(p^-(1-p^-)) w^- cos phi_r.
std::optional<double> w_plus_from_relation(double pe_minus, double w_minus, double phi_r);

/// Balanced interferometer (p_e^- = 1/2):
///   |w^+| = w^- sin phi / sqrt(1 - (w^-)^2 cos^2 phi).
/// Empty when the denominator vanishes.
std::optional<double> w_plus_balanced(double w_minus, double phi_r);

/// The sequence evolved with JointState: state just before and after the second pulse.
struct RamseyStates {
  JointState before;
  JointState after;
};
RamseyStates evolve_sequence(const RamseyConfig& cfg);

RouteValues formula_route(const RamseyConfig& cfg);
RouteValues evolved_route(const RamseyConfig& cfg);
WhichPathReport full_report(const RamseyConfig& cfg);

/// Largest absolute difference between two routes over p_e^±, delta_p, w^-,
/// sigma^± and w^±; infinity if exactly one of them flags w^+ undefined.
double route_discrepancy(const RouteValues& a, const RouteValues& b);

}  // namespace whichpath

#endif  // WHICHPATH_RAMSEY_HPP
