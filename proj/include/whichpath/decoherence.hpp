#ifndef WHICHPATH_DECOHERENCE_HPP
#define WHICHPATH_DECOHERENCE_HPP

// Ensemble-averaged corrections to the ideal sequence:
//  - Gaussian spectral diffusion of the transition frequency between pulses,
//  - electron-spin precession in a static, isotropically distributed Overhauser
//    field, which reduces the self-homodyne visibility between repetitions.
//
// Spectral wandering widths are in units of gamma; the spin decoherence rate w
// is in inverse units of tau_p.

#include <complex>
#include <cstdint>

#include "whichpath/emission_field.hpp"
#include "whichpath/monte_carlo.hpp"
#include "whichpath/ramsey.hpp"

namespace whichpath {

enum class Averaging { closed_form, monte_carlo };

struct SpectralDiffusionSpec {
  double delta = 0.0;  // wandering width / gamma
  Averaging mode = Averaging::closed_form;
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// e^{-(delta gamma delta_t)^2 / 2}.
double diffusion_damping_closed(const RamseyConfig& cfg, double delta);

/// <cos(dw delta_t)> over dw ~ N(0, delta gamma); closed form or MC per spec.mode.
Estimate diffusion_damping(const RamseyConfig& cfg, const SpectralDiffusionSpec& spec,
                           unsigned threads = 1);

/// <Delta p> = 1/2 - p_e^- + sigma^- <cos(phi_r + dw delta_t)>.
Estimate absorption_with_diffusion(const RamseyConfig& cfg, const SpectralDiffusionSpec& spec,
                                   unsigned threads = 1);

/// Delay maximizing the closed-form <Delta p> at phi_r = 0, found as the first
/// zero of its derivative (bracketed, then bisected). Returns delta_t in the
/// time units of 1/gamma.
double peak_shift_with_diffusion(const SpectralDiffusionSpec& spec, double gamma = 1.0);

struct OverhauserSample {
  double omega = 0;  // precession frequency |Omega|
  double theta = 0;  // polar angle of the field
  double phi = 0;    // azimuth in [0, 2 pi)
  std::complex<double> c_t{1.0, 0.0};
  std::complex<double> s_t{0.0, 0.0};
};

struct SpinModelSpec {
  double w = 0.0;        // std of each Overhauser component (= spin decoherence rate)
  double tau_p = 61.76;  // repetition period
  double p = 0.5;        // emission probability per sequence
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Precession amplitudes after time t for a spin starting in |up>:
///   C_t = cos(Omega t/2) - i cos(theta) sin(Omega t/2),
///   S_t = sin(theta) e^{-i phi} sin(Omega t/2).
void set_precession_time(OverhauserSample& sample, double t);

/// Draws an isotropic Gaussian field (per-component std w) and evaluates the
/// precession amplitudes at time t.
OverhauserSample sample_overhauser(const SpinModelSpec& spec, SampleStream& stream, double t);

/// Merkulov average of <s_z>_t: (1 + 2 e^{-w^2 t^2/2}(1 - w^2 t^2)) / 3.
double spin_correlation_closed(double w, double t);

/// Average of |C_t|^2 - |S_t|^2 over sampled fields.
Estimate spin_correlation_mc(const SpinModelSpec& spec, double t, unsigned threads = 1);

enum class SpinInit { up, down };

/// <b_{V,1}^dag b_{V,2}> for one field configuration: first wavepacket emitted
/// with the initial spin, second one after precessing for tau_p, both read out
/// in V polarization.
std::complex<double> homodyne_cross_term(const OverhauserSample& sample, double p, SpinInit init);

/// Visibility max_phi |mu3 - mu4| / (mu3 + mu4) averaged over the Overhauser
/// ensemble; closed form |C_{tau_p}|(1-p), or the explicit count average.
Estimate spin_homodyne_visibility(const SpinModelSpec& spec, Averaging mode, unsigned threads = 1);

/// Scales v(t) and both plateaus by |C_{tau_p}|.
VisibilityTrace apply_spin_factor(VisibilityTrace trace, const SpinModelSpec& spec);

struct SpinLifetime {
  double w = 0;
  bool near_branch_limit = false;
};

/// Solves C_{tau_p}(w) = observed_ratio for w with w tau_p in [0, 1], where
/// C decreases from 1 to 1/3. Throws std::domain_error outside (1/3, 1].
SpinLifetime infer_spin_lifetime(double observed_ratio, double tau_p);

}  // namespace whichpath

#endif  // WHICHPATH_DECOHERENCE_HPP
