#include "whichpath/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

#include "whichpath/numerics.hpp"

namespace whichpath {

void SpectralDiffusionSpec::validate() const {
  if (!(delta >= 0)) throw std::invalid_argument("spectral wandering width must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
}

void SpinModelSpec::validate() const {
  if (!(w >= 0)) throw std::invalid_argument("spin decoherence rate must be >= 0");
  if (!(tau_p > 0)) throw std::invalid_argument("tau_p must be positive");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("emission probability must lie in [0, 1]");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
}

double diffusion_damping_closed(const RamseyConfig& cfg, double delta) {
  const double spread = delta * cfg.gamma * cfg.delta_t;
  return std::exp(-spread * spread / 2);
}

namespace {

// cos(phi + dw delta_t) for dw ~ N(0, delta gamma).
double diffusion_phase_sample(const RamseyConfig& cfg, double delta, double phi, SampleStream& s) {
  std::normal_distribution<double> detuning(0.0, delta * cfg.gamma);
  return std::cos(phi + detuning(s) * cfg.delta_t);
}

}  // namespace

Estimate diffusion_damping(const RamseyConfig& cfg, const SpectralDiffusionSpec& spec, unsigned threads) {
  cfg.validate();
  spec.validate();
  if (spec.mode == Averaging::closed_form || spec.delta == 0)
    return {diffusion_damping_closed(cfg, spec.delta), 0.0, 0};
  return monte_carlo_mean(spec.n_samples, spec.seed, threads, [&](SampleStream& s) {
    return diffusion_phase_sample(cfg, spec.delta, 0.0, s);
  });
}

Estimate absorption_with_diffusion(const RamseyConfig& cfg, const SpectralDiffusionSpec& spec,
                                   unsigned threads) {
  cfg.validate();
  spec.validate();
  const double offset = 0.5 - pe_minus(cfg);
  const double contrast = sigma_minus(cfg);
  if (spec.mode == Averaging::closed_form || spec.delta == 0)
    return {offset + diffusion_damping_closed(cfg, spec.delta) * contrast * std::cos(cfg.phi_r), 0.0, 0};
  return monte_carlo_mean(spec.n_samples, spec.seed, threads, [&](SampleStream& s) {
    return offset + contrast * diffusion_phase_sample(cfg, spec.delta, cfg.phi_r, s);
  });
}

double peak_shift_with_diffusion(const SpectralDiffusionSpec& spec, double gamma) {
  spec.validate();
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  const double rate = spec.delta * gamma;
  // d/d(delta_t) of 1/2 - a^2/2 + D a/2 with a = e^{-gamma t/2}, D = e^{-rate^2 t^2/2}
  auto slope = [&](double t) {
    const double a = std::exp(-gamma * t / 2);
    const double damping = std::exp(-rate * rate * t * t / 2);
    return gamma * a * a / 2 - damping * a / 2 * (rate * rate * t + gamma / 2);
  };
  const double step = 0.01 / gamma;
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double t = i * step;
    if (slope(t) <= 0) return bisect(slope, prev, t);
    prev = t;
  }
  throw std::runtime_error("absorption maximum not found");
}

void set_precession_time(OverhauserSample& sample, double t) {
  const double half = sample.omega * t / 2;
  const double c = std::cos(half);
  const double s = std::sin(half);
  sample.c_t = {c, -std::cos(sample.theta) * s};
  sample.s_t = std::polar(std::sin(sample.theta) * s, -sample.phi);
}

OverhauserSample sample_overhauser(const SpinModelSpec& spec, SampleStream& stream, double t) {
  std::normal_distribution<double> component(0.0, 1.0);
  Eigen::Vector3d field;
  field << component(stream), component(stream), component(stream);
  field *= spec.w;

  OverhauserSample sample;
  sample.omega = field.norm();
  if (sample.omega > 0) {
    sample.theta = std::acos(std::clamp(field.z() / sample.omega, -1.0, 1.0));
    sample.phi = std::atan2(field.y(), field.x());
    if (sample.phi < 0) sample.phi += 2 * std::numbers::pi;
  }
  set_precession_time(sample, t);
  return sample;
}

double spin_correlation_closed(double w, double t) {
  const double x2 = w * w * t * t;
  return (1.0 + 2.0 * std::exp(-x2 / 2) * (1.0 - x2)) / 3.0;
}

Estimate spin_correlation_mc(const SpinModelSpec& spec, double t, unsigned threads) {
  spec.validate();
  return monte_carlo_mean(spec.n_samples, spec.seed, threads, [&](SampleStream& s) {
    const OverhauserSample sample = sample_overhauser(spec, s, t);
    return std::norm(sample.c_t) - std::norm(sample.s_t);
  });
}

namespace {

enum class Circular { right, left };

// Single wavepacket sqrt(1-p)|0> + sqrt(p)|1_pol> in the {vacuum, H, V} basis,
// with |1_R> = (|H> - i|V>)/sqrt2 and |1_L> = (|H> + i|V>)/sqrt2.
Eigen::Vector3cd wavepacket(double p, Circular pol) {
  const double amp = std::sqrt(p / 2);
  const std::complex<double> v = pol == Circular::right ? std::complex<double>(0, -amp)
                                                        : std::complex<double>(0, amp);
  Eigen::Vector3cd packet;
  packet << std::sqrt(1 - p), amp, v;
  return packet;
}

// <b_V> on a single wavepacket.
std::complex<double> v_amplitude(const Eigen::Vector3cd& packet) { return std::conj(packet(0)) * packet(2); }

}  // namespace

std::complex<double> homodyne_cross_term(const OverhauserSample& sample, double p, SpinInit init) {
  // up couples to right-circular light, down to left-circular.
  const Circular first = init == SpinInit::up ? Circular::right : Circular::left;
  const Circular kept = first;
  const Circular flipped = first == Circular::right ? Circular::left : Circular::right;
  const auto b1 = v_amplitude(wavepacket(p, first));
  // After tau_p the spin is C|init> + S|flipped> (up) or C*|down> + S*|up> (down).
  const double w_kept = std::norm(sample.c_t);
  const double w_flipped = std::norm(sample.s_t);
  return w_kept * std::conj(b1) * v_amplitude(wavepacket(p, kept)) +
         w_flipped * std::conj(b1) * v_amplitude(wavepacket(p, flipped));
}

Estimate spin_homodyne_visibility(const SpinModelSpec& spec, Averaging mode, unsigned threads) {
  spec.validate();
  if (mode == Averaging::closed_form)
    return {std::abs(spin_correlation_closed(spec.w, spec.tau_p)) * (1 - spec.p), 0.0, 0};
  if (spec.p == 0) throw std::domain_error("no emission: visibility undefined for p = 0");

  const Estimate cross = monte_carlo_mean(spec.n_samples, spec.seed, threads, [&](SampleStream& s) {
    const OverhauserSample sample = sample_overhauser(spec, s, spec.tau_p);
    const auto up = homodyne_cross_term(sample, spec.p, SpinInit::up);
    const auto down = homodyne_cross_term(sample, spec.p, SpinInit::down);
    if (std::abs(up - down) > 1e-12) throw std::logic_error("spin-up and spin-down counts differ");
    return up.real();
  });

  // <b1^dag b1> = <b2^dag b2> = p/2; interferometer phase chosen to maximize contrast.
  const double direct = spec.p;
  const double mu3 = direct + 2 * std::abs(cross.value);
  const double mu4 = direct - 2 * std::abs(cross.value);
  return {std::abs(mu3 - mu4) / (mu3 + mu4), 2 * cross.std_error / spec.p, cross.samples};
}

VisibilityTrace apply_spin_factor(VisibilityTrace trace, const SpinModelSpec& spec) {
  spec.validate();
  const double factor = std::abs(spin_correlation_closed(spec.w, spec.tau_p));
  trace.v *= factor;
  trace.v1 *= factor;
  if (trace.v2) *trace.v2 *= factor;
  return trace;
}

SpinLifetime infer_spin_lifetime(double observed_ratio, double tau_p) {
  if (!(tau_p > 0)) throw std::invalid_argument("tau_p must be positive");
  if (!(observed_ratio > 1.0 / 3.0 && observed_ratio <= 1.0))
    throw std::domain_error("ratio outside the invertible branch (1/3, 1]");
  if (observed_ratio == 1.0) return {0.0, false};
  const double x = bisect([&](double wt) { return spin_correlation_closed(wt, 1.0) - observed_ratio; },
                          0.0, 1.0);
  return {x / tau_p, x > 0.99};
}

}  // namespace whichpath
