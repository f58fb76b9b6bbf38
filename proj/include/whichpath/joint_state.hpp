#ifndef WHICHPATH_JOINT_STATE_HPP
#define WHICHPATH_JOINT_STATE_HPP

// Pure state of a two-level emitter and the two time-bin modes it radiates
// into during a two-pulse Ramsey sequence, plus the two elementary maps that
// build the sequence: an instantaneous pulse on the atom and spontaneous
// decay purified into a single-photon time bin.
//
// Basis ordering: index = 4*atom + 2*n1 + n2, atom g=0 / e=1, n1,n2 in {0,1}
// the photon numbers of bin 1 and bin 2. The emitted one-photon amplitude is
// taken real-positive (the phase of |1> relative to |0> is a convention; all
// observables below are independent of it).

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

namespace whichpath {

enum class Atom : int { ground = 0, excited = 1 };
enum class TimeBin : int { first = 1, second = 2 };

namespace tolerance {
inline constexpr double identity = 1e-12;
inline constexpr double input = 1e-9;
// Branch weight below which a conditional (pointer) state is undefined.
inline constexpr double degenerate_weight = 1e-20;
}  // namespace tolerance

template <typename Real>
class BasicJointState {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Amplitudes = Eigen::Matrix<Scalar, 8, 1>;

  static constexpr Eigen::Index index(Atom atom, int n1, int n2) {
    return 4 * static_cast<int>(atom) + 2 * n1 + n2;
  }

  BasicJointState() : amplitudes_(Amplitudes::Zero()) {}
  explicit BasicJointState(const Amplitudes& amplitudes) : amplitudes_(amplitudes) {}

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Scalar operator()(Atom atom, int n1, int n2) const { return amplitudes_(index(atom, n1, n2)); }
  Scalar& operator()(Atom atom, int n1, int n2) { return amplitudes_(index(atom, n1, n2)); }

  Real norm() const { return amplitudes_.norm(); }

  // Photonic part (n1, n2) conditioned on the atom, unnormalized; index 2*n1+n2.
  Eigen::Matrix<Scalar, 4, 1> branch(Atom atom) const {
    return amplitudes_.template segment<4>(4 * static_cast<int>(atom));
  }

 private:
  Amplitudes amplitudes_;
};

using JointState = BasicJointState<double>;

template <typename Real>
struct BasicPulseSpec {
  Real area{};
  Real phase{};

  BasicPulseSpec() = default;
  BasicPulseSpec(Real area_, Real phase_) : area(area_), phase(reduce_phase(phase_)) {
    if (!(area_ >= Real(0) && area_ <= std::numbers::pi_v<Real> + Real(tolerance::input)))
      throw std::invalid_argument("pulse area must lie in [0, pi]");
  }

  static Real reduce_phase(Real phase) {
    constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;
    Real r = std::fmod(phase, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r = 0;
    return r;
  }
};

using PulseSpec = BasicPulseSpec<double>;

template <typename Real>
struct BasicDecaySpec {
  Real gamma{1};
  Real duration{};
  TimeBin target_bin{TimeBin::first};

  BasicDecaySpec(Real gamma_, Real duration_, TimeBin bin)
      : gamma(gamma_), duration(duration_), target_bin(bin) {
    if (!(gamma_ > 0)) throw std::invalid_argument("decay rate must be positive");
    if (!(duration_ >= 0)) throw std::invalid_argument("decay duration must be non-negative");
  }
};

using DecaySpec = BasicDecaySpec<double>;

/// Pulse acting on the atom factor:
///   R(A, phi) = cos(A/2) 1 + sin(A/2) (e^{i phi} |e><g| - e^{-i phi} |g><e|).
/// At A = pi/2 this is |g> -> (e^{i phi}|e> + |g>)/sqrt2, |e> -> (|e> - e^{-i phi}|g>)/sqrt2.
template <typename Real>
Eigen::Matrix<std::complex<Real>, 2, 2> pulse_matrix(const BasicPulseSpec<Real>& pulse) {
  using C = std::complex<Real>;
  const Real c = std::cos(pulse.area / 2);
  const Real s = std::sin(pulse.area / 2);
  const C phase = std::polar(Real(1), pulse.phase);
  Eigen::Matrix<C, 2, 2> u;
  // rows/cols: 0 = g, 1 = e
  u << C(c), -s * std::conj(phase),
       s * phase, C(c);
  return u;
}

template <typename Real = double>
BasicJointState<Real> initial_ground() {
  BasicJointState<Real> state;
  state(Atom::ground, 0, 0) = 1;
  return state;
}

namespace detail {
template <typename Real>
void require_normalized(const BasicJointState<Real>& state) {
  if (std::abs(state.norm() - Real(1)) > Real(tolerance::input))
    throw std::invalid_argument("joint state is not normalized");
}
}  // namespace detail

template <typename Real>
BasicJointState<Real> apply_pulse(const BasicJointState<Real>& state,
                                  const BasicPulseSpec<Real>& pulse) {
  detail::require_normalized(state);
  const auto u = pulse_matrix(pulse);
  BasicJointState<Real> out;
  for (int n1 = 0; n1 < 2; ++n1) {
    for (int n2 = 0; n2 < 2; ++n2) {
      const auto g = state(Atom::ground, n1, n2);
      const auto e = state(Atom::excited, n1, n2);
      out(Atom::ground, n1, n2) = u(0, 0) * g + u(0, 1) * e;
      out(Atom::excited, n1, n2) = u(1, 0) * g + u(1, 1) * e;
    }
  }
  return out;
}

/// Spontaneous decay for `duration`, the emitted photon going into `target_bin`:
///   alpha|e,0> -> alpha e^{-gamma t/2} |e,0> + alpha sqrt(1 - e^{-gamma t}) |g,1>.
/// The target bin must be empty on the excited branch (one photon per bin).
///
/// The bin holds a single temporal mode. If the ground branch already carries
/// a photon in the target bin, it must have been radiated by the same excited
/// amplitude (|g,1> = r alpha|e,0> with r >= 0); the decay then continues that
/// wavepacket and the bin mode is redefined as the longer packet, so that
/// decay(t1) followed by decay(t2) equals decay(t1 + t2).
template <typename Real>
BasicJointState<Real> apply_decay(const BasicJointState<Real>& state,
                                  const BasicDecaySpec<Real>& decay) {
  detail::require_normalized(state);
  const Real x = decay.gamma * decay.duration;
  const Real keep = std::exp(-x / 2);
  const Real emitted_fraction = -std::expm1(-x);
  const bool first = decay.target_bin == TimeBin::first;

  BasicJointState<Real> out = state;
  for (int other = 0; other < 2; ++other) {
    const int n1_full = first ? 1 : other;
    const int n2_full = first ? other : 1;
    if (state(Atom::excited, n1_full, n2_full) != std::complex<Real>(0))
      throw std::invalid_argument("decay into a time bin already populated on the excited branch");
    const int n1_empty = first ? 0 : other;
    const int n2_empty = first ? other : 0;
    const auto alpha = state(Atom::excited, n1_empty, n2_empty);
    const auto photon = state(Atom::ground, n1_full, n2_full);
    if (alpha == std::complex<Real>(0)) continue;

    Real r = 0;
    if (photon != std::complex<Real>(0)) {
      const auto ratio = photon / alpha;
      if (ratio.real() <= 0 || std::abs(ratio.imag()) > Real(tolerance::input) * std::abs(ratio))
        throw std::invalid_argument("time bin already holds a photon from a different wavepacket");
      r = ratio.real();
    }
    out(Atom::excited, n1_empty, n2_empty) = alpha * keep;
    out(Atom::ground, n1_full, n2_full) = alpha * std::sqrt(r * r + emitted_fraction);
  }
  return out;
}

template <typename Real>
Real excited_population(const BasicJointState<Real>& state) {
  return state.branch(Atom::excited).squaredNorm();
}

/// <sigma_-> = sum over photon configurations of conj(<g,n|psi>) <e,n|psi>.
template <typename Real>
std::complex<Real> dipole(const BasicJointState<Real>& state) {
  return state.branch(Atom::ground).dot(state.branch(Atom::excited));
}

template <typename Real>
struct BasicPointerStates {
  using Photonic = Eigen::Matrix<std::complex<Real>, 4, 1>;
  Real excited_weight{};
  std::optional<Photonic> ground;
  std::optional<Photonic> excited;

  bool degenerate() const { return !ground || !excited; }

  /// <phi_e|phi_g>; empty when either branch is undefined.
  std::optional<std::complex<Real>> overlap() const {
    if (degenerate()) return std::nullopt;
    return excited->dot(*ground);
  }
};

using PointerStates = BasicPointerStates<double>;

template <typename Real>
BasicPointerStates<Real> pointer_states(const BasicJointState<Real>& state) {
  BasicPointerStates<Real> out;
  const auto g = state.branch(Atom::ground);
  const auto e = state.branch(Atom::excited);
  const Real wg = g.squaredNorm();
  const Real we = e.squaredNorm();
  out.excited_weight = we / (wg + we);
  if (wg > Real(tolerance::degenerate_weight)) out.ground = g / std::sqrt(wg);
  if (we > Real(tolerance::degenerate_weight)) out.excited = e / std::sqrt(we);
  return out;
}

/// sqrt(p_e)|e, phi_e> + sqrt(1-p_e)|g, phi_g>; requires both branches defined.
template <typename Real>
BasicJointState<Real> reconstruct(const BasicPointerStates<Real>& pointers) {
  if (pointers.degenerate()) throw std::invalid_argument("cannot reconstruct from degenerate pointer states");
  typename BasicJointState<Real>::Amplitudes a;
  a.template segment<4>(0) = std::sqrt(1 - pointers.excited_weight) * *pointers.ground;
  a.template segment<4>(4) = std::sqrt(pointers.excited_weight) * *pointers.excited;
  return BasicJointState<Real>(a);
}

/// |<a|b>|, the phase-insensitive fidelity used to compare states.
template <typename Real>
Real overlap_modulus(const BasicJointState<Real>& a, const BasicJointState<Real>& b) {
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace whichpath

#endif  // WHICHPATH_JOINT_STATE_HPP
