#ifndef WHICHPATH_COLLISION_HPP
#define WHICHPATH_COLLISION_HPP

// Brute-force collision model: time is cut into steps of length dt and at each
// step the atom meets a fresh, empty field mode through the exact
// beam-splitter unitary
//   |e,0> -> sqrt(1 - gamma dt)|e,0> + sqrt(gamma dt)|g,1>,   |g,0> -> |g,0>.
// Pulses are instantaneous and act before the collision of their step.
//
// Between two pulses the atom can radiate at most one photon, so the field of
// each pulse-free segment is {vacuum} + {one photon in step k}. A segment is
// stored as its local propagator from the atomic basis states; the global
// pure state is the chain of these propagators linked through the atom.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "whichpath/joint_state.hpp"
#include "whichpath/ramsey.hpp"

namespace whichpath {

struct CollisionConfig {
  double gamma = 1.0;
  double dt = 1e-3;
  std::size_t n_steps_bin1 = 0;
  std::size_t n_steps_bin2 = 0;
  std::vector<std::pair<std::size_t, PulseSpec>> pulses;  // (step index, pulse)
  int max_photons_tracked = 2;

  std::size_t total_steps() const { return n_steps_bin1 + n_steps_bin2; }
  void validate() const;
};

/// pi/2 pulses at step 0 and at step delta_t/dt (phase phi_r), followed by
/// `tail`/gamma of free decay. Throws if delta_t is not a multiple of dt.
CollisionConfig ramsey_collision_config(const RamseyConfig& cfg, double dt, double tail = 8.0);

struct SegmentRecord {
  std::size_t first_step = 0;
  std::size_t steps = 0;
  Eigen::Matrix2cd rho_start;  // reduced atom state after the segment's pulse
  // Local propagator from atomic input b (column; 0 = g, 1 = e):
  Eigen::Matrix2cd vacuum;      // (a, b): atom a, no photon in this segment
  Eigen::MatrixX2cd photon;     // (k, b): atom g, photon in step first_step + k
};

struct ModeRecord {
  double gamma = 1.0;
  double dt = 1e-3;
  Eigen::VectorXcd initial_atom;           // atom right after a pulse at step 0
  Eigen::ArrayXd time;                     // start of each step
  Eigen::ArrayXd excited_population;       // before each collision
  Eigen::ArrayXcd dipole;                  // <sigma_-> before each collision
  Eigen::ArrayXcd mode_amplitude;          // <b_k> of the mode radiated at step k
  Eigen::ArrayXd flux;                     // <b_k^dag b_k>
  std::vector<SegmentRecord> segments;
  std::vector<std::pair<std::size_t, PulseSpec>> pulses;
  double norm_drift = 0;
};

/// Runs the collision model. Throws std::runtime_error("sector overflow") if
/// the pulse sequence could put more photons in flight than tracked.
ModeRecord run_collision(const CollisionConfig& cfg);

/// Two-bin reduction of a record with pulses at step 0 and at `boundary`:
/// each bin's field is projected on {vacuum, the one-photon wavepacket the
/// excited atom radiated into it}.
struct CoarseGrained {
  JointState before;  // just before the second pulse (bin 2 empty)
  JointState after;   // just after it
  double pe_minus = 0;
  double pe_plus = 0;
  std::optional<double> w_minus;
  std::optional<std::complex<double>> w_plus;
  double v1 = 0;
  std::optional<double> v2;
  double leakage = 0;          // weight outside the projected subspace
  double packet_fidelity = 0;  // |<radiated packet | sqrt(gamma) e^{-gamma t/2}>|^2 on bin 1
};

CoarseGrained coarse_grain_bins(const ModeRecord& record, double boundary);

enum class OracleQuantity { pe_plus, w_plus_squared, v1, v2 };

std::string to_string(OracleQuantity q);

/// Oracle value of `q` for the Ramsey sequence at step size dt.
double oracle_value(const RamseyConfig& cfg, double dt, OracleQuantity q);

/// Closed-form target of `q` (from the analytic modules).
double closed_form_value(const RamseyConfig& cfg, OracleQuantity q);

struct ConvergenceReport {
  std::vector<double> steps;
  std::vector<double> values;
  std::vector<double> errors;           // |value - target|
  std::vector<double> observed_orders;  // between consecutive levels; +inf once exact
  double target = 0;
  double extrapolated = 0;              // polynomial extrapolation to dt = 0
  double extrapolated_error = 0;
  bool monotone = true;

  double min_order() const;
};

/// Runs the oracle on every dt in `refinements` (at least 3) and extrapolates.
ConvergenceReport richardson_check(const RamseyConfig& cfg, const std::vector<double>& refinements,
                                   OracleQuantity q);

/// Neville extrapolation of values(h) to h = 0.
double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& values);

}  // namespace whichpath

#endif  // WHICHPATH_COLLISION_HPP
