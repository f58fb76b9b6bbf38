#ifndef WHICHPATH_EMISSION_FIELD_HPP
#define WHICHPATH_EMISSION_FIELD_HPP

// Time-resolved emitted field for the two-pulse sequence with instantaneous
// pulses at t = 0 and t = delta_t. Amplitudes are in units of sqrt(gamma),
// intensities in units of gamma, times in the units of RamseyConfig.
//
// Bin convention: t < delta_t belongs to bin 1, t >= delta_t to bin 2
// (the boundary sample is already after the second pulse).

#include <optional>

#include <Eigen/Core>

#include "whichpath/ramsey.hpp"

namespace whichpath {

enum class Route { formula, state_evolution };

struct TemporalProfile {
  Eigen::ArrayXd time;
  Eigen::ArrayXcd amplitude;  // <b(t)>
  Eigen::ArrayXd intensity;   // <b^dag(t) b(t)>
  double bin_boundary = 0;
};

struct MziCounts {
  Eigen::ArrayXd mu3;
  Eigen::ArrayXd mu4;
};

struct VisibilityTrace {
  Eigen::ArrayXd time;
  Eigen::ArrayXd v;
  // false where the intensity vanishes and v is undefined; v is 0 there.
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
  double v1 = 0.5;
  std::optional<double> v2;  // empty when nothing is emitted into bin 2
  double phi_hom = 0;
  double bin_boundary = 0;
};

/// `samples` uniform points on [0, delta_t + span/gamma].
Eigen::ArrayXd default_grid(const RamseyConfig& cfg, Eigen::Index samples = 2001, double span = 8.0);

Eigen::ArrayXcd amplitude_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid,
                                  Route route = Route::formula);
Eigen::ArrayXd intensity_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid,
                                 Route route = Route::formula);
TemporalProfile temporal_profile(const RamseyConfig& cfg, const Eigen::ArrayXd& grid,
                                 Route route = Route::formula);

/// Second-bin amplitude factor multiplying sqrt(gamma) e^{-gamma(t-dt)/2 + i phi}/2.
std::complex<double> second_bin_bracket(const RamseyConfig& cfg);

/// Output-port counts of a balanced beam splitter fed by two independent copies
/// (<b1^dag b2> = conj(<b1>) <b2>) with interferometer phase phi_hom.
MziCounts mzi_counts(const TemporalProfile& a, const TemporalProfile& b, double phi_hom);

/// v(t) = |mu3 - mu4| / (mu3 + mu4) from two identical copies of the profile;
/// plateaus v1 = 1/2 and v2 = |w^+|^2 (1 - p_e^+) from the closed forms.
VisibilityTrace visibility_trace(const RamseyConfig& cfg, const Eigen::ArrayXd& grid,
                                 double phi_hom = 0.0);

/// Piecewise closed form: 1/2 on bin 1, |w^+|^2 (1 - p_e^+) on bin 2.
Eigen::ArrayXd analytic_visibility(const RamseyConfig& cfg, const Eigen::ArrayXd& grid);

/// v2 = |sigma^+|^2 / p_e^+, i.e. |w^+|^2 (1 - p_e^+); empty when p_e^+ = 0.
std::optional<double> second_plateau(const RamseyConfig& cfg);

/// v2 / v1; throws when v1 = 0, empty when v2 is undefined.
std::optional<double> plateau_ratio(const VisibilityTrace& trace);

/// Inverts v2/v1 = 2|w^+|^2 (1 - p_e^+) for |w^+|.
double w_plus_from_ratio(double ratio, double pe_plus);

/// Mean of the sampled visibility over each bin (valid samples only).
struct MeasuredPlateaus {
  std::optional<double> v1;
  std::optional<double> v2;
};
MeasuredPlateaus measured_plateaus(const VisibilityTrace& trace);

/// Photon number radiated into one bin, by trapezoid quadrature of the
/// intensity on `samples` points over the bin (bin 2 truncated at span/gamma).
double emitted_photons(const RamseyConfig& cfg, TimeBin bin, Eigen::Index samples = 2001,
                       double span = 8.0);

}  // namespace whichpath

#endif  // WHICHPATH_EMISSION_FIELD_HPP
