#ifndef WHICHPATH_CONFIG_HPP
#define WHICHPATH_CONFIG_HPP

// Sweep configuration: a YAML document describing what to compute, over which
// parameter grid, and where to write it. The grammar is documented in
// README.md; parse_config rejects unknown keys and reports positions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "whichpath/decoherence.hpp"
#include "whichpath/ramsey.hpp"

namespace whichpath {

enum class Quantity { absorption, wp_before, wp_after, visibility_trace, profiles, spin_mc, diffusion, oracle };

enum class Variable { gamma_delta_t, delta_t, phi_r, gamma, delta, w, w_tau_p, p };

enum class Scale { linear, log };

enum class Format { csv, json };

enum class TimeUnits { gamma, si };

/// 1/gamma of the emitter in picoseconds.
inline constexpr double gamma_inverse_ps = 202.4;

struct Axis {
  Variable variable = Variable::gamma_delta_t;
  double min = 0;
  double max = 0;
  int steps = 1;
  Scale scale = Scale::linear;
  std::vector<double> values;  // explicit values; overrides min/max/steps

  std::vector<double> points() const;
};

struct GridSpec {
  int samples = 2001;
  double span = 8.0;  // in units of 1/gamma past delta_t
};

struct OracleSpec {
  std::vector<double> dt{1e-3, 5e-4, 2.5e-4};
  double tolerance = 1e-2;
  double extrapolation_tolerance = 1e-6;
  double min_order = 0.99;
};

struct SweepSpec {
  Quantity quantity = Quantity::absorption;
  std::vector<Axis> axes;
  RamseyConfig ramsey;
  SpectralDiffusionSpec diffusion;
  SpinModelSpec spin;
  Averaging spin_mode = Averaging::closed_form;  // spin_mc always runs both
  bool spin_factor = false;  // scale visibility traces by |C_{tau_p}|
  GridSpec grid;
  OracleSpec oracle;
  std::uint64_t seed = 1;
  std::string output_path;
  Format format = Format::csv;
  TimeUnits units = TimeUnits::gamma;
  bool timestamp = false;

  /// Semantic checks; throws ConfigError naming the offending key.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::optional<int> line = std::nullopt,
              std::optional<int> column = std::nullopt);

  std::optional<int> line;    // 1-based
  std::optional<int> column;  // 1-based
};

struct ParsedConfig {
  SweepSpec spec;
  std::vector<std::string> warnings;
};

ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Canonical YAML of a fully resolved spec; parsing it back gives the same spec.
std::string to_yaml(const SweepSpec& spec, bool single_line = false);

std::string to_string(Quantity q);
std::string to_string(Variable v);
std::string to_string(Format f);

}  // namespace whichpath

#endif  // WHICHPATH_CONFIG_HPP
