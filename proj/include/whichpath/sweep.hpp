#ifndef WHICHPATH_SWEEP_HPP
#define WHICHPATH_SWEEP_HPP

// Parameter sweeps over the analytic modules, the decoherence averages and the
// collision oracle, plus the named presets behind each figure.

#include <map>
#include <string>
#include <vector>

#include "whichpath/config.hpp"
#include "whichpath/table.hpp"

namespace whichpath {

inline constexpr const char* tool_version = "0.1.0";

using GridPoint = std::map<Variable, double>;

/// Cartesian product of the axes, first axis outermost.
std::vector<GridPoint> grid_points(const SweepSpec& spec);

/// One or more rows per grid point, in grid order. An error at one point fills
/// that point's outputs with NaN and records the message in the status column.
/// `threads` changes the wall time only, never the output.
ResultTable run_sweep(const SweepSpec& spec, unsigned threads = 1);

struct Preset {
  std::string name;
  std::string description;
  double budget_seconds;  // documented wall-time budget with one thread
  SweepSpec spec;
};

const std::vector<Preset>& figure_presets();

/// Throws ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

/// Rows of an `oracle` table that failed their checks (pass column == 0).
std::vector<std::size_t> failed_oracle_rows(const ResultTable& table);

}  // namespace whichpath

#endif  // WHICHPATH_SWEEP_HPP
