#ifndef WHICHPATH_TABLE_HPP
#define WHICHPATH_TABLE_HPP

// Plot-ready result tables and their CSV / JSON serialization.
//
// CSV: leading '# key: value' metadata lines, a '# provenance:' line, a
// header row of name[unit], then one row per grid point. Numbers are written
// in scientific notation with 17 significant digits so that reading them back
// reproduces the doubles exactly. The last column is a free-text status
// ("ok" or the error raised at that grid point).

#include <string>
#include <utility>
#include <vector>

#include "whichpath/config.hpp"

namespace whichpath {

struct Column {
  std::string name;
  std::string unit;
  std::string provenance;  // input, formula, state-evolution, oracle, mc(seed=N)
};

struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> status;                            // one per row
  std::vector<std::pair<std::string, std::string>> metadata;  // in output order

  void add_row(std::vector<double> values, std::string row_status = "ok");
  std::size_t column_index(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const;
};

/// Shortest-round-trip-safe text of a double (scientific, 17 significant digits).
std::string format_number(double value);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);

ResultTable read_csv(const std::string& text);
ResultTable read_json(const std::string& text);

/// Writes the table; throws std::runtime_error if the path is not writable.
void write_table(const ResultTable& table, Format format, const std::string& path);

}  // namespace whichpath

#endif  // WHICHPATH_TABLE_HPP
