#include "whichpath/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace whichpath {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string sanitize(std::string s, bool commas = true) {
  std::replace_if(
      s.begin(), s.end(), [commas](char c) { return (commas && c == ',') || c == '\n' || c == '\r'; }, ';');
  return s;
}

double parse_number(const std::string& s) {
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double json_number(const ordered_json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

void ResultTable::add_row(std::vector<double> values, std::string row_status) {
  if (values.size() != columns.size())
    throw std::logic_error("row has " + std::to_string(values.size()) + " values for " +
                           std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(values));
  status.push_back(std::move(row_status));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

double ResultTable::at(std::size_t row, const std::string& name) const { return rows.at(row).at(column_index(name)); }

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (const auto& [k, v] : table.metadata) out += "# " + k + ": " + sanitize(v, false) + "\n";
  out += "# provenance: ";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i].provenance;
  out += "\n";
  for (const auto& c : table.columns) out += c.name + "[" + c.unit + "],";
  out += "status[-]\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (double v : table.rows[r]) out += format_number(v) + ",";
    out += sanitize(table.status[r]) + "\n";
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  ordered_json j;
  j["metadata"] = ordered_json::object();
  for (const auto& [k, v] : table.metadata) j["metadata"][k] = v;
  j["columns"] = ordered_json::array();
  for (const auto& c : table.columns)
    j["columns"].push_back({{"name", c.name}, {"unit", c.unit}, {"provenance", c.provenance}});
  j["rows"] = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r = ordered_json::array();
    for (double v : row) r.push_back(number_json(v));
    j["rows"].push_back(std::move(r));
  }
  j["status"] = table.status;
  return j.dump(1) + "\n";
}

ResultTable read_csv(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> provenance;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      if (key == "provenance")
        provenance = split(value, ',');
      else
        t.metadata.emplace_back(key, value);
      continue;
    }
    const auto fields = split(line, ',');
    if (!header) {
      if (fields.empty() || fields.back() != "status[-]") throw std::runtime_error("CSV header lacks the status column");
      for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
        const auto open = fields[i].find('[');
        if (open == std::string::npos || fields[i].back() != ']')
          throw std::runtime_error("bad column header '" + fields[i] + "'");
        Column c{fields[i].substr(0, open), fields[i].substr(open + 1, fields[i].size() - open - 2), ""};
        if (i < provenance.size()) c.provenance = provenance[i];
        t.columns.push_back(std::move(c));
      }
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size() + 1) throw std::runtime_error("CSV row has the wrong number of fields");
    std::vector<double> row;
    for (std::size_t i = 0; i < t.columns.size(); ++i) row.push_back(parse_number(fields[i]));
    t.add_row(std::move(row), fields.back());
  }
  if (!header) throw std::runtime_error("CSV has no header row");
  return t;
}

ResultTable read_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  ResultTable t;
  for (const auto& [k, v] : j.at("metadata").items()) t.metadata.emplace_back(k, v.get<std::string>());
  for (const auto& c : j.at("columns"))
    t.columns.push_back({c.at("name").get<std::string>(), c.at("unit").get<std::string>(),
                         c.at("provenance").get<std::string>()});
  const auto& rows = j.at("rows");
  const auto& status = j.at("status");
  if (rows.size() != status.size()) throw std::runtime_error("JSON rows and status differ in length");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> row;
    for (const auto& v : rows[r]) row.push_back(json_number(v));
    t.add_row(std::move(row), status[r].get<std::string>());
  }
  return t;
}

void write_table(const ResultTable& table, Format format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << (format == Format::csv ? to_csv(table) : to_json(table));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace whichpath
