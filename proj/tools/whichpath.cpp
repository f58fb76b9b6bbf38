#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "whichpath/sweep.hpp"

using namespace whichpath;

namespace {

enum Exit { ok = 0, config_error = 1, runtime_error = 2, check_failed = 3 };

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

void add_run_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file (default: config output.path, else stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "master seed for Monte Carlo averages");
  cmd->add_option("--threads", o.threads, "worker threads; changes speed only")->check(CLI::Range(1u, 1024u));
}

SweepSpec with_overrides(SweepSpec spec, const Options& o) {
  if (o.seed) spec.seed = *o.seed;
  spec.diffusion.seed = spec.seed;
  spec.spin.seed = spec.seed;
  if (!o.format.empty()) spec.format = o.format == "json" ? Format::json : Format::csv;
  if (!o.out.empty()) spec.output_path = o.out;
  return spec;
}

SweepSpec load(const std::string& path) {
  ParsedConfig parsed = load_config(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  return parsed.spec;
}

void emit(const ResultTable& table, const SweepSpec& spec) {
  if (spec.output_path.empty())
    std::cout << (spec.format == Format::csv ? to_csv(table) : to_json(table));
  else
    write_table(table, spec.format, spec.output_path);
}

int report_oracle(const ResultTable& table) {
  const auto failed = failed_oracle_rows(table);
  for (std::size_t r : failed) {
    std::cerr << "oracle check failed at";
    for (const auto& c : table.columns) {
      if (c.provenance != "input") break;
      std::cerr << " " << c.name << "=" << table.at(r, c.name);
    }
    std::cerr << ": " << table.status[r] << "\n";
  }
  std::cerr << table.rows.size() - failed.size() << "/" << table.rows.size() << " oracle points passed\n";
  return failed.empty() ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"which-path information in two-pulse Ramsey emission"};
  app.set_version_flag("--version", std::string(tool_version));
  app.require_subcommand(1);

  Options o;
  auto* sweep = app.add_subcommand("sweep", "run the sweep described by a config file");
  sweep->add_option("--config", o.config, "YAML sweep config")->required()->check(CLI::ExistingFile);
  add_run_flags(sweep, o);

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "run a named figure preset");
  preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
  add_run_flags(preset, o);

  auto* oracle = app.add_subcommand("oracle-check", "compare the collision model with the closed forms");
  oracle->add_option("--config", o.config, "YAML config with quantity: oracle (default: the oracle-grid preset)")
      ->check(CLI::ExistingFile);
  add_run_flags(oracle, o);

  auto* validate = app.add_subcommand("validate-config", "parse a config and print it fully resolved");
  validate->add_option("--config", o.config, "YAML sweep config")->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list-presets", "list the figure presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*list) {
      for (const auto& p : figure_presets())
        std::cout << p.name << "\t" << to_string(p.spec.quantity) << "\t~" << p.budget_seconds << " s\t" << p.description
                  << "\n";
      return ok;
    }
    if (*validate) {
      std::cout << to_yaml(load(o.config)) << "\n";
      return ok;
    }
    if (*sweep) {
      const SweepSpec spec = with_overrides(load(o.config), o);
      emit(run_sweep(spec, o.threads), spec);
      return ok;
    }
    if (*preset) {
      const SweepSpec spec = with_overrides(find_preset(preset_name).spec, o);
      emit(run_sweep(spec, o.threads), spec);
      return ok;
    }
    if (*oracle) {
      SweepSpec spec = o.config.empty() ? find_preset("oracle-grid").spec : load(o.config);
      if (spec.quantity != Quantity::oracle) throw ConfigError("oracle-check needs 'quantity: oracle'");
      spec = with_overrides(spec, o);
      const ResultTable table = run_sweep(spec, o.threads);
      if (!spec.output_path.empty()) write_table(table, spec.format, spec.output_path);
      return report_oracle(table);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime_error;
  }
  return ok;
}
