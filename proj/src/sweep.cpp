#include "whichpath/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "whichpath/collision.hpp"
#include "whichpath/decoherence.hpp"
#include "whichpath/emission_field.hpp"
#include "whichpath/ramsey.hpp"

namespace whichpath {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Rows = std::vector<std::vector<double>>;

// Parameters of one grid point.
struct Point {
  RamseyConfig ramsey;
  SpectralDiffusionSpec diffusion;
  SpinModelSpec spin;
};

Point resolve(const SweepSpec& spec, const GridPoint& gp) {
  Point p{spec.ramsey, spec.diffusion, spec.spin};
  if (auto it = gp.find(Variable::gamma); it != gp.end()) p.ramsey.gamma = it->second;
  for (const auto& [var, value] : gp) {
    switch (var) {
      case Variable::gamma_delta_t: p.ramsey.delta_t = value / p.ramsey.gamma; break;
      case Variable::delta_t: p.ramsey.delta_t = value; break;
      case Variable::phi_r: p.ramsey.phi_r = value; break;
      case Variable::gamma: break;
      case Variable::delta: p.diffusion.delta = value; break;
      case Variable::w: p.spin.w = value; break;
      case Variable::w_tau_p: p.spin.w = value / p.spin.tau_p; break;
      case Variable::p: p.spin.p = value; break;
    }
  }
  return p;
}

std::string mc_tag(std::uint64_t seed) { return "mc(seed=" + std::to_string(seed) + ")"; }

std::string time_unit(const SweepSpec& spec) { return spec.units == TimeUnits::si ? "ps" : "1/gamma"; }

double time_value(const SweepSpec& spec, const RamseyConfig& r, double t) {
  return spec.units == TimeUnits::si ? t * r.gamma * gamma_inverse_ps : t;
}

std::string axis_unit(const SweepSpec& spec, Variable v) {
  switch (v) {
    case Variable::gamma_delta_t: return "1";
    case Variable::delta_t: return time_unit(spec);
    case Variable::phi_r: return "rad";
    case Variable::gamma: return "1/time";
    case Variable::delta: return "gamma";
    case Variable::w: return "1/time";
    case Variable::w_tau_p: return "1";
    case Variable::p: return "1";
  }
  return "";
}

double opt(const std::optional<double>& v) { return v.value_or(kNaN); }

// Quantity-specific columns and rows (without the leading axis columns).
std::vector<Column> quantity_columns(const SweepSpec& spec) {
  const std::string diffusion_src =
      spec.diffusion.mode == Averaging::monte_carlo ? mc_tag(spec.seed) : "formula";
  const std::string t = time_unit(spec);
  switch (spec.quantity) {
    case Quantity::absorption:
      return {{"pe_minus", "1", "formula"},
              {"pe_plus", "1", "formula"},
              {"delta_p", "hbar*omega0", "formula"},
              {"delta_p_state", "hbar*omega0", "state-evolution"},
              {"delta_p_diffusion", "hbar*omega0", diffusion_src},
              {"delta_p_diffusion_se", "hbar*omega0", diffusion_src}};
    case Quantity::wp_before:
      return {{"w_minus", "1", "formula"},
              {"w_minus_state", "1", "state-evolution"},
              {"wp_before", "1", "formula"},
              {"wp_before_state", "1", "state-evolution"}};
    case Quantity::wp_after:
      return {{"pe_minus", "1", "formula"},
              {"pe_plus", "1", "formula"},
              {"w_minus", "1", "formula"},
              {"w_plus_abs", "1", "formula"},
              {"w_plus_abs_state", "1", "state-evolution"},
              {"wp_after", "1", "formula"},
              {"wp_after_state", "1", "state-evolution"},
              {"identity_residual", "1", "formula"}};
    case Quantity::visibility_trace:
      return {{"time", t, "input"},
              {"v", "1", "formula"},
              {"v_analytic", "1", "formula"},
              {"valid", "1", "formula"},
              {"v1", "1", "formula"},
              {"v2", "1", "formula"},
              {"spin_factor", "1", spec.spin_mode == Averaging::monte_carlo ? mc_tag(spec.seed) : "formula"}};
    case Quantity::profiles:
      return {{"time", t, "input"},
              {"amplitude_re", "sqrt(gamma)", "formula"},
              {"amplitude_im", "sqrt(gamma)", "formula"},
              {"intensity", "gamma", "formula"},
              {"amplitude_re_state", "sqrt(gamma)", "state-evolution"},
              {"amplitude_im_state", "sqrt(gamma)", "state-evolution"},
              {"intensity_state", "gamma", "state-evolution"}};
    case Quantity::spin_mc:
      return {{"correlation", "1", "formula"},
              {"correlation_mc", "1", mc_tag(spec.seed)},
              {"correlation_se", "1", mc_tag(spec.seed)},
              {"visibility", "1", "formula"},
              {"visibility_mc", "1", mc_tag(spec.seed)},
              {"visibility_se", "1", mc_tag(spec.seed)}};
    case Quantity::diffusion:
      return {{"damping", "1", "formula"},
              {"damping_avg", "1", diffusion_src},
              {"damping_se", "1", diffusion_src},
              {"peak_delta_t", t, "formula"}};
    case Quantity::oracle: {
      std::vector<Column> cols;
      for (const char* q : {"pe_plus", "w_plus_squared", "v1", "v2"}) {
        const std::string n = q;
        cols.push_back({n + "_closed", "1", "formula"});
        cols.push_back({n + "_oracle", "1", "oracle"});
        cols.push_back({n + "_extrapolated", "1", "oracle"});
        cols.push_back({n + "_order", "1", "oracle"});
      }
      cols.push_back({"norm_drift", "1", "oracle"});
      cols.push_back({"pass", "1", "oracle"});
      return cols;
    }
  }
  return {};
}

struct PointResult {
  Rows rows;
  std::string status = "ok";
};

PointResult oracle_rows(const SweepSpec& spec, const Point& p) {
  std::vector<double> row;
  bool pass = true;
  std::string status = "ok";
  for (OracleQuantity q : {OracleQuantity::pe_plus, OracleQuantity::w_plus_squared, OracleQuantity::v1,
                           OracleQuantity::v2}) {
    const ConvergenceReport r = richardson_check(p.ramsey, spec.oracle.dt, q);
    const bool ok = r.errors.front() <= spec.oracle.tolerance &&
                    r.extrapolated_error <= spec.oracle.extrapolation_tolerance &&
                    r.min_order() >= spec.oracle.min_order && r.monotone;
    if (!ok && pass) status = "fail: " + to_string(q);
    pass = pass && ok;
    row.insert(row.end(), {r.target, r.values.front(), r.extrapolated, r.min_order()});
  }
  const ModeRecord rec = run_collision(ramsey_collision_config(p.ramsey, spec.oracle.dt.front()));
  row.push_back(rec.norm_drift);
  row.push_back(pass ? 1.0 : 0.0);
  return {{row}, status};
}

PointResult compute(const SweepSpec& spec, const Point& p, unsigned mc_threads) {
  switch (spec.quantity) {
    case Quantity::absorption: {
      const WhichPathReport r = full_report(p.ramsey);
      const Estimate d = absorption_with_diffusion(p.ramsey, p.diffusion, mc_threads);
      return {{{r.pe_minus(), r.pe_plus(), r.delta_p(), r.evolved.delta_p, d.value, d.std_error}}};
    }
    case Quantity::wp_before: {
      const WhichPathReport r = full_report(p.ramsey);
      const double ws = opt(r.evolved.w_minus);
      return {{{r.w_minus(), ws, r.wp_before(), 1 - ws}}};
    }
    case Quantity::wp_after: {
      const WhichPathReport r = full_report(p.ramsey);
      PointResult out;
      const double wf = r.w_plus() ? std::abs(*r.w_plus()) : kNaN;
      const double we = r.evolved.w_plus ? std::abs(*r.evolved.w_plus) : kNaN;
      if (!r.w_plus()) out.status = "degenerate: w+ undefined at p_e+ in {0, 1}";
      out.rows = {{r.pe_minus(), r.pe_plus(), r.w_minus(), wf, we, 1 - wf, 1 - we,
                   r.w_plus() ? check_eq7(p.ramsey) : kNaN}};
      return out;
    }
    case Quantity::visibility_trace: {
      const Eigen::ArrayXd grid = default_grid(p.ramsey, spec.grid.samples, spec.grid.span);
      VisibilityTrace tr = visibility_trace(p.ramsey, grid);
      const Eigen::ArrayXd analytic = analytic_visibility(p.ramsey, grid);
      double factor = 1;
      if (spec.spin_factor) {
        p.spin.validate();
        factor = spec.spin_mode == Averaging::monte_carlo
                     ? std::abs(spin_correlation_mc(p.spin, p.spin.tau_p, mc_threads).value)
                     : std::abs(spin_correlation_closed(p.spin.w, p.spin.tau_p));
        tr.v *= factor;
        tr.v1 *= factor;
        if (tr.v2) *tr.v2 *= factor;
      }
      PointResult out;
      if (!tr.v2) out.status = "degenerate: no emission in bin 2";
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        out.rows.push_back({time_value(spec, p.ramsey, grid(i)), tr.valid(i) ? tr.v(i) : kNaN, factor * analytic(i),
                            tr.valid(i) ? 1.0 : 0.0, tr.v1, opt(tr.v2), factor});
      return out;
    }
    case Quantity::profiles: {
      const Eigen::ArrayXd grid = default_grid(p.ramsey, spec.grid.samples, spec.grid.span);
      const TemporalProfile f = temporal_profile(p.ramsey, grid, Route::formula);
      const TemporalProfile e = temporal_profile(p.ramsey, grid, Route::state_evolution);
      PointResult out;
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        out.rows.push_back({time_value(spec, p.ramsey, grid(i)), f.amplitude(i).real(), f.amplitude(i).imag(),
                            f.intensity(i), e.amplitude(i).real(), e.amplitude(i).imag(), e.intensity(i)});
      return out;
    }
    case Quantity::spin_mc: {
      const Estimate c = spin_correlation_mc(p.spin, p.spin.tau_p, mc_threads);
      const Estimate v = spin_homodyne_visibility(p.spin, Averaging::monte_carlo, mc_threads);
      return {{{spin_correlation_closed(p.spin.w, p.spin.tau_p), c.value, c.std_error,
                spin_homodyne_visibility(p.spin, Averaging::closed_form).value, v.value, v.std_error}}};
    }
    case Quantity::diffusion: {
      const Estimate d = diffusion_damping(p.ramsey, p.diffusion, mc_threads);
      const double peak = peak_shift_with_diffusion(p.diffusion, p.ramsey.gamma);
      return {{{diffusion_damping_closed(p.ramsey, p.diffusion.delta), d.value, d.std_error,
                time_value(spec, p.ramsey, peak)}}};
    }
    case Quantity::oracle: return oracle_rows(spec, p);
  }
  return {};
}

std::string current_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

std::vector<GridPoint> grid_points(const SweepSpec& spec) {
  std::vector<GridPoint> out{GridPoint{}};
  for (const auto& axis : spec.axes) {
    std::vector<GridPoint> next;
    for (const auto& gp : out)
      for (double v : axis.points()) {
        GridPoint g = gp;
        g[axis.variable] = v;
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  return out;
}

ResultTable run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  SweepSpec recorded = spec;
  recorded.output_path.clear();
  ResultTable table;
  table.metadata = {{"tool", std::string("whichpath ") + tool_version},
                    {"quantity", to_string(spec.quantity)},
                    {"config", to_yaml(recorded, true)}};
  if (spec.timestamp) table.metadata.emplace_back("timestamp", current_timestamp());

  for (const auto& axis : spec.axes)
    table.columns.push_back({to_string(axis.variable), axis_unit(spec, axis.variable), "input"});
  const std::vector<Column> qcols = quantity_columns(spec);
  table.columns.insert(table.columns.end(), qcols.begin(), qcols.end());

  const std::vector<GridPoint> points = grid_points(spec);
  std::vector<PointResult> results(points.size());
  threads = std::max(1u, threads);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
  const unsigned mc_threads = std::max(1u, threads / std::max(1u, workers));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = compute(spec, resolve(spec, points[i]), mc_threads);
      } catch (const std::exception& e) {
        results[i] = {{std::vector<double>(qcols.size(), kNaN)}, std::string("error: ") + e.what()};
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> prefix;
    for (const auto& axis : spec.axes) {
      const double v = points[i].at(axis.variable);
      prefix.push_back(axis.variable == Variable::delta_t ? time_value(spec, spec.ramsey, v) : v);
    }
    for (auto& row : results[i].rows) {
      std::vector<double> full = prefix;
      full.insert(full.end(), row.begin(), row.end());
      table.add_row(std::move(full), results[i].status);
    }
  }
  return table;
}

std::vector<std::size_t> failed_oracle_rows(const ResultTable& table) {
  const std::size_t pass = table.column_index("pass");
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    if (!(table.rows[r][pass] == 1.0)) out.push_back(r);
  return out;
}

}  // namespace whichpath
