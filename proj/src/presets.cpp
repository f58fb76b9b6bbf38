#include <numbers>

#include "whichpath/sweep.hpp"

namespace whichpath {

namespace {

constexpr double pi = std::numbers::pi;

Axis range(Variable v, double min, double max, int steps) { return {v, min, max, steps, Scale::linear, {}}; }

Axis list(Variable v, std::vector<double> values) { return {v, 0, 0, 1, Scale::linear, std::move(values)}; }

std::vector<Preset> build() {
  std::vector<Preset> out;

  {
    SweepSpec s;
    s.quantity = Quantity::absorption;
    s.axes = {list(Variable::phi_r, {0, pi}), range(Variable::gamma_delta_t, 0.08, 1.68, 81)};
    s.diffusion.delta = 0.6;
    out.push_back({"fig2a", "absorbed energy vs gamma*dt at phi_R in {0, pi}, ideal and with diffusion delta=0.6", 1, s});
  }
  {
    SweepSpec s;
    s.quantity = Quantity::wp_before;
    s.axes = {range(Variable::gamma_delta_t, 0, 1.68, 85)};
    out.push_back({"fig2b", "which-path information 1-w- before the second pulse", 1, s});
  }
  {
    SweepSpec s;
    s.quantity = Quantity::visibility_trace;
    std::vector<double> phases;
    for (int k = 0; k < 10; ++k) phases.push_back(k * pi / 5);
    s.axes = {list(Variable::gamma_delta_t, {1.42}), list(Variable::phi_r, phases)};
    s.spin_factor = true;
    s.spin.w = 0.5 / s.spin.tau_p;
    out.push_back({"fig3b", "visibility traces at gamma*dt=1.42 for ten phases, spin factor at w*tau_p=0.5", 5, s});
  }
  for (auto [name, x] : {std::pair{"fig4a", 1.42}, std::pair{"fig4b", 0.33}}) {
    SweepSpec s;
    s.quantity = Quantity::wp_after;
    s.axes = {list(Variable::gamma_delta_t, {x}), range(Variable::phi_r, 0, 2 * pi, 73)};
    out.push_back({name, "which-path information 1-|w+| vs phi_R at gamma*dt=" + std::string(x == 1.42 ? "1.42" : "0.33"), 1, s});
  }
  {
    SweepSpec s;
    s.quantity = Quantity::absorption;
    s.axes = {list(Variable::delta, {0, 0.6}), list(Variable::phi_r, {0, pi}), range(Variable::gamma_delta_t, 0, 3, 41)};
    s.diffusion.mode = Averaging::monte_carlo;
    s.diffusion.n_samples = 100'000;
    out.push_back({"figS1", "absorbed energy with and without spectral diffusion, Monte Carlo average", 30, s});
  }
  {
    SweepSpec s;
    s.quantity = Quantity::oracle;
    s.axes = {list(Variable::gamma_delta_t, {0.25, 0.5, 1, 1.5, 2}),
              list(Variable::phi_r, {0, pi / 3, 2 * pi / 3, pi, 4 * pi / 3})};
    out.push_back({"oracle-grid", "collision model vs closed forms with Richardson checks on a 5x5 grid", 120, s});
  }
  {
    SweepSpec s;
    s.quantity = Quantity::spin_mc;
    s.axes = {list(Variable::w_tau_p, {0.1, 0.5, 1, 2, 4})};
    s.spin.n_samples = 1'000'000;
    out.push_back({"spin-mc", "Overhauser correlation and visibility, closed form vs Monte Carlo", 60, s});
  }
  for (auto& p : out) {
    p.spec.diffusion.seed = p.spec.seed;
    p.spec.spin.seed = p.spec.seed;
  }
  return out;
}

}  // namespace

const std::vector<Preset>& figure_presets() {
  static const std::vector<Preset> presets = build();
  return presets;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : figure_presets())
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace whichpath
