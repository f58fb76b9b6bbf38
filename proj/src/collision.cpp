#include "whichpath/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "whichpath/emission_field.hpp"

namespace whichpath {

namespace {

constexpr double kMinFlux = 1e-300;
constexpr double kExactError = 1e-13;

}  // namespace

void CollisionConfig::validate() const {
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (gamma * dt > 0.01 + 1e-15) throw std::invalid_argument("gamma*dt must not exceed 0.01");
  if (max_photons_tracked < 2) throw std::invalid_argument("max_photons_tracked must be >= 2");
  std::size_t last = 0;
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    const std::size_t step = pulses[i].first;
    if (i > 0 && step <= pulses[i - 1].first)
      throw std::invalid_argument("pulse steps must be strictly increasing");
    if (step >= total_steps()) throw std::invalid_argument("pulse step beyond the simulated range");
    last = step;
  }
  const double tail = static_cast<double>(total_steps() - last) * gamma * dt;
  if (tail < 8.0 - 1e-9) throw std::invalid_argument("need at least 8/gamma of decay after the last pulse");
}

CollisionConfig ramsey_collision_config(const RamseyConfig& ramsey, double dt, double tail) {
  ramsey.validate();
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  const double ratio = ramsey.delta_t / dt;
  const double steps1 = std::round(ratio);
  if (std::abs(ratio - steps1) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("boundary off-grid: delta_t is not a multiple of dt");
  if (steps1 < 1) throw std::invalid_argument("delta_t must span at least one collision step");

  CollisionConfig cfg;
  cfg.gamma = ramsey.gamma;
  cfg.dt = dt;
  cfg.n_steps_bin1 = static_cast<std::size_t>(steps1);
  cfg.n_steps_bin2 = static_cast<std::size_t>(std::ceil(tail / (ramsey.gamma * dt) - 1e-9));
  cfg.pulses = {{0, PulseSpec(std::numbers::pi / 2, 0.0)},
                {cfg.n_steps_bin1, PulseSpec(std::numbers::pi / 2, ramsey.phi_r)}};
  return cfg;
}

ModeRecord run_collision(const CollisionConfig& cfg) {
  cfg.validate();
  // Each pulse can re-excite the atom once, and each excitation radiates at
  // most one photon.
  if (static_cast<int>(cfg.pulses.size()) > cfg.max_photons_tracked)
    throw std::runtime_error("sector overflow: more excitations than tracked photons");

  const std::size_t n = cfg.total_steps();
  const double emit = std::sqrt(cfg.gamma * cfg.dt);
  const double keep = std::sqrt(1.0 - cfg.gamma * cfg.dt);

  ModeRecord rec;
  rec.gamma = cfg.gamma;
  rec.dt = cfg.dt;
  rec.time = Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(n), 0.0, (static_cast<double>(n) - 1) * cfg.dt);
  rec.excited_population.resize(static_cast<Eigen::Index>(n));
  rec.dipole.resize(static_cast<Eigen::Index>(n));
  rec.mode_amplitude.resize(static_cast<Eigen::Index>(n));
  rec.flux.resize(static_cast<Eigen::Index>(n));
  rec.pulses = cfg.pulses;

  std::vector<std::size_t> starts{0};
  for (const auto& [step, pulse] : cfg.pulses)
    if (step != 0) starts.push_back(step);
  starts.push_back(n);

  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(0, 0) = 1.0;
  rec.initial_atom = Eigen::Vector2cd(1.0, 0.0);
  std::size_t next_pulse = 0;

  for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
    const std::size_t start = starts[s];
    const std::size_t steps = starts[s + 1] - start;
    if (next_pulse < cfg.pulses.size() && cfg.pulses[next_pulse].first == start) {
      const Eigen::Matrix2cd u = pulse_matrix(cfg.pulses[next_pulse].second);
      rho = u * rho * u.adjoint();
      if (start == 0) rec.initial_atom = u * rec.initial_atom;
      ++next_pulse;
    }

    SegmentRecord seg;
    seg.first_step = start;
    seg.steps = steps;
    seg.rho_start = rho;
    Eigen::Matrix2cd vacuum = Eigen::Matrix2cd::Identity();
    Eigen::MatrixX2cd photon = Eigen::MatrixX2cd::Zero(static_cast<Eigen::Index>(steps), 2);
    Eigen::Matrix2cd photon_gram = Eigen::Matrix2cd::Zero();  // (b, b') = sum_k P_kb conj(P_kb')

    auto reduced_atom = [&] {
      Eigen::Matrix2cd r = vacuum * seg.rho_start * vacuum.adjoint();
      r(0, 0) += seg.rho_start.cwiseProduct(photon_gram).sum();
      return r;
    };

    for (std::size_t j = 0; j < steps; ++j) {
      const auto k = static_cast<Eigen::Index>(start + j);
      const Eigen::Matrix2cd r = reduced_atom();
      rec.excited_population(k) = r(1, 1).real();
      rec.dipole(k) = r(1, 0);

      // Collision with the fresh mode of step k; only |e, vacuum> couples.
      const auto jj = static_cast<Eigen::Index>(j);
      photon.row(jj) = emit * vacuum.row(1);
      vacuum.row(1) *= keep;
      photon_gram += photon.row(jj).transpose() * photon.row(jj).conjugate();

      rec.mode_amplitude(k) = (photon.row(jj) * seg.rho_start * vacuum.row(0).adjoint())(0, 0);
      rec.flux(k) = (photon.row(jj) * seg.rho_start * photon.row(jj).adjoint())(0, 0).real();
    }

    const double local_norm = vacuum.col(1).squaredNorm() + photon_gram(1, 1).real();
    rho = reduced_atom();
    rec.norm_drift = std::max({rec.norm_drift, std::abs(local_norm - 1.0), std::abs(rho.trace().real() - 1.0)});
    seg.vacuum = vacuum;
    seg.photon = std::move(photon);
    rec.segments.push_back(std::move(seg));
  }
  return rec;
}

namespace {

// Mean of |<b_k>|^2 / <b_k^dag b_k> over the steps of one segment that carry flux.
std::optional<double> mean_visibility(const ModeRecord& record, const SegmentRecord& seg) {
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < seg.steps; ++j) {
    const auto k = static_cast<Eigen::Index>(seg.first_step + j);
    if (record.flux(k) <= kMinFlux) continue;
    sum += std::norm(record.mode_amplitude(k)) / record.flux(k);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace

CoarseGrained coarse_grain_bins(const ModeRecord& record, double boundary) {
  const double ratio = boundary / record.dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("boundary off-grid");
  const auto boundary_step = static_cast<std::size_t>(rounded);
  if (record.pulses.size() != 2 || record.pulses[0].first != 0 || record.pulses[1].first != boundary_step)
    throw std::invalid_argument("record is not a two-pulse sequence with its second pulse at the boundary");
  const SegmentRecord& bin1 = record.segments.at(0);
  const SegmentRecord& bin2 = record.segments.at(1);

  const Eigen::Vector2cd vac = bin1.vacuum * record.initial_atom;
  const Eigen::VectorXcd photon = bin1.photon * record.initial_atom;
  const Eigen::VectorXcd radiated = bin1.photon.col(1);
  const double radiated_norm = radiated.norm();

  CoarseGrained out;
  std::complex<double> photon_amp = 0;
  if (radiated_norm > 0) {
    const Eigen::VectorXcd packet = radiated / radiated_norm;
    photon_amp = packet.dot(photon);

    Eigen::VectorXcd ideal(packet.size());
    for (Eigen::Index k = 0; k < ideal.size(); ++k)
      ideal(k) = std::exp(-record.gamma * static_cast<double>(k) * record.dt / 2);
    ideal.normalize();
    out.packet_fidelity = std::norm(ideal.dot(packet));
  }
  out.leakage = std::max(0.0, photon.squaredNorm() - std::norm(photon_amp));

  out.before(Atom::ground, 0, 0) = vac(0);
  out.before(Atom::excited, 0, 0) = vac(1);
  out.before(Atom::ground, 1, 0) = photon_amp;
  out.after = apply_pulse(out.before, record.pulses[1].second);

  out.pe_minus = excited_population(out.before);
  out.pe_plus = excited_population(out.after);
  const auto before = pointer_states(out.before).overlap();
  if (before) out.w_minus = std::abs(*before);
  out.w_plus = pointer_states(out.after).overlap();

  out.v1 = mean_visibility(record, bin1).value_or(0.0);
  out.v2 = mean_visibility(record, bin2);
  return out;
}

std::string to_string(OracleQuantity q) {
  switch (q) {
    case OracleQuantity::pe_plus: return "pe_plus";
    case OracleQuantity::w_plus_squared: return "w_plus_squared";
    case OracleQuantity::v1: return "v1";
    case OracleQuantity::v2: return "v2";
  }
  return "unknown";
}

double oracle_value(const RamseyConfig& cfg, double dt, OracleQuantity q) {
  const ModeRecord record = run_collision(ramsey_collision_config(cfg, dt));
  const CoarseGrained bins = coarse_grain_bins(record, cfg.delta_t);
  switch (q) {
    case OracleQuantity::pe_plus: return bins.pe_plus;
    case OracleQuantity::w_plus_squared:
      if (!bins.w_plus) throw std::domain_error("w_plus undefined: atom left in a pure state");
      return std::norm(*bins.w_plus);
    case OracleQuantity::v1: return bins.v1;
    case OracleQuantity::v2:
      if (!bins.v2) throw std::domain_error("no emission in the second bin");
      return *bins.v2;
  }
  throw std::invalid_argument("unknown oracle quantity");
}

double closed_form_value(const RamseyConfig& cfg, OracleQuantity q) {
  switch (q) {
    case OracleQuantity::pe_plus: return pe_plus(cfg);
    case OracleQuantity::w_plus_squared: {
      const auto w = w_plus(cfg);
      if (!w) throw std::domain_error("w_plus undefined: atom left in a pure state");
      return std::norm(*w);
    }
    case OracleQuantity::v1: return 0.5;
    case OracleQuantity::v2: {
      const auto v = second_plateau(cfg);
      if (!v) throw std::domain_error("no emission in the second bin");
      return *v;
    }
  }
  throw std::invalid_argument("unknown oracle quantity");
}

double ConvergenceReport::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (double p : observed_orders) m = std::min(m, p);
  return m;
}

double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& values) {
  if (h.size() != values.size() || h.empty()) throw std::invalid_argument("extrapolation needs matching, non-empty inputs");
  std::vector<double> p = values;
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
  return p[0];
}

ConvergenceReport richardson_check(const RamseyConfig& cfg, const std::vector<double>& refinements,
                                   OracleQuantity q) {
  if (refinements.size() < 3) throw std::invalid_argument("need at least 3 refinement levels");
  ConvergenceReport r;
  r.target = closed_form_value(cfg, q);
  r.steps = refinements;
  for (double dt : refinements) {
    r.values.push_back(oracle_value(cfg, dt, q));
    r.errors.push_back(std::abs(r.values.back() - r.target));
  }
  for (std::size_t i = 1; i < r.errors.size(); ++i) {
    if (r.errors[i] > r.errors[i - 1] && r.errors[i] > kExactError) r.monotone = false;
    if (r.errors[i] <= kExactError) {
      r.observed_orders.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    r.observed_orders.push_back(std::log(r.errors[i - 1] / r.errors[i]) / std::log(r.steps[i - 1] / r.steps[i]));
  }
  r.extrapolated = extrapolate_to_zero(r.steps, r.values);
  r.extrapolated_error = std::abs(r.extrapolated - r.target);
  return r;
}

}  // namespace whichpath
