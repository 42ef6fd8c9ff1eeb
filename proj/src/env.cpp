#include "vvc/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vvc/error.hpp"

namespace vvc {

double f_volt(const Circuit& circuit, const PowerFlowSolution& solution, double v_lower, double v_upper) {
  double total = 0.0;
  for (std::size_t b = 0; b < circuit.buses.size(); ++b) {
    const Bus& bus = circuit.buses[b];
    if (bus.id == circuit.source_bus) continue;
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (Phase p : bus.phases) {
      const double v = solution.voltage(b, p);
      vmax = std::max(vmax, v);
      vmin = std::min(vmin, v);
    }
    total += std::max(vmax - v_upper, 0.0) + std::max(v_lower - vmin, 0.0);
  }
  return total;
}

PowerLossTerm f_power(const PowerFlowSolution& solution, double w_power) {
  if (!(solution.substation_p_pu > 0.0)) return {0.0, true};
  return {w_power * solution.total_loss_pu / solution.substation_p_pu, false};
}

ControlTerms f_ctrl(const Circuit& circuit, const DeviceState& prev, const DeviceState& next, int step, int horizon,
                    const RewardWeights& w) {
  if (prev.capacitors.size() != next.capacitors.size() || prev.regulators.size() != next.regulators.size() ||
      prev.batteries.size() != next.batteries.size() || next.capacitors.size() != circuit.capacitors.size() ||
      next.regulators.size() != circuit.regulators.size() || next.batteries.size() != circuit.batteries.size())
    throw Error(ErrorCode::KeyMismatch, "f_ctrl: device states do not share the circuit's devices");
  if (step < 0 || step >= horizon) throw Error(ErrorCode::InvalidParameter, "f_ctrl: step index outside [0, H)");

  ControlTerms t;
  for (std::size_t c = 0; c < next.capacitors.size(); ++c)
    t.cap_error += w.cap * std::abs(prev.capacitors[c].status - next.capacitors[c].status);
  for (std::size_t r = 0; r < next.regulators.size(); ++r)
    t.reg_error += w.reg * std::abs(prev.regulators[r].tap - next.regulators[r].tap);
  const bool last = step == horizon - 1;
  for (std::size_t b = 0; b < next.batteries.size(); ++b) {
    const auto& spec = circuit.batteries[b];
    t.dis_error += w.dis * std::max(next.batteries[b].last_p_kw, 0.0) / spec.p_max_kw;
    if (last) t.soc_error += w.soc * std::abs(next.batteries[b].soc - spec.soc0);
  }
  return t;
}

RewardBreakdown combine(double volt, const PowerLossTerm& power, const ControlTerms& ctrl) {
  RewardBreakdown r;
  r.f_volt = volt;
  r.f_power = power.value;
  r.degenerate_total_power = power.degenerate;
  r.cap_error = ctrl.cap_error;
  r.reg_error = ctrl.reg_error;
  r.dis_error = ctrl.dis_error;
  r.soc_error = ctrl.soc_error;
  r.total = -(r.f_volt + r.f_power + r.cap_error + r.reg_error + r.dis_error + r.soc_error);
  return r;
}

namespace {

void check_config(const EnvConfig& cfg) {
  const auto& w = cfg.weights;
  if (cfg.horizon < 1) throw Error(ErrorCode::InvalidParameter, "env: horizon must be >= 1");
  if (!(w.power >= 0 && w.cap >= 0 && w.reg >= 0 && w.dis >= 0 && w.soc >= 0))
    throw Error(ErrorCode::InvalidParameter, "env: reward weights must be non-negative");
  if (!(cfg.v_lower < cfg.v_upper)) throw Error(ErrorCode::InvalidParameter, "env: need v_lower < v_upper");
  if (cfg.battery.mode == BatteryMode::Discrete && cfg.battery.n_levels < 2)
    throw Error(ErrorCode::InvalidParameter, "env: discrete battery needs at least 2 levels");
  if (!(cfg.dt_hours > 0.0)) throw Error(ErrorCode::InvalidParameter, "env: dt_hours must be positive");
  if (!(cfg.load_scale > 0.0)) throw Error(ErrorCode::InvalidParameter, "env: load_scale must be positive");
  if (cfg.n_reg_act == 1) throw Error(ErrorCode::InvalidParameter, "env: n_reg_act must be >= 2");
}

std::shared_ptr<const Circuit> with_tap_count(std::shared_ptr<const Circuit> circuit, int n_reg_act) {
  if (n_reg_act <= 0) return circuit;
  bool same = std::all_of(circuit->regulators.begin(), circuit->regulators.end(),
                          [&](const RegulatorSpec& r) { return r.n_taps == n_reg_act; });
  if (same) return circuit;
  auto copy = std::make_shared<Circuit>(*circuit);
  for (auto& reg : copy->regulators) reg.n_taps = n_reg_act;
  return copy;
}

std::shared_ptr<const LoadProfileSet> with_scale(std::shared_ptr<const LoadProfileSet> profiles, double scale) {
  if (scale == 1.0) return profiles;
  return std::make_shared<LoadProfileSet>(scale_profiles(*profiles, scale));
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

Env::Env(std::shared_ptr<const Circuit> circuit, std::shared_ptr<const LoadProfileSet> profiles, EnvConfig config)
    : circuit_((check_config(config), with_tap_count(std::move(circuit), config.n_reg_act))),
      profiles_(with_scale(std::move(profiles), config.load_scale)),
      config_(config),
      network_(*circuit_),
      rng_(config.seed) {
  for (const auto& load : circuit_->loads) load_keys_.push_back(profiles_->key_index(load.profile_key));
  for (std::size_t b = 0; b < circuit_->buses.size(); ++b)
    for (Phase p : circuit_->buses[b].phases) voltage_slots_.emplace_back(b, p);
  reset(0);
}

std::vector<double> Env::load_multipliers(int hour) const {
  std::vector<double> m(load_keys_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = profiles_->multiplier(profile_, load_keys_[i], hour);
  return m;
}

Observation Env::observe() const {
  Observation o;
  for (const auto& [b, p] : voltage_slots_) o.voltages.push_back(solution_.voltage(b, p));
  for (const auto& c : devices_.capacitors) o.capacitor_status.push_back(c.status);
  for (const auto& r : devices_.regulators) o.regulator_tap.push_back(r.tap);
  for (std::size_t i = 0; i < devices_.batteries.size(); ++i) {
    o.battery_soc.push_back(devices_.batteries[i].soc);
    o.battery_discharge.push_back(devices_.batteries[i].last_p_kw / circuit_->batteries[i].p_max_kw);
  }
  return o;
}

Observation Env::reset(int profile_idx) {
  if (profile_idx < 0 || profile_idx >= profiles_->n_profiles())
    throw Error(ErrorCode::UnknownProfile, "no load profile with index " + std::to_string(profile_idx));
  profile_ = profile_idx;
  step_ = 0;
  devices_ = initial_device_state(*circuit_);
  const auto mult = load_multipliers(0);
  solution_ = solve_status(network_, devices_, build_injections(*circuit_, devices_, mult), config_.solver);
  last_action_ = noop_action();
  obs_ = observe();
  return obs_;
}

Observation Env::reset() {
  return reset(static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(profiles_->n_profiles()))));
}

void Env::seed(std::uint64_t value) { rng_.seed(value); }

Action Env::noop_action() const {
  Action a;
  for (const auto& c : devices_.capacitors) a.capacitors.push_back(c.status);
  for (const auto& r : devices_.regulators) a.regulators.push_back(r.tap);
  const double idle = config_.battery.mode == BatteryMode::Discrete ? config_.battery.zero_level() : 0.0;
  a.batteries.assign(devices_.batteries.size(), idle);
  return a;
}

void Env::validate_action(const Action& a) const {
  const auto& c = *circuit_;
  if (a.capacitors.size() != c.capacitors.size() || a.regulators.size() != c.regulators.size() ||
      a.batteries.size() != c.batteries.size())
    throw Error(ErrorCode::InvalidAction, "action arity must be " + std::to_string(action_dim()) + " (" +
                                              std::to_string(c.capacitors.size()) + " caps, " +
                                              std::to_string(c.regulators.size()) + " regs, " +
                                              std::to_string(c.batteries.size()) + " bats)");
  std::size_t slot = 0;
  for (std::size_t i = 0; i < a.capacitors.size(); ++i, ++slot)
    if (a.capacitors[i] != 0 && a.capacitors[i] != 1)
      throw Error(ErrorCode::InvalidAction, "slot " + std::to_string(slot) + " (capacitor '" + c.capacitors[i].id +
                                                "') must be 0 or 1");
  for (std::size_t i = 0; i < a.regulators.size(); ++i, ++slot)
    if (a.regulators[i] < 0 || a.regulators[i] >= c.regulators[i].n_taps)
      throw Error(ErrorCode::InvalidAction, "slot " + std::to_string(slot) + " (regulator '" + c.regulators[i].id +
                                                "') tap outside [0," + std::to_string(c.regulators[i].n_taps - 1) + "]");
  for (std::size_t i = 0; i < a.batteries.size(); ++i, ++slot) {
    const double v = a.batteries[i];
    const bool ok = config_.battery.mode == BatteryMode::Continuous
                        ? (v >= -1.0 && v <= 1.0)
                        : (is_integer(v) && v >= 0.0 && v <= config_.battery.n_levels - 1);
    if (!ok)
      throw Error(ErrorCode::InvalidAction, "slot " + std::to_string(slot) + " (battery '" + c.batteries[i].id +
                                                "') command out of range");
  }
}

DeviceState Env::apply(const Action& a) const {
  DeviceState next = devices_;
  for (std::size_t i = 0; i < a.capacitors.size(); ++i) next.capacitors[i].status = a.capacitors[i];
  for (std::size_t i = 0; i < a.regulators.size(); ++i) next.regulators[i].tap = a.regulators[i];
  for (std::size_t i = 0; i < a.batteries.size(); ++i) {
    const auto& spec = circuit_->batteries[i];
    const double attempted = battery_target_power(a.batteries[i], config_.battery, spec);
    next.batteries[i] = apply_battery(devices_.batteries[i], spec, attempted, config_.dt_hours).state;
  }
  return next;
}

StepResult Env::step(const Action& action) {
  if (done()) throw Error(ErrorCode::EpisodeOver, "episode is over; call reset");
  validate_action(action);

  DeviceState next = apply(action);
  const auto mult = load_multipliers(step_ + 1);
  PowerFlowSolution sol = solve_status(network_, next, build_injections(*circuit_, next, mult), config_.solver);

  const ControlTerms ctrl = f_ctrl(*circuit_, devices_, next, step_, config_.horizon, config_.weights);
  const RewardBreakdown rb = combine(f_volt(*circuit_, sol, config_.v_lower, config_.v_upper),
                                     f_power(sol, config_.weights.power), ctrl);

  devices_ = std::move(next);
  solution_ = std::move(sol);
  last_action_ = action;
  ++step_;
  obs_ = observe();

  StepResult out;
  out.obs = obs_;
  out.reward = rb.total;
  out.done = done();
  out.breakdown = rb;
  out.converged = solution_.converged;

  auto average = [](double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); };
  const auto& c = *circuit_;
  double soc_sum = 0.0;
  for (const auto& b : devices_.batteries) soc_sum += b.soc;
  const bool out_of_range = std::any_of(obs_.voltages.begin(), obs_.voltages.end(),
                                        [](double v) { return !(v >= kReportVMin && v <= kReportVMax); });
  out.info = {
      {"f_volt", rb.f_volt},
      {"f_power", rb.f_power},
      {"cap_error", rb.cap_error},
      {"reg_error", rb.reg_error},
      {"dis_error", rb.dis_error},
      {"soc_error", rb.soc_error},
      {"av_cap_err", average(rb.cap_error, c.capacitors.size())},
      {"av_reg_err", average(rb.reg_error, c.regulators.size())},
      {"av_dis_err", average(rb.dis_error, c.batteries.size())},
      {"av_soc_err", average(rb.soc_error, c.batteries.size())},
      {"av_soc", average(soc_sum, c.batteries.size())},
      {"converged", solution_.converged},
      {"collapsed", solution_.status == SolveStatus::Collapsed},
      {"degenerate_total_power", rb.degenerate_total_power},
      {"voltage_out_of_range", out_of_range},
  };
  return out;
}

StepResult Env::step(const Eigen::VectorXd& flat_action) { return step(decode_action(flat_action)); }

Env::Lookahead Env::simulate(const Action& action) const {
  validate_action(action);
  if (done()) throw Error(ErrorCode::EpisodeOver, "episode is over; call reset");
  const DeviceState next = apply(action);
  const auto mult = load_multipliers(step_);
  const PowerFlowSolution sol =
      solve_status(network_, next, build_injections(*circuit_, next, mult), config_.solver);
  const ControlTerms ctrl = f_ctrl(*circuit_, devices_, next, step_, config_.horizon, config_.weights);
  Lookahead out;
  out.status = sol.status;
  out.breakdown = combine(f_volt(*circuit_, sol, config_.v_lower, config_.v_upper),
                          f_power(sol, config_.weights.power), ctrl);
  return out;
}

Action Env::sample_action(Rng& rng) const {
  Action a;
  for (std::size_t i = 0; i < circuit_->capacitors.size(); ++i)
    a.capacitors.push_back(static_cast<int>(uniform_index(rng, 2)));
  for (const auto& reg : circuit_->regulators)
    a.regulators.push_back(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(reg.n_taps))));
  for (std::size_t i = 0; i < circuit_->batteries.size(); ++i) {
    if (config_.battery.mode == BatteryMode::Continuous) {
      a.batteries.push_back(uniform_real(rng, -1.0, 1.0));
    } else {
      a.batteries.push_back(
          static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(config_.battery.n_levels))));
    }
  }
  return a;
}

Action Env::random_action() { return sample_action(rng_); }

std::size_t Env::action_dim() const {
  return circuit_->capacitors.size() + circuit_->regulators.size() + circuit_->batteries.size();
}

std::size_t Env::obs_dim() const {
  return voltage_slots_.size() + circuit_->capacitors.size() + circuit_->regulators.size() +
         2 * circuit_->batteries.size();
}

Eigen::VectorXd Env::encode_action(const Action& a) const {
  validate_action(a);
  Eigen::VectorXd v(static_cast<Eigen::Index>(action_dim()));
  Eigen::Index k = 0;
  for (int c : a.capacitors) v[k++] = c;
  for (int r : a.regulators) v[k++] = r;
  for (double b : a.batteries) v[k++] = b;
  return v;
}

Action Env::decode_action(const Eigen::VectorXd& flat) const {
  if (static_cast<std::size_t>(flat.size()) != action_dim())
    throw Error(ErrorCode::InvalidAction, "action arity must be " + std::to_string(action_dim()) + ", got " +
                                              std::to_string(flat.size()));
  Action a;
  Eigen::Index k = 0;
  auto take_int = [&](const char* what) {
    const double v = flat[k];
    if (!is_integer(v))
      throw Error(ErrorCode::InvalidAction, "slot " + std::to_string(k) + " (" + what + ") must be an integer");
    ++k;
    return static_cast<int>(v);
  };
  for (std::size_t i = 0; i < circuit_->capacitors.size(); ++i) a.capacitors.push_back(take_int("capacitor"));
  for (std::size_t i = 0; i < circuit_->regulators.size(); ++i) a.regulators.push_back(take_int("regulator"));
  for (std::size_t i = 0; i < circuit_->batteries.size(); ++i) a.batteries.push_back(flat[k++]);
  validate_action(a);
  return a;
}

Eigen::VectorXd Env::wrap_obs(const Observation& o) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(o.voltages.size() + o.capacitor_status.size() +
                                              o.regulator_tap.size() + o.battery_soc.size() +
                                              o.battery_discharge.size()));
  Eigen::Index k = 0;
  for (double x : o.voltages) v[k++] = x;
  for (int x : o.capacitor_status) v[k++] = x;
  for (int x : o.regulator_tap) v[k++] = x;
  for (std::size_t i = 0; i < o.battery_soc.size(); ++i) {
    v[k++] = o.battery_soc[i];
    v[k++] = o.battery_discharge[i];
  }
  return v;
}

Observation Env::unwrap_obs(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != obs_dim())
    throw Error(ErrorCode::DimensionMismatch, "observation vector has wrong length");
  Observation o;
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < voltage_slots_.size(); ++i) o.voltages.push_back(v[k++]);
  for (std::size_t i = 0; i < circuit_->capacitors.size(); ++i) o.capacitor_status.push_back(static_cast<int>(v[k++]));
  for (std::size_t i = 0; i < circuit_->regulators.size(); ++i) o.regulator_tap.push_back(static_cast<int>(v[k++]));
  for (std::size_t i = 0; i < circuit_->batteries.size(); ++i) {
    o.battery_soc.push_back(v[k++]);
    o.battery_discharge.push_back(v[k++]);
  }
  return o;
}

std::vector<SlotSpace> Env::action_space() const {
  std::vector<SlotSpace> s;
  for (std::size_t i = 0; i < circuit_->capacitors.size(); ++i) s.push_back({SlotSpace::Type::Discrete, 2, 0, 1});
  for (const auto& reg : circuit_->regulators)
    s.push_back({SlotSpace::Type::Discrete, reg.n_taps, 0, static_cast<double>(reg.n_taps - 1)});
  for (std::size_t i = 0; i < circuit_->batteries.size(); ++i) {
    if (config_.battery.mode == BatteryMode::Continuous) {
      s.push_back({SlotSpace::Type::Box, 0, -1.0, 1.0});
    } else {
      s.push_back({SlotSpace::Type::Discrete, config_.battery.n_levels, 0,
                   static_cast<double>(config_.battery.n_levels - 1)});
    }
  }
  return s;
}

std::vector<SlotSpace> Env::observation_space() const {
  std::vector<SlotSpace> s(voltage_slots_.size(), {SlotSpace::Type::Box, 0, kReportVMin, kReportVMax});
  for (std::size_t i = 0; i < circuit_->capacitors.size(); ++i) s.push_back({SlotSpace::Type::Discrete, 2, 0, 1});
  for (const auto& reg : circuit_->regulators)
    s.push_back({SlotSpace::Type::Discrete, reg.n_taps, 0, static_cast<double>(reg.n_taps - 1)});
  for (std::size_t i = 0; i < circuit_->batteries.size(); ++i) {
    s.push_back({SlotSpace::Type::Box, 0, 0.0, 1.0});
    s.push_back({SlotSpace::Type::Box, 0, -1.0, 1.0});
  }
  return s;
}

}  // namespace vvc
