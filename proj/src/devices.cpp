#include "vvc/devices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vvc/error.hpp"

namespace vvc {

DeviceState initial_device_state(const Circuit& circuit) {
  DeviceState s;
  s.capacitors.assign(circuit.capacitors.size(), CapacitorState{1});
  for (const auto& reg : circuit.regulators) s.regulators.push_back({reg.n_taps - 1});
  s.batteries.assign(circuit.batteries.size(), BatteryState{1.0, 0.0});
  return s;
}

void check_device_state(const Circuit& circuit, const DeviceState& state) {
  if (state.capacitors.size() != circuit.capacitors.size() ||
      state.regulators.size() != circuit.regulators.size() || state.batteries.size() != circuit.batteries.size())
    throw Error(ErrorCode::KeyMismatch, "device state does not match circuit devices");
  for (std::size_t i = 0; i < state.capacitors.size(); ++i) {
    const int st = state.capacitors[i].status;
    if (st != 0 && st != 1)
      throw Error(ErrorCode::InvalidParameter, "capacitor '" + circuit.capacitors[i].id + "' status must be 0 or 1");
  }
  for (std::size_t i = 0; i < state.regulators.size(); ++i) {
    const int tap = state.regulators[i].tap;
    if (tap < 0 || tap >= circuit.regulators[i].n_taps)
      throw Error(ErrorCode::TapOutOfRange, "regulator '" + circuit.regulators[i].id + "' tap out of range");
  }
  for (std::size_t i = 0; i < state.batteries.size(); ++i) {
    const double soc = state.batteries[i].soc;
    if (!(soc >= 0.0 && soc <= 1.0))
      throw Error(ErrorCode::InvalidParameter, "battery '" + circuit.batteries[i].id + "' soc outside [0,1]");
  }
}

double regulator_ratio(int tap, const RegulatorSpec& spec) {
  if (tap < 0 || tap >= spec.n_taps)
    throw Error(ErrorCode::TapOutOfRange,
                "tap " + std::to_string(tap) + " outside [0," + std::to_string(spec.n_taps - 1) + "] for '" + spec.id + "'");
  if (tap == spec.n_taps - 1) return spec.ratio_max;
  return spec.ratio_min + tap * (spec.ratio_max - spec.ratio_min) / (spec.n_taps - 1);
}

double battery_normalized_command(double action_value, const BatteryActionSpace& space) {
  if (space.mode == BatteryMode::Continuous) {
    if (!(action_value >= -1.0 && action_value <= 1.0))
      throw Error(ErrorCode::ActionOutOfRange, "continuous battery command must lie in [-1,1]");
    return action_value;
  }
  const double k = action_value;
  if (!(k >= 0.0 && k <= space.n_levels - 1) || std::floor(k) != k)
    throw Error(ErrorCode::ActionOutOfRange,
                "discrete battery level must be an integer in [0," + std::to_string(space.n_levels - 1) + "]");
  const int level = static_cast<int>(k);
  if (2 * level == space.n_levels - 1) return 0.0;
  return -1.0 + 2.0 * level / (space.n_levels - 1);
}

double battery_target_power(double action_value, const BatteryActionSpace& space, const BatterySpec& spec) {
  return battery_normalized_command(action_value, space) * spec.p_max_kw;
}

BatteryStep apply_battery(const BatteryState& state, const BatterySpec& spec, double attempted_p_kw,
                          double dt_hours) {
  // Discharge limited by stored energy, charge by headroom.
  const double max_discharge = state.soc * spec.e_max_kwh / dt_hours;
  const double max_charge = (1.0 - state.soc) * spec.e_max_kwh / dt_hours;
  double realized = std::clamp(attempted_p_kw, -max_charge, max_discharge);
  realized = std::clamp(realized, -spec.p_max_kw, spec.p_max_kw);

  BatteryStep out;
  out.realized_p_kw = realized;
  out.state.soc = std::clamp(state.soc - realized * dt_hours / spec.e_max_kwh, 0.0, 1.0);
  out.state.last_p_kw = realized;
  return out;
}

}  // namespace vvc
