#pragma once

#include <vector>

#include "vvc/circuit.hpp"

namespace vvc {

struct CapacitorState {
  int status = 1;  // 0 off, 1 on

  bool operator==(const CapacitorState&) const = default;
};

struct RegulatorState {
  int tap = 0;  // 0 .. n_taps-1

  bool operator==(const RegulatorState&) const = default;
};

struct BatteryState {
  double soc = 1.0;
  double last_p_kw = 0.0;  // realized; positive = discharging

  bool operator==(const BatteryState&) const = default;
};

// Device states aligned index-for-index with the circuit's (id-sorted)
// capacitors, regulators and batteries.
struct DeviceState {
  std::vector<CapacitorState> capacitors;
  std::vector<RegulatorState> regulators;
  std::vector<BatteryState> batteries;

  bool operator==(const DeviceState&) const = default;
};

// All capacitors on, all taps at n_taps-1, batteries full and idle.
DeviceState initial_device_state(const Circuit& circuit);

// Throws KeyMismatch if the state does not cover exactly the circuit devices,
// TapOutOfRange / InvalidParameter for out-of-range entries.
void check_device_state(const Circuit& circuit, const DeviceState& state);

// Linear tap map over [ratio_min, ratio_max].
double regulator_ratio(int tap, const RegulatorSpec& spec);

enum class BatteryMode { Discrete, Continuous };

struct BatteryActionSpace {
  BatteryMode mode = BatteryMode::Discrete;
  int n_levels = 33;  // discrete only

  // Discrete level whose target power is zero (exact when n_levels is odd).
  int zero_level() const { return (n_levels - 1) / 2; }
};

// Normalized discharge in [-1,1] for a battery command.
double battery_normalized_command(double action_value, const BatteryActionSpace& space);

// Attempted discharge power in kW (positive = discharging).
double battery_target_power(double action_value, const BatteryActionSpace& space, const BatterySpec& spec);

struct BatteryStep {
  BatteryState state;
  double realized_p_kw = 0.0;
};

// Projects the attempted power onto what the current soc allows and advances
// the state of charge by dt_hours. Total: never throws.
BatteryStep apply_battery(const BatteryState& state, const BatterySpec& spec, double attempted_p_kw,
                          double dt_hours = 1.0);

}  // namespace vvc
