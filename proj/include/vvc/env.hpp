#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vvc/circuit.hpp"
#include "vvc/devices.hpp"
#include "vvc/powerflow.hpp"
#include "vvc/profiles.hpp"
#include "vvc/rng.hpp"

namespace vvc {

struct RewardWeights {
  double power = 10.0;
  double cap = 1.0 / 33;
  double reg = 1.0 / 33;
  double dis = 6.0 / 33;
  double soc = 0.0;

  bool operator==(const RewardWeights&) const = default;
};

struct EnvConfig {
  int horizon = 24;
  int n_reg_act = 33;  // overrides every regulator's tap count; <= 0 keeps the circuit's
  BatteryActionSpace battery;
  RewardWeights weights;
  double v_upper = 1.05;
  double v_lower = 0.95;
  double load_scale = 1.0;
  double dt_hours = 1.0;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

// Envelope the observed voltages are documented to live in.
inline constexpr double kReportVMin = 0.8;
inline constexpr double kReportVMax = 1.2;

struct Observation {
  std::vector<double> voltages;  // per (bus, phase), buses sorted by id then phase
  std::vector<int> capacitor_status;
  std::vector<int> regulator_tap;
  std::vector<double> battery_soc;
  std::vector<double> battery_discharge;  // realized_P / P_max

  bool operator==(const Observation&) const = default;
};

// Battery commands are integer levels (discrete) or normalized powers (continuous).
struct Action {
  std::vector<int> capacitors;
  std::vector<int> regulators;
  std::vector<double> batteries;

  bool operator==(const Action&) const = default;
};

struct RewardBreakdown {
  double f_volt = 0.0;
  double f_power = 0.0;
  double cap_error = 0.0;
  double reg_error = 0.0;
  double dis_error = 0.0;
  double soc_error = 0.0;
  double total = 0.0;
  bool degenerate_total_power = false;
};

using InfoValue = std::variant<double, bool>;
using Info = std::map<std::string, InfoValue>;

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  Info info;
  RewardBreakdown breakdown;
  bool converged = true;
};

// Sum over non-source buses of the worst upper and lower excursions among the
// bus's phases.
double f_volt(const Circuit& circuit, const PowerFlowSolution& solution, double v_lower = 0.95,
              double v_upper = 1.05);

struct PowerLossTerm {
  double value = 0.0;
  bool degenerate = false;  // substation draw <= 0; value forced to 0
};

PowerLossTerm f_power(const PowerFlowSolution& solution, double w_power);

struct ControlTerms {
  double cap_error = 0.0;
  double reg_error = 0.0;
  double dis_error = 0.0;
  double soc_error = 0.0;
};

// Switching, discharge and (final-transition) soc penalties for the transition
// prev -> next completed at step index `step` of a `horizon`-step episode.
ControlTerms f_ctrl(const Circuit& circuit, const DeviceState& prev, const DeviceState& next, int step,
                    int horizon, const RewardWeights& weights);

RewardBreakdown combine(double volt, const PowerLossTerm& power, const ControlTerms& ctrl);

struct SlotSpace {
  enum class Type { Discrete, Box };
  Type type = Type::Box;
  int n = 0;  // Discrete: values 0..n-1
  double low = 0.0;
  double high = 0.0;
};

// Finite-horizon Volt-Var MDP over one circuit and one profile set. Copyable;
// a copy is an independent simulator.
class Env {
 public:
  Env(std::shared_ptr<const Circuit> circuit, std::shared_ptr<const LoadProfileSet> profiles, EnvConfig config);

  Observation reset(int profile_idx);
  // Picks a profile from the environment's own random stream.
  Observation reset();
  StepResult step(const Action& action);
  StepResult step(const Eigen::VectorXd& flat_action);

  void seed(std::uint64_t value);
  Action random_action();
  Action sample_action(Rng& rng) const;

  // Reward of applying `action` now, with the loads currently in place.
  // Does not change the environment. `converged` is false on solver failure.
  struct Lookahead {
    RewardBreakdown breakdown;
    SolveStatus status = SolveStatus::Converged;
  };
  Lookahead simulate(const Action& action) const;

  void validate_action(const Action& action) const;
  Eigen::VectorXd encode_action(const Action& action) const;
  Action decode_action(const Eigen::VectorXd& flat) const;
  Eigen::VectorXd wrap_obs(const Observation& obs) const;
  Observation unwrap_obs(const Eigen::VectorXd& flat) const;

  std::vector<SlotSpace> action_space() const;
  std::vector<SlotSpace> observation_space() const;
  std::size_t action_dim() const;
  std::size_t obs_dim() const;

  // Action that leaves capacitors and taps unchanged and idles batteries.
  Action noop_action() const;
  const Action& last_action() const { return last_action_; }

  const Circuit& circuit() const { return *circuit_; }
  const LoadProfileSet& profiles() const { return *profiles_; }
  const EnvConfig& config() const { return config_; }
  const DeviceState& device_state() const { return devices_; }
  const PowerFlowSolution& solution() const { return solution_; }
  const Observation& obs() const { return obs_; }
  int step_index() const { return step_; }
  int profile_index() const { return profile_; }
  bool done() const { return step_ >= config_.horizon; }

  // (bus index, phase) pairs in observation order.
  const std::vector<std::pair<std::size_t, Phase>>& voltage_slots() const { return voltage_slots_; }

 private:
  std::vector<double> load_multipliers(int hour) const;
  DeviceState apply(const Action& action) const;
  Observation observe() const;

  std::shared_ptr<const Circuit> circuit_;
  std::shared_ptr<const LoadProfileSet> profiles_;
  EnvConfig config_;
  Network network_;
  std::vector<std::size_t> load_keys_;
  std::vector<std::pair<std::size_t, Phase>> voltage_slots_;

  Rng rng_;
  int profile_ = 0;
  int step_ = 0;
  DeviceState devices_;
  PowerFlowSolution solution_;
  Observation obs_;
  Action last_action_;
};

}  // namespace vvc
