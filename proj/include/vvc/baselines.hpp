#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vvc/env.hpp"
#include "vvc/rng.hpp"

namespace vvc {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void seed(std::uint64_t value) = 0;
  virtual void begin_episode(const Env& /*env*/) {}
  virtual Action act(const Env& env) = 0;
};

// Uniform sampling over the action space from the policy's own stream.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed = 0) : rng_(seed) {}
  std::string name() const override { return "random"; }
  void seed(std::uint64_t value) override { rng_.seed(value); }
  Action act(const Env& env) override { return env.sample_action(rng_); }

 private:
  Rng rng_;
};

struct LookaheadConfig {
  int tap_window = 2;         // regulator candidates tap-window .. tap+window
  int battery_grid = 9;       // evenly spaced normalized powers over [-1,1]
};

// Coordinate-wise greedy one-step lookahead: devices are swept in canonical
// order (capacitors, regulators, batteries), each set to the candidate with
// the best simulated reward while the others are held. Ties go to the
// candidate closest to the current setting, then to the smaller value.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(LookaheadConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "greedy"; }
  void seed(std::uint64_t) override {}
  Action act(const Env& env) override;

  // Candidate values for one action slot given the current action.
  std::vector<double> candidates(const Env& env, std::size_t slot, const Action& current) const;

 private:
  LookaheadConfig cfg_;
};

std::unique_ptr<Policy> make_policy(const std::string& name, std::uint64_t seed);

enum class ProfileSelection { Train, Test, All };

struct EvaluationConfig {
  int episodes = 1;
  std::uint64_t seed = 0;
  ProfileSelection profiles = ProfileSelection::Test;
  double gamma = 1.0;
  std::uint64_t split_seed = 0;
};

struct StepRecord {
  int episode = 0;
  int step = 0;
  double reward = 0.0;
  RewardBreakdown breakdown;
  bool converged = true;
};

struct EvalReport {
  std::vector<double> episode_returns;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  double mean_cap_error = 0.0;
  double mean_reg_error = 0.0;
  double mean_dis_error = 0.0;
  double mean_soc_error = 0.0;
  double mean_f_volt = 0.0;
  double mean_f_power = 0.0;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::vector<int> profile_indices;
  std::vector<StepRecord> steps;
};

// Runs cfg.episodes episodes, cycling through the selected profiles; the
// policy and the env are both seeded from cfg.seed. Returns are
// sum_i gamma^i r_i; per-component means are over all steps.
EvalReport evaluate(Policy& policy, Env& env, const EvaluationConfig& cfg);

// Population mean and standard deviation.
void summarize(const std::vector<double>& values, double& mean, double& stddev);

std::string report_to_json(const EvalReport& report, const std::string& env_name, const std::string& policy);
std::string steps_to_csv(const EvalReport& report);

struct GraphOptions {
  bool show_voltages = false;
  bool show_controllers = false;
  bool show_actions = false;
};

struct NodePosition {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

struct GraphDocument {
  std::string dot;
  std::vector<NodePosition> positions;

  std::string positions_csv() const;
};

// Layered tree layout: y is minus the depth from the source, x places leaves
// left to right in depth-first order and centers parents over children.
std::vector<NodePosition> tree_layout(const Circuit& circuit);

GraphDocument emit_graph(const Env& env, const GraphOptions& options = {});

}  // namespace vvc
