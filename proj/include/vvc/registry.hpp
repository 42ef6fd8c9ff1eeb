#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vvc/env.hpp"

namespace vvc {

// Where an environment's circuit comes from: a bundled JSON file, or the
// synthetic generator for systems larger than the bundled ones.
struct CircuitSource {
  std::string file;  // relative to the data directory; empty when generated
  int generate_buses = 0;
  std::uint64_t generate_seed = 0;

  bool operator==(const CircuitSource&) const = default;
};

struct EnvSpec {
  std::string system_name;
  CircuitSource circuit;
  int max_episode_steps = 24;
  int reg_act_num = 33;
  std::optional<int> bat_act_num = 33;  // nullopt: continuous battery
  double power_w = 10.0;
  double cap_w = 1.0 / 33;
  double reg_w = 1.0 / 33;
  double soc_w = 0.0;
  double dis_w = 6.0 / 33;
  int n_profiles = 48;
  std::uint64_t profile_seed = 0;

  bool operator==(const EnvSpec&) const = default;
};

struct EnvName {
  std::string base;
  bool cbat = false;
  bool soc = false;
  double scale = 1.0;

  bool operator==(const EnvName&) const = default;
};

// "<base>[_cbat][_soc][_s<scale>]", suffixes stripped from the right.
// Throws MalformedScale for a bad _s suffix, UnknownSystem for an empty base.
EnvName parse_env_name(const std::string& name);
std::string format_env_name(const EnvName& name);

class Registry {
 public:
  explicit Registry(std::string data_dir);

  // Registry seeded from <data_dir>/registry.json: every system in the file
  // is registered as vanilla, _cbat, _soc and _cbat_soc.
  static Registry with_defaults(const std::string& data_dir = default_data_dir());
  static std::string default_data_dir();

  void register_env(const std::string& name, const EnvSpec& spec);
  bool contains(const std::string& name) const { return specs_.count(name) != 0; }
  const EnvSpec& spec(const std::string& name) const;
  std::vector<std::string> names() const;

  // Builds an environment for a (possibly scaled) registered name. A worker
  // index shifts the environment's seed stream; nothing shared is mutated.
  Env make_env(const std::string& name, std::optional<int> worker_idx = std::nullopt) const;

  std::shared_ptr<const Circuit> load_circuit(const CircuitSource& source) const;
  const std::string& data_dir() const { return data_dir_; }

 private:
  std::string data_dir_;
  std::map<std::string, EnvSpec> specs_;
};

// Environment config for a spec at a given load scale.
EnvConfig env_config_for(const EnvSpec& spec, double load_scale);

}  // namespace vvc
