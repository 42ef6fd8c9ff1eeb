#include "vvc/registry.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vvc/error.hpp"
#include "vvc/numfmt.hpp"

#ifndef VVC_DEFAULT_DATA_DIR
#define VVC_DEFAULT_DATA_DIR "data"
#endif

namespace vvc {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

EnvName parse_env_name(const std::string& name) {
  EnvName out;
  std::string rest = name;
  const auto last = rest.rfind('_');
  if (last != std::string::npos && last + 1 < rest.size() && rest[last + 1] == 's' && rest.substr(last + 1) != "soc") {
    const std::string text = rest.substr(last + 2);
    double scale = 0.0;
    const char* first = text.data();
    const char* end = first + text.size();
    auto [ptr, ec] = std::from_chars(first, end, scale);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(scale) || !(scale > 0.0))
      throw Error(ErrorCode::MalformedScale, "malformed load scale in environment name '" + name + "'");
    out.scale = scale;
    rest.resize(last);
  }
  if (ends_with(rest, "_soc")) {
    out.soc = true;
    rest.resize(rest.size() - 4);
  }
  if (ends_with(rest, "_cbat")) {
    out.cbat = true;
    rest.resize(rest.size() - 5);
  }
  if (rest.empty()) throw Error(ErrorCode::UnknownSystem, "environment name '" + name + "' has no system name");
  out.base = rest;
  return out;
}

std::string format_env_name(const EnvName& name) {
  std::string out = name.base;
  if (name.cbat) out += "_cbat";
  if (name.soc) out += "_soc";
  if (name.scale != 1.0) out += "_s" + format_double(name.scale);
  return out;
}

Registry::Registry(std::string data_dir) : data_dir_(std::move(data_dir)) {}

std::string Registry::default_data_dir() {
  if (const char* env = std::getenv("VVC_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return VVC_DEFAULT_DATA_DIR;
}

namespace {

double weight(const json& obj, const std::string& key, const std::string& system) {
  if (!obj.contains(key)) throw Error(ErrorCode::InvalidSpec, "registry entry '" + system + "' lacks '" + key + "'");
  const json& v = obj.at(key);
  if (v.is_number()) return v.get<double>();
  double out = 0.0;
  if (v.is_string() && parse_number_or_fraction(v.get<std::string>(), out)) return out;
  throw Error(ErrorCode::InvalidSpec, "registry entry '" + system + "': '" + key + "' must be a number or fraction");
}

int integer(const json& obj, const std::string& key, const std::string& system) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer())
    throw Error(ErrorCode::InvalidSpec, "registry entry '" + system + "': '" + key + "' must be an integer");
  return obj.at(key).get<int>();
}

void check_spec(const EnvSpec& spec, const std::string& name) {
  auto bad = [&](const std::string& what) { throw Error(ErrorCode::InvalidSpec, "spec '" + name + "': " + what); };
  if (spec.max_episode_steps < 1) bad("max_episode_steps must be positive");
  if (spec.reg_act_num < 2) bad("reg_act_num must be >= 2");
  if (spec.bat_act_num && *spec.bat_act_num < 2) bad("bat_act_num must be >= 2 or continuous");
  for (double w : {spec.power_w, spec.cap_w, spec.reg_w, spec.soc_w, spec.dis_w})
    if (!(w >= 0.0) || !std::isfinite(w)) bad("weights must be finite and non-negative");
  if (spec.circuit.file.empty() && spec.circuit.generate_buses < 2) bad("needs a circuit file or generator size");
  if (spec.n_profiles < 2) bad("n_profiles must be >= 2");
}

}  // namespace

Registry Registry::with_defaults(const std::string& data_dir) {
  Registry reg(data_dir);
  const std::string path = data_dir + "/registry.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open registry file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, "registry file '" + path + "': " + e.what());
  }
  for (const auto& [system, entry] : root.items()) {
    EnvSpec base;
    base.system_name = entry.value("system_name", system);
    if (entry.contains("circuit_file")) {
      base.circuit.file = entry.at("circuit_file").get<std::string>();
    } else if (entry.contains("circuit_generator")) {
      const auto& gen = entry.at("circuit_generator");
      base.circuit.generate_buses = integer(gen, "n_buses", system);
      base.circuit.generate_seed = static_cast<std::uint64_t>(integer(gen, "seed", system));
    }
    base.max_episode_steps = integer(entry, "max_episode_steps", system);
    base.reg_act_num = integer(entry, "reg_act_num", system);
    if (entry.contains("bat_act_num") && entry.at("bat_act_num").is_string() &&
        entry.at("bat_act_num").get<std::string>() == "inf") {
      base.bat_act_num.reset();
    } else {
      base.bat_act_num = integer(entry, "bat_act_num", system);
    }
    base.power_w = weight(entry, "power_w", system);
    base.cap_w = weight(entry, "cap_w", system);
    base.reg_w = weight(entry, "reg_w", system);
    base.soc_w = weight(entry, "soc_w", system);
    base.dis_w = weight(entry, "dis_w", system);
    if (entry.contains("n_profiles")) base.n_profiles = integer(entry, "n_profiles", system);
    if (entry.contains("profile_seed")) base.profile_seed = static_cast<std::uint64_t>(integer(entry, "profile_seed", system));

    EnvSpec with_soc = base;
    if (entry.contains("with_soc")) {
      with_soc.dis_w = weight(entry.at("with_soc"), "dis_w", system);
      with_soc.soc_w = weight(entry.at("with_soc"), "soc_w", system);
    }
    for (bool cbat : {false, true}) {
      for (bool soc : {false, true}) {
        EnvSpec spec = soc ? with_soc : base;
        if (cbat) spec.bat_act_num.reset();
        reg.register_env(format_env_name({system, cbat, soc, 1.0}), spec);
      }
    }
  }
  return reg;
}

void Registry::register_env(const std::string& name, const EnvSpec& spec) {
  if (specs_.count(name) != 0) throw Error(ErrorCode::DuplicateName, "environment '" + name + "' is already registered");
  check_spec(spec, name);
  specs_.emplace(name, spec);
}

const EnvSpec& Registry::spec(const std::string& name) const {
  auto it = specs_.find(name);
  if (it == specs_.end()) throw Error(ErrorCode::UnknownSystem, "no registered environment '" + name + "'");
  return it->second;
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, spec] : specs_) out.push_back(name);
  return out;
}

std::shared_ptr<const Circuit> Registry::load_circuit(const CircuitSource& source) const {
  try {
    if (!source.file.empty()) return std::make_shared<const Circuit>(load_circuit_file(data_dir_ + "/" + source.file));
    return std::make_shared<const Circuit>(generate_radial_system(source.generate_buses, source.generate_seed));
  } catch (const Error& e) {
    throw Error(ErrorCode::CircuitLoadError, std::string("cannot load circuit: ") + e.what());
  }
}

EnvConfig env_config_for(const EnvSpec& spec, double load_scale) {
  EnvConfig cfg;
  cfg.horizon = spec.max_episode_steps;
  cfg.n_reg_act = spec.reg_act_num;
  if (spec.bat_act_num) {
    cfg.battery = {BatteryMode::Discrete, *spec.bat_act_num};
  } else {
    cfg.battery = {BatteryMode::Continuous, 0};
  }
  cfg.weights = {spec.power_w, spec.cap_w, spec.reg_w, spec.dis_w, spec.soc_w};
  cfg.load_scale = load_scale;
  return cfg;
}

Env Registry::make_env(const std::string& name, std::optional<int> worker_idx) const {
  const EnvName parsed = parse_env_name(name);
  const std::string key = format_env_name({parsed.base, parsed.cbat, parsed.soc, 1.0});
  auto it = specs_.find(key);
  if (it == specs_.end()) throw Error(ErrorCode::UnknownSystem, "no registered environment '" + key + "'");
  const EnvSpec& spec = it->second;

  auto circuit = load_circuit(spec.circuit);
  std::vector<std::string> keys;
  for (const auto& load : circuit->loads) keys.push_back(load.profile_key);
  if (keys.empty()) keys.push_back("default");
  auto profiles = std::make_shared<const LoadProfileSet>(generate_profiles(spec.n_profiles, 24, keys, spec.profile_seed));

  EnvConfig cfg = env_config_for(spec, parsed.scale);
  if (worker_idx) {
    if (*worker_idx < 0) throw Error(ErrorCode::InvalidParameter, "worker_idx must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(*worker_idx) + 1;
  }
  return Env(std::move(circuit), std::move(profiles), cfg);
}

}  // namespace vvc
