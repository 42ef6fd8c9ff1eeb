#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "vvc/circuit.hpp"
#include "vvc/env.hpp"
#include "vvc/profiles.hpp"
#include "vvc/registry.hpp"
#include "vvc/rng.hpp"

namespace fixtures {

inline std::string data_dir() { return VVC_TEST_DATA_DIR; }
inline std::string system_file(const std::string& name) { return data_dir() + "/systems/" + name; }

// Source "s" feeding "b" over one line on phase 0; base 1 MVA so kW/1000 = pu.
inline vvc::Circuit two_bus(double r, double x, double p_kw, double q_kvar) {
  vvc::Circuit c;
  c.source_bus = "s";
  c.buses = {{"b", {0}, 1.0}, {"s", {0}, 1.0}};
  c.edges = {{"e1", "s", "b", {0}, vvc::LineKind{{r}, {x}}}};
  if (p_kw != 0.0 || q_kvar != 0.0) c.loads = {{"ld", "b", 0, p_kw, q_kvar, "default"}};
  vvc::canonicalize(c);
  return c;
}

// Source "s" feeding "b" through a single-phase regulator.
inline vvc::Circuit regulator_pair() {
  vvc::Circuit c;
  c.source_bus = "s";
  c.buses = {{"b", {0}, 1.0}, {"s", {0}, 1.0}};
  c.edges = {{"e1", "s", "b", {0}, vvc::RegulatorKind{{"r1"}}}};
  c.regulators = {{"r1", "e1", 0, 33, 0.9, 1.1}};
  vvc::canonicalize(c);
  return c;
}

// Small radial circuit (at most 5 buses carrying any phase) with random
// impedances, loads, a regulator and a transformer now and then.
inline vvc::Circuit random_small_circuit(std::uint64_t seed) {
  vvc::Rng rng(seed);
  vvc::Circuit c;
  c.source_bus = "n0";
  const int n = 2 + static_cast<int>(vvc::uniform_index(rng, 4));
  c.buses.push_back({"n0", {0, 1, 2}, 1.0});
  bool used_regulator = false;
  for (int k = 1; k < n; ++k) {
    const int parent = static_cast<int>(vvc::uniform_index(rng, static_cast<std::uint64_t>(k)));
    const vvc::PhaseSet& pp = c.buses[parent].phases;
    vvc::PhaseSet phases;
    if (vvc::uniform01(rng) < 0.6) {
      phases = pp;
    } else {
      phases = {pp[vvc::uniform_index(rng, pp.size())]};
    }
    const std::string id = "n" + std::to_string(k);
    const std::string eid = "e" + std::to_string(k);
    c.buses.push_back({id, phases, 1.0});
    const double roll = vvc::uniform01(rng);
    if (!used_regulator && roll < 0.25) {
      used_regulator = true;
      vvc::RegulatorKind kind;
      for (vvc::Phase p : phases) {
        const std::string rid = "r" + std::to_string(k) + "_" + std::to_string(p);
        kind.regulator_ids.push_back(rid);
        c.regulators.push_back({rid, eid, p, 33, 0.9, 1.1});
      }
      c.edges.push_back({eid, c.buses[parent].id, id, phases, kind});
    } else if (roll < 0.35) {
      c.edges.push_back({eid, c.buses[parent].id, id, phases, vvc::TransformerKind{vvc::uniform_real(rng, 0.97, 1.03)}});
    } else {
      vvc::LineKind line;
      for (std::size_t i = 0; i < phases.size(); ++i) {
        line.r_pu.push_back(vvc::uniform_real(rng, 0.002, 0.05));
        line.x_pu.push_back(vvc::uniform_real(rng, 0.002, 0.08));
      }
      c.edges.push_back({eid, c.buses[parent].id, id, phases, line});
    }
    for (vvc::Phase p : phases)
      c.loads.push_back({"ld" + std::to_string(k) + "_" + std::to_string(p), id, p, vvc::uniform_real(rng, 0.0, 300.0),
                         vvc::uniform_real(rng, -50.0, 150.0), "default"});
  }
  c.base_mva = 1.0;
  c.source_v_pu = vvc::uniform_real(rng, 0.98, 1.04);
  vvc::canonicalize(c);
  return c;
}

inline std::shared_ptr<const vvc::LoadProfileSet> flat_profiles(const vvc::Circuit& c, int n = 4) {
  std::vector<std::string> keys;
  for (const auto& l : c.loads) keys.push_back(l.profile_key);
  if (keys.empty()) keys.push_back("default");
  return std::make_shared<const vvc::LoadProfileSet>(vvc::generate_profiles(n, 24, keys, 0));
}

// Three-phase two-bus feeder with one capacitor, one regulator per phase and
// one battery, but no loads at all. Tap ratios stay inside the voltage band
// and the capacitor sits behind the lossless regulator, so nothing is lost.
inline vvc::Circuit zero_load_devices() {
  vvc::Circuit c;
  c.source_bus = "s";
  c.buses = {{"a", {0, 1, 2}, 1.0}, {"b", {0, 1, 2}, 1.0}, {"s", {0, 1, 2}, 1.0}};
  c.edges = {{"e1", "s", "a", {0, 1, 2}, vvc::RegulatorKind{{"ra", "rb", "rc"}}},
             {"e2", "a", "b", {0, 1, 2}, vvc::LineKind{{0.01, 0.01, 0.01}, {0.02, 0.02, 0.02}}}};
  c.regulators = {{"ra", "e1", 0, 33, 0.96, 1.04}, {"rb", "e1", 1, 33, 0.96, 1.04}, {"rc", "e1", 2, 33, 0.96, 1.04}};
  c.capacitors = {{"c1", "a", {0, 1, 2}, 100.0}};
  c.batteries = {{"bat", "b", {0, 1, 2}, 400.0, 100.0, 1.0}};
  vvc::canonicalize(c);
  return c;
}

inline vvc::Env make_env(const vvc::Circuit& c, vvc::EnvConfig cfg = {}) {
  auto shared = std::make_shared<const vvc::Circuit>(c);
  return vvc::Env(shared, flat_profiles(c), cfg);
}

inline vvc::Registry registry() { return vvc::Registry::with_defaults(data_dir()); }

}  // namespace fixtures
