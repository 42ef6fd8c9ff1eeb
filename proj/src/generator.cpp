#include <algorithm>
#include <cmath>
#include <string>

#include "vvc/circuit.hpp"
#include "vvc/error.hpp"
#include "vvc/rng.hpp"

namespace vvc {

namespace {

// Worst-case linearized drop in v^2 at base load after impedance scaling.
constexpr double kTargetDropV2 = 0.08;

std::string padded(const char* prefix, int k, int width) {
  std::string digits = std::to_string(k);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

int device_count(double density, int n_buses, int max_count) {
  if (density <= 0.0) return 0;
  const int n = static_cast<int>(std::lround(density * n_buses));
  return std::clamp(n, 1, max_count);
}

// Picks `count` distinct values from [lo, hi) (hi - lo >= count).
std::vector<int> pick_distinct(Rng& rng, int lo, int hi, int count) {
  std::vector<int> pool;
  for (int k = lo; k < hi; ++k) pool.push_back(k);
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<int>(uniform_index(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Circuit generate_radial_system(int n_buses, std::uint64_t seed, const DeviceDensity& density) {
  if (n_buses < 2) throw Error(ErrorCode::InvalidParameter, "generate_radial_system: n_buses must be >= 2");
  for (double d : {density.capacitor, density.regulator, density.battery}) {
    if (!(d >= 0.0 && d <= 1.0))
      throw Error(ErrorCode::InvalidParameter, "generate_radial_system: densities must lie in [0,1]");
  }

  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(n_buses)));
  const int width = static_cast<int>(std::to_string(n_buses - 1).size());

  Circuit c;
  c.source_bus = padded("b", 0, width);
  std::vector<int> parent(n_buses, -1);
  std::vector<PhaseSet> phases(n_buses);
  phases[0] = {0, 1, 2};
  for (int k = 1; k < n_buses; ++k) {
    // Attach near the most recent buses so feeders grow long trunks.
    const int lo = std::max(0, k - 4);
    parent[k] = lo + static_cast<int>(uniform_index(rng, k - lo));
    const PhaseSet& up = phases[parent[k]];
    if (up.size() == 3 && uniform01(rng) < 0.75) {
      phases[k] = up;
    } else {
      phases[k] = {up[uniform_index(rng, up.size())]};
    }
  }
  for (int k = 0; k < n_buses; ++k) c.buses.push_back({padded("b", k, width), phases[k], 7.2});

  const int n_edges = n_buses - 1;
  const int n_reg_edges = device_count(density.regulator, n_buses, n_edges);
  std::vector<bool> is_reg_edge(n_buses, false);
  for (int k : pick_distinct(rng, 1, n_buses, n_reg_edges)) is_reg_edge[k] = true;

  // Raw impedances; scaled below once downstream loads are known.
  std::vector<double> r_raw(n_buses, 0.0), x_raw(n_buses, 0.0);
  for (int k = 1; k < n_buses; ++k) {
    r_raw[k] = uniform_real(rng, 0.5, 1.5);
    x_raw[k] = r_raw[k] * uniform_real(rng, 1.0, 2.0);
  }

  // One load per phase on every non-source bus.
  std::vector<std::array<double, kMaxPhases>> p_load(n_buses, {0, 0, 0}), q_load(n_buses, {0, 0, 0});
  for (int k = 1; k < n_buses; ++k) {
    const std::string key = uniform01(rng) < 0.7 ? "residential" : "commercial";
    for (Phase p : phases[k]) {
      Load l;
      l.id = padded("ld", k, width) + "_" + std::to_string(p);
      l.bus = c.buses[k].id;
      l.phase = p;
      l.base_p_kw = std::round(uniform_real(rng, 10.0, 60.0));
      l.base_q_kvar = std::round(l.base_p_kw * uniform_real(rng, 0.3, 0.5));
      l.profile_key = key;
      p_load[k][p] = c.kw_to_pu(l.base_p_kw);
      q_load[k][p] = c.kw_to_pu(l.base_q_kvar);
      c.loads.push_back(std::move(l));
    }
  }

  // Downstream sums (children always have larger indices than parents).
  auto p_down = p_load;
  auto q_down = q_load;
  for (int k = n_buses - 1; k >= 1; --k) {
    for (int p = 0; p < kMaxPhases; ++p) {
      p_down[parent[k]][p] += p_down[k][p];
      q_down[parent[k]][p] += q_down[k][p];
    }
  }
  std::vector<std::array<double, kMaxPhases>> drop(n_buses, {0, 0, 0});
  double worst = 0.0;
  for (int k = 1; k < n_buses; ++k) {
    for (Phase p : phases[k]) {
      const double d = is_reg_edge[k] ? 0.0 : 2.0 * (r_raw[k] * p_down[k][p] + x_raw[k] * q_down[k][p]);
      drop[k][p] = drop[parent[k]][p] + d;
      worst = std::max(worst, drop[k][p]);
    }
  }
  const double scale = worst > 0.0 ? kTargetDropV2 / worst : 0.0;

  for (int k = 1; k < n_buses; ++k) {
    Edge e;
    e.id = padded("e", k, width);
    e.from_bus = c.buses[parent[k]].id;
    e.to_bus = c.buses[k].id;
    e.phases = phases[k];
    if (is_reg_edge[k]) {
      RegulatorKind kind;
      for (Phase p : phases[k]) {
        RegulatorSpec reg;
        reg.id = padded("reg", k, width) + "_" + std::to_string(p);
        reg.edge = e.id;
        reg.phase = p;
        kind.regulator_ids.push_back(reg.id);
        c.regulators.push_back(std::move(reg));
      }
      e.kind = std::move(kind);
    } else {
      LineKind kind;
      for (std::size_t i = 0; i < phases[k].size(); ++i) {
        kind.r_pu.push_back(r_raw[k] * scale);
        kind.x_pu.push_back(x_raw[k] * scale);
      }
      e.kind = std::move(kind);
    }
    c.edges.push_back(std::move(e));
  }

  const int n_caps = device_count(density.capacitor, n_buses, n_edges);
  for (int k : pick_distinct(rng, 1, n_buses, n_caps)) {
    static constexpr double kKvar[] = {50.0, 100.0, 150.0};
    c.capacitors.push_back({padded("cap", k, width), c.buses[k].id, phases[k], kKvar[uniform_index(rng, 3)]});
  }
  const int n_bats = device_count(density.battery, n_buses, n_edges);
  for (int k : pick_distinct(rng, 1, n_buses, n_bats)) {
    static constexpr double kPower[] = {50.0, 100.0, 200.0};
    const double p_max = kPower[uniform_index(rng, 3)];
    c.batteries.push_back({padded("bat", k, width), c.buses[k].id, phases[k], 4.0 * p_max, p_max, 1.0});
  }

  canonicalize(c);
  return c;
}

}  // namespace vvc
