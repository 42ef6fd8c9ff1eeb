#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "newton.hpp"
#include "vvc/env.hpp"
#include "vvc/error.hpp"

using namespace vvc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected vvc::Error");
  return ErrorCode::IoError;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

double info_num(const Info& info, const std::string& key) { return std::get<double>(info.at(key)); }
bool info_flag(const Info& info, const std::string& key) { return std::get<bool>(info.at(key)); }

// Star of single-bus branches off a three-phase source, with hand-set voltages.
struct VoltageCase {
  Circuit circuit;
  PowerFlowSolution solution;
};

VoltageCase voltages(const std::vector<std::vector<double>>& per_bus) {
  VoltageCase vc;
  Circuit& c = vc.circuit;
  c.source_bus = "s";
  c.buses.push_back({"s", {0, 1, 2}, 1.0});
  for (std::size_t i = 0; i < per_bus.size(); ++i) {
    PhaseSet ph;
    for (std::size_t p = 0; p < per_bus[i].size(); ++p) ph.push_back(static_cast<Phase>(p));
    const std::string id = "n" + std::to_string(i);
    c.buses.push_back({id, ph, 1.0});
    c.edges.push_back({"e" + std::to_string(i), "s", id, ph, TransformerKind{1.0}});
  }
  canonicalize(c);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int p = 0; p < kMaxPhases; ++p) vc.solution.phases[p].v = Eigen::VectorXd::Constant(c.buses.size(), nan);
  for (int p = 0; p < kMaxPhases; ++p) vc.solution.phases[p].v[*c.bus_index("s")] = 1.0;
  for (std::size_t i = 0; i < per_bus.size(); ++i)
    for (std::size_t p = 0; p < per_bus[i].size(); ++p)
      vc.solution.phases[p].v[*c.bus_index("n" + std::to_string(i))] = per_bus[i][p];
  return vc;
}

Env bundled(const std::string& name) { return fixtures::registry().make_env(name); }

}  // namespace

TEST_SUITE("env") {
  TEST_CASE("reset on the 13-bus analog") {
    Env env = bundled("13Bus");
    const Observation o = env.reset(0);
    CHECK(o.capacitor_status == std::vector<int>{1, 1});
    CHECK(o.regulator_tap == std::vector<int>{32, 32, 32});
    CHECK(o.battery_soc == std::vector<double>{1.0});
    CHECK(o.battery_discharge == std::vector<double>{0.0});
    CHECK(env.step_index() == 0);
    CHECK(env.reset(0) == o);
    CHECK(code_of([&] { env.reset(-1); }) == ErrorCode::UnknownProfile);
    CHECK(code_of([&] { env.reset(env.profiles().n_profiles()); }) == ErrorCode::UnknownProfile);
  }

  TEST_CASE("zero-load no-op step earns nothing") {
    Env env = fixtures::make_env(fixtures::zero_load_devices());
    env.reset(0);
    const StepResult r = env.step(env.noop_action());
    CHECK(r.reward == 0.0);
    CHECK(r.breakdown.f_volt == 0.0);
    CHECK(r.breakdown.f_power == 0.0);
    CHECK(r.breakdown.cap_error == 0.0);
    CHECK(r.breakdown.reg_error == 0.0);
    CHECK(info_flag(r.info, "degenerate_total_power"));
  }

  TEST_CASE("toggling one capacitor costs w_cap") {
    Env env = fixtures::make_env(fixtures::zero_load_devices());
    Action a = env.noop_action();
    a.capacitors[0] = 0;
    const StepResult r = env.step(a);
    CHECK(r.breakdown.cap_error == 1.0 / 33);
    CHECK(info_num(r.info, "cap_error") == 1.0 / 33);
    CHECK(r.breakdown.reg_error == 0.0);
  }

  TEST_CASE("horizon contract") {
    EnvConfig cfg;
    cfg.horizon = 5;
    Env env = fixtures::make_env(fixtures::zero_load_devices(), cfg);
    for (int i = 0; i < 5; ++i) {
      const StepResult r = env.step(env.random_action());
      CHECK(r.done == (i == 4));
    }
    CHECK(env.done());
    CHECK(code_of([&] { env.step(env.noop_action()); }) == ErrorCode::EpisodeOver);
    env.reset(1);
    CHECK_FALSE(env.done());
  }

  TEST_CASE("f_volt examples") {
    auto one = voltages({{1.07, 1.00}});
    CHECK(f_volt(one.circuit, one.solution) == doctest::Approx(0.02).epsilon(1e-12));
    auto ok = voltages({{0.95, 1.0, 1.05}, {1.01}});
    CHECK(f_volt(ok.circuit, ok.solution) == 0.0);
    auto two = voltages({{0.90}, {1.10}});
    CHECK(f_volt(two.circuit, two.solution) == doctest::Approx(0.10).epsilon(1e-12));
    // Both excursions on one bus count.
    auto both = voltages({{0.93, 1.06}});
    CHECK(f_volt(both.circuit, both.solution) == doctest::Approx(0.03).epsilon(1e-12));
  }

  TEST_CASE("f_power examples") {
    PowerFlowSolution s;
    s.total_loss_pu = 0.02;
    s.substation_p_pu = 1.0;
    CHECK(f_power(s, 10.0).value == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_FALSE(f_power(s, 10.0).degenerate);
    s.total_loss_pu = 0.0;
    s.substation_p_pu = 0.0;
    CHECK(f_power(s, 10.0).value == 0.0);
    CHECK(f_power(s, 10.0).degenerate);

    const Circuit c = fixtures::two_bus(0.01, 0.01, 100.0, 50.0);
    const DeviceState st = initial_device_state(c);
    const auto inj = oracle::direct_injections(c, st);
    const auto ref = oracle::newton_solve(c, st, inj);
    const double ref_ratio = 0.01 * ref.phases[0].l[0] / ref.phases[0].p[0];
    const auto sol = solve(c, st, inj);
    CHECK(std::abs(f_power(sol, 1.0).value - ref_ratio) <= 1e-6);
  }

  TEST_CASE("f_ctrl examples") {
    const Circuit c = fixtures::zero_load_devices();
    RewardWeights w;
    w.soc = 100.0 / 33;
    const DeviceState prev = initial_device_state(c);
    DeviceState next = prev;
    next.regulators[0].tap = 30;
    CHECK(f_ctrl(c, prev, next, 0, 24, w).reg_error == doctest::Approx(2.0 / 33).epsilon(1e-15));

    next = prev;
    next.batteries[0].last_p_kw = -50.0;
    CHECK(f_ctrl(c, prev, next, 0, 24, w).dis_error == 0.0);
    next.batteries[0].last_p_kw = 50.0;
    CHECK(f_ctrl(c, prev, next, 0, 24, w).dis_error == doctest::Approx(w.dis * 0.5).epsilon(1e-15));

    next = prev;
    next.batteries[0].soc = 0.4;
    CHECK(f_ctrl(c, prev, next, 23, 24, w).soc_error == doctest::Approx(100.0 / 33 * 0.6).epsilon(1e-15));
    CHECK(f_ctrl(c, prev, next, 23, 24, w).soc_error == doctest::Approx(1.818).epsilon(1e-3));
    CHECK(f_ctrl(c, prev, next, 22, 24, w).soc_error == 0.0);

    DeviceState broken = prev;
    broken.capacitors.clear();
    CHECK(code_of([&] { f_ctrl(c, prev, broken, 0, 24, w); }) == ErrorCode::KeyMismatch);
    CHECK(code_of([&] { f_ctrl(c, prev, next, 24, 24, w); }) == ErrorCode::InvalidParameter);
  }

  TEST_CASE("with w_soc = 0 the control terms do not depend on the step index") {
    const Circuit c = fixtures::zero_load_devices();
    const RewardWeights w;
    const DeviceState prev = initial_device_state(c);
    DeviceState next = prev;
    next.batteries[0].soc = 0.3;
    next.batteries[0].last_p_kw = 70.0;
    next.regulators[1].tap = 3;
    const auto first = f_ctrl(c, prev, next, 0, 24, w);
    for (int i = 1; i < 24; ++i) {
      const auto t = f_ctrl(c, prev, next, i, 24, w);
      CHECK(t.cap_error == first.cap_error);
      CHECK(t.reg_error == first.reg_error);
      CHECK(t.dis_error == first.dis_error);
      CHECK(t.soc_error == 0.0);
    }
  }

  TEST_CASE("random actions respect the action space") {
    Env disc = bundled("13Bus");
    Env cont = bundled("13Bus_cbat");
    for (int i = 0; i < 200; ++i) {
      const Action a = disc.random_action();
      disc.validate_action(a);
      CHECK(a.batteries[0] == std::floor(a.batteries[0]));
      const Action b = cont.random_action();
      cont.validate_action(b);
      CHECK(b.batteries[0] >= -1.0);
      CHECK(b.batteries[0] <= 1.0);
    }
    disc.seed(5);
    const Action x = disc.random_action();
    disc.seed(5);
    CHECK(disc.random_action() == x);
  }

  TEST_CASE("action and observation spaces") {
    Env env = bundled("13Bus");
    const auto as = env.action_space();
    REQUIRE(as.size() == 6);
    CHECK(as[0].type == SlotSpace::Type::Discrete);
    CHECK(as[0].n == 2);
    CHECK(as[2].n == 33);
    CHECK(as[5].n == 33);
    Env cenv = bundled("13Bus_cbat");
    const auto cs = cenv.action_space();
    CHECK(cs[5].type == SlotSpace::Type::Box);
    CHECK(cs[5].low == -1.0);
    CHECK(cs[5].high == 1.0);
    CHECK(env.observation_space().size() == env.obs_dim());
  }

  TEST_CASE("wrapped observation layout") {
    Env env = bundled("13Bus");
    const Observation o = env.obs();
    const Eigen::VectorXd v = env.wrap_obs(o);
    const auto n = static_cast<Eigen::Index>(o.voltages.size());
    CHECK(static_cast<std::size_t>(v.size()) == env.obs_dim());
    CHECK(v.size() == n + 2 + 3 + 2);
    CHECK(v[n] == 1.0);
    CHECK(v[n + 1] == 1.0);
    CHECK(v[n + 2] == 32.0);
    CHECK(v[n + 5] == 1.0);  // soc
    CHECK(v[n + 6] == 0.0);  // normalized discharge
    CHECK(env.unwrap_obs(v) == o);
    CHECK(env.wrap_obs(env.unwrap_obs(v)) == v);

    // Voltages are ordered by bus id then phase.
    const auto& slots = env.voltage_slots();
    for (std::size_t i = 1; i < slots.size(); ++i) {
      const auto& a = env.circuit().buses[slots[i - 1].first].id;
      const auto& b = env.circuit().buses[slots[i].first].id;
      CHECK((a < b || (a == b && slots[i - 1].second < slots[i].second)));
    }

    Circuit plain = fixtures::two_bus(0.01, 0.01, 10.0, 5.0);
    Env bare = fixtures::make_env(plain);
    CHECK(bare.obs_dim() == 2);
    CHECK(bare.wrap_obs(bare.obs()).size() == 2);
  }

  TEST_CASE("invalid actions name the offending slot") {
    Env env = bundled("13Bus");
    Action a = env.noop_action();
    a.regulators[1] = 40;
    CHECK(code_of([&] { env.step(a); }) == ErrorCode::InvalidAction);
    CHECK(message_of([&] { env.step(a); }).find("slot 3") != std::string::npos);
    a = env.noop_action();
    a.capacitors[0] = 2;
    CHECK(message_of([&] { env.step(a); }).find("slot 0") != std::string::npos);
    a = env.noop_action();
    a.batteries[0] = 16.5;
    CHECK(message_of([&] { env.step(a); }).find("slot 5") != std::string::npos);
    CHECK(code_of([&] { env.step(Eigen::VectorXd::Zero(4)); }) == ErrorCode::InvalidAction);
    CHECK(env.step_index() == 0);
  }

  TEST_CASE("action pass-through and battery consistency") {
    for (const char* name : {"13Bus", "13Bus_cbat", "34Bus", "34Bus_cbat"}) {
      Env env = bundled(name);
      env.seed(3);
      env.reset(2);
      for (int i = 0; i < 24; ++i) {
        const DeviceState before = env.device_state();
        const Action a = env.random_action();
        const StepResult r = env.step(a);
        CHECK(r.obs.capacitor_status == a.capacitors);
        CHECK(r.obs.regulator_tap == a.regulators);
        for (std::size_t b = 0; b < a.batteries.size(); ++b) {
          const auto& spec = env.circuit().batteries[b];
          const double attempted = battery_target_power(a.batteries[b], env.config().battery, spec);
          const double realized = env.device_state().batteries[b].last_p_kw;
          CHECK(r.obs.battery_discharge[b] == realized / spec.p_max_kw);
          CHECK(std::abs(realized) <= std::abs(attempted));
          const double expected = apply_battery(before.batteries[b], spec, attempted).realized_p_kw;
          CHECK(realized == expected);
        }
      }
    }
  }

  TEST_CASE("reward equals minus the sum of its components") {
    Env env = bundled("34Bus_soc");
    env.seed(11);
    double total = 0.0;
    for (int i = 0; i < 24; ++i) {
      const StepResult r = env.step(env.random_action());
      const double sum = info_num(r.info, "f_volt") + info_num(r.info, "f_power") + info_num(r.info, "cap_error") +
                         info_num(r.info, "reg_error") + info_num(r.info, "dis_error") + info_num(r.info, "soc_error");
      CHECK(r.reward + sum == 0.0);
      CHECK(info_num(r.info, "av_cap_err") == info_num(r.info, "cap_error") / 2);
      if (i < 23) CHECK(info_num(r.info, "soc_error") == 0.0);
      total += r.reward;
    }
    CHECK(std::isfinite(total));
  }

  TEST_CASE("trajectories are determined by seed, profile and actions") {
    auto run = [] {
      Env env = bundled("13Bus_cbat");
      env.seed(99);
      env.reset(4);
      std::vector<double> rewards;
      for (int i = 0; i < 24; ++i) rewards.push_back(env.step(env.random_action()).reward);
      return rewards;
    };
    CHECK(run() == run());
  }

  TEST_CASE("simulate leaves the environment untouched") {
    Env env = bundled("13Bus");
    env.step(env.random_action());
    const Observation before = env.obs();
    const int step = env.step_index();
    Action a = env.noop_action();
    a.regulators[0] = 0;
    const auto look = env.simulate(a);
    CHECK(look.status == SolveStatus::Converged);
    CHECK(look.breakdown.reg_error > 0.0);
    CHECK(env.obs() == before);
    CHECK(env.step_index() == step);
  }

  TEST_CASE("load at step i follows the profile exactly") {
    Env env = bundled("13Bus_s1.5");
    env.reset(3);
    const auto& c = env.circuit();
    const auto& prof = env.profiles();
    CHECK(prof.scale() == 1.5);
    const auto raw = generate_profiles(prof.n_profiles(), 24, prof.keys(), fixtures::registry().spec("13Bus").profile_seed);
    const std::size_t key = prof.key_index(c.loads[0].profile_key);
    for (int h = 0; h < 24; ++h) CHECK(prof.multiplier(3, key, h) == raw.multiplier(3, key, h) * 1.5);
  }

  TEST_CASE("configuration is validated") {
    EnvConfig cfg;
    cfg.horizon = 0;
    CHECK_THROWS_AS(fixtures::make_env(fixtures::zero_load_devices(), cfg), Error);
    cfg = {};
    cfg.v_lower = 1.1;
    CHECK_THROWS_AS(fixtures::make_env(fixtures::zero_load_devices(), cfg), Error);
    cfg = {};
    cfg.weights.cap = -1.0;
    CHECK_THROWS_AS(fixtures::make_env(fixtures::zero_load_devices(), cfg), Error);
  }
}
