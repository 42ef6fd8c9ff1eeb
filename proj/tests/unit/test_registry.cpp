#include <fstream>
#include <future>

#include "doctest.h"
#include "fixtures.hpp"
#include "vvc/error.hpp"
#include "vvc/registry.hpp"

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

}  // namespace

TEST_SUITE("registry") {
  TEST_CASE("env names parse into base and suffixes") {
    CHECK(parse_env_name("13Bus_cbat_soc") == EnvName{"13Bus", true, true, 1.0});
    CHECK(parse_env_name("13Bus") == EnvName{"13Bus", false, false, 1.0});
    CHECK(parse_env_name("13Bus_s2.5") == EnvName{"13Bus", false, false, 2.5});
    CHECK(parse_env_name("34Bus_cbat_s1.5") == EnvName{"34Bus", true, false, 1.5});
    CHECK(parse_env_name("8500Node_soc_s0.75") == EnvName{"8500Node", false, true, 0.75});
    CHECK(code_of([] { parse_env_name("13Bus_sx"); }) == ErrorCode::MalformedScale);
    CHECK(code_of([] { parse_env_name("13Bus_s"); }) == ErrorCode::MalformedScale);
    CHECK(code_of([] { parse_env_name("13Bus_s-1"); }) == ErrorCode::MalformedScale);
    CHECK(code_of([] { parse_env_name("13Bus_s0"); }) == ErrorCode::MalformedScale);
    CHECK(code_of([] { parse_env_name(""); }) == ErrorCode::UnknownSystem);
    CHECK(code_of([] { parse_env_name("_s2"); }) == ErrorCode::UnknownSystem);
  }

  TEST_CASE("format and parse round-trip") {
    for (const EnvName& n : {EnvName{"13Bus", true, true, 2.5}, EnvName{"34Bus", false, true, 1.0},
                             EnvName{"123Bus", true, false, 0.1}, EnvName{"x", false, false, 3.0}})
      CHECK(parse_env_name(format_env_name(n)) == n);
    CHECK(format_env_name({"13Bus", true, false, 1.5}) == "13Bus_cbat_s1.5");
  }

  TEST_CASE("defaults are pre-registered for every system and variant") {
    const Registry reg = fixtures::registry();
    for (const char* sys : {"13Bus", "34Bus", "123Bus", "8500Node"})
      for (const char* suffix : {"", "_cbat", "_soc", "_cbat_soc"}) CHECK(reg.contains(std::string(sys) + suffix));
    CHECK(reg.names().size() == 16);
  }

  TEST_CASE("13Bus defaults follow the registration dictionary") {
    const Registry reg = fixtures::registry();
    const EnvSpec& s = reg.spec("13Bus");
    CHECK(s.system_name == "13Bus");
    CHECK(s.max_episode_steps == 24);
    CHECK(s.reg_act_num == 33);
    CHECK(s.bat_act_num == 33);
    CHECK(s.power_w == 10.0);
    CHECK(s.cap_w == 1.0 / 33);
    CHECK(s.reg_w == 1.0 / 33);
    CHECK(s.soc_w == 0.0);
    CHECK(s.dis_w == 6.0 / 33);
    CHECK_FALSE(reg.spec("13Bus_cbat").bat_act_num.has_value());
    CHECK(reg.spec("13Bus_soc").dis_w == 1.0 / 33);
    CHECK(reg.spec("13Bus_soc").soc_w == 100.0 / 33);
  }

  TEST_CASE("make_env applies the weights") {
    const Registry reg = fixtures::registry();
    const Env env = reg.make_env("13Bus");
    CHECK(env.config().weights == RewardWeights{10.0, 1.0 / 33, 1.0 / 33, 6.0 / 33, 0.0});
    const Env soc = reg.make_env("13Bus_soc");
    CHECK(soc.config().weights.dis == 1.0 / 33);
    CHECK(soc.config().weights.soc == 100.0 / 33);
    const Env cbat = reg.make_env("13Bus_cbat_s2.5");
    CHECK(cbat.config().battery.mode == BatteryMode::Continuous);
    CHECK(cbat.config().load_scale == 2.5);
    CHECK(cbat.profiles().scale() == 2.5);
  }

  TEST_CASE("scale 1.5 through the name matches explicit scaling") {
    const Registry reg = fixtures::registry();
    const Env named = reg.make_env("13Bus_s1.5");
    const Env base = reg.make_env("13Bus");
    CHECK(named.profiles() == scale_profiles(base.profiles(), 1.5));
  }

  TEST_CASE("registration errors") {
    Registry reg = fixtures::registry();
    const EnvSpec spec = reg.spec("13Bus");
    CHECK(code_of([&] { reg.register_env("13Bus", spec); }) == ErrorCode::DuplicateName);
    EnvSpec bad = spec;
    bad.max_episode_steps = 0;
    CHECK(code_of([&] { reg.register_env("bad", bad); }) == ErrorCode::InvalidSpec);
    bad = spec;
    bad.cap_w = -0.1;
    CHECK(code_of([&] { reg.register_env("bad", bad); }) == ErrorCode::InvalidSpec);
    bad = spec;
    bad.bat_act_num = 1;
    CHECK(code_of([&] { reg.register_env("bad", bad); }) == ErrorCode::InvalidSpec);
    CHECK(code_of([&] { reg.make_env("NoSuchBus"); }) == ErrorCode::UnknownSystem);
    CHECK(code_of([&] { reg.make_env("13Bus_sabc"); }) == ErrorCode::MalformedScale);
  }

  TEST_CASE("custom specs: longer horizon and soc penalty") {
    Registry reg = fixtures::registry();
    EnvSpec spec = reg.spec("13Bus");
    spec.max_episode_steps = 48;
    reg.register_env("13Bus_h48", spec);
    Env env = reg.make_env("13Bus_h48");
    CHECK(env.config().horizon == 48);
    int steps = 0;
    while (!env.done()) {
      env.step(env.noop_action());
      ++steps;
    }
    CHECK(steps == 48);

    EnvSpec soc = reg.spec("13Bus");
    soc.soc_w = 50.0 / 33;
    reg.register_env("13Bus_custom", soc);
    Env senv = reg.make_env("13Bus_custom");
    Action discharge = senv.noop_action();
    discharge.batteries[0] = 32;
    for (int i = 0; i < 24; ++i) {
      const StepResult r = senv.step(discharge);
      if (i < 23) {
        CHECK(r.breakdown.soc_error == 0.0);
      } else {
        CHECK(r.breakdown.soc_error > 0.0);
      }
    }
  }

  TEST_CASE("missing circuit file surfaces as CircuitLoadError") {
    Registry reg = fixtures::registry();
    EnvSpec spec = reg.spec("13Bus");
    spec.circuit.file = "systems/missing.json";
    reg.register_env("Ghost", spec);
    CHECK(code_of([&] { reg.make_env("Ghost"); }) == ErrorCode::CircuitLoadError);
  }

  TEST_CASE("generated systems build") {
    const Registry reg = fixtures::registry();
    const Env env = reg.make_env("123Bus");
    CHECK(env.circuit().buses.size() == 123);
    CHECK(env.config().weights.dis == 7.0 / 33);
  }

  TEST_CASE("workers are independent and can be built concurrently") {
    const Registry reg = fixtures::registry();
    auto a = std::async(std::launch::async, [&] { return reg.make_env("13Bus", 3); });
    auto b = std::async(std::launch::async, [&] { return reg.make_env("13Bus", 4); });
    Env e3 = a.get();
    Env e4 = b.get();
    CHECK(e3.config().seed != e4.config().seed);
    std::vector<Action> a3, a4;
    for (int i = 0; i < 5; ++i) {
      a3.push_back(e3.random_action());
      a4.push_back(e4.random_action());
    }
    CHECK(a3 != a4);
    e3.step(a3[0]);
    CHECK(e4.step_index() == 0);
    Env again = reg.make_env("13Bus", 3);
    CHECK(again.random_action() == a3[0]);
    CHECK(code_of([&] { reg.make_env("13Bus", -1); }) == ErrorCode::InvalidParameter);
  }
}
