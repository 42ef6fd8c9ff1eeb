#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "vvc/devices.hpp"
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

BatterySpec battery(double e, double p) { return {"b", "x", {0}, e, p, 1.0}; }

}  // namespace

TEST_SUITE("devices") {
  TEST_CASE("regulator ratio endpoints and midpoint") {
    const RegulatorSpec spec{"r", "e", 0, 33, 0.9, 1.1};
    CHECK(regulator_ratio(0, spec) == 0.9);
    CHECK(regulator_ratio(32, spec) == 1.1);
    CHECK(regulator_ratio(16, spec) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = 0.0;
    for (int t = 0; t < 33; ++t) {
      const double r = regulator_ratio(t, spec);
      CHECK(r > prev);
      CHECK(r == doctest::Approx(0.9 + t * 0.2 / 32).epsilon(1e-15));
      prev = r;
    }
    CHECK(code_of([&] { regulator_ratio(33, spec); }) == ErrorCode::TapOutOfRange);
    CHECK(code_of([&] { regulator_ratio(-1, spec); }) == ErrorCode::TapOutOfRange);
  }

  TEST_CASE("battery target power in both modes") {
    const BatteryActionSpace disc{BatteryMode::Discrete, 33};
    const BatteryActionSpace cont{BatteryMode::Continuous, 0};
    const auto spec = battery(400, 100);
    CHECK(battery_target_power(16, disc, spec) == 0.0);
    CHECK(battery_target_power(32, disc, spec) == 100.0);
    CHECK(battery_target_power(0, disc, spec) == -100.0);
    CHECK(battery_target_power(-1.0, cont, spec) == -100.0);
    CHECK(battery_target_power(0.25, cont, spec) == 25.0);
    CHECK(disc.zero_level() == 16);
    CHECK(code_of([&] { battery_target_power(33, disc, spec); }) == ErrorCode::ActionOutOfRange);
    CHECK(code_of([&] { battery_target_power(2.5, disc, spec); }) == ErrorCode::ActionOutOfRange);
    CHECK(code_of([&] { battery_target_power(1.01, cont, spec); }) == ErrorCode::ActionOutOfRange);
    // Discrete levels land inside the continuous range.
    for (int k = 0; k < 33; ++k) {
      const double n = battery_normalized_command(k, disc);
      CHECK(n >= -1.0);
      CHECK(n <= 1.0);
      CHECK(n == doctest::Approx(-1.0 + 2.0 * k / 32).epsilon(1e-15));
    }
  }

  TEST_CASE("apply_battery: energy-limited discharge") {
    const auto spec = battery(200, 100);
    const auto out = apply_battery({0.05, 0.0}, spec, 100.0, 1.0);
    CHECK(out.realized_p_kw == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(out.state.soc == 0.0);
    CHECK(out.state.last_p_kw == out.realized_p_kw);
  }

  TEST_CASE("apply_battery: full battery cannot charge") {
    const auto out = apply_battery({1.0, 0.0}, battery(200, 100), -50.0, 1.0);
    CHECK(out.realized_p_kw == 0.0);
    CHECK(out.state.soc == 1.0);
  }

  TEST_CASE("apply_battery: unconstrained case") {
    const auto out = apply_battery({0.5, 0.0}, battery(200, 100), 60.0, 1.0);
    CHECK(out.realized_p_kw == 60.0);
    CHECK(out.state.soc == doctest::Approx(0.2).epsilon(1e-15));
  }

  TEST_CASE("apply_battery: zero attempt is idempotent") {
    const BatteryState s{0.37, 12.0};
    const auto once = apply_battery(s, battery(200, 100), 0.0);
    const auto twice = apply_battery(once.state, battery(200, 100), 0.0);
    CHECK(once.state.soc == 0.37);
    CHECK(once.realized_p_kw == 0.0);
    CHECK(twice.state == once.state);
  }

  TEST_CASE("apply_battery: short dt lets power limit bind") {
    const auto out = apply_battery({0.5, 0.0}, battery(200, 100), 100.0, 0.25);
    CHECK(out.realized_p_kw == 100.0);
    CHECK(out.state.soc == doctest::Approx(0.375).epsilon(1e-15));
  }

  TEST_CASE("soc stays in [0,1] and energy is conserved over a random trajectory") {
    Rng rng(42);
    const auto spec = battery(250, 120);
    BatteryState s{1.0, 0.0};
    double energy = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double attempted = uniform_real(rng, -120.0, 120.0);
      const auto out = apply_battery(s, spec, attempted);
      CHECK(out.state.soc >= 0.0);
      CHECK(out.state.soc <= 1.0);
      CHECK(std::abs(out.realized_p_kw) <= std::abs(attempted));
      energy += out.realized_p_kw;
      s = out.state;
    }
    CHECK(std::abs((1.0 - s.soc) * spec.e_max_kwh - energy) <= 1e-9 * spec.e_max_kwh);
  }

  TEST_CASE("initial state and key checks") {
    const Circuit c = load_circuit_file(fixtures::system_file("13bus.json"));
    DeviceState s = initial_device_state(c);
    CHECK(s.capacitors.size() == 2);
    for (const auto& cap : s.capacitors) CHECK(cap.status == 1);
    for (const auto& reg : s.regulators) CHECK(reg.tap == 32);
    CHECK(s.batteries[0].soc == 1.0);
    CHECK(s.batteries[0].last_p_kw == 0.0);
    check_device_state(c, s);
    s.regulators[0].tap = 33;
    CHECK(code_of([&] { check_device_state(c, s); }) == ErrorCode::TapOutOfRange);
    s.regulators.pop_back();
    CHECK(code_of([&] { check_device_state(c, s); }) == ErrorCode::KeyMismatch);
  }
}
