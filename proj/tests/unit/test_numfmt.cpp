#include <charconv>
#include <cmath>

#include "doctest.h"
#include "vvc/error.hpp"
#include "vvc/numfmt.hpp"
#include "vvc/rng.hpp"

using namespace vvc;

TEST_SUITE("support") {
  TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.5) == "2.5");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1.0 / 3) == "0.3333333333333333");
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
      const double x = uniform_real(rng, -1e6, 1e6);
      CHECK(std::stod(format_double(x)) == x);
    }
  }

  TEST_CASE("numbers and fractions") {
    double v = 0.0;
    CHECK(parse_number_or_fraction("6.0/33", v));
    CHECK(v == 6.0 / 33);
    CHECK(parse_number_or_fraction("10.0", v));
    CHECK(v == 10.0);
    CHECK_FALSE(parse_number_or_fraction("1/0x", v));
    CHECK_FALSE(parse_number_or_fraction("", v));
    CHECK_FALSE(parse_number_or_fraction("a/3", v));
  }

  TEST_CASE("error codes have stable names") {
    CHECK(code_name(ErrorCode::UnknownSystem) == "UnknownSystem");
    CHECK(code_name(ErrorCode::InvalidAction) == "InvalidAction");
    const Error e(ErrorCode::EpisodeOver, "done");
    CHECK(e.code() == ErrorCode::EpisodeOver);
    CHECK(std::string(e.what()) == "done");
  }

  TEST_CASE("uniform_index covers its range") {
    Rng rng(0);
    int hits[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 5000; ++i) ++hits[uniform_index(rng, 5)];
    for (int h : hits) CHECK(h > 800);
    for (int i = 0; i < 1000; ++i) {
      const double u = uniform01(rng);
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }
}
