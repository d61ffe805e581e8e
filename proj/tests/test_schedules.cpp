#include "fedssca/schedules.hpp"

#include <doctest.h>

#include <algorithm>

using namespace fedssca;

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_SUITE("schedules") {
  TEST_CASE("first round returns the scale") {
    CHECK(rho({0.4, 0.9, 0.4, 0.45}, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(rho({1.0, 0.9, 0.5, 0.6}, 1) == 1.0);
    CHECK(gamma({0.6, 0.4, 0.3, 0.45}, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(gamma({0.6, 1.0, 0.3, 0.6}, 1) == 1.0);
  }

  TEST_CASE("power-law values") {
    // 0.4 / 32^0.4 = 0.4 / 4 exactly.
    CHECK(rho({0.4, 0.9, 0.4, 0.45}, 32) == doctest::Approx(0.1).epsilon(1e-14));
    // mpmath, 30 digits: 0.179573608347199164121720985707
    CHECK(gamma({0.6, 0.9, 0.3, 0.35}, 100) == doctest::Approx(0.179573608347199164).epsilon(1e-14));
  }

  TEST_CASE("values above one are clamped") {
    const StepSchedule s{2.0, 3.0, 0.5, 0.6};
    CHECK(rho(s, 1) == 1.0);
    CHECK(gamma(s, 2) == 1.0);
    CHECK(rho(s, 16) == doctest::Approx(0.5));
  }

  TEST_CASE("monotone non-increasing in t") {
    const StepSchedule s{0.6, 0.9, 0.3, 0.35};
    for (long t = 1; t < 500; ++t) {
      CHECK(rho(s, t + 1) <= rho(s, t));
      CHECK(gamma(s, t + 1) <= gamma(s, t));
    }
  }

  TEST_CASE("t = 0 is rejected") {
    CHECK_THROWS_AS(rho(StepSchedule{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(gamma(StepSchedule{}, 0), std::invalid_argument);
  }

  TEST_CASE("validation") {
    CHECK(is_valid({0.6, 0.9, 0.3, 0.35}));
    CHECK(is_valid(StepSchedule::coupled(0.4, 0.4, 0.4)));
    CHECK(has(validate({0.6, 0.9, 1.5, 1.6}), "alpha out of (0,1]"));
    CHECK(has(validate({0.6, 0.9, 0.4, 0.4}), "gamma/rho does not vanish"));
    CHECK(has(validate({0.6, 0.9, 0.4, 0.3}), "gamma/rho does not vanish"));
    CHECK(has(validate({0.0, 0.9, 0.3, 0.35}), "a1 must be positive"));
    CHECK(has(validate({0.6, -1.0, 0.3, 0.35}), "a2 must be positive"));
    CHECK(has(validate({0.6, 0.9, 0.95, 1.2}), "gamma is summable"));
  }

  TEST_CASE("square-summability is only a warning") {
    CHECK(has(warnings({0.6, 0.9, 0.3, 0.35}), "gamma not square-summable"));
    CHECK(warnings({0.6, 0.9, 0.5, 0.55}).empty());
  }
}
