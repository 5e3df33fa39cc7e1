#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gearshift/motor_sizing.hpp"

using namespace gearshift;
using fixtures::rel;

namespace {

VehicleParams gross() {
  VehicleParams p;
  p.mass = 8500.0;
  return p;
}

std::vector<DesignSpec> specs() {
  return {{"extreme grade", 20.0 / 3.6, 0.20, DurationClass::short_term},
          {"highway cruise", 110.0 / 3.6, 0.0, DurationClass::continuous},
          {"highway grade", 90.0 / 3.6, 0.05, DurationClass::short_term}};
}

MotorLimits motor(double tmax) {
  MotorLimits m;
  m.max_torque = tmax;
  return m;
}

}  // namespace

TEST_CASE("wheel requirements of the design specs") {
  const auto p = gross();
  const auto s = specs();
  const auto w1 = wheel_requirements(p, s[0]);
  CHECK(w1.torque == doctest::Approx(5100.98).epsilon(1e-4));
  CHECK(w1.power == doctest::Approx(w1.torque * w1.speed));

  // Highway cruise: drag plus rolling times speed, computed by hand.
  const double v = 110.0 / 3.6;
  const double force = 0.5 * 1.2 * 6.0 * 0.7 * v * v + 8500.0 * 9.81 * 0.007;
  const auto w2 = wheel_requirements(p, s[1]);
  CHECK(rel(w2.power, force * v) < 1e-12);
  CHECK(w2.power == doctest::Approx(89.7e3).epsilon(2e-3));
  CHECK(w2.speed == doctest::Approx(101.85).epsilon(1e-4));
}

TEST_CASE("motor requirements over a ratio set") {
  const auto p = gross();
  const auto s = specs();
  const auto w1 = wheel_requirements(p, s[0]);
  CHECK(motor_requirements(w1, {7.5}).torque == doctest::Approx(680.13).epsilon(1e-4));
  CHECK(motor_requirements(w1, {12.0, 6.0}).torque == doctest::Approx(425.08).epsilon(1e-4));

  const auto w2 = wheel_requirements(p, s[1]);
  CHECK(rad_s_to_rpm(motor_requirements(w2, {7.5}).speed) == doctest::Approx(7294.6).epsilon(1e-4));
  CHECK(motor_requirements(w2, {12.0, 6.0}).speed == doctest::Approx(6.0 * w2.speed));

  // Efficiency only scales power.
  const auto lossy = motor_requirements(w2, {7.5}, 0.9);
  CHECK(lossy.power == doctest::Approx(w2.power / 0.9));
  CHECK(lossy.torque == doctest::Approx(motor_requirements(w2, {7.5}).torque / 0.9));

  CHECK_THROWS_AS(motor_requirements(w2, {}), std::invalid_argument);
  CHECK_THROWS_AS(motor_requirements(w2, {7.5}, 1.5), std::invalid_argument);
}

TEST_CASE("motor checks") {
  const auto p = gross();
  const auto s = specs();
  SUBCASE("700 N m with a single ratio passes") {
    CHECK(check_motor(motor(700.0), p, s, {7.5}).pass);
  }
  SUBCASE("450 N m with a single ratio fails the grade") {
    const auto r = check_motor(motor(450.0), p, s, {7.5});
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.specs[0].pass);
    CHECK_FALSE(r.specs[0].per_ratio[0].torque_ok);
    CHECK(r.specs[1].pass);
  }
  SUBCASE("450 N m with two speeds passes") {
    const auto r = check_motor(motor(450.0), p, s, {12.0, 6.0});
    CHECK(r.pass);
    for (const auto& sc : r.specs) {
      bool some = false;
      for (const auto& rc : sc.per_ratio) some = some || rc.pass();
      CHECK(sc.pass == some);
    }
  }
  SUBCASE("passing is monotone in every motor limit") {
    for (const auto& ratios : {std::vector<double>{7.5}, std::vector<double>{12.0, 6.0}}) {
      bool was = false;
      for (double tmax = 300.0; tmax <= 900.0; tmax += 25.0) {
        const bool ok = check_motor(motor(tmax), p, s, ratios).pass;
        if (was) CHECK(ok);
        was = ok;
      }
      CHECK(was);
    }
  }
}

TEST_CASE("capacity envelope") {
  const auto p = gross();
  const auto m = motor(450.0);
  const auto two = capacity_envelope(m, {12.0, 6.0}, p, 140.0, 141);
  const auto low = capacity_envelope(m, {12.0}, p, 140.0, 141);
  const auto high = capacity_envelope(m, {6.0}, p, 140.0, 141);
  const auto single = capacity_envelope(m, {7.5}, p, 140.0, 141);
  const auto rated_single = capacity_envelope(motor(700.0), {7.5}, p, 140.0, 141);
  REQUIRE(two.size() == 141);
  CHECK(rated_single[20].wheel_torque >= wheel_requirements(p, specs()[0]).torque);
  CHECK(two.front().v_kmh == 0.0);
  CHECK(two.back().v_kmh == 140.0);

  // Low speed: gear 1 dominates at full torque.
  CHECK(two[10].wheel_torque == doctest::Approx(12.0 * 450.0));
  CHECK(two[10].limiting_factor == "torque");

  for (std::size_t i = 0; i < two.size(); ++i) {
    CAPTURE(two[i].v_kmh);
    // With its own 700 N m rating the single ratio stays below while both are torque-limited.
    if (two[i].limiting_factor == "torque" && rated_single[i].limiting_factor == "torque")
      CHECK(two[i].wheel_torque >= rated_single[i].wheel_torque);
    CHECK(two[i].wheel_torque == doctest::Approx(std::max(low[i].wheel_torque, high[i].wheel_torque)));
    if (i > 0) CHECK(two[i].wheel_torque <= two[i - 1].wheel_torque + 1e-9);
    // Power-limited wheel torque does not depend on the ratio.
    if (two[i].limiting_factor == "power" && single[i].limiting_factor == "power")
      CHECK(two[i].wheel_torque == doctest::Approx(single[i].wheel_torque));
  }

  // Wheel torque scales linearly with the motor torque in the torque region.
  const auto doubled = capacity_envelope(motor(900.0), {12.0, 6.0}, p, 140.0, 141);
  CHECK(doubled[1].wheel_torque == doctest::Approx(2.0 * two[1].wheel_torque));

  CHECK_THROWS_AS(capacity_envelope(m, {12.0}, p, 140.0, 1), std::invalid_argument);
}
