#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gearshift/feasibility.hpp"
#include "gearshift/integrator.hpp"
#include "gearshift/roots.hpp"

using namespace gearshift;
using fixtures::rel;

TEST_CASE("one RK4 step of exponential decay") {
  auto f = [](double, const Vec<1>& x) { return Vec<1>{-x[0]}; };
  const auto x = rk4_step<1>(f, 0.0, Vec<1>{1.0}, 0.001);
  CHECK(std::abs(x[0] - std::exp(-0.001)) < 1e-12);
}

TEST_CASE("zero dynamics leave the state unchanged") {
  DrivelineParams p;
  p.motor_damping = p.output_damping = 0.0;
  const auto m = DrivelineModel::dct(p, GearingSpec{}, ClutchKind::friction);
  const DrivelineState x{123.0, 10.0};
  const auto y = integrate_step(m, x, {}, 1e-3);
  CHECK(y.omega_m == x.omega_m);
  CHECK(y.omega_out == x.omega_out);
  CHECK_THROWS_AS(integrate_step(m, x, {}, 0.0), std::invalid_argument);
}

TEST_CASE("event location inside a step") {
  // x' = 1 from x = 0; g = x - 0.3 crosses at t = 0.3.
  auto f = [](double, const Vec<1>&) { return Vec<1>{1.0}; };
  auto g = [](double, const Vec<1>& x) { return x[0] - 0.3; };
  const auto hit = locate_event<1>(f, g, 0.0, Vec<1>{0.0}, 1.0, 1e-13);
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->fraction - 0.3) < 1e-12);
  CHECK_FALSE(locate_event<1>(f, g, 0.0, Vec<1>{0.0}, 0.2).has_value());
}

TEST_CASE("bracketed bisection and first-root scan") {
  auto f = [](double x) { return std::cos(x) - x; };
  CHECK(std::abs(bisect(f, 0.0, 1.0) - 0.7390851332151607) < 1e-11);
  CHECK_THROWS_AS(bisect(f, 1.0, 2.0), std::invalid_argument);

  auto s = [](double x) { return std::sin(x); };
  const auto r = first_root(s, 1.0, 10.0);
  REQUIRE(r.has_value());
  CHECK(std::abs(*r - std::numbers::pi) < 1e-11);
  CHECK_FALSE(first_root([](double x) { return x * x + 1.0; }, -5.0, 5.0).has_value());
}

TEST_CASE("integrated synchronization agrees with the closed form") {
  // Free motor under T_max - T2 with clutch 1 open, integrated step by step.
  const DrivelineParams p;
  const auto m = DrivelineModel::dct(p, GearingSpec{}, ClutchKind::friction);
  const auto tg = no_jerk_targets(VehicleParams{}, fixtures::scenario2());
  const double t2 = 350.0, tmax = 450.0;
  SyncEquation eq{12.0, 6.0, tg.omega0, tg.omega_dot, p.motor_inertia, p.motor_damping, 1.0, t2, tmax};

  DrivelineState x{6.0 * tg.omega0, tg.omega0};
  const double dt = 1e-3;
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    x = integrate_step(m, x, {tmax, 0.0, t2, 0.0}, dt);
    worst = std::max(worst, rel(x.omega_m, eq.motor_speed(k * dt)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("closed-form motor speed matches integration for random parameters") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> inertia(0.05, 1.0), damping(0.001, 0.5), torque(-300.0, 600.0),
      speed(1.0, 40.0), gamma(0.5, 2.0);
  for (int n = 0; n < 40; ++n) {
    SyncEquation eq{12.0, 6.0, speed(rng), 2.0, inertia(rng), damping(rng), gamma(rng), torque(rng), 450.0};
    // gamma I_m^-1 ( -c_m w + T_max ) - I_m^-1 tau with the constants of the equation.
    auto f = [&](double, const Vec<1>& w) {
      return Vec<1>{(eq.gamma * (-eq.motor_damping * w[0] + eq.max_torque) - eq.tau) / eq.motor_inertia};
    };
    Vec<1> w{eq.ratio2 * eq.omega_out0};
    const double h = 1e-3;
    double worst = 0.0;
    for (int k = 1; k <= 2000; ++k) {
      w = rk4_step<1>(f, (k - 1) * h, w, h);
      worst = std::max(worst, std::abs(w[0] - eq.motor_speed(k * h)) / std::max(std::abs(eq.motor_speed(k * h)), 1.0));
    }
    CHECK(worst < 1e-6);
  }
}
