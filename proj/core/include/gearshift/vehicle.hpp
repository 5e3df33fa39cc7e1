#pragma once

#include <cmath>
#include <string>

namespace gearshift {

/// Longitudinal vehicle parameters projected on the driven wheel.
struct VehicleParams {
  double mass = 6500.0;          // kg
  double wheel_radius = 0.3;     // m
  double frontal_area = 6.0;     // m^2
  double drag_coeff = 0.7;       // -
  double rolling_coeff = 0.007;  // -
  double air_density = 1.2;      // kg/m^3
  double gravity = 9.81;         // m/s^2

  void validate() const;
};

struct RoadCondition {
  double grade = 0.0;  // rise/run

  double slope_angle() const { return std::atan(grade); }
  void validate() const;
};

enum class ShiftDirection { upshift, downshift };
enum class MotorQuadrant { driving, braking };

struct Scenario {
  std::string name;
  ShiftDirection direction = ShiftDirection::upshift;
  MotorQuadrant quadrant = MotorQuadrant::driving;
  double initial_speed = 0.0;    // m/s
  double accel = 0.0;            // m/s^2, prescribed and constant during the shift
  double driver_demand = 0.0;    // fraction, reporting only
  double torque_phase = 0.25;    // s
  double inertia_phase = 0.20;   // s
  double pre_hold = 0.0;         // s, steady hold in the initial gear before the shift
  RoadCondition road;

  void validate() const;
};

/// Affine output-speed target and constant output torque of a no-jerk shift.
/// Both are expressed at the wheel; models with a final drive scale them.
struct NoJerkTargets {
  double omega0 = 0.0;      // rad/s at t = 0
  double omega_dot = 0.0;   // rad/s^2
  double torque = 0.0;      // N m, T_o
  double road_torque = 0.0; // N m, T_v frozen at the initial speed

  double omega_at(double t) const { return omega0 + omega_dot * t; }
};

/// Drag, rolling resistance and grade force lumped into a wheel torque.
double road_load_torque(const VehicleParams& p, double speed, const RoadCondition& road);

inline double road_load_force(const VehicleParams& p, double speed, const RoadCondition& road) {
  return road_load_torque(p, speed, road) / p.wheel_radius;
}

/// Vehicle mass seen as a rotational inertia at the wheel.
inline double equivalent_inertia(const VehicleParams& p) {
  return p.mass * p.wheel_radius * p.wheel_radius;
}

NoJerkTargets no_jerk_targets(const VehicleParams& p, const Scenario& s);

}  // namespace gearshift
