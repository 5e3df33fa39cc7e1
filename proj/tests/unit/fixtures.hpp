#pragma once

#include <cmath>

#include "gearshift/driveline.hpp"
#include "gearshift/feasibility.hpp"
#include "gearshift/trajectory.hpp"
#include "gearshift/vehicle.hpp"

namespace fixtures {

using namespace gearshift;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline Scenario scenario1(double t_tr = 0.25) {
  Scenario s;
  s.name = "scenario1";
  s.direction = ShiftDirection::upshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 65.0 / 3.6;
  s.accel = 1.0;
  s.driver_demand = 0.8;
  s.torque_phase = t_tr;
  s.inertia_phase = 0.4;
  return s;
}

inline Scenario scenario2(double accel = 1.0) {
  Scenario s;
  s.name = "scenario2";
  s.direction = ShiftDirection::downshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 18.0 / 3.6;
  s.accel = accel;
  s.driver_demand = 0.8;
  return s;
}

inline Scenario scenario3() {
  Scenario s;
  s.name = "scenario3";
  s.direction = ShiftDirection::downshift;
  s.quadrant = MotorQuadrant::braking;
  s.initial_speed = 45.0 / 3.6;
  s.accel = -1.5;
  return s;
}

inline ShiftSetup setup(const Scenario& s) {
  ShiftSetup st;
  st.scenario = s;
  return st;
}

inline DrivelineModel model(ModelKind k, DualBrakeGearset set = {}) {
  return DrivelineModel::make(k, DrivelineParams{}, GearingSpec{}, set,
                              k == ModelKind::dct_owc ? ClutchKind::one_way : ClutchKind::friction);
}

inline DrivelineModel dbt_owc(bool full, DualBrakeGearset set = {}) {
  return full ? DrivelineModel::dbt_full(DrivelineParams{}, GearingSpec{}, set, ClutchKind::one_way)
              : DrivelineModel::dbt_simplified(DrivelineParams{}, GearingSpec{}, ClutchKind::one_way);
}

inline DualBrakeGearset massless_gears() {
  DualBrakeGearset set;
  set.ring_inertia = 0.0;
  set.sun_inertia = 0.0;
  return set;
}

}  // namespace fixtures
