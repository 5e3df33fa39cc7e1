#include "gearshift/vehicle.hpp"

#include <stdexcept>

namespace gearshift {

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("vehicle.mass must be positive");
  if (!(wheel_radius > 0.0)) throw std::invalid_argument("vehicle.wheel_radius must be positive");
  if (!(frontal_area > 0.0)) throw std::invalid_argument("vehicle.frontal_area must be positive");
  if (!(drag_coeff >= 0.0)) throw std::invalid_argument("vehicle.drag_coeff must be non-negative");
  if (!(rolling_coeff >= 0.0)) throw std::invalid_argument("vehicle.rolling_coeff must be non-negative");
  if (!(air_density > 0.0)) throw std::invalid_argument("vehicle.air_density must be positive");
  if (!(gravity > 0.0)) throw std::invalid_argument("vehicle.gravity must be positive");
}

void RoadCondition::validate() const {
  if (!(std::abs(grade) < 1.0)) throw std::invalid_argument("road grade must satisfy |grade| < 1");
}

void Scenario::validate() const {
  if (!(initial_speed >= 0.0)) throw std::invalid_argument("scenario " + name + ": initial speed must be >= 0");
  if (!(torque_phase > 0.0)) throw std::invalid_argument("scenario " + name + ": torque phase duration must be > 0");
  if (!(inertia_phase > 0.0)) throw std::invalid_argument("scenario " + name + ": inertia phase duration must be > 0");
  if (!(pre_hold >= 0.0)) throw std::invalid_argument("scenario " + name + ": pre-hold duration must be >= 0");
  road.validate();
}

double road_load_torque(const VehicleParams& p, double speed, const RoadCondition& road) {
  if (speed < 0.0) throw std::invalid_argument("road_load_torque: speed must be >= 0");
  const double alpha = road.slope_angle();
  const double aero = 0.5 * p.air_density * p.frontal_area * p.drag_coeff * speed * speed;
  const double tire = p.mass * p.gravity * p.rolling_coeff * std::cos(alpha);
  const double slope = p.mass * p.gravity * std::sin(alpha);
  return p.wheel_radius * (aero + tire + slope);
}

NoJerkTargets no_jerk_targets(const VehicleParams& p, const Scenario& s) {
  NoJerkTargets out;
  out.omega0 = s.initial_speed / p.wheel_radius;
  out.omega_dot = s.accel / p.wheel_radius;
  out.road_torque = road_load_torque(p, s.initial_speed, s.road);
  out.torque = equivalent_inertia(p) * s.accel / p.wheel_radius + out.road_torque;
  return out;
}

}  // namespace gearshift
