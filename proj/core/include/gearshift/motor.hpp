#pragma once

#include <numbers>

namespace gearshift {

inline constexpr double rpm_to_rad_s(double rpm) { return rpm * std::numbers::pi / 30.0; }
inline constexpr double rad_s_to_rpm(double w) { return w * 30.0 / std::numbers::pi; }

/// Torque/power envelope of the traction motor, symmetric in both quadrants.
struct MotorLimits {
  double max_torque = 450.0;               // N m
  double max_power = 200e3;                // W
  double max_speed = rpm_to_rad_s(8000.0); // rad/s

  double base_speed() const { return max_power / max_torque; }
  /// min(T_max, P_max / |w|); T_max at standstill.
  double available_torque(double omega) const;
  bool power_limited(double omega) const { return omega > base_speed(); }
  void validate() const;
};

}  // namespace gearshift
