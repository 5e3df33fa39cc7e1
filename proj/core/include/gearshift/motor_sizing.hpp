#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gearshift/motor.hpp"
#include "gearshift/vehicle.hpp"

namespace gearshift {

enum class DurationClass { continuous, short_term };

std::string_view to_string(DurationClass d);

/// Steady operating point the powertrain must sustain.
struct DesignSpec {
  std::string name;
  double speed = 0.0;  // m/s
  double grade = 0.0;  // rise/run
  DurationClass duration = DurationClass::continuous;

  void validate() const;
};

struct WheelRequirements {
  double torque = 0.0;  // N m
  double power = 0.0;   // W
  double speed = 0.0;   // rad/s
};

struct MotorRequirements {
  double torque = 0.0;  // N m
  double power = 0.0;   // W
  double speed = 0.0;   // rad/s
};

/// Steady-state road load at the spec's speed and grade; no acceleration reserve.
WheelRequirements wheel_requirements(const VehicleParams& p, const DesignSpec& spec);

/// Torque over the largest ratio, speed at the smallest, power divided by the
/// driveline efficiency.
MotorRequirements motor_requirements(const WheelRequirements& wheel, const std::vector<double>& ratios,
                                     double efficiency = 1.0);

struct RatioCheck {
  double ratio = 0.0;
  MotorRequirements need;
  bool torque_ok = false;
  bool power_ok = false;
  bool speed_ok = false;
  bool pass() const { return torque_ok && power_ok && speed_ok; }
};

struct SpecCheck {
  DesignSpec spec;
  WheelRequirements wheel;
  MotorRequirements need;  // over the whole ratio set
  std::vector<RatioCheck> per_ratio;
  bool pass = false;       // some single ratio meets all three limits
};

struct SizingReport {
  MotorLimits motor;
  std::vector<double> ratios;
  double efficiency = 1.0;
  std::vector<SpecCheck> specs;
  bool pass = false;
};

SizingReport check_motor(const MotorLimits& motor, const VehicleParams& p, const std::vector<DesignSpec>& specs,
                         const std::vector<double>& ratios, double efficiency = 1.0);

struct EnvelopePoint {
  double v_kmh = 0.0;
  double wheel_torque = 0.0;      // N m
  std::string limiting_factor;    // torque | power | speed
};

/// Largest wheel torque over the ratio set at each speed sample in [0, v_max].
std::vector<EnvelopePoint> capacity_envelope(const MotorLimits& motor, const std::vector<double>& ratios,
                                             const VehicleParams& p, double v_max_kmh, int samples,
                                             double efficiency = 1.0);

}  // namespace gearshift
