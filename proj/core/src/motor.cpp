#include "gearshift/motor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gearshift {

double MotorLimits::available_torque(double omega) const {
  const double w = std::abs(omega);
  if (w == 0.0) return max_torque;
  return std::min(max_torque, max_power / w);
}

void MotorLimits::validate() const {
  if (!(max_torque > 0.0)) throw std::invalid_argument("motor.max_torque must be positive");
  if (!(max_power > 0.0)) throw std::invalid_argument("motor.max_power must be positive");
  if (!(max_speed > 0.0)) throw std::invalid_argument("motor.max_speed must be positive");
}

}  // namespace gearshift
