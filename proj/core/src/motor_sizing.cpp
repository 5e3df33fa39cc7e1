#include "gearshift/motor_sizing.hpp"

#include <algorithm>
#include <stdexcept>

namespace gearshift {

std::string_view to_string(DurationClass d) { return d == DurationClass::continuous ? "continuous" : "short"; }

void DesignSpec::validate() const {
  if (!(speed >= 0.0)) throw std::invalid_argument("design spec '" + name + "': speed must be non-negative");
  RoadCondition{grade}.validate();
}

namespace {

void check_ratios(const std::vector<double>& ratios) {
  if (ratios.empty()) throw std::invalid_argument("sizing: at least one ratio is required");
  for (double r : ratios)
    if (!(r > 0.0)) throw std::invalid_argument("sizing: ratios must be positive");
}

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("sizing: efficiency must lie in (0, 1]");
}

}  // namespace

WheelRequirements wheel_requirements(const VehicleParams& p, const DesignSpec& spec) {
  p.validate();
  spec.validate();
  WheelRequirements w;
  w.torque = road_load_torque(p, spec.speed, RoadCondition{spec.grade});
  w.speed = spec.speed / p.wheel_radius;
  w.power = w.torque * w.speed;
  return w;
}

MotorRequirements motor_requirements(const WheelRequirements& wheel, const std::vector<double>& ratios,
                                     double efficiency) {
  check_ratios(ratios);
  check_efficiency(efficiency);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  return {wheel.torque / (*hi * efficiency), wheel.power / efficiency, wheel.speed * *lo};
}

SizingReport check_motor(const MotorLimits& motor, const VehicleParams& p, const std::vector<DesignSpec>& specs,
                         const std::vector<double>& ratios, double efficiency) {
  motor.validate();
  check_ratios(ratios);
  check_efficiency(efficiency);
  SizingReport rep{motor, ratios, efficiency, {}, true};
  for (const auto& spec : specs) {
    SpecCheck sc;
    sc.spec = spec;
    sc.wheel = wheel_requirements(p, spec);
    sc.need = motor_requirements(sc.wheel, ratios, efficiency);
    for (double r : ratios) {
      RatioCheck rc;
      rc.ratio = r;
      rc.need = motor_requirements(sc.wheel, {r}, efficiency);
      rc.torque_ok = rc.need.torque <= motor.max_torque;
      rc.speed_ok = rc.need.speed <= motor.max_speed;
      // Power follows torque and speed; the operating point must lie under the envelope.
      rc.power_ok = rc.need.power <= motor.max_power;
      sc.pass = sc.pass || rc.pass();
      sc.per_ratio.push_back(rc);
    }
    rep.pass = rep.pass && sc.pass;
    rep.specs.push_back(std::move(sc));
  }
  return rep;
}

std::vector<EnvelopePoint> capacity_envelope(const MotorLimits& motor, const std::vector<double>& ratios,
                                             const VehicleParams& p, double v_max_kmh, int samples,
                                             double efficiency) {
  motor.validate();
  check_ratios(ratios);
  check_efficiency(efficiency);
  if (samples < 2) throw std::invalid_argument("capacity_envelope: at least two samples are required");
  if (!(v_max_kmh > 0.0)) throw std::invalid_argument("capacity_envelope: v_max must be positive");
  std::vector<EnvelopePoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double v_kmh = v_max_kmh * i / (samples - 1);
    const double w_wheel = v_kmh / 3.6 / p.wheel_radius;
    EnvelopePoint pt{v_kmh, 0.0, "speed"};
    for (double r : ratios) {
      const double w_m = r * w_wheel;
      if (w_m > motor.max_speed) continue;
      const double tm = motor.available_torque(w_m);
      const double wheel = r * tm * efficiency;
      if (wheel > pt.wheel_torque) {
        pt.wheel_torque = wheel;
        pt.limiting_factor = tm < motor.max_torque ? "power" : "torque";
      }
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace gearshift
