#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gearshift/driveline.hpp"
#include "gearshift/motor.hpp"
#include "gearshift/trajectory.hpp"
#include "gearshift/vehicle.hpp"

namespace gearshift {

enum class Verdict { feasible, infeasible, inapplicable };
enum class BindingLimit { none, power, torque, speed, rate, one_way_reversal };

std::string_view to_string(Verdict v);
std::string_view to_string(BindingLimit b);

struct Quantity {
  std::string name;
  double value = 0.0;
  std::string unit;
};

/// Verdict of a pre-shift check. Infeasible implies a binding limit; the margin
/// is non-negative exactly when the verdict is feasible and is expressed in the
/// units of the binding (or tested) limit.
struct FeasibilityReport {
  Verdict verdict = Verdict::inapplicable;
  std::string theorem;
  BindingLimit binding = BindingLimit::none;
  double margin = 0.0;
  std::string margin_unit;
  /// False when the verdict only rests on a necessary condition.
  bool sufficient = true;
  std::vector<Quantity> quantities;
  std::vector<std::string> notes;

  std::optional<double> quantity(std::string_view name) const;
  void add(std::string name, double value, std::string unit) {
    quantities.push_back({std::move(name), value, std::move(unit)});
  }
};

/// Motor power at the end of a one-way-clutch torque transfer on the parallel-shaft
/// transmission, evaluated from the closed form.
double thm1_required_power(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g, const Scenario& s);

FeasibilityReport thm1_owc_upshift(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                                   const Scenario& s, const MotorLimits& motor);

/// Same check on a dual-brake model using its reduced coefficients.
FeasibilityReport thm1_planetary(const DrivelineModel& model, const VehicleParams& v, const Scenario& s,
                                 const MotorLimits& motor);

struct Thm2Options {
  int grid_points = 9;       // coarse monotonicity grid
  double resolution = 0.1;   // rad/s, bisection stop
};

/// Dual-friction upshift: searches the smallest speed raise whose transfer ends
/// with non-negative clutch-1 slip, by simulation.
FeasibilityReport thm2_dualfriction_upshift(const DrivelineModel& model, const ShiftSetup& setup,
                                            const Thm2Options& opt = {});

/// Synchronization residual of the constant-load downshift: motor speed at t
/// minus the gear-1 speed at t. Shared by the parallel-shaft and planetary forms.
struct SyncEquation {
  double ratio1, ratio2;
  double omega_out0, omega_out_dot;  // model frame
  double motor_inertia, motor_damping;
  double gamma = 1.0;
  double tau = 0.0;                  // N m, equals T2 on the parallel-shaft transmission
  double max_torque;

  double motor_speed(double t) const;
  double residual(double t) const { return motor_speed(t) - ratio1 * (omega_out0 + omega_out_dot * t); }
  /// First root in (0, horizon]; empty when synchronization never happens.
  std::optional<double> first_root(double horizon) const;
};

/// Quasi-static gear-2 clutch torque at shift start.
double quasi_static_clutch2(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                            const Scenario& s);

struct Thm3Options {
  double horizon = 5.0;           // s
  double practical_threshold = 2.0;  // s
};

FeasibilityReport thm3_downshift(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                                 const Scenario& s, const MotorLimits& motor, std::optional<double> clutch2 = {},
                                 const Thm3Options& opt = {});

/// Planetary form; `tau` overrides the load term built from the coefficients.
FeasibilityReport thm3_planetary(const DrivelineModel& model, const VehicleParams& v, const Scenario& s,
                                 const MotorLimits& motor, std::optional<double> tau = {},
                                 const Thm3Options& opt = {});

/// Regenerative downshift rule: impossible through a one-way clutch, unrestricted
/// with a friction clutch.
FeasibilityReport scenario3_rule(const DrivelineModel& model, const ShiftSetup& setup);

/// Driver torque demand at shift start as a fraction of peak motor torque and
/// of the torque available at the current motor speed.
struct DriverDemand {
  double motor_torque = 0.0;
  double of_peak = 0.0;
  double of_available = 0.0;
};

DriverDemand driver_demand(const DrivelineModel& model, const ShiftSetup& setup);

/// Picks the check matching scenario and model.
FeasibilityReport check_shift(const DrivelineModel& model, const ShiftSetup& setup, const GearingSpec& gearing);

}  // namespace gearshift
