#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "gearshift/driveline.hpp"
#include "gearshift/motor.hpp"
#include "gearshift/vehicle.hpp"

namespace gearshift {

enum class PhaseKind { hold, speed_raise, torque_transfer, inertia_sync };

std::string_view to_string(PhaseKind k);

/// Monotone blend from 0 to 1 on u in [0, 1].
using TransferShape = std::function<double(double)>;

inline double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

struct SolverSettings {
  double dt = 1e-3;                 // s, sample and integration step
  double post_hold = 0.05;          // s, steady hold after the shift
  double sync_horizon = 5.0;        // s, give-up time for speed-raise and synchronization
  double practical_sync = 2.0;      // s, longest synchronization still considered practical
  double event_tolerance = 1e-12;   // s
  double stick_tolerance = kDefaultStickTolerance;
  TransferShape transfer_shape = smoothstep;

  void validate() const;
};

/// Everything a shift simulation reads besides the transmission model.
struct ShiftSetup {
  VehicleParams vehicle;
  Scenario scenario;
  MotorLimits motor;
  std::array<ClutchSpec, 2> clutches{};
  SolverSettings solver;
};

struct PhaseSpan {
  PhaseKind kind = PhaseKind::hold;
  double start = 0.0;
  double end = 0.0;
};

/// Realized phase sequence of one shift. t1 is the torque-transfer start and
/// t2 the instant the motor reaches the new gear speed (upshift) or old gear
/// speed is left behind for good (downshift: end of transfer).
struct PhasePlan {
  std::vector<PhaseSpan> phases;
  double delta_m_target = std::numeric_limits<double>::quiet_NaN();
  double t1 = std::numeric_limits<double>::quiet_NaN();
  double t2 = std::numeric_limits<double>::quiet_NaN();

  /// Throws unless durations are positive and phases are contiguous.
  void validate() const;
};

/// stick: clutch torque is a reaction; slip: torque is commanded.
enum class ClutchRole { stick, slip };

struct TrajectorySample {
  double t = 0.0;
  double omega_m = 0.0;
  double omega_out = 0.0;  // transmission output shaft
  double omega_v = 0.0;    // wheel
  double motor_torque = 0.0;
  double clutch1 = 0.0;
  double clutch2 = 0.0;
  double output_torque = 0.0;  // wheel side
  double motor_power = 0.0;
  PhaseKind phase = PhaseKind::hold;
  std::array<ClutchRole, 2> roles{ClutchRole::stick, ClutchRole::slip};
};

enum class FlagKind {
  motor_torque,
  motor_power,
  motor_speed,
  clutch_rate,
  clutch_capacity,
  slip_reversal,
  one_way_reversal,
  one_way_overspeed,
  no_sync,
  delta_m_unreachable,
};

std::string_view to_string(FlagKind k);
/// Motor torque, power or speed limit.
bool is_saturation(FlagKind k);

struct TrajectoryFlag {
  FlagKind kind = FlagKind::motor_power;
  int clutch = 0;           // 1 or 2 for clutch flags, else 0
  double first_time = 0.0;  // s
  double worst = 0.0;       // worst offending value, in the limit's units
  double limit = 0.0;
};

struct GearshiftTrajectory {
  ModelKind model = ModelKind::dct_friction;
  double dt = 1e-3;
  std::vector<TrajectorySample> samples;
  PhasePlan plan;
  std::vector<TrajectoryFlag> flags;
  /// False when the shift cannot even be set up (one-way clutch in a braking downshift).
  bool constructed = true;
  /// False when the shift was abandoned (speed limit, missing synchronization).
  bool completed = true;

  double peak_motor_power = 0.0;      // max of P_m over samples
  double min_motor_power = 0.0;       // min of P_m over samples
  std::array<double, 2> peak_clutch_rate{};  // max |dT/dt| while commanded, N m/s

  double delta_s = std::numeric_limits<double>::quiet_NaN();     // slip at end of friction transfer
  double sync_time = std::numeric_limits<double>::quiet_NaN();   // downshift inertia duration

  bool feasible() const { return constructed && completed && flags.empty(); }
  bool has_flag(FlagKind k) const;
  bool saturated() const;
};

/// Power-on upshift through a one-way first clutch: torque phase with the motor
/// locked to gear 1, then synchronization to gear 2.
GearshiftTrajectory simulate_upshift_owc(const DrivelineModel& model, const ShiftSetup& setup);

/// Power-on upshift with two friction clutches: speed raise to delta_m at full
/// power, torque transfer at full power, then synchronization to gear 2.
GearshiftTrajectory simulate_upshift_dualfriction(const DrivelineModel& model, const ShiftSetup& setup,
                                                  double delta_m);

/// Power-on downshift: synchronization at full motor torque, then transfer.
GearshiftTrajectory simulate_downshift_driving(const DrivelineModel& model, const ShiftSetup& setup);

/// Regenerative downshift: transfer in gear 2, then synchronization to gear 1.
/// A one-way first clutch yields an unconstructed trajectory with a reversal flag.
GearshiftTrajectory simulate_downshift_braking(const DrivelineModel& model, const ShiftSetup& setup);

/// Dispatches on scenario direction, quadrant and clutch-1 kind.
GearshiftTrajectory simulate_shift(const DrivelineModel& model, const ShiftSetup& setup, double delta_m);

struct SpeedRaiseReach {
  double delta_m = 0.0;         // largest slip reached, rad/s
  double omega_m = 0.0;         // motor speed at that point
  double time = 0.0;            // s after the speed raise starts
  enum class Stop { speed_limit, saturated_growth, horizon } stop = Stop::horizon;
};

/// Runs the full-power speed raise without a target and reports how far the
/// clutch-1 slip can grow before the speed limit, stagnation or the horizon.
SpeedRaiseReach reachable_delta_m(const DrivelineModel& model, const ShiftSetup& setup);

/// Drives the compliant driveline (shaft stiffness and damping between output
/// and wheel) open loop with the sampled motor and clutch torques and returns
/// the peak vehicle jerk magnitude, m/s^3.
double validate_full_driveline(const VehicleParams& vehicle, const DrivelineModel& model, const Scenario& scenario,
                               const GearshiftTrajectory& traj, double substep = 1e-4);

}  // namespace gearshift
