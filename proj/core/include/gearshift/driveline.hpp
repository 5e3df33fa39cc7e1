#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace gearshift {

struct DrivelineParams {
  double motor_inertia = 0.3;     // I_m, kg m^2
  double output_inertia = 0.05;   // I_out, kg m^2
  double motor_damping = 0.02;    // c_m, N m s/rad
  double output_damping = 0.04;   // c_o, N m s/rad
  double stiffness = 10000.0;     // k, N m/rad
  double damping = 75.0;          // d, N m s/rad

  void validate() const;
};

/// Parallel-shaft ratios plus the dual-brake planetary parameters.
/// `ratio1`/`ratio2` are overall motor-to-wheel ratios of the parallel-shaft
/// transmission; the planetary model derives its own ratios from beta1/beta2.
struct GearingSpec {
  double ratio1 = 12.0;
  double ratio2 = 6.0;
  double beta1 = 2.0;   // N_r1 / N_s1
  double beta2 = 4.0;   // N_r2 / N_s2
  double final_drive = 7.2;

  void validate() const;
};

enum class ClutchKind { friction, one_way };

struct ClutchSpec {
  double max_normal_force = 10000.0;  // N
  double mu_dynamic = 0.3;
  double mu_static = 0.3;
  double mean_radius = 0.1;           // m
  int surfaces = 4;
  double rate_limit = 5000.0;         // N m/s
  ClutchKind kind = ClutchKind::friction;

  /// Static torque capacity at full normal force.
  double capacity() const { return max_normal_force * mu_static * mean_radius * surfaces; }
  /// Dynamic (slipping) torque per newton of normal force.
  double slip_gain() const { return mu_dynamic * mean_radius * surfaces; }
  void validate() const;
};

enum class ClutchMode { stick, slip };

struct ClutchState {
  ClutchMode mode = ClutchMode::stick;
  double slip_speed = 0.0;  // omega_m - i * omega_out
  double torque = 0.0;
};

struct ClutchTorque {
  double torque = 0.0;
  ClutchMode next_mode = ClutchMode::stick;
};

inline constexpr double kDefaultStickTolerance = 1e-4;  // rad/s

/// Coulomb clutch law. In stick mode the clutch supplies `stick_demand` up to its
/// static capacity at `normal_force`; in slip mode it transmits the dynamic
/// friction torque opposing the slip. A one-way clutch only ever transmits a
/// non-negative reaction and freewheels when the motor side underruns.
ClutchTorque clutch_torque(const ClutchSpec& spec, const ClutchState& state, double normal_force,
                           double stick_demand, double stick_tolerance = kDefaultStickTolerance);

enum class OwcStatus { ok, torque_reversal, overspeed };

std::string_view to_string(OwcStatus s);

OwcStatus owc_constraint_check(double clutch1_demand, double omega_m, double omega_out, double ratio1,
                               bool stick_asserted, double stick_tolerance = kDefaultStickTolerance);

struct DrivelineState {
  double omega_m = 0.0;
  double omega_out = 0.0;
};

/// T_o is always the wheel-side output torque; planetary models divide it by
/// the final drive internally.
struct DrivelineInputs {
  double motor_torque = 0.0;
  double clutch1 = 0.0;
  double clutch2 = 0.0;
  double output_torque = 0.0;
};

struct Accelerations {
  double motor = 0.0;
  double output = 0.0;
};

/// Single planetary stage: ring, carrier and sun bodies coupled by the tooth
/// force F and the speed constraint N_s w_s + N_r w_r = (N_s + N_r) w_c.
struct PlanetaryStage {
  double ring_inertia = 0.03;
  double sun_inertia = 0.03;
  double carrier_inertia = 0.1;
  double ring_radius = 0.1;
  double sun_radius = 0.05;

  struct Response {
    double ring_accel = 0.0;
    double carrier_accel = 0.0;
    double sun_accel = 0.0;
    double tooth_force = 0.0;
  };

  double speed_residual(double omega_sun, double omega_ring, double omega_carrier) const {
    return sun_radius * omega_sun + ring_radius * omega_ring - (sun_radius + ring_radius) * omega_carrier;
  }

  Response respond(double ring_torque, double carrier_torque, double sun_torque) const;
  void validate() const;
};

/// Ring and sun gear data of the dual-brake double planetary. The ring is shared
/// by both stages and held by brake 1; the sun is shared and held by brake 2.
/// The first carrier is lumped with the motor, the second with the output.
struct DualBrakeGearset {
  double ring_inertia = 0.03;
  double sun_inertia = 0.03;
  double sun_radius1 = 0.03;  // m; ring radius follows from beta1
  double sun_radius2 = 0.03;  // m; ring radius follows from beta2
};

/// Coefficients of the reduced planetary equations
///   I_m  a_m   = C1 Qm + C2 Qo + C3 T1 + C4 T2
///   I_out a_out = C5 Qm + C6 Qo + C7 T1 + C8 T2
/// with Qm = -c_m w_m + T_m and Qo = -c_o w_out - T_o / IF.
struct ReducedCoefficients {
  std::array<double, 8> c{};

  double operator[](int one_based) const { return c.at(static_cast<std::size_t>(one_based - 1)); }
  /// Motor-torque gain once T2 is eliminated through the output equation.
  double gamma() const { return c[0] - c[3] * c[4] / c[7]; }
  /// Effect of T1 on motor power after eliminating T2; negative means T1 = 0
  /// maximises motor power.
  double clutch1_power_sign() const { return -(c[2] - c[3] * c[6] / c[7]) / gamma(); }
  /// Coefficient on the output-side load term after eliminating T2.
  double load_gain() const { return c[1] - c[3] * c[5] / c[7]; }
};

ReducedCoefficients dbt_coefficients(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set);

/// Independent route: solve the six linear equations (four bodies, two
/// differentiated speed constraints) in physical tooth forces for unit inputs.
ReducedCoefficients dbt_coefficients_numeric(const DrivelineParams& p, const GearingSpec& g,
                                             const DualBrakeGearset& set);

Accelerations dbt_accelerations_numeric(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set,
                                        const DrivelineInputs& in, const DrivelineState& x);

Accelerations dct_dynamics(const DrivelineParams& p, const GearingSpec& g, const DrivelineInputs& in,
                           const DrivelineState& x);
Accelerations dbt_dynamics_simplified(const DrivelineParams& p, const GearingSpec& g, const DrivelineInputs& in,
                                      const DrivelineState& x);
Accelerations dbt_dynamics_full(const ReducedCoefficients& coeffs, const DrivelineParams& p, double final_drive,
                                const DrivelineInputs& in, const DrivelineState& x);

/// Motor-to-transmission-output speed ratio in gear 1 and gear 2 of the dual-brake set.
double dbt_gearbox_ratio1(const GearingSpec& g);
double dbt_gearbox_ratio2(const GearingSpec& g);

enum class ModelKind { dct_friction, dct_owc, dbt_simple, dbt_full };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Quantities of a no-jerk constraint solve; all four driveline inputs and both
/// accelerations are known afterwards.
struct DrivelineSolution {
  double motor_torque = 0.0;
  double clutch1 = 0.0;
  double clutch2 = 0.0;
  double output_torque = 0.0;
  double motor_accel = 0.0;
  double output_accel = 0.0;
};

/// Prescribed values for a constraint solve. Exactly two of the four optional
/// quantities must be left empty; they are solved from the two equations of motion.
struct Prescribed {
  std::optional<double> motor_torque;
  std::optional<double> clutch1;
  std::optional<double> clutch2;
  std::optional<double> motor_accel;
  double output_torque = 0.0;
  double output_accel = 0.0;
};

/// One of the four transmission models in the uniform linear form
///   I_m a_m = M0 . q,  I_out a_out = M1 . q,  q = (Qm, Qo, T1, T2).
/// Speeds are in the model's own frame: for planetary models omega_out is the
/// shaft upstream of the final drive.
class DrivelineModel {
 public:
  static DrivelineModel dct(const DrivelineParams& p, const GearingSpec& g, ClutchKind clutch1_kind);
  static DrivelineModel dbt_simplified(const DrivelineParams& p, const GearingSpec& g, ClutchKind clutch1_kind);
  /// Builds the coupled planetary model and cross-checks the analytic
  /// coefficients against the numeric elimination; throws on disagreement.
  static DrivelineModel dbt_full(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set,
                                 ClutchKind clutch1_kind);
  static DrivelineModel make(ModelKind kind, const DrivelineParams& p, const GearingSpec& g,
                             const DualBrakeGearset& set, ClutchKind dbt_clutch1_kind = ClutchKind::friction);

  ModelKind kind() const { return kind_; }
  const DrivelineParams& params() const { return params_; }
  bool planetary() const { return kind_ == ModelKind::dbt_simple || kind_ == ModelKind::dbt_full; }
  ClutchKind clutch1_kind() const { return clutch1_kind_; }

  /// Motor speed over model output speed when gear k (1 or 2) is engaged.
  double ratio(int gear) const { return gear == 1 ? ratio1_ : ratio2_; }
  /// Motor speed over wheel speed when gear k is engaged.
  double overall_ratio(int gear) const { return ratio(gear) * final_drive_; }
  double final_drive() const { return final_drive_; }
  /// +1 when clutch k transmits positive torque while the motor overruns gear k.
  double torque_sign(int clutch) const { return clutch == 1 ? sign1_ : sign2_; }
  const std::array<std::array<double, 4>, 2>& form() const { return form_; }
  const ReducedCoefficients& coefficients() const { return coeffs_; }

  Accelerations accelerations(const DrivelineState& x, const DrivelineInputs& in) const;
  DrivelineSolution solve(const DrivelineState& x, const Prescribed& pre) const;

  double slip_speed(int clutch, const DrivelineState& x) const { return x.omega_m - ratio(clutch) * x.omega_out; }

 private:
  ModelKind kind_ = ModelKind::dct_friction;
  DrivelineParams params_;
  double ratio1_ = 1.0;
  double ratio2_ = 1.0;
  double final_drive_ = 1.0;
  double sign1_ = 1.0;
  double sign2_ = 1.0;
  ClutchKind clutch1_kind_ = ClutchKind::friction;
  std::array<std::array<double, 4>, 2> form_{};
  ReducedCoefficients coeffs_{};
};

}  // namespace gearshift
