#include "gearshift/driveline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gearshift {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

double load_term(const DrivelineParams& p, double final_drive, const DrivelineInputs& in, const DrivelineState& x) {
  return -p.output_damping * x.omega_out - in.output_torque / final_drive;
}

double motor_term(const DrivelineParams& p, const DrivelineInputs& in, const DrivelineState& x) {
  return -p.motor_damping * x.omega_m + in.motor_torque;
}

Accelerations apply_form(const std::array<std::array<double, 4>, 2>& m, const DrivelineParams& p, double final_drive,
                         const DrivelineInputs& in, const DrivelineState& x) {
  const std::array<double, 4> q{motor_term(p, in, x), load_term(p, final_drive, in, x), in.clutch1, in.clutch2};
  double r0 = 0.0, r1 = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    r0 += m[0][j] * q[j];
    r1 += m[1][j] * q[j];
  }
  return {r0 / p.motor_inertia, r1 / p.output_inertia};
}

std::array<std::array<double, 4>, 2> simplified_form(const GearingSpec& g) {
  const double b1 = g.beta1, b2 = g.beta2;
  return {{{1.0, 0.0, (1.0 + b1) / (b1 - b2), -b2 * (1.0 + b1) / (b1 - b2)},
           {0.0, 1.0, (1.0 + b2) / (b2 - b1), -b1 * (1.0 + b2) / (b2 - b1)}}};
}

// Unknown order: F1, F2, a_ring, a_sun, a_motor, a_out.
Eigen::Matrix<double, 6, 6> dbt_system(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set) {
  const double ns1 = set.sun_radius1, nr1 = g.beta1 * set.sun_radius1;
  const double ns2 = set.sun_radius2, nr2 = g.beta2 * set.sun_radius2;
  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
  // ring: I_r a_r = T1 - N_r1 F1 - N_r2 F2
  a(0, 0) = nr1; a(0, 1) = nr2; a(0, 2) = set.ring_inertia;
  // motor + first carrier: I_m a_m = Qm + (N_r1 + N_s1) F1
  a(1, 0) = -(nr1 + ns1); a(1, 4) = p.motor_inertia;
  // output + second carrier: I_out a_out = Qo + (N_r2 + N_s2) F2
  a(2, 1) = -(nr2 + ns2); a(2, 5) = p.output_inertia;
  // sun: I_s a_s = T2 - N_s1 F1 - N_s2 F2
  a(3, 0) = ns1; a(3, 1) = ns2; a(3, 3) = set.sun_inertia;
  // differentiated speed constraints
  a(4, 3) = ns1; a(4, 2) = nr1; a(4, 4) = -(ns1 + nr1);
  a(5, 3) = ns2; a(5, 2) = nr2; a(5, 5) = -(ns2 + nr2);
  return a;
}

Eigen::Matrix<double, 6, 1> dbt_rhs(double qm, double qo, double t1, double t2) {
  Eigen::Matrix<double, 6, 1> b;
  b << t1, qm, qo, t2, 0.0, 0.0;
  return b;
}

}  // namespace

void DrivelineParams::validate() const {
  if (!(motor_inertia > 0.0 && output_inertia > 0.0))
    throw std::invalid_argument("driveline inertias must be positive");
  if (!(motor_damping >= 0.0 && output_damping >= 0.0))
    throw std::invalid_argument("driveline viscous dampings must be non-negative");
  if (!(stiffness > 0.0 && damping > 0.0))
    throw std::invalid_argument("driveline stiffness and damping must be positive");
}

void GearingSpec::validate() const {
  if (!(ratio2 > 0.0)) throw std::invalid_argument("gearing: ratio2 must be positive");
  if (!(ratio1 > ratio2)) throw std::invalid_argument("gearing: ratio1 must exceed ratio2 (i1 > i2 > 0)");
  if (!(beta1 > 0.0 && beta2 > 0.0)) throw std::invalid_argument("gearing: beta1 and beta2 must be positive");
  if (beta1 == beta2) throw std::invalid_argument("gearing: beta1 must differ from beta2");
  if (!(final_drive > 0.0)) throw std::invalid_argument("gearing: final_drive must be positive");
}

void ClutchSpec::validate() const {
  if (!(max_normal_force > 0.0)) throw std::invalid_argument("clutch: max_normal_force must be positive");
  if (!(mu_dynamic > 0.0)) throw std::invalid_argument("clutch: mu_dynamic must be positive");
  if (!(mu_static >= mu_dynamic)) throw std::invalid_argument("clutch: mu_static must be >= mu_dynamic");
  if (!(mean_radius > 0.0)) throw std::invalid_argument("clutch: mean_radius must be positive");
  if (surfaces < 1) throw std::invalid_argument("clutch: surfaces must be >= 1");
  if (!(rate_limit > 0.0)) throw std::invalid_argument("clutch: rate_limit must be positive");
}

ClutchTorque clutch_torque(const ClutchSpec& spec, const ClutchState& state, double normal_force,
                           double stick_demand, double stick_tolerance) {
  if (normal_force < 0.0) throw std::invalid_argument("clutch_torque: negative normal force");
  if (normal_force > spec.max_normal_force) throw std::invalid_argument("clutch_torque: normal force above capacity");

  const double capacity = normal_force * spec.mu_static * spec.mean_radius * spec.surfaces;
  const double dynamic = normal_force * spec.slip_gain();
  const bool synchronized = std::abs(state.slip_speed) <= stick_tolerance;

  if (spec.kind == ClutchKind::one_way) {
    // freewheels whenever the motor side runs slower than the geared output
    if (state.slip_speed < -stick_tolerance) return {0.0, ClutchMode::slip};
    if (stick_demand < 0.0) return {0.0, ClutchMode::slip};
    return {stick_demand, ClutchMode::stick};
  }

  const bool sticking = state.mode == ClutchMode::stick || synchronized;
  if (sticking && std::abs(stick_demand) <= capacity) return {stick_demand, ClutchMode::stick};
  if (sticking && synchronized) {
    // breakaway: the slip direction follows the unbalanced demand
    return {sgn(stick_demand) * dynamic, ClutchMode::slip};
  }
  return {sgn(state.slip_speed) * dynamic, ClutchMode::slip};
}

std::string_view to_string(OwcStatus s) {
  switch (s) {
    case OwcStatus::ok: return "ok";
    case OwcStatus::torque_reversal: return "torque-reversal";
    case OwcStatus::overspeed: return "overspeed";
  }
  return "?";
}

OwcStatus owc_constraint_check(double clutch1_demand, double omega_m, double omega_out, double ratio1,
                               bool stick_asserted, double stick_tolerance) {
  if (clutch1_demand < 0.0) return OwcStatus::torque_reversal;
  const double slip = omega_m - ratio1 * omega_out;
  if (slip > stick_tolerance) return OwcStatus::overspeed;
  if (stick_asserted && slip > 0.0) return OwcStatus::overspeed;
  return OwcStatus::ok;
}

PlanetaryStage::Response PlanetaryStage::respond(double ring_torque, double carrier_torque, double sun_torque) const {
  // Unknowns: a_r, a_c, a_s, F
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 0) = ring_inertia; a(0, 3) = ring_radius;
  a(1, 1) = carrier_inertia; a(1, 3) = -(ring_radius + sun_radius);
  a(2, 2) = sun_inertia; a(2, 3) = sun_radius;
  a(3, 0) = ring_radius; a(3, 1) = -(ring_radius + sun_radius); a(3, 2) = sun_radius;
  Eigen::Vector4d b(ring_torque, carrier_torque, sun_torque, 0.0);
  Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("planetary stage: singular equations of motion");
  const Eigen::Vector4d x = lu.solve(b);
  return {x(0), x(1), x(2), x(3)};
}

void PlanetaryStage::validate() const {
  if (!(ring_radius > sun_radius && sun_radius > 0.0))
    throw std::invalid_argument("planetary stage: requires N_r > N_s > 0");
  if (!(ring_inertia >= 0.0 && sun_inertia >= 0.0 && carrier_inertia >= 0.0))
    throw std::invalid_argument("planetary stage: inertias must be non-negative");
}

ReducedCoefficients dbt_coefficients(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set) {
  if (g.beta1 == g.beta2) throw std::invalid_argument("dbt_coefficients: beta1 == beta2");
  const double b1 = g.beta1, b2 = g.beta2;
  const double p1 = 1.0 + b1, p2 = 1.0 + b2, d = b1 - b2;
  const double im = p.motor_inertia, io = p.output_inertia;
  const double ir = set.ring_inertia, is = set.sun_inertia;

  // Ring and sun accelerations follow from the two differentiated constraints;
  // substituting the motor/output equations for the tooth forces leaves
  //   A [a_m; a_out] = B [Qm; Qo; T1; T2].
  const double a11 = ir * p1 / d + b1 * im / p1;
  const double a12 = -ir * p2 / d + b2 * io / p2;
  const double a21 = -is * b2 * p1 / d + im / p1;
  const double a22 = is * b1 * p2 / d + io / p2;
  const double det = a11 * a22 - a12 * a21;
  const double scale = std::max({std::abs(a11 * a22), std::abs(a12 * a21), 1e-300});
  if (std::abs(det) <= 1e-12 * scale) throw std::runtime_error("dbt_coefficients: singular elimination");

  ReducedCoefficients r;
  r.c[0] = im * (a22 * b1 / p1 - a12 / p1) / det;
  r.c[1] = im * (a22 * b2 / p2 - a12 / p2) / det;
  r.c[2] = im * a22 / det;
  r.c[3] = -im * a12 / det;
  r.c[4] = io * (a11 / p1 - a21 * b1 / p1) / det;
  r.c[5] = io * (a11 / p2 - a21 * b2 / p2) / det;
  r.c[6] = -io * a21 / det;
  r.c[7] = io * a11 / det;
  return r;
}

ReducedCoefficients dbt_coefficients_numeric(const DrivelineParams& p, const GearingSpec& g,
                                             const DualBrakeGearset& set) {
  const auto a = dbt_system(p, g, set);
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("dbt_coefficients_numeric: singular elimination");
  ReducedCoefficients r;
  const std::array<Eigen::Matrix<double, 6, 1>, 4> unit{dbt_rhs(1, 0, 0, 0), dbt_rhs(0, 1, 0, 0),
                                                         dbt_rhs(0, 0, 1, 0), dbt_rhs(0, 0, 0, 1)};
  for (std::size_t j = 0; j < 4; ++j) {
    const Eigen::Matrix<double, 6, 1> x = lu.solve(unit[j]);
    r.c[j] = p.motor_inertia * x(4);
    r.c[4 + j] = p.output_inertia * x(5);
  }
  return r;
}

Accelerations dbt_accelerations_numeric(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set,
                                        const DrivelineInputs& in, const DrivelineState& x) {
  const auto a = dbt_system(p, g, set);
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("dbt_accelerations_numeric: singular elimination");
  const Eigen::Matrix<double, 6, 1> sol = lu.solve(dbt_rhs(motor_term(p, in, x), load_term(p, g.final_drive, in, x), in.clutch1, in.clutch2));
  return {sol(4), sol(5)};
}

Accelerations dct_dynamics(const DrivelineParams& p, const GearingSpec& g, const DrivelineInputs& in,
                           const DrivelineState& x) {
  const double am = (-p.motor_damping * x.omega_m + in.motor_torque - in.clutch1 - in.clutch2) / p.motor_inertia;
  const double ao = (-p.output_damping * x.omega_out - in.output_torque + g.ratio1 * in.clutch1 + g.ratio2 * in.clutch2) /
                    p.output_inertia;
  return {am, ao};
}

Accelerations dbt_dynamics_simplified(const DrivelineParams& p, const GearingSpec& g, const DrivelineInputs& in,
                                      const DrivelineState& x) {
  return apply_form(simplified_form(g), p, g.final_drive, in, x);
}

Accelerations dbt_dynamics_full(const ReducedCoefficients& k, const DrivelineParams& p, double final_drive,
                                const DrivelineInputs& in, const DrivelineState& x) {
  const std::array<std::array<double, 4>, 2> m{{{k.c[0], k.c[1], k.c[2], k.c[3]}, {k.c[4], k.c[5], k.c[6], k.c[7]}}};
  return apply_form(m, p, final_drive, in, x);
}

double dbt_gearbox_ratio1(const GearingSpec& g) { return (1.0 + g.beta2) / (1.0 + g.beta1); }

double dbt_gearbox_ratio2(const GearingSpec& g) {
  return g.beta1 * (1.0 + g.beta2) / (g.beta2 * (1.0 + g.beta1));
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::dct_friction: return "dct-friction";
    case ModelKind::dct_owc: return "dct-owc";
    case ModelKind::dbt_simple: return "dbt-simple";
    case ModelKind::dbt_full: return "dbt-full";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::dct_friction, ModelKind::dct_owc, ModelKind::dbt_simple, ModelKind::dbt_full})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

DrivelineModel DrivelineModel::dct(const DrivelineParams& p, const GearingSpec& g, ClutchKind clutch1_kind) {
  p.validate();
  g.validate();
  DrivelineModel m;
  m.kind_ = clutch1_kind == ClutchKind::one_way ? ModelKind::dct_owc : ModelKind::dct_friction;
  m.params_ = p;
  m.ratio1_ = g.ratio1;
  m.ratio2_ = g.ratio2;
  m.final_drive_ = 1.0;
  m.clutch1_kind_ = clutch1_kind;
  m.form_ = {{{1.0, 0.0, -1.0, -1.0}, {0.0, 1.0, g.ratio1, g.ratio2}}};
  return m;
}

namespace {

void require_planetary_order(const GearingSpec& g) {
  if (!(g.beta2 > g.beta1))
    throw std::invalid_argument("gearing: dual-brake model requires beta2 > beta1 so that gear 1 has the larger ratio");
}

}  // namespace

DrivelineModel DrivelineModel::dbt_simplified(const DrivelineParams& p, const GearingSpec& g, ClutchKind clutch1_kind) {
  p.validate();
  g.validate();
  require_planetary_order(g);
  DrivelineModel m;
  m.kind_ = ModelKind::dbt_simple;
  m.params_ = p;
  m.ratio1_ = dbt_gearbox_ratio1(g);
  m.ratio2_ = dbt_gearbox_ratio2(g);
  m.final_drive_ = g.final_drive;
  m.sign1_ = 1.0;
  m.sign2_ = -1.0;
  m.clutch1_kind_ = clutch1_kind;
  m.form_ = simplified_form(g);
  const auto& f = m.form_;
  m.coeffs_.c = {f[0][0], f[0][1], f[0][2], f[0][3], f[1][0], f[1][1], f[1][2], f[1][3]};
  return m;
}

DrivelineModel DrivelineModel::dbt_full(const DrivelineParams& p, const GearingSpec& g, const DualBrakeGearset& set,
                                        ClutchKind clutch1_kind) {
  DrivelineModel m = dbt_simplified(p, g, clutch1_kind);
  m.kind_ = ModelKind::dbt_full;
  if (!(set.ring_inertia >= 0.0 && set.sun_inertia >= 0.0))
    throw std::invalid_argument("planetary: ring and sun inertias must be non-negative");
  if (!(set.sun_radius1 > 0.0 && set.sun_radius2 > 0.0))
    throw std::invalid_argument("planetary: sun radii must be positive");

  const auto analytic = dbt_coefficients(p, g, set);
  const auto numeric = dbt_coefficients_numeric(p, g, set);
  double scale = 0.0;
  for (double c : analytic.c) scale = std::max(scale, std::abs(c));
  for (std::size_t j = 0; j < 8; ++j) {
    if (std::abs(analytic.c[j] - numeric.c[j]) > 1e-9 * scale)
      throw std::runtime_error("dbt_full: analytic and numeric planetary coefficients disagree at C" +
                               std::to_string(j + 1));
  }
  m.coeffs_ = analytic;
  m.form_ = {{{analytic.c[0], analytic.c[1], analytic.c[2], analytic.c[3]},
              {analytic.c[4], analytic.c[5], analytic.c[6], analytic.c[7]}}};
  return m;
}

DrivelineModel DrivelineModel::make(ModelKind kind, const DrivelineParams& p, const GearingSpec& g,
                                    const DualBrakeGearset& set, ClutchKind dbt_clutch1_kind) {
  switch (kind) {
    case ModelKind::dct_friction: return dct(p, g, ClutchKind::friction);
    case ModelKind::dct_owc: return dct(p, g, ClutchKind::one_way);
    case ModelKind::dbt_simple: return dbt_simplified(p, g, dbt_clutch1_kind);
    case ModelKind::dbt_full: return dbt_full(p, g, set, dbt_clutch1_kind);
  }
  throw std::invalid_argument("unknown model kind");
}

Accelerations DrivelineModel::accelerations(const DrivelineState& x, const DrivelineInputs& in) const {
  return apply_form(form_, params_, final_drive_, in, x);
}

DrivelineSolution DrivelineModel::solve(const DrivelineState& x, const Prescribed& pre) const {
  const int missing = !pre.motor_torque + !pre.clutch1 + !pre.clutch2 + !pre.motor_accel;
  if (missing != 2) throw std::invalid_argument("DrivelineModel::solve: exactly two unknowns required");

  DrivelineSolution s;
  s.motor_torque = pre.motor_torque.value_or(0.0);
  s.clutch1 = pre.clutch1.value_or(0.0);
  s.clutch2 = pre.clutch2.value_or(0.0);
  s.motor_accel = pre.motor_accel.value_or(0.0);
  s.output_torque = pre.output_torque;
  s.output_accel = pre.output_accel;

  const DrivelineInputs in{s.motor_torque, s.clutch1, s.clutch2, s.output_torque};
  const Accelerations known = accelerations(x, in);
  // residuals of I a = M q with the unknowns at zero
  const double r0 = params_.motor_inertia * (known.motor - s.motor_accel);
  const double r1 = params_.output_inertia * (known.output - s.output_accel);

  struct Column {
    double* target;
    double c0, c1;
  };
  std::array<Column, 2> cols{};
  int n = 0;
  if (!pre.motor_torque) cols[n++] = {&s.motor_torque, form_[0][0], form_[1][0]};
  if (!pre.clutch1) cols[n++] = {&s.clutch1, form_[0][2], form_[1][2]};
  if (!pre.clutch2) cols[n++] = {&s.clutch2, form_[0][3], form_[1][3]};
  if (!pre.motor_accel) cols[n++] = {&s.motor_accel, -params_.motor_inertia, 0.0};

  const double det = cols[0].c0 * cols[1].c1 - cols[1].c0 * cols[0].c1;
  const double scale = std::max(std::abs(cols[0].c0 * cols[1].c1), std::abs(cols[1].c0 * cols[0].c1));
  if (!(std::abs(det) > 1e-14 * scale) || scale == 0.0)
    throw std::runtime_error("DrivelineModel::solve: unknowns are not determined by the equations of motion");
  *cols[0].target = (-r0 * cols[1].c1 + r1 * cols[1].c0) / det;
  *cols[1].target = (-cols[0].c0 * r1 + cols[0].c1 * r0) / det;
  return s;
}

}  // namespace gearshift
