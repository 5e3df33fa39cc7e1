#include "gearshift/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gearshift/roots.hpp"

namespace gearshift {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "?";
}

std::string_view to_string(BindingLimit b) {
  switch (b) {
    case BindingLimit::none: return "none";
    case BindingLimit::power: return "power";
    case BindingLimit::torque: return "torque";
    case BindingLimit::speed: return "speed";
    case BindingLimit::rate: return "rate";
    case BindingLimit::one_way_reversal: return "one-way-reversal";
  }
  return "?";
}

std::optional<double> FeasibilityReport::quantity(std::string_view name) const {
  for (const auto& q : quantities)
    if (q.name == name) return q.value;
  return std::nullopt;
}

namespace {

ReducedCoefficients parallel_shaft_coefficients(const GearingSpec& g) {
  return {{1.0, 0.0, -1.0, -1.0, 0.0, 1.0, g.ratio1, g.ratio2}};
}

/// Motor power at the end of a locked one-way transfer (clutch 1 released,
/// motor still at gear-1 speed), for reduced coefficients in the model frame.
double transfer_end_power(const ReducedCoefficients& c, const DrivelineParams& p, double r1, double fd,
                          const NoJerkTargets& tg, double t) {
  const double w_out = fd * tg.omega_at(t);
  const double a_out = fd * tg.omega_dot;
  const double k = c[4] / c[8];
  const double bracket =
      (r1 * p.motor_inertia - k * p.output_inertia) * a_out + c.load_gain() * (p.output_damping * w_out + tg.torque / fd);
  return r1 * w_out * (p.motor_damping * r1 * w_out + bracket / c.gamma());
}

FeasibilityReport thm1_core(const ReducedCoefficients& c, const DrivelineParams& p, double r1, double fd,
                            const VehicleParams& v, const Scenario& s, const MotorLimits& motor, std::string name) {
  motor.validate();
  FeasibilityReport r;
  r.theorem = std::move(name);
  r.margin_unit = "W";
  if (s.direction != ShiftDirection::upshift || s.quadrant != MotorQuadrant::driving) {
    r.notes.push_back("applies to power-on upshifts only");
    return r;
  }
  const auto tg = no_jerk_targets(v, s);
  const double t = s.pre_hold + s.torque_phase;
  const double w_m = r1 * fd * tg.omega_at(t);
  const double power = transfer_end_power(c, p, r1, fd, tg, t);
  r.add("t_tr_end", t, "s");
  r.add("omega_m_t_tr", w_m, "rad/s");
  r.add("P_m_t_tr", power, "W");
  r.add("T_m_t_tr", power / w_m, "N m");
  if (!motor.power_limited(w_m)) {
    r.notes.push_back("motor below base speed at the end of the transfer; the power condition does not apply");
    return r;
  }
  if (w_m > motor.max_speed) {
    r.verdict = Verdict::infeasible;
    r.binding = BindingLimit::speed;
    r.margin = motor.max_speed - w_m;
    r.margin_unit = "rad/s";
    return r;
  }
  r.margin = motor.max_power - power;
  r.verdict = r.margin >= 0.0 ? Verdict::feasible : Verdict::infeasible;
  r.binding = r.verdict == Verdict::infeasible ? BindingLimit::power : BindingLimit::none;
  return r;
}

FeasibilityReport thm3_core(const SyncEquation& eq, const MotorLimits& motor, const Thm3Options& opt, std::string name,
                            double ratio_for_region) {
  FeasibilityReport r;
  r.theorem = std::move(name);
  r.margin_unit = "N m";
  r.add("gamma", eq.gamma, "-");
  r.add("tau", eq.tau, "N m");
  const double w_start = ratio_for_region * eq.omega_out0;
  if (motor.power_limited(w_start)) {
    r.notes.push_back("gear-1 speed at shift start is above base speed; the torque-limited condition does not apply");
    return r;
  }
  const auto ts = eq.first_root(opt.horizon);

  // Smallest peak torque with synchronization inside the horizon.
  auto with_torque = [&eq](double tmax) {
    SyncEquation e = eq;
    e.max_torque = tmax;
    return e;
  };
  double lo = eq.tau / eq.gamma;
  double hi = std::max(eq.max_torque, lo + 1.0);
  while (!with_torque(hi).first_root(opt.horizon) && hi < 1e9) hi *= 2.0;
  double required = std::numeric_limits<double>::infinity();
  if (with_torque(hi).first_root(opt.horizon)) {
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (with_torque(mid).first_root(opt.horizon)) hi = mid;
      else lo = mid;
    }
    required = hi;
  }
  r.add("T_max_required", required, "N m");
  r.margin = eq.max_torque - required;

  if (ts) {
    r.verdict = Verdict::feasible;
    r.binding = BindingLimit::none;
    r.margin = std::max(r.margin, 0.0);
    r.add("t_s", *ts, "s");
    const bool practical = *ts <= opt.practical_threshold;
    r.add("practical", practical ? 1.0 : 0.0, "-");
    if (!practical) r.notes.push_back("synchronization exceeds the practical threshold");
    if (motor.power_limited(eq.ratio1 * (eq.omega_out0 + eq.omega_out_dot * *ts)))
      r.notes.push_back("gear-1 speed at synchronization is above base speed; torque-limited assumption is optimistic");
  } else {
    r.verdict = Verdict::infeasible;
    r.binding = BindingLimit::torque;
    if (!(r.margin < 0.0)) r.margin = -std::numeric_limits<double>::min();
    r.add("practical", 0.0, "-");
    r.notes.push_back("no synchronization within the horizon");
  }
  r.add("horizon", opt.horizon, "s");
  return r;
}

}  // namespace

double thm1_required_power(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g, const Scenario& s) {
  return transfer_end_power(parallel_shaft_coefficients(g), p, g.ratio1, 1.0, no_jerk_targets(v, s),
                            s.pre_hold + s.torque_phase);
}

FeasibilityReport thm1_owc_upshift(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                                   const Scenario& s, const MotorLimits& motor) {
  return thm1_core(parallel_shaft_coefficients(g), p, g.ratio1, 1.0, v, s, motor, "thm1-owc-upshift");
}

FeasibilityReport thm1_planetary(const DrivelineModel& model, const VehicleParams& v, const Scenario& s,
                                 const MotorLimits& motor) {
  if (!model.planetary()) throw std::invalid_argument("thm1_planetary: planetary model required");
  const auto& c = model.coefficients();
  auto r = thm1_core(c, model.params(), model.ratio(1), model.final_drive(), v, s, motor, "thm1-planetary");
  const double sign = c.clutch1_power_sign();
  r.add("maximality", sign, "-");
  if (!(sign < 0.0)) {
    r.sufficient = false;
    r.notes.push_back("releasing clutch 1 does not maximize motor power; the power condition is necessary only");
  }
  r.notes.push_back("assumes near-constant speeds and accelerations during the torque phase");
  return r;
}

FeasibilityReport thm2_dualfriction_upshift(const DrivelineModel& model, const ShiftSetup& setup,
                                            const Thm2Options& opt) {
  FeasibilityReport r;
  r.theorem = "thm2-dual-friction-upshift";
  r.margin_unit = "rad/s";
  const auto& s = setup.scenario;
  if (model.clutch1_kind() != ClutchKind::friction) throw std::invalid_argument("thm2: clutch 1 must be friction");
  if (s.direction != ShiftDirection::upshift || s.quadrant != MotorQuadrant::driving) {
    r.notes.push_back("applies to power-on upshifts only");
    return r;
  }
  const auto tg = no_jerk_targets(setup.vehicle, s);
  const double w0 = model.ratio(1) * model.final_drive() * tg.omega_at(s.pre_hold);
  if (!setup.motor.power_limited(w0)) {
    r.notes.push_back("motor below base speed at shift start; the power-limited condition does not apply");
    return r;
  }

  const auto reach = reachable_delta_m(model, setup);
  r.add("delta_m_reach", reach.delta_m, "rad/s");
  r.add("omega_m_reach", reach.omega_m, "rad/s");
  const BindingLimit reach_limit =
      reach.stop == SpeedRaiseReach::Stop::speed_limit ? BindingLimit::speed : BindingLimit::power;

  auto delta_s = [&](double dm) {
    const auto tr = simulate_upshift_dualfriction(model, setup, dm);
    return tr.completed ? tr.delta_s : std::numeric_limits<double>::quiet_NaN();
  };
  // Stay just inside the reachable set so the target event fires.
  const double dm_max = reach.delta_m * (1.0 - 1e-6);
  const double ds_max = delta_s(std::max(dm_max, 0.0));
  r.add("delta_s_at_reach", ds_max, "rad/s");
  if (!(ds_max >= 0.0)) {
    r.verdict = Verdict::infeasible;
    r.binding = reach_limit;
    r.margin = std::isnan(ds_max) ? -reach.delta_m : std::min(ds_max, -std::numeric_limits<double>::min());
    r.notes.push_back("no reachable speed raise keeps clutch-1 slip non-negative through the transfer");
    return r;
  }

  const int n = std::max(2, opt.grid_points);
  std::vector<double> grid(n), ds(n);
  bool monotone = true;
  for (int i = 0; i < n; ++i) {
    grid[i] = dm_max * i / (n - 1);
    ds[i] = i + 1 == n ? ds_max : delta_s(grid[i]);
    if (i > 0 && !(ds[i] >= ds[i - 1])) monotone = false;
  }
  if (!monotone) r.notes.push_back("slip after transfer is not monotone in the speed raise on the coarse grid");

  double dm_min = 0.0;
  if (!(ds[0] >= 0.0)) {
    int first = 1;
    while (first < n && !(ds[first] >= 0.0)) ++first;
    double lo = grid[first - 1], hi = grid[first];
    while (hi - lo > opt.resolution) {
      const double mid = 0.5 * (lo + hi);
      if (delta_s(mid) >= 0.0) hi = mid;
      else lo = mid;
    }
    dm_min = hi;
  }
  r.verdict = Verdict::feasible;
  r.binding = BindingLimit::none;
  r.margin = ds_max;
  r.add("delta_m_min", dm_min, "rad/s");
  r.add("delta_s", delta_s(dm_min), "rad/s");
  r.add("omega_m_t1", model.ratio(1) * model.final_drive() * tg.omega_at(s.pre_hold) + dm_min, "rad/s");
  return r;
}

double SyncEquation::motor_speed(double t) const {
  const double lambda = gamma * motor_damping / motor_inertia;
  const double x = lambda * t;
  const double phi = std::abs(x) < 1e-12 ? t : -std::expm1(-x) / lambda;
  return std::exp(-x) * ratio2 * omega_out0 + (gamma * max_torque - tau) / motor_inertia * phi;
}

std::optional<double> SyncEquation::first_root(double horizon) const {
  auto f = [this](double t) { return residual(t); };
  return gearshift::first_root(f, 1e-12, horizon, 5000);
}

double quasi_static_clutch2(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                            const Scenario& s) {
  const auto tg = no_jerk_targets(v, s);
  return (p.output_inertia * tg.omega_dot + p.output_damping * tg.omega0 + tg.torque) / g.ratio2;
}

FeasibilityReport thm3_downshift(const VehicleParams& v, const DrivelineParams& p, const GearingSpec& g,
                                 const Scenario& s, const MotorLimits& motor, std::optional<double> clutch2,
                                 const Thm3Options& opt) {
  motor.validate();
  if (s.direction != ShiftDirection::downshift || s.quadrant != MotorQuadrant::driving) {
    FeasibilityReport r;
    r.theorem = "thm3-downshift";
    r.notes.push_back("applies to power-on downshifts only");
    return r;
  }
  const auto tg = no_jerk_targets(v, s);
  const SyncEquation eq{g.ratio1, g.ratio2, tg.omega0, tg.omega_dot, p.motor_inertia, p.motor_damping, 1.0,
                        clutch2.value_or(quasi_static_clutch2(v, p, g, s)), motor.max_torque};
  return thm3_core(eq, motor, opt, "thm3-downshift", g.ratio1);
}

FeasibilityReport thm3_planetary(const DrivelineModel& model, const VehicleParams& v, const Scenario& s,
                                 const MotorLimits& motor, std::optional<double> tau, const Thm3Options& opt) {
  motor.validate();
  FeasibilityReport bad;
  bad.theorem = "thm3-planetary";
  if (s.direction != ShiftDirection::downshift || s.quadrant != MotorQuadrant::driving) {
    bad.notes.push_back("applies to power-on downshifts only");
    return bad;
  }
  const auto& c = model.coefficients();
  const double gamma = c.gamma();
  if (!(gamma > 0.0)) {
    bad.notes.push_back("reduced motor gain is not positive; coefficients are inconsistent");
    return bad;
  }
  const auto& p = model.params();
  const double fd = model.final_drive();
  const auto tg = no_jerk_targets(v, s);
  const double w0 = fd * tg.omega0;
  const double a0 = fd * tg.omega_dot;
  const double load = c.load_gain() * (p.output_damping * w0 + tg.torque / fd) - c[4] / c[8] * p.output_inertia * a0;
  const SyncEquation eq{model.ratio(1), model.ratio(2), w0, a0, p.motor_inertia, p.motor_damping, gamma,
                        tau.value_or(load), motor.max_torque};
  auto r = thm3_core(eq, motor, opt, "thm3-planetary", model.ratio(1));
  r.notes.push_back("motor torque ramp at shift start is neglected");

  // Gear inertias let T_m leak into the brake-2 reaction; at T_max that reaction
  // may point the wrong way for a brake slipping in the upshift direction.
  Prescribed pre;
  pre.motor_torque = motor.max_torque;
  pre.clutch1 = 0.0;
  pre.output_torque = tg.torque;
  pre.output_accel = a0;
  const double t2 = model.solve({model.ratio(2) * w0, w0}, pre).clutch2;
  r.add("T_2_at_T_max", t2, "N m");
  if (model.torque_sign(2) * t2 < 0.0) {
    r.sufficient = false;
    r.notes.push_back("brake 2 would need a reversed torque at peak motor torque; the condition is necessary only");
  }
  return r;
}

namespace {

DrivelineSolution hold_solution(const DrivelineModel& model, const ShiftSetup& setup, int gear) {
  const auto tg = no_jerk_targets(setup.vehicle, setup.scenario);
  const double fd = model.final_drive();
  const double w_out = fd * tg.omega_at(setup.scenario.pre_hold);
  Prescribed pre;
  pre.clutch1 = gear == 1 ? std::nullopt : std::optional<double>(0.0);
  pre.clutch2 = gear == 2 ? std::nullopt : std::optional<double>(0.0);
  pre.motor_accel = model.ratio(gear) * fd * tg.omega_dot;
  pre.output_torque = tg.torque;
  pre.output_accel = fd * tg.omega_dot;
  return model.solve({model.ratio(gear) * w_out, w_out}, pre);
}

}  // namespace

FeasibilityReport scenario3_rule(const DrivelineModel& model, const ShiftSetup& setup) {
  FeasibilityReport r;
  r.theorem = "scenario3-rule";
  r.margin_unit = "N m";
  const auto& s = setup.scenario;
  if (s.direction != ShiftDirection::downshift || s.quadrant != MotorQuadrant::braking) {
    r.notes.push_back("applies to regenerative downshifts only");
    return r;
  }
  if (model.clutch1_kind() == ClutchKind::one_way) {
    const double needed = hold_solution(model, setup, 1).clutch1;
    r.add("T_1_required", needed, "N m");
    r.verdict = Verdict::infeasible;
    r.binding = BindingLimit::one_way_reversal;
    r.margin = -std::abs(needed);
    r.notes.push_back("gear 1 needs a negative reaction that a one-way clutch cannot carry");
    return r;
  }
  const double tm = hold_solution(model, setup, 2).motor_torque;
  r.add("T_m_start", tm, "N m");
  r.margin = setup.motor.max_torque - std::abs(tm);
  if (r.margin >= 0.0) {
    r.verdict = Verdict::feasible;
  } else {
    r.verdict = Verdict::infeasible;
    r.binding = BindingLimit::torque;
    r.notes.push_back("the pre-shift operating point already exceeds the motor torque limit");
  }
  return r;
}

DriverDemand driver_demand(const DrivelineModel& model, const ShiftSetup& setup) {
  const int gear = setup.scenario.direction == ShiftDirection::upshift ? 1 : 2;
  const auto sol = hold_solution(model, setup, gear);
  const auto tg = no_jerk_targets(setup.vehicle, setup.scenario);
  const double w_m = model.ratio(gear) * model.final_drive() * tg.omega_at(setup.scenario.pre_hold);
  return {sol.motor_torque, sol.motor_torque / setup.motor.max_torque,
          sol.motor_torque / setup.motor.available_torque(w_m)};
}

FeasibilityReport check_shift(const DrivelineModel& model, const ShiftSetup& setup, const GearingSpec& gearing) {
  const auto& s = setup.scenario;
  const Thm3Options t3{setup.solver.sync_horizon, setup.solver.practical_sync};
  if (s.direction == ShiftDirection::downshift && s.quadrant == MotorQuadrant::braking)
    return scenario3_rule(model, setup);
  if (s.direction == ShiftDirection::downshift) {
    return model.planetary() ? thm3_planetary(model, setup.vehicle, s, setup.motor, std::nullopt, t3)
                             : thm3_downshift(setup.vehicle, model.params(), gearing, s, setup.motor, std::nullopt, t3);
  }
  if (s.quadrant == MotorQuadrant::braking) {
    FeasibilityReport r;
    r.theorem = "none";
    r.notes.push_back("regenerative upshifts are not covered");
    return r;
  }
  if (model.clutch1_kind() == ClutchKind::one_way) {
    return model.planetary() ? thm1_planetary(model, setup.vehicle, s, setup.motor)
                             : thm1_owc_upshift(setup.vehicle, model.params(), gearing, s, setup.motor);
  }
  return thm2_dualfriction_upshift(model, setup);
}

}  // namespace gearshift
