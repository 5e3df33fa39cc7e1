// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
// argv[1]: gearshift CLI binary, argv[2]: example config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gearshift/driveline.hpp"
#include "gearshift/feasibility.hpp"
#include "gearshift/integrator.hpp"
#include "gearshift/motor_sizing.hpp"
#include "gearshift/trajectory.hpp"
#include "gearshift/vehicle.hpp"

using namespace gearshift;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Scenario scenario1(double t_tr) {
  Scenario s;
  s.name = "scenario1";
  s.direction = ShiftDirection::upshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 65.0 / 3.6;
  s.accel = 1.0;
  s.driver_demand = 0.8;
  s.torque_phase = t_tr;
  s.inertia_phase = 0.4;
  return s;
}

Scenario scenario2(double accel = 1.0) {
  Scenario s;
  s.name = "scenario2";
  s.direction = ShiftDirection::downshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 18.0 / 3.6;
  s.accel = accel;
  return s;
}

Scenario scenario3() {
  Scenario s;
  s.name = "scenario3";
  s.direction = ShiftDirection::downshift;
  s.quadrant = MotorQuadrant::braking;
  s.initial_speed = 45.0 / 3.6;
  s.accel = -1.5;
  return s;
}

ShiftSetup setup(const Scenario& s) {
  ShiftSetup st;
  st.scenario = s;
  return st;
}

DrivelineModel dct(ClutchKind k) { return DrivelineModel::dct(DrivelineParams{}, GearingSpec{}, k); }

struct TrackingError {
  double torque = 0.0;
  double speed = 0.0;
};

TrackingError tracking(const GearshiftTrajectory& traj, const DrivelineModel& m, const ShiftSetup& s) {
  const auto tg = no_jerk_targets(s.vehicle, s.scenario);
  TrackingError e;
  for (const auto& x : traj.samples) {
    e.torque = std::max(e.torque, rel(x.output_torque, tg.torque));
    e.speed = std::max(e.speed, rel(x.omega_out / m.final_drive(), tg.omega_at(x.t)));
  }
  return e;
}

double speed_raise_duration(const GearshiftTrajectory& traj) {
  for (const auto& p : traj.plan.phases)
    if (p.kind == PhaseKind::speed_raise) return p.end - p.start;
  return std::numeric_limits<double>::quiet_NaN();
}

Outcome criterion1() {
  Outcome o;
  VehicleParams p;
  p.mass = 8500.0;
  const std::vector<DesignSpec> specs{{"extreme grade", 20.0 / 3.6, 0.20, DurationClass::short_term},
                                      {"highway cruise", 110.0 / 3.6, 0.0, DurationClass::continuous},
                                      {"highway grade", 90.0 / 3.6, 0.05, DurationClass::short_term}};
  const auto w1 = wheel_requirements(p, specs[0]);
  const double t75 = motor_requirements(w1, {7.5}).torque;
  const double t12 = motor_requirements(w1, {12.0, 6.0}).torque;
  const double rpm = rad_s_to_rpm(motor_requirements(wheel_requirements(p, specs[1]), {7.5}).speed);
  MotorLimits m450;
  m450.max_torque = 450.0;
  const auto single = check_motor(m450, p, specs, {7.5});
  const auto two = check_motor(m450, p, specs, {12.0, 6.0});
  o.detail << "T(7.5)=" << t75 << " N m, T(12)=" << t12 << " N m, spec-2 speed at 7.5=" << rpm << " rpm";
  o.require(t75 >= 650.0 && t75 <= 700.0, "ratio 7.5 torque in [650, 700]");
  o.require(t12 >= 405.0 && t12 <= 450.0, "ratio 12 torque in [405, 450]");
  o.require(!single.specs[0].pass, "450 N m fails spec 1 at 7.5");
  o.require(two.specs[0].pass && two.pass, "450 N m passes at {12, 6}");
  o.require(rpm <= 8000.0, "spec-2 speed <= 8000 rpm");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto s = setup(scenario1(0.3));
  const auto r = thm1_owc_upshift(s.vehicle, DrivelineParams{}, GearingSpec{}, s.scenario, s.motor);
  const double power = r.quantity("P_m_t_tr").value_or(NAN);
  const auto sim = simulate_upshift_owc(dct(ClutchKind::one_way), s);
  o.detail << "P_m(t_tr)=" << power / 1e3 << " kW, verdict=" << to_string(r.verdict)
           << ", simulated peak=" << sim.peak_motor_power / 1e3 << " kW";
  o.require(power >= 280e3 && power <= 330e3, "P_m in [280, 330] kW");
  o.require(r.verdict == Verdict::infeasible && r.binding == BindingLimit::power, "infeasible on power");
  o.require(rel(power, sim.peak_motor_power) < 0.01, "formula within 1 % of simulated peak");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto m = dct(ClutchKind::friction);
  const auto s = setup(scenario1(0.25));
  const auto r = thm2_dualfriction_upshift(m, s);
  const auto dm = r.quantity("delta_m_min");
  const auto w1 = r.quantity("omega_m_t1");
  const auto ds = r.quantity("delta_s");
  o.require(r.verdict == Verdict::feasible && dm && w1 && ds, "finite delta_m_min");
  if (!o.pass) return o;
  const auto traj = simulate_upshift_dualfriction(m, s, *dm);
  const auto e = tracking(traj, m, s);
  o.detail << "delta_m_min=" << *dm << " rad/s, omega_m(t1)=" << rad_s_to_rpm(*w1) << " rpm, delta_s=" << *ds
           << " rad/s, flags=" << traj.flags.size() << ", tracking=" << std::max(e.torque, e.speed);
  o.require(rad_s_to_rpm(*w1) <= 8000.0, "omega_m(t1) <= 8000 rpm");
  o.require(*ds >= 0.0 && traj.delta_s >= 0.0, "delta_s >= 0");
  o.require(traj.completed && traj.constructed && traj.flags.empty(), "completes without flags");
  o.require(e.torque < 1e-3 && e.speed < 1e-3, "tracking error < 0.1 %");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const VehicleParams v;
  const DrivelineParams p;
  const MotorLimits motor;
  const auto r = thm3_downshift(v, p, GearingSpec{}, scenario2(), motor);
  const auto ts = r.quantity("t_s");
  o.require(ts.has_value(), "root exists");
  if (!ts) return o;

  // Closed form against RK4 on the motor equation with clutch 1 open.
  const auto tg = no_jerk_targets(v, scenario2());
  const double t2 = quasi_static_clutch2(v, p, GearingSpec{}, scenario2());
  const SyncEquation eq{12.0, 6.0, tg.omega0, tg.omega_dot, p.motor_inertia, p.motor_damping, 1.0, t2,
                        motor.max_torque};
  auto f = [&](double, const Vec<1>& w) {
    return Vec<1>{(-p.motor_damping * w[0] + motor.max_torque - t2) / p.motor_inertia};
  };
  Vec<1> w{6.0 * tg.omega0};
  const double h = 1e-3;
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    w = rk4_step<1>(f, (k - 1) * h, w, h);
    worst = std::max(worst, rel(w[0], eq.motor_speed(k * h)));
  }

  // Sweep of the acceleration demand.
  bool increasing = true, no_root_tail = true, seen_gap = false;
  double prev = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double a = 0.2 + 0.1 * i;
    const auto t = thm3_downshift(v, p, GearingSpec{}, scenario2(a), motor).quantity("t_s");
    if (t && !seen_gap) {
      if (!(*t > prev)) increasing = false;
      prev = *t;
    } else if (!t) {
      seen_gap = true;
    } else {
      no_root_tail = false;
    }
  }
  auto has_root = [&](double a) {
    return thm3_downshift(v, p, GearingSpec{}, scenario2(a), motor).quantity("t_s").has_value();
  };
  double lo = 0.2, hi = 1.4;
  const bool bracketed = has_root(lo) && !has_root(hi);
  while (bracketed && hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (has_root(mid) ? lo : hi) = mid;
  }
  o.detail << "t_s=" << *ts << " s, closed form vs RK4=" << worst << ", no-root threshold a_r=" << hi << " m/s2";
  o.require(*ts >= 0.25 && *ts <= 0.45, "t_s in [0.25, 0.45]");
  o.require(worst < 1e-6, "closed form vs integration < 1e-6");
  o.require(increasing && seen_gap && no_root_tail, "t_s increasing then no root");
  o.require(bracketed && hi >= 1.2 && hi <= 1.35, "threshold in [1.2, 1.35]");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto s = setup(scenario3());
  const auto owc = scenario3_rule(dct(ClutchKind::one_way), s);
  const auto fr = scenario3_rule(dct(ClutchKind::friction), s);
  const auto m = dct(ClutchKind::friction);
  const auto traj = simulate_downshift_braking(m, s);
  double peak = 0.0;
  for (const auto& x : traj.samples) peak = std::max(peak, std::abs(x.motor_torque));
  o.detail << "one-way=" << to_string(owc.verdict) << ", friction=" << to_string(fr.verdict)
           << ", peak |T_m|=" << peak << " N m, flags=" << traj.flags.size();
  o.require(owc.verdict == Verdict::infeasible, "one-way infeasible");
  o.require(fr.verdict == Verdict::feasible, "friction feasible");
  o.require(traj.feasible(), "friction trajectory completes without flags");
  o.require(peak >= 0.95 * s.motor.max_torque && peak <= s.motor.max_torque, "reaches the saturation boundary");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const DrivelineParams p;
  const GearingSpec g;
  DualBrakeGearset massless;
  massless.ring_inertia = massless.sun_inertia = 0.0;
  const auto coeffs0 = dbt_coefficients(p, g, massless);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> speed(-500.0, 900.0), torque(-600.0, 600.0), load(-4000.0, 4000.0);
  double worst_state = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DrivelineState x{speed(rng), speed(rng) / 10.0};
    const DrivelineInputs in{torque(rng), torque(rng), torque(rng), load(rng)};
    const auto a = dbt_dynamics_full(coeffs0, p, g.final_drive, in, x);
    const auto b = dbt_dynamics_simplified(p, g, in, x);
    worst_state = std::max({worst_state, std::abs(a.motor - b.motor) / std::max(std::abs(b.motor), 1.0),
                            std::abs(a.output - b.output) / std::max(std::abs(b.output), 1.0)});
  }
  double worst_coeff = 0.0;
  for (double inertia : {0.0, 0.01, 0.03, 0.1}) {
    DualBrakeGearset set;
    set.ring_inertia = set.sun_inertia = inertia;
    const auto c = dbt_coefficients(p, g, set);
    const auto n = dbt_coefficients_numeric(p, g, set);
    for (int k = 1; k <= 8; ++k) worst_coeff = std::max(worst_coeff, rel(c[k], n[k]));
  }
  const double sign = dbt_coefficients(p, g, DualBrakeGearset{}).clutch1_power_sign();
  const double r1 = dbt_gearbox_ratio1(g) * g.final_drive;
  const double r2 = dbt_gearbox_ratio2(g) * g.final_drive;
  o.detail << "massless vs simplified=" << worst_state << ", analytic vs numeric=" << worst_coeff
           << ", ratio check=" << sign << ", ratios=" << r1 << "/" << r2;
  o.require(worst_state < 1e-9, "massless full model equals simplified to 1e-9");
  o.require(worst_coeff < 1e-9, "analytic coefficients equal numeric elimination to 1e-9");
  o.require(std::abs(sign - (-(g.beta1 + 1.0) / g.beta1)) < 1e-9, "ratio check equals -(beta1 + 1)/beta1");
  o.require(std::abs(r1 - 12.0) < 1e-9 && std::abs(r2 - 6.0) < 1e-9, "effective ratios 12 and 6");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const DrivelineParams p;
  DualBrakeGearset heavy;
  heavy.ring_inertia = heavy.sun_inertia = p.motor_inertia / 10.0;
  DualBrakeGearset massless;
  massless.ring_inertia = massless.sun_inertia = 0.0;
  const auto full = DrivelineModel::dbt_full(p, GearingSpec{}, heavy, ClutchKind::friction);
  const auto bare = DrivelineModel::dbt_full(p, GearingSpec{}, massless, ClutchKind::friction);
  const auto s = setup(scenario1(0.25));

  // Sign of dT1/dT_m at the solved speed-phase states, output targets held fixed.
  const double dm = 20.0;
  const auto traj = simulate_upshift_dualfriction(full, s, dm);
  int tested = 0, wrong = 0;
  for (const auto& x : traj.samples) {
    if (x.phase != PhaseKind::speed_raise) continue;
    Prescribed pre;
    pre.clutch2 = 0.0;
    pre.output_torque = x.output_torque;
    pre.output_accel = full.final_drive() * s.scenario.accel / s.vehicle.wheel_radius;
    pre.motor_torque = x.motor_torque;
    const auto base = full.solve({x.omega_m, x.omega_out}, pre);
    pre.motor_torque = x.motor_torque + 10.0;
    const auto raised = full.solve({x.omega_m, x.omega_out}, pre);
    ++tested;
    if (!(raised.clutch1 < base.clutch1)) ++wrong;
  }
  const double t_heavy = speed_raise_duration(traj);
  const double t_bare = speed_raise_duration(simulate_upshift_dualfriction(bare, s, dm));
  o.detail << "speed-phase samples=" << tested << " with T1 falling as T_m rises: " << tested - wrong
           << ", time to delta_m=" << dm << ": " << t_heavy << " s vs " << t_bare << " s massless";
  o.require(tested > 0 && wrong == 0, "T1 decreases as T_m rises");
  o.require(t_heavy > t_bare, "gear inertia lengthens synchronization");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const VehicleParams v;
  double worst_track = 0.0, worst_jerk = 0.0, min_t1 = std::numeric_limits<double>::infinity();
  int accepted = 0;
  auto account = [&](const GearshiftTrajectory& traj, const DrivelineModel& m, const ShiftSetup& s) {
    if (!traj.feasible()) return;
    ++accepted;
    const auto e = tracking(traj, m, s);
    worst_track = std::max({worst_track, e.torque, e.speed});
    worst_jerk = std::max(worst_jerk, validate_full_driveline(v, m, s.scenario, traj));
  };
  const auto fr = dct(ClutchKind::friction);
  const auto ow = dct(ClutchKind::one_way);
  for (double t_tr : {0.1, 0.25, 0.3}) {
    const auto s = setup(scenario1(t_tr));
    const auto r = thm2_dualfriction_upshift(fr, s);
    if (const auto dm = r.quantity("delta_m_min")) account(simulate_upshift_dualfriction(fr, s, *dm), fr, s);
  }
  for (double a : {0.0, 0.2, 0.4}) {
    auto sc = scenario1(0.25);
    sc.accel = a;
    const auto s = setup(sc);
    account(simulate_upshift_owc(ow, s), ow, s);
  }
  for (double a : {0.5, 1.0, 1.2}) {
    const auto s = setup(scenario2(a));
    account(simulate_downshift_driving(fr, s), fr, s);
    account(simulate_downshift_driving(ow, s), ow, s);
  }
  account(simulate_downshift_braking(fr, setup(scenario3())), fr, setup(scenario3()));

  // One-way reactions, accepted or not.
  for (double a : {0.0, 0.5, 1.0, 1.4}) {
    auto sc = scenario1(0.25);
    sc.accel = a;
    for (const auto& x : simulate_upshift_owc(ow, setup(sc)).samples) min_t1 = std::min(min_t1, x.clutch1);
    for (const auto& x : simulate_downshift_driving(ow, setup(scenario2(a))).samples)
      min_t1 = std::min(min_t1, x.clutch1);
  }
  o.detail << "accepted trajectories=" << accepted << ", worst tracking=" << worst_track
           << ", peak jerk=" << worst_jerk << " m/s3, min one-way T1=" << min_t1 << " N m";
  o.require(accepted >= 8, "enough accepted trajectories");
  o.require(worst_track < 1e-3, "tracking < 1e-3");
  o.require(worst_jerk < 0.5, "peak jerk < 0.5 m/s3");
  o.require(min_t1 >= 0.0, "one-way T1 never negative");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion9(const std::string& cli, const std::string& config) {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("gearshift_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  struct Run {
    std::string args;
    std::string name;
  };
  const std::vector<Run> runs{
      {"simulate --scenario scenario1 --model dct-friction", "simulate"},
      {"sweep --scenario scenario2 --param scenario.accel_m_s2 --from 0.2 --to 1.4 --steps 13", "sweep"},
      {"size-motor", "envelope"},
  };
  std::size_t bytes = 0;
  for (const auto& r : runs) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (r.name + std::to_string(k) + ".csv");
      const std::string cmd = "\"" + cli + "\" " + r.args + " --config \"" + config + "\" --out \"" + out.string() +
                              "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      const int rc = std::system(cmd.c_str());
      o.require(rc != -1 && fs::exists(out), r.name + " produced output");
      const auto text = slurp(out);
      if (k == 0) first = text;
      else o.require(!first.empty() && text == first, r.name + " byte-identical");
    }
    bytes += first.size();
  }
  fs::remove_all(dir);
  o.detail << "compared " << runs.size() << " command pairs, " << bytes << " bytes";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <gearshift-cli> <config.json>\n", argv[0]);
    return 64;
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"motor sizing", criterion1},
      {"one-way upshift power condition", criterion2},
      {"dual-friction upshift speed raise", criterion3},
      {"power-on downshift synchronization", criterion4},
      {"regenerative downshift rules", criterion5},
      {"planetary reduction", criterion6},
      {"dual-brake coupling sign", criterion7},
      {"no-jerk invariants", criterion8},
      {"determinism", [&] { return criterion9(argv[1], argv[2]); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
  }
  return failures;
}
