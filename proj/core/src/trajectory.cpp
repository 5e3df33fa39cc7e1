#include "gearshift/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "gearshift/integrator.hpp"

namespace gearshift {

std::string_view to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::hold: return "hold";
    case PhaseKind::speed_raise: return "speed";
    case PhaseKind::torque_transfer: return "torque";
    case PhaseKind::inertia_sync: return "inertia";
  }
  return "?";
}

std::string_view to_string(FlagKind k) {
  switch (k) {
    case FlagKind::motor_torque: return "motor-torque";
    case FlagKind::motor_power: return "motor-power";
    case FlagKind::motor_speed: return "motor-speed";
    case FlagKind::clutch_rate: return "clutch-rate";
    case FlagKind::clutch_capacity: return "clutch-capacity";
    case FlagKind::slip_reversal: return "slip-reversal";
    case FlagKind::one_way_reversal: return "one-way-reversal";
    case FlagKind::one_way_overspeed: return "one-way-overspeed";
    case FlagKind::no_sync: return "no-sync";
    case FlagKind::delta_m_unreachable: return "delta-m-unreachable";
  }
  return "?";
}

bool is_saturation(FlagKind k) {
  return k == FlagKind::motor_torque || k == FlagKind::motor_power || k == FlagKind::motor_speed;
}

void SolverSettings::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("solver.dt must be positive");
  if (!(post_hold >= 0.0)) throw std::invalid_argument("solver.post_hold must be non-negative");
  if (!(sync_horizon > 0.0)) throw std::invalid_argument("solver.sync_horizon must be positive");
  if (!(practical_sync > 0.0)) throw std::invalid_argument("solver.practical_sync must be positive");
  if (!(event_tolerance > 0.0)) throw std::invalid_argument("solver.event_tolerance must be positive");
  if (!(stick_tolerance > 0.0)) throw std::invalid_argument("solver.stick_tolerance must be positive");
  if (!transfer_shape) throw std::invalid_argument("solver.transfer_shape is empty");
}

void PhasePlan::validate() const {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    if (!(p.end > p.start)) throw std::invalid_argument("phase plan: phase durations must be positive");
    if (i > 0 && std::abs(p.start - phases[i - 1].end) > 1e-12)
      throw std::invalid_argument("phase plan: phases must be contiguous");
  }
}

bool GearshiftTrajectory::has_flag(FlagKind k) const {
  return std::any_of(flags.begin(), flags.end(), [k](const TrajectoryFlag& f) { return f.kind == k; });
}

bool GearshiftTrajectory::saturated() const {
  return std::any_of(flags.begin(), flags.end(), [](const TrajectoryFlag& f) { return is_saturation(f.kind); });
}

namespace {

using std::nullopt;
using Opt = std::optional<double>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
// Commanded motor ramps stay this far below the clutch rate they induce.
constexpr double kRampMargin = 0.95;

struct Command {
  DrivelineSolution sol;
  std::array<ClutchRole, 2> roles{ClutchRole::slip, ClutchRole::slip};
};

using Policy = std::function<Command(double, const DrivelineState&)>;
using EventFn = std::function<double(double, const DrivelineState&)>;

struct Phase {
  PhaseKind kind = PhaseKind::hold;
  Policy policy;
  double max_end = 0.0;
  std::vector<EventFn> events;  // the phase stops at the first sign change of any
};

/// Cubic speed reference matching value and slope at both ends.
struct Hermite {
  double t0, duration, p0, p1, m0, m1;

  double slope(double t) const {
    const double u = std::clamp((t - t0) / duration, 0.0, 1.0);
    return (6.0 * u * u - 6.0 * u) * (p0 - p1) / duration + (3.0 * u * u - 4.0 * u + 1.0) * m0 +
           (3.0 * u * u - 2.0 * u) * m1;
  }
};

/// Motor torque command rising at a bounded rate towards the available torque.
struct MotorRamp {
  const MotorLimits* motor;
  double t0, torque0, rate;

  double operator()(double t, const DrivelineState& x) const {
    const double cap = motor->available_torque(x.omega_m);
    if (!std::isfinite(rate)) return cap;
    return std::min(cap, torque0 + rate * (t - t0));
  }
};

class Runner {
 public:
  Runner(const DrivelineModel& m, const ShiftSetup& s)
      : m_(m), s_(s), targets_(no_jerk_targets(s.vehicle, s.scenario)), fd_(m.final_drive()) {
    s.motor.validate();
    s.solver.validate();
    for (const auto& c : s.clutches) c.validate();
    traj_.model = m.kind();
    traj_.dt = s.solver.dt;
  }

  const DrivelineModel& model() const { return m_; }
  const ShiftSetup& setup() const { return s_; }
  double r(int gear) const { return m_.ratio(gear); }
  double out_speed(double t) const { return fd_ * targets_.omega_at(t); }
  double out_accel() const { return fd_ * targets_.omega_dot; }
  double t() const { return t_; }
  const DrivelineState& x() const { return x_; }
  GearshiftTrajectory& traj() { return traj_; }

  void start_in_gear(int gear) {
    t_ = 0.0;
    x_ = {r(gear) * out_speed(0.0), out_speed(0.0)};
  }

  DrivelineSolution solve(const DrivelineState& x, Opt tm, Opt c1, Opt c2, Opt am) const {
    Prescribed p;
    p.motor_torque = tm;
    p.clutch1 = c1;
    p.clutch2 = c2;
    p.motor_accel = am;
    p.output_torque = targets_.torque;
    p.output_accel = out_accel();
    return m_.solve(x, p);
  }

  /// Motor torque slew that keeps the commanded clutch within its rate limit
  /// when that clutch is solved from the output equation.
  double ramp_rate(int commanded_clutch) const {
    const auto& out_row = m_.form()[1];
    if (std::abs(out_row[0]) < 1e-15) return kInf;
    return kRampMargin * s_.clutches[commanded_clutch - 1].rate_limit *
           std::abs(out_row[commanded_clutch + 1] / out_row[0]);
  }

  double grid_ceil(double t) const {
    const double dt = s_.solver.dt;
    return std::ceil(t / dt - 1e-9) * dt;
  }

  Phase hold(int gear, double end) const {
    const double a = r(gear) * out_accel();
    Phase ph{PhaseKind::hold, {}, end, {}};
    ph.policy = [this, gear, a](double, const DrivelineState& x) {
      Command c;
      c.sol = gear == 1 ? solve(x, nullopt, nullopt, 0.0, a) : solve(x, nullopt, 0.0, nullopt, a);
      c.roles[gear - 1] = ClutchRole::stick;
      return c;
    };
    return ph;
  }

  Hermite sync_reference(int to_gear, double duration, double from_slope) const {
    return {t_, duration, x_.omega_m, r(to_gear) * out_speed(t_ + duration), from_slope, r(to_gear) * out_accel()};
  }

  /// Pulls omega_m onto the gear speed when it is already there to event accuracy.
  void snap(int gear) {
    const double target = r(gear) * x_.omega_out;
    if (std::abs(x_.omega_m - target) < 1e-6 * std::max(1.0, std::abs(target))) x_.omega_m = target;
  }

  /// Integrates one phase; returns the index of the event that ended it, or -1.
  int run(const Phase& ph) {
    begin_span(ph.kind);
    const double dt = s_.solver.dt;
    auto f = [&ph](double tt, const Vec<2>& v) {
      const auto c = ph.policy(tt, {v[0], v[1]});
      return Vec<2>{c.sol.motor_accel, c.sol.output_accel};
    };
    for (;;) {
      if (t_ >= ph.max_end - kTimeEps) break;
      const double tg = static_cast<double>(next_k_) * dt;
      if (t_ >= tg - kTimeEps) {
        record(tg, ph);
        continue;
      }
      const double target = std::min(tg, ph.max_end);
      double h = target - t_;
      const Vec<2> v{x_.omega_m, x_.omega_out};
      int which = -1;
      double frac = 1.0;
      for (std::size_t i = 0; i < ph.events.size(); ++i) {
        const auto& ev = ph.events[i];
        auto g = [&ev](double tt, const Vec<2>& u) { return ev(tt, {u[0], u[1]}); };
        const auto hit = locate_event<2>(f, g, t_, v, h, s_.solver.event_tolerance);
        if (hit && hit->fraction < frac) {
          frac = hit->fraction;
          which = static_cast<int>(i);
        }
      }
      if (which >= 0) h *= frac;
      const auto next = rk4_step<2>(f, t_, v, h);
      if (!std::isfinite(next[0]) || !std::isfinite(next[1]))
        throw std::runtime_error("trajectory: integration produced a non-finite state");
      x_ = {next[0], next[1]};
      t_ = which >= 0 ? t_ + h : target;
      traj_.plan.phases.back().end = t_;
      if (which >= 0) return which;
    }
    traj_.plan.phases.back().end = t_;
    return -1;
  }

  /// Continues `ph` up to the next grid point and writes the closing sample.
  void close(const Phase& ph) {
    const double dt = s_.solver.dt;
    double tg = static_cast<double>(next_k_) * dt;
    if (t_ < tg - kTimeEps) {
      Phase rest = ph;
      rest.events.clear();
      rest.max_end = tg;
      run(rest);
    }
    tg = static_cast<double>(next_k_) * dt;
    if (t_ >= tg - kTimeEps) record(tg, ph);
  }

  /// Final gear hold for the post-shift window, then the closing sample.
  void finish_in_gear(int gear) {
    snap(gear);
    const auto ph = hold(gear, grid_ceil(t_ + s_.solver.post_hold));
    run(ph);
    close(ph);
  }

  void add_event_flag(FlagKind k, double value, double limit) {
    traj_.flags.push_back({k, 0, t_, value, limit});
  }

  GearshiftTrajectory finalize();

 private:
  static constexpr double kTimeEps = 1e-9;

  void begin_span(PhaseKind k) {
    auto& phases = traj_.plan.phases;
    if (!phases.empty() && phases.back().kind == k && phases.back().end == t_) return;
    if (!phases.empty() && phases.back().end == phases.back().start) phases.pop_back();
    phases.push_back({k, t_, t_});
  }

  void record(double tg, const Phase& ph) {
    const auto c = ph.policy(t_, x_);
    TrajectorySample s;
    s.t = tg;
    s.omega_m = x_.omega_m;
    s.omega_out = x_.omega_out;
    s.omega_v = x_.omega_out / fd_;
    s.motor_torque = c.sol.motor_torque;
    s.clutch1 = c.sol.clutch1;
    s.clutch2 = c.sol.clutch2;
    s.output_torque = c.sol.output_torque;
    s.motor_power = s.motor_torque * s.omega_m;
    s.phase = ph.kind;
    s.roles = c.roles;
    traj_.samples.push_back(s);
    ++next_k_;
  }

  const DrivelineModel& m_;
  const ShiftSetup& s_;
  NoJerkTargets targets_;
  double fd_;
  double t_ = 0.0;
  DrivelineState x_{};
  std::size_t next_k_ = 0;
  GearshiftTrajectory traj_;
};

void note_flag(std::vector<TrajectoryFlag>& flags, FlagKind k, int clutch, double t, double value, double limit) {
  for (auto& f : flags) {
    if (f.kind == k && f.clutch == clutch) {
      if (std::abs(value) > std::abs(f.worst)) f.worst = value;
      return;
    }
  }
  flags.push_back({k, clutch, t, value, limit});
}

GearshiftTrajectory Runner::finalize() {
  auto& tr = traj_;
  auto& plan = tr.plan;
  if (!plan.phases.empty() && plan.phases.back().end == plan.phases.back().start) plan.phases.pop_back();
  std::vector<TrajectoryFlag> flags = tr.flags;
  const auto& mot = s_.motor;
  const double tol = 1e-9;
  const double stick = s_.solver.stick_tolerance;
  const bool owc = m_.clutch1_kind() == ClutchKind::one_way;

  tr.peak_motor_power = tr.samples.empty() ? 0.0 : -kInf;
  tr.min_motor_power = tr.samples.empty() ? 0.0 : kInf;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& s = tr.samples[i];
    tr.peak_motor_power = std::max(tr.peak_motor_power, s.motor_power);
    tr.min_motor_power = std::min(tr.min_motor_power, s.motor_power);
    if (std::abs(s.motor_torque) > mot.max_torque * (1.0 + tol))
      note_flag(flags, FlagKind::motor_torque, 0, s.t, s.motor_torque, mot.max_torque);
    if (std::abs(s.motor_power) > mot.max_power * (1.0 + tol))
      note_flag(flags, FlagKind::motor_power, 0, s.t, s.motor_power, mot.max_power);
    if (std::abs(s.omega_m) > mot.max_speed * (1.0 + tol))
      note_flag(flags, FlagKind::motor_speed, 0, s.t, s.omega_m, mot.max_speed);

    const DrivelineState x{s.omega_m, s.omega_out};
    const std::array<double, 2> torque{s.clutch1, s.clutch2};
    for (int k = 1; k <= 2; ++k) {
      const auto& spec = s_.clutches[k - 1];
      const double T = torque[k - 1];
      if (!(owc && k == 1) && std::abs(T) > spec.capacity() * (1.0 + tol))
        note_flag(flags, FlagKind::clutch_capacity, k, s.t, T, spec.capacity());
      const double slip = m_.slip_speed(k, x);
      if (s.roles[k - 1] == ClutchRole::slip && std::abs(T) > 1e-9 && std::abs(slip) > stick &&
          m_.torque_sign(k) * T * slip < 0.0)
        note_flag(flags, FlagKind::slip_reversal, k, s.t, slip, 0.0);
      if (i > 0 && s.roles[k - 1] == ClutchRole::slip && tr.samples[i - 1].roles[k - 1] == ClutchRole::slip) {
        const double prev = k == 1 ? tr.samples[i - 1].clutch1 : tr.samples[i - 1].clutch2;
        const double rate = std::abs(T - prev) / (s.t - tr.samples[i - 1].t);
        tr.peak_clutch_rate[k - 1] = std::max(tr.peak_clutch_rate[k - 1], rate);
        if (rate > spec.rate_limit * (1.0 + tol) + 1e-9)
          note_flag(flags, FlagKind::clutch_rate, k, s.t, rate, spec.rate_limit);
      }
    }
    if (owc) {
      if (s.clutch1 < -1e-9) note_flag(flags, FlagKind::one_way_reversal, 1, s.t, s.clutch1, 0.0);
      if (m_.slip_speed(1, x) > stick)
        note_flag(flags, FlagKind::one_way_overspeed, 1, s.t, m_.slip_speed(1, x), 0.0);
    }
  }
  tr.flags = std::move(flags);
  return std::move(traj_);
}

void require_direction(const Scenario& s, ShiftDirection d, MotorQuadrant q, const char* what) {
  if (s.direction != d || s.quadrant != q) throw std::invalid_argument(std::string(what) + ": scenario does not match");
}

double transfer_fraction(const ShiftSetup& s, double t0, double t) {
  return s.solver.transfer_shape((t - t0) / s.scenario.torque_phase);
}

Phase inertia_upshift(const Runner& run, const Hermite& ref) {
  Phase ph{PhaseKind::inertia_sync, {}, ref.t0 + ref.duration, {}};
  ph.policy = [&run, ref](double t, const DrivelineState& x) {
    Command c;
    c.sol = run.solve(x, nullopt, 0.0, nullopt, ref.slope(t));
    return c;
  };
  return ph;
}

}  // namespace

GearshiftTrajectory simulate_upshift_owc(const DrivelineModel& model, const ShiftSetup& setup) {
  require_direction(setup.scenario, ShiftDirection::upshift, MotorQuadrant::driving, "simulate_upshift_owc");
  if (model.clutch1_kind() != ClutchKind::one_way)
    throw std::invalid_argument("simulate_upshift_owc: clutch 1 must be a one-way clutch");
  setup.scenario.validate();
  Runner run(model, setup);
  run.start_in_gear(1);
  const auto& sc = setup.scenario;
  if (sc.pre_hold > 0.0) run.run(run.hold(1, sc.pre_hold));

  const double t1 = run.t();
  const double a1 = run.r(1) * run.out_accel();
  Phase transfer{PhaseKind::torque_transfer, {}, t1 + sc.torque_phase, {}};
  transfer.policy = [&run, &setup, t1, a1](double t, const DrivelineState& x) {
    const double alone = run.solve(x, nullopt, 0.0, nullopt, a1).clutch2;
    Command c;
    c.sol = run.solve(x, nullopt, nullopt, transfer_fraction(setup, t1, t) * alone, a1);
    c.roles = {ClutchRole::stick, ClutchRole::slip};
    return c;
  };
  run.run(transfer);
  run.traj().plan.t1 = t1;

  const auto ref = run.sync_reference(2, sc.inertia_phase, a1);
  run.run(inertia_upshift(run, ref));
  run.traj().plan.t2 = run.t();
  run.finish_in_gear(2);
  return run.finalize();
}

GearshiftTrajectory simulate_upshift_dualfriction(const DrivelineModel& model, const ShiftSetup& setup,
                                                  double delta_m) {
  require_direction(setup.scenario, ShiftDirection::upshift, MotorQuadrant::driving,
                    "simulate_upshift_dualfriction");
  if (model.clutch1_kind() != ClutchKind::friction)
    throw std::invalid_argument("simulate_upshift_dualfriction: clutch 1 must be a friction clutch");
  if (!(delta_m >= 0.0)) throw std::invalid_argument("simulate_upshift_dualfriction: delta_m must be non-negative");
  setup.scenario.validate();
  Runner run(model, setup);
  run.start_in_gear(1);
  const auto& sc = setup.scenario;
  const auto& solver = setup.solver;
  if (sc.pre_hold > 0.0) run.run(run.hold(1, sc.pre_hold));
  run.traj().plan.delta_m_target = delta_m;

  const double t0 = run.t();
  const double hold_torque = run.hold(1, t0).policy(t0, run.x()).sol.motor_torque;
  const MotorRamp ramp{&setup.motor, t0, hold_torque, run.ramp_rate(1)};
  auto full_power = [&run, ramp](double t, const DrivelineState& x) {
    Command c;
    c.sol = run.solve(x, ramp(t, x), nullopt, 0.0, nullopt);
    return c;
  };

  if (delta_m > solver.stick_tolerance) {
    Phase speed{PhaseKind::speed_raise, full_power, run.grid_ceil(t0 + solver.sync_horizon), {}};
    speed.events.push_back(
        [&run, delta_m](double, const DrivelineState& x) { return run.model().slip_speed(1, x) - delta_m; });
    speed.events.push_back(
        [&setup](double, const DrivelineState& x) { return setup.motor.max_speed - x.omega_m; });
    const int ev = run.run(speed);
    if (ev != 0) {
      run.add_event_flag(FlagKind::delta_m_unreachable, run.model().slip_speed(1, run.x()), delta_m);
      run.traj().completed = false;
      run.close(speed);
      return run.finalize();
    }
  }

  const double t1 = run.t();
  run.traj().plan.t1 = t1;
  Phase transfer{PhaseKind::torque_transfer, {}, t1 + sc.torque_phase, {}};
  transfer.policy = [&run, &setup, ramp, t1](double t, const DrivelineState& x) {
    const double tm = ramp(t, x);
    const double alone = run.solve(x, tm, 0.0, nullopt, nullopt).clutch2;
    Command c;
    c.sol = run.solve(x, tm, nullopt, transfer_fraction(setup, t1, t) * alone, nullopt);
    return c;
  };
  run.run(transfer);
  run.traj().delta_s = run.model().slip_speed(1, run.x());

  const double slope = transfer.policy(run.t(), run.x()).sol.motor_accel;
  const auto ref = run.sync_reference(2, sc.inertia_phase, slope);
  run.run(inertia_upshift(run, ref));
  run.traj().plan.t2 = run.t();
  run.finish_in_gear(2);
  return run.finalize();
}

GearshiftTrajectory simulate_downshift_driving(const DrivelineModel& model, const ShiftSetup& setup) {
  require_direction(setup.scenario, ShiftDirection::downshift, MotorQuadrant::driving, "simulate_downshift_driving");
  setup.scenario.validate();
  Runner run(model, setup);
  run.start_in_gear(2);
  const auto& sc = setup.scenario;
  if (sc.pre_hold > 0.0) run.run(run.hold(2, sc.pre_hold));

  const double t0 = run.t();
  const double hold_torque = run.hold(2, t0).policy(t0, run.x()).sol.motor_torque;
  const MotorRamp ramp{&setup.motor, t0, hold_torque, run.ramp_rate(2)};
  Phase inertia{PhaseKind::inertia_sync, {}, run.grid_ceil(t0 + setup.solver.sync_horizon), {}};
  inertia.policy = [&run, ramp](double t, const DrivelineState& x) {
    Command c;
    c.sol = run.solve(x, ramp(t, x), 0.0, nullopt, nullopt);
    return c;
  };
  inertia.events.push_back([&run](double, const DrivelineState& x) { return run.model().slip_speed(1, x); });
  if (run.run(inertia) != 0) {
    run.add_event_flag(FlagKind::no_sync, run.model().slip_speed(1, run.x()), 0.0);
    run.traj().completed = false;
    run.close(inertia);
    return run.finalize();
  }
  run.traj().sync_time = run.t() - t0;
  run.snap(1);

  const double t1 = run.t();
  run.traj().plan.t1 = t1;
  const double a1 = run.r(1) * run.out_accel();
  auto alone = [&run, a1](const DrivelineState& x) { return run.solve(x, nullopt, 0.0, nullopt, a1).clutch2; };
  const double offset = inertia.policy(t1, run.x()).sol.clutch2 - alone(run.x());
  Phase transfer{PhaseKind::torque_transfer, {}, t1 + sc.torque_phase, {}};
  transfer.policy = [&run, &setup, alone, offset, a1, t1](double t, const DrivelineState& x) {
    const double s = transfer_fraction(setup, t1, t);
    Command c;
    c.sol = run.solve(x, nullopt, nullopt, (1.0 - s) * (alone(x) + offset), a1);
    c.roles = {ClutchRole::stick, ClutchRole::slip};
    return c;
  };
  run.run(transfer);
  run.traj().plan.t2 = run.t();
  run.finish_in_gear(1);
  return run.finalize();
}

GearshiftTrajectory simulate_downshift_braking(const DrivelineModel& model, const ShiftSetup& setup) {
  require_direction(setup.scenario, ShiftDirection::downshift, MotorQuadrant::braking, "simulate_downshift_braking");
  setup.scenario.validate();
  Runner run(model, setup);
  run.start_in_gear(2);
  const auto& sc = setup.scenario;

  if (model.clutch1_kind() == ClutchKind::one_way) {
    // Gear 1 would need a negative reaction from the one-way clutch.
    const double a1 = run.r(1) * run.out_accel();
    const DrivelineState x1{run.r(1) * run.x().omega_out, run.x().omega_out};
    const double needed = run.solve(x1, nullopt, nullopt, 0.0, a1).clutch1;
    auto& tr = run.traj();
    tr.constructed = false;
    tr.completed = false;
    tr.flags.push_back({FlagKind::one_way_reversal, 1, 0.0, needed, 0.0});
    return std::move(tr);
  }

  if (sc.pre_hold > 0.0) run.run(run.hold(2, sc.pre_hold));
  const double t1 = run.t();
  run.traj().plan.t1 = t1;
  const double a2 = run.r(2) * run.out_accel();
  Phase transfer{PhaseKind::torque_transfer, {}, t1 + sc.torque_phase, {}};
  transfer.policy = [&run, &setup, a2, t1](double t, const DrivelineState& x) {
    const double alone = run.solve(x, nullopt, nullopt, 0.0, a2).clutch1;
    Command c;
    c.sol = run.solve(x, nullopt, transfer_fraction(setup, t1, t) * alone, nullopt, a2);
    c.roles = {ClutchRole::slip, ClutchRole::stick};
    return c;
  };
  run.run(transfer);

  const auto ref = run.sync_reference(1, sc.inertia_phase, a2);
  Phase inertia{PhaseKind::inertia_sync, {}, ref.t0 + ref.duration, {}};
  inertia.policy = [&run, ref](double t, const DrivelineState& x) {
    Command c;
    c.sol = run.solve(x, nullopt, nullopt, 0.0, ref.slope(t));
    return c;
  };
  run.run(inertia);
  run.traj().plan.t2 = run.t();
  run.finish_in_gear(1);
  return run.finalize();
}

GearshiftTrajectory simulate_shift(const DrivelineModel& model, const ShiftSetup& setup, double delta_m) {
  const auto& sc = setup.scenario;
  if (sc.direction == ShiftDirection::upshift) {
    if (sc.quadrant != MotorQuadrant::driving) throw std::invalid_argument("simulate_shift: braking upshifts are not modeled");
    return model.clutch1_kind() == ClutchKind::one_way ? simulate_upshift_owc(model, setup)
                                                       : simulate_upshift_dualfriction(model, setup, delta_m);
  }
  return sc.quadrant == MotorQuadrant::driving ? simulate_downshift_driving(model, setup)
                                               : simulate_downshift_braking(model, setup);
}

SpeedRaiseReach reachable_delta_m(const DrivelineModel& model, const ShiftSetup& setup) {
  require_direction(setup.scenario, ShiftDirection::upshift, MotorQuadrant::driving, "reachable_delta_m");
  setup.scenario.validate();
  Runner run(model, setup);
  run.start_in_gear(1);
  const auto& sc = setup.scenario;
  if (sc.pre_hold > 0.0) run.run(run.hold(1, sc.pre_hold));

  const double t0 = run.t();
  const double a1 = run.r(1) * run.out_accel();
  const double hold_torque = run.hold(1, t0).policy(t0, run.x()).sol.motor_torque;
  const MotorRamp ramp{&setup.motor, t0, hold_torque, run.ramp_rate(1)};
  Phase speed{PhaseKind::speed_raise, {}, t0 + setup.solver.sync_horizon, {}};
  speed.policy = [&run, ramp](double t, const DrivelineState& x) {
    Command c;
    c.sol = run.solve(x, ramp(t, x), nullopt, 0.0, nullopt);
    return c;
  };
  speed.events.push_back([&setup](double, const DrivelineState& x) { return setup.motor.max_speed - x.omega_m; });
  // Growth is only tested once the motor torque ramp has had time to complete.
  const double cap0 = setup.motor.available_torque(run.x().omega_m);
  const double ramp_time = std::isfinite(ramp.rate) ? std::max(0.0, cap0 - hold_torque) / ramp.rate : 0.0;
  auto growth = [&speed, a1, t0, ramp_time](double t, const DrivelineState& x) {
    if (t - t0 < ramp_time) return 1.0;
    return speed.policy(t, x).sol.motor_accel - a1;
  };
  speed.events.push_back(growth);

  SpeedRaiseReach out;
  if (growth(t0 + ramp_time, run.x()) <= 0.0 && ramp_time == 0.0) {
    out.stop = SpeedRaiseReach::Stop::saturated_growth;
    out.omega_m = run.x().omega_m;
    return out;
  }
  const int ev = run.run(speed);
  out.delta_m = model.slip_speed(1, run.x());
  out.omega_m = run.x().omega_m;
  out.time = run.t() - t0;
  out.stop = ev == 0   ? SpeedRaiseReach::Stop::speed_limit
             : ev == 1 ? SpeedRaiseReach::Stop::saturated_growth
                       : SpeedRaiseReach::Stop::horizon;
  return out;
}

double validate_full_driveline(const VehicleParams& vehicle, const DrivelineModel& model, const Scenario& scenario,
                               const GearshiftTrajectory& traj, double substep) {
  if (!(substep > 0.0)) throw std::invalid_argument("validate_full_driveline: substep must be positive");
  const auto& smp = traj.samples;
  if (smp.size() < 2) return 0.0;
  const auto& p = model.params();
  const double fd = model.final_drive();
  const double iv = equivalent_inertia(vehicle);
  const double rw = vehicle.wheel_radius;

  // state: omega_m, omega_out, twist at the wheel, omega_v
  using V4 = Vec<4>;
  auto coupling = [&](const V4& s) { return p.stiffness * s[2] + p.damping * (s[1] / fd - s[3]); };
  auto wheel_accel = [&](const V4& s) {
    return (coupling(s) - road_load_torque(vehicle, std::max(0.0, rw * s[3]), scenario.road)) / iv;
  };

  V4 s{smp[0].omega_m, smp[0].omega_out, smp[0].output_torque / p.stiffness, smp[0].omega_v};
  double peak = 0.0;
  double prev_accel = wheel_accel(s);
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    const auto& a = smp[i];
    const auto& b = smp[i + 1];
    const double span = b.t - a.t;
    const int n = std::max(1, static_cast<int>(std::lround(span / substep)));
    const double h = span / n;
    auto inputs = [&](double t) {
      const double w = std::clamp((t - a.t) / span, 0.0, 1.0);
      auto lerp = [w](double u, double v) { return u + w * (v - u); };
      return DrivelineInputs{lerp(a.motor_torque, b.motor_torque), lerp(a.clutch1, b.clutch1),
                             lerp(a.clutch2, b.clutch2), 0.0};
    };
    auto f = [&](double t, const V4& st) {
      auto in = inputs(t);
      in.output_torque = coupling(st);
      const auto acc = model.accelerations({st[0], st[1]}, in);
      return V4{acc.motor, acc.output, st[1] / fd - st[3], wheel_accel(st)};
    };
    for (int k = 0; k < n; ++k) {
      s = rk4_step<4>(f, a.t + k * h, s, h);
      for (double v : s)
        if (!std::isfinite(v)) throw std::runtime_error("validate_full_driveline: integration diverged");
      const double acc = wheel_accel(s);
      peak = std::max(peak, std::abs(rw * (acc - prev_accel) / h));
      prev_accel = acc;
    }
  }
  return peak;
}

}  // namespace gearshift
