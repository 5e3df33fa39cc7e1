#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "format.hpp"

namespace gearshift::cli {

using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << content;
  if (!f) throw std::runtime_error(path + ": write failed");
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

bool dual_friction_upshift(const DrivelineModel& model, const Scenario& s) {
  return s.direction == ShiftDirection::upshift && s.quadrant == MotorQuadrant::driving &&
         model.clutch1_kind() == ClutchKind::friction;
}

std::string flag_line(const TrajectoryFlag& f) {
  std::string s(to_string(f.kind));
  if (f.clutch) s += " (clutch " + std::to_string(f.clutch) + ")";
  s += " at t=" + fmt(f.first_time) + " s, worst " + fmt(f.worst) + ", limit " + fmt(f.limit);
  return s;
}

json flag_json(const TrajectoryFlag& f) {
  return {{"kind", to_string(f.kind)}, {"clutch", f.clutch}, {"first_time", f.first_time},
          {"worst", f.worst}, {"limit", f.limit}};
}

/// Number or null; NaN has no JSON spelling.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

BindingLimit binding_of(const GearshiftTrajectory& t) {
  for (const auto& f : t.flags) {
    switch (f.kind) {
      case FlagKind::motor_power: return BindingLimit::power;
      case FlagKind::motor_torque: return BindingLimit::torque;
      case FlagKind::motor_speed: return BindingLimit::speed;
      case FlagKind::clutch_rate:
      case FlagKind::clutch_capacity: return BindingLimit::rate;
      case FlagKind::one_way_reversal: return BindingLimit::one_way_reversal;
      default: break;
    }
  }
  return BindingLimit::none;
}

}  // namespace

ModelKind require_model(const std::string& name) {
  const auto k = parse_model_kind(name);
  if (!k) throw ConfigError("unknown model '" + name + "' (allowed: dct-friction, dct-owc, dbt-simple, dbt-full)");
  return *k;
}

std::string trajectory_csv(const GearshiftTrajectory& traj) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  out.reserve(traj.samples.size() * 160);
  for (const auto& s : traj.samples) {
    for (double x : {s.t, s.omega_m, s.omega_out, s.omega_v, s.motor_torque, s.clutch1, s.clutch2, s.output_torque,
                     s.motor_power}) {
      append(out, x);
      out += ',';
    }
    out += to_string(s.phase);
    out += '\n';
  }
  return out;
}

std::string envelope_csv(const std::vector<EnvelopePoint>& env) {
  std::string out = "v_kmh,wheel_torque_Nm,limiting_factor\n";
  for (const auto& p : env) {
    append(out, p.v_kmh);
    out += ',';
    append(out, p.wheel_torque);
    out += ',' + p.limiting_factor + '\n';
  }
  return out;
}

std::string render_text(const FeasibilityReport& r) {
  std::ostringstream os;
  os << "check      " << r.theorem << "\n";
  os << "verdict    " << to_string(r.verdict) << (r.sufficient ? "" : " (necessary condition only)") << "\n";
  os << "binding    " << to_string(r.binding) << "\n";
  os << "margin     " << fmt(r.margin) << " " << r.margin_unit << "\n";
  for (const auto& q : r.quantities) os << "  " << q.name << " = " << fmt(q.value) << " " << q.unit << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

json to_json(const FeasibilityReport& r) {
  json q = json::object();
  for (const auto& x : r.quantities) q[x.name] = {{"value", num(x.value)}, {"unit", x.unit}};
  return {{"check", r.theorem},
          {"verdict", to_string(r.verdict)},
          {"sufficient", r.sufficient},
          {"binding", to_string(r.binding)},
          {"margin", num(r.margin)},
          {"margin_unit", r.margin_unit},
          {"quantities", q},
          {"notes", r.notes}};
}

double choose_delta_m(const DrivelineModel& model, const ShiftSetup& setup) {
  const auto rep = thm2_dualfriction_upshift(model, setup);
  if (const auto dm = rep.quantity("delta_m_min")) return *dm;
  if (const auto reach = rep.quantity("delta_m_reach")) return *reach;
  return 0.0;
}

int cmd_simulate(const ConfigDocument& cfg, const std::string& scenario, ModelKind kind, const std::string& out_path,
                 bool machine_readable, std::ostream& out, std::ostream& log, std::optional<double> delta_m) {
  const ShiftSetup setup = cfg.setup(scenario);
  const DrivelineModel model = cfg.model(kind);
  const bool needs_dm = dual_friction_upshift(model, setup.scenario);
  const double dm = needs_dm ? delta_m.value_or(choose_delta_m(model, setup)) : 0.0;

  const GearshiftTrajectory traj = simulate_shift(model, setup, dm);
  const double jerk = traj.constructed && !traj.samples.empty()
                          ? validate_full_driveline(setup.vehicle, model, setup.scenario, traj)
                          : std::numeric_limits<double>::quiet_NaN();

  std::ostream* summary = &out;
  if (to_stdout(out_path)) {
    out << trajectory_csv(traj);
    summary = &log;
  } else {
    write_file(out_path, trajectory_csv(traj));
  }

  const double duration = traj.samples.empty() ? 0.0 : traj.samples.back().t;
  if (machine_readable) {
    json flags = json::array();
    for (const auto& f : traj.flags) flags.push_back(flag_json(f));
    json j = {{"scenario", scenario},
              {"model", to_string(kind)},
              {"feasible", traj.feasible()},
              {"constructed", traj.constructed},
              {"completed", traj.completed},
              {"samples", traj.samples.size()},
              {"duration", duration},
              {"peak_motor_power", traj.peak_motor_power},
              {"min_motor_power", traj.min_motor_power},
              {"peak_clutch_rate", {traj.peak_clutch_rate[0], traj.peak_clutch_rate[1]}},
              {"delta_m", needs_dm ? num(dm) : json(nullptr)},
              {"delta_s", num(traj.delta_s)},
              {"sync_time", num(traj.sync_time)},
              {"peak_vehicle_jerk", num(jerk)},
              {"flags", flags}};
    *summary << j.dump(2) << "\n";
  } else {
    std::ostream& os = *summary;
    os << "scenario           " << scenario << "\n";
    os << "model              " << to_string(kind) << "\n";
    if (needs_dm) os << "delta_m            " << fmt(dm) << " rad/s\n";
    os << "samples            " << traj.samples.size() << " over " << fmt(duration) << " s\n";
    os << "peak motor power   " << fmt(traj.peak_motor_power) << " W\n";
    os << "min motor power    " << fmt(traj.min_motor_power) << " W\n";
    os << "peak |dT1/dt|      " << fmt(traj.peak_clutch_rate[0]) << " N m/s\n";
    os << "peak |dT2/dt|      " << fmt(traj.peak_clutch_rate[1]) << " N m/s\n";
    if (std::isfinite(traj.delta_s)) os << "slip after transfer " << fmt(traj.delta_s) << " rad/s\n";
    if (std::isfinite(traj.sync_time)) os << "synchronization    " << fmt(traj.sync_time) << " s\n";
    if (std::isfinite(jerk)) os << "peak vehicle jerk  " << fmt(jerk) << " m/s^3\n";
    if (!traj.constructed) os << "trajectory could not be constructed\n";
    if (traj.constructed && !traj.completed) os << "shift abandoned before completion\n";
    if (traj.flags.empty()) os << "flags              none\n";
    for (const auto& f : traj.flags) os << "flag               " << flag_line(f) << "\n";
    os << "result             " << (traj.feasible() ? "no-jerk shift achieved" : "infeasible") << "\n";
  }
  return traj.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_check(const ConfigDocument& cfg, const std::string& scenario, ModelKind kind, bool machine_readable,
              std::ostream& out) {
  const ShiftSetup setup = cfg.setup(scenario);
  const DrivelineModel model = cfg.model(kind);
  const FeasibilityReport rep = check_shift(model, setup, cfg.gearing);
  const DriverDemand dd = driver_demand(model, setup);

  if (machine_readable) {
    json j = to_json(rep);
    j["scenario"] = scenario;
    j["model"] = to_string(kind);
    j["driver_demand"] = {{"motor_torque", dd.motor_torque}, {"of_peak", dd.of_peak},
                          {"of_available", dd.of_available}};
    out << j.dump(2) << "\n";
  } else {
    out << "scenario   " << scenario << "\n";
    out << "model      " << to_string(kind) << "\n";
    out << render_text(rep);
    out << "driver demand " << fmt(dd.motor_torque) << " N m = " << fmt(dd.of_peak) << " of peak, "
        << fmt(dd.of_available) << " of available torque\n";
  }
  // Inapplicable means feasibility could not be established; scripts must not read it as success.
  return rep.verdict == Verdict::feasible ? kExitOk : kExitInfeasible;
}

namespace {

VehicleParams sizing_vehicle(const ConfigDocument& cfg) {
  VehicleParams v = cfg.vehicle;
  v.mass = cfg.sizing.mass;
  return v;
}

json sizing_json(const SizingReport& r) {
  json specs = json::array();
  for (const auto& sc : r.specs) {
    json per = json::array();
    for (const auto& rc : sc.per_ratio)
      per.push_back({{"ratio", rc.ratio},
                     {"motor_torque", rc.need.torque},
                     {"motor_power", rc.need.power},
                     {"motor_speed_rpm", rad_s_to_rpm(rc.need.speed)},
                     {"torque_ok", rc.torque_ok},
                     {"power_ok", rc.power_ok},
                     {"speed_ok", rc.speed_ok}});
    specs.push_back({{"name", sc.spec.name},
                     {"speed_kmh", sc.spec.speed * 3.6},
                     {"grade", sc.spec.grade},
                     {"duration", to_string(sc.spec.duration)},
                     {"wheel_torque", sc.wheel.torque},
                     {"wheel_power", sc.wheel.power},
                     {"pass", sc.pass},
                     {"per_ratio", per}});
  }
  return {{"motor",
           {{"max_torque", r.motor.max_torque},
            {"max_power", r.motor.max_power},
            {"max_speed_rpm", rad_s_to_rpm(r.motor.max_speed)}}},
          {"ratios", r.ratios},
          {"efficiency", r.efficiency},
          {"pass", r.pass},
          {"specs", specs}};
}

void render_sizing(std::ostream& os, const std::string& label, const SizingReport& r) {
  os << label << ": " << fmt(r.motor.max_torque) << " N m, " << fmt(r.motor.max_power) << " W, "
     << fmt(rad_s_to_rpm(r.motor.max_speed)) << " rpm; ratios";
  for (double x : r.ratios) os << " " << fmt(x);
  os << "; efficiency " << fmt(r.efficiency) << "\n";
  double worst_power = 0.0;
  for (const auto& sc : r.specs) {
    os << "  " << sc.spec.name << " (" << fmt(sc.spec.speed * 3.6) << " km/h, " << fmt(sc.spec.grade * 100.0)
       << " %, " << to_string(sc.spec.duration) << "): wheel " << fmt(sc.wheel.torque) << " N m, "
       << fmt(sc.wheel.power) << " W -> " << (sc.pass ? "pass" : "FAIL") << "\n";
    for (const auto& rc : sc.per_ratio) {
      os << "    ratio " << fmt(rc.ratio) << ": needs " << fmt(rc.need.torque) << " N m"
         << (rc.torque_ok ? "" : " [torque]") << ", " << fmt(rc.need.power) << " W"
         << (rc.power_ok ? "" : " [power]") << ", " << fmt(rad_s_to_rpm(rc.need.speed)) << " rpm"
         << (rc.speed_ok ? "" : " [speed]") << "\n";
    }
    worst_power = std::max(worst_power, sc.need.power);
  }
  if (worst_power > 0.0)
    os << "  power headroom " << fmt(r.motor.max_power / worst_power) << " x the largest requirement\n";
  os << "  verdict " << (r.pass ? "pass" : "FAIL") << "\n";
}

}  // namespace

int cmd_size_motor(const ConfigDocument& cfg, const std::string& envelope_path, bool machine_readable,
                   std::ostream& out) {
  const auto& z = cfg.sizing;
  if (z.specs.empty()) throw ConfigError("sizing.specs: no design specs configured");
  if (z.active_ratio_set.empty()) throw ConfigError("sizing.active_ratio_set: no ratio set selected");
  const VehicleParams v = sizing_vehicle(cfg);
  const auto& ratios = z.ratio_sets.at(z.active_ratio_set);

  const SizingReport main = check_motor(cfg.motor, v, z.specs, ratios, z.efficiency);
  std::vector<std::pair<std::string, SizingReport>> others;
  for (const auto& [mname, m] : z.comparison_motors)
    for (const auto& [sname, set] : z.ratio_sets)
      others.emplace_back(mname + " / " + sname, check_motor(m, v, z.specs, set, z.efficiency));

  if (!to_stdout(envelope_path))
    write_file(envelope_path,
               envelope_csv(capacity_envelope(cfg.motor, ratios, v, z.envelope_v_max_kmh, z.envelope_samples,
                                              z.efficiency)));

  if (machine_readable) {
    json j = sizing_json(main);
    j["ratio_set"] = z.active_ratio_set;
    json cmp = json::object();
    for (const auto& [label, rep] : others) cmp[label] = sizing_json(rep);
    j["comparisons"] = cmp;
    out << j.dump(2) << "\n";
  } else {
    out << "sizing vehicle mass " << fmt(v.mass) << " kg\n";
    render_sizing(out, "motor / " + z.active_ratio_set, main);
    for (const auto& [label, rep] : others) render_sizing(out, label, rep);
  }
  return main.pass ? kExitOk : kExitInfeasible;
}

void SweepSpec::validate() const {
  if (param.empty()) throw ConfigError("sweep: --param is required");
  if (steps < 2) throw ConfigError("sweep: steps must be at least 2");
  if (!(from != to)) throw ConfigError("sweep: from and to must differ");
  if (!std::isfinite(from) || !std::isfinite(to)) throw ConfigError("sweep: bounds must be finite");
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("sweep: malformed parameter path '" + path + "'");
  return parts;
}

/// Resolves the "scenario." shorthand and checks the field exists in the schema.
std::vector<std::string> resolve_param(const SweepSpec& spec, const ConfigDocument& base) {
  auto parts = split_path(spec.param);
  if (parts.front() == "scenario") {
    parts.front() = "scenarios";
    parts.insert(parts.begin() + 1, spec.scenario);
  }
  std::string dotted;
  for (const auto& p : parts) dotted += (dotted.empty() ? "" : ".") + p;
  const auto it = base.fields.find(dotted);
  if (it == base.fields.end() || it->second.value.empty() ||
      !(std::isdigit(static_cast<unsigned char>(it->second.value.front())) || it->second.value.front() == '-'))
    throw ConfigError("sweep: '" + spec.param + "' is not a numeric config field");
  return parts;
}

json with_value(json doc, const std::vector<std::string>& path, double v) {
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->contains(path[i])) (*node)[path[i]] = json::object();
    node = &(*node)[path[i]];
  }
  (*node)[path.back()] = v;
  return doc;
}

struct SweepRow {
  double value = 0.0;
  FeasibilityReport report;
  double delta_m = std::numeric_limits<double>::quiet_NaN();
  double delta_s = std::numeric_limits<double>::quiet_NaN();
};

std::string opt_field(const FeasibilityReport& r, std::string_view name) {
  const auto q = r.quantity(name);
  return q ? fmt(*q) : "";
}

std::string render_row(const SweepRow& row) {
  const auto& r = row.report;
  std::string line = fmt(row.value);
  line += "," + std::string(to_string(r.verdict)) + "," + std::string(to_string(r.binding)) + "," + fmt(r.margin) + "," +
          r.margin_unit + ",";
  line += opt_field(r, "t_s") + ",";
  line += (std::isfinite(row.delta_m) ? fmt(row.delta_m) : opt_field(r, "delta_m_min")) + ",";
  line += (std::isfinite(row.delta_s) ? fmt(row.delta_s) : opt_field(r, "delta_s")) + ",";
  line += opt_field(r, "omega_m_t1") + ",";
  line += opt_field(r, "P_m_t_tr") + ",";
  line += opt_field(r, "T_max_required");
  return line + "\n";
}

}  // namespace

int cmd_sweep(const json& raw, const SweepSpec& spec, const std::string& out_path, std::ostream& out) {
  spec.validate();
  const ConfigDocument base = parse_config(raw);
  base.scenario(spec.scenario);

  const bool over_delta_m = spec.param == "delta_m";
  std::vector<std::string> path;
  if (over_delta_m) {
    const ShiftSetup setup = base.setup(spec.scenario);
    if (!dual_friction_upshift(base.model(spec.model), setup.scenario))
      throw ConfigError("sweep: delta_m applies to power-on upshifts with a friction first clutch");
  } else {
    path = resolve_param(spec, base);
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.steps));
  std::vector<std::exception_ptr> errors(rows.size());

  auto evaluate = [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.value = spec.value(static_cast<int>(k));
    if (over_delta_m) {
      const ShiftSetup setup = base.setup(spec.scenario);
      const DrivelineModel model = base.model(spec.model);
      const auto traj = simulate_upshift_dualfriction(model, setup, row.value);
      row.delta_m = row.value;
      row.delta_s = traj.delta_s;
      row.report.theorem = "simulation";
      row.report.verdict = traj.feasible() ? Verdict::feasible : Verdict::infeasible;
      row.report.binding = binding_of(traj);
      row.report.margin = traj.delta_s;
      row.report.margin_unit = "rad/s";
    } else {
      const ConfigDocument cfg = parse_config(with_value(raw, path, row.value));
      row.report = check_shift(cfg.model(spec.model), cfg.setup(spec.scenario), cfg.gearing);
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      try {
        evaluate(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(rows.size(), 16));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string csv = kSweepHeader;
  csv += '\n';
  for (const auto& row : rows) csv += render_row(row);
  if (to_stdout(out_path))
    out << csv;
  else
    write_file(out_path, csv);
  return kExitOk;
}

}  // namespace gearshift::cli
