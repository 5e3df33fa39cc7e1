#include "config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include "format.hpp"

namespace gearshift::cli {

using nlohmann::json;

namespace {

using Fields = std::map<std::string, ConfigDocument::Field>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

/// Reads one JSON object. Every accessed key is remembered so that finish()
/// can reject the rest; absent keys keep the caller's default.
class Section {
 public:
  Section(const json* node, std::string path, Fields& fields)
      : node_(node), path_(std::move(path)), fields_(fields) {
    if (node_ && !node_->is_object()) fail(path_, "expected an object");
  }

  bool present() const { return node_ != nullptr; }
  const std::string& path() const { return path_; }

  void number(std::string_view key, double& v, double scale = 1.0) {
    const json* n = take(key);
    if (n) {
      if (!n->is_number()) fail(at(key), "expected a number");
      v = n->get<double>() * scale;
    }
    record(key, fmt(n ? n->get<double>() : v / scale), n);
  }

  void integer(std::string_view key, int& v) {
    const json* n = take(key);
    if (n) {
      if (!n->is_number_integer()) fail(at(key), "expected an integer");
      v = n->get<int>();
    }
    record(key, std::to_string(v), n);
  }

  void text(std::string_view key, std::string& v) {
    const json* n = take(key);
    if (n) {
      if (!n->is_string()) fail(at(key), "expected a string");
      v = n->get<std::string>();
    }
    record(key, v, n);
  }

  template <class E>
  void choice(std::string_view key, E& v, std::initializer_list<std::pair<std::string_view, E>> options) {
    std::string name;
    for (const auto& [label, value] : options)
      if (value == v) name = label;
    const json* n = take(key);
    if (n) {
      if (!n->is_string()) fail(at(key), "expected a string");
      name = n->get<std::string>();
      bool found = false;
      for (const auto& [label, value] : options)
        if (label == name) {
          v = value;
          found = true;
        }
      if (!found) {
        std::string allowed;
        for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + std::string(o.first);
        fail(at(key), "unknown value '" + name + "' (allowed: " + allowed + ")");
      }
    }
    record(key, name, n);
  }

  Section child(std::string_view key) { return Section(take(key), at(key), fields_); }

  /// Raw access for arrays and maps.
  const json* raw(std::string_view key) { return take(key); }

  std::string at(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, _] : node_->items())
      if (!known_.count(key)) fail(at(key), "unknown key");
  }

 private:
  const json* take(std::string_view key) {
    known_.emplace(key);
    if (!node_) return nullptr;
    const auto it = node_->find(std::string(key));
    return it == node_->end() ? nullptr : &*it;
  }

  void record(std::string_view key, std::string value, bool explicit_value) {
    fields_[at(key)] = {std::move(value),
                        explicit_value ? Provenance::explicit_value : Provenance::default_value};
  }

  const json* node_;
  std::string path_;
  Fields& fields_;
  std::set<std::string, std::less<>> known_;
};

/// Runs a domain validator and rewraps its message with the section path.
template <class F>
void checked(const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    // Domain messages may already lead with the section name.
    std::string_view msg = e.what();
    const std::string leaf = path.substr(path.rfind('.') + 1) + ": ";
    if (msg.starts_with(leaf)) msg.remove_prefix(leaf.size());
    fail(path, std::string(msg));
  }
}

void read_vehicle(Section s, VehicleParams& v) {
  s.number("mass_kg", v.mass);
  s.number("wheel_radius_m", v.wheel_radius);
  s.number("frontal_area_m2", v.frontal_area);
  s.number("drag_coefficient", v.drag_coeff);
  s.number("rolling_coefficient", v.rolling_coeff);
  s.number("air_density_kg_m3", v.air_density);
  s.number("gravity_m_s2", v.gravity);
  s.finish();
  checked(s.path(), [&] { v.validate(); });
}

void read_driveline(Section s, DrivelineParams& p) {
  s.number("motor_inertia_kg_m2", p.motor_inertia);
  s.number("output_inertia_kg_m2", p.output_inertia);
  s.number("motor_damping_Nms_rad", p.motor_damping);
  s.number("output_damping_Nms_rad", p.output_damping);
  s.number("shaft_stiffness_Nm_rad", p.stiffness);
  s.number("shaft_damping_Nms_rad", p.damping);
  s.finish();
  checked(s.path(), [&] { p.validate(); });
}

void read_gearing(Section s, GearingSpec& g) {
  s.number("ratio1", g.ratio1);
  s.number("ratio2", g.ratio2);
  s.number("beta1", g.beta1);
  s.number("beta2", g.beta2);
  s.number("final_drive", g.final_drive);
  s.finish();
  checked(s.path(), [&] { g.validate(); });
}

void read_gearset(Section s, DualBrakeGearset& set) {
  s.number("ring_inertia_kg_m2", set.ring_inertia);
  s.number("sun_inertia_kg_m2", set.sun_inertia);
  s.number("sun_radius1_m", set.sun_radius1);
  s.number("sun_radius2_m", set.sun_radius2);
  s.finish();
  if (!(set.ring_inertia >= 0.0 && set.sun_inertia >= 0.0))
    fail(s.path(), "gear inertias must be non-negative");
  if (!(set.sun_radius1 > 0.0 && set.sun_radius2 > 0.0)) fail(s.path(), "sun radii must be positive");
}

void read_clutch(Section s, ClutchSpec& c) {
  s.number("max_normal_force_N", c.max_normal_force);
  s.number("mu_dynamic", c.mu_dynamic);
  s.number("mu_static", c.mu_static);
  s.number("mean_radius_m", c.mean_radius);
  s.integer("surfaces", c.surfaces);
  s.number("rate_limit_Nm_s", c.rate_limit);
  s.choice("kind", c.kind, {{"friction", ClutchKind::friction}, {"one-way", ClutchKind::one_way}});
  s.finish();
  checked(s.path(), [&] { c.validate(); });
}

void read_motor(Section s, MotorLimits& m) {
  s.number("max_torque_Nm", m.max_torque);
  s.number("max_power_W", m.max_power);
  s.number("max_speed_rpm", m.max_speed, rpm_to_rad_s(1.0));
  s.finish();
  checked(s.path(), [&] { m.validate(); });
}

void read_scenario(Section s, Scenario& sc) {
  s.choice("direction", sc.direction,
           {{"upshift", ShiftDirection::upshift}, {"downshift", ShiftDirection::downshift}});
  s.choice("quadrant", sc.quadrant, {{"driving", MotorQuadrant::driving}, {"braking", MotorQuadrant::braking}});
  s.number("initial_speed_kmh", sc.initial_speed, 1.0 / 3.6);
  s.number("accel_m_s2", sc.accel);
  s.number("driver_demand", sc.driver_demand);
  s.number("grade_percent", sc.road.grade, 0.01);
  s.number("torque_phase_s", sc.torque_phase);
  s.number("inertia_phase_s", sc.inertia_phase);
  s.number("pre_hold_s", sc.pre_hold);
  s.finish();
  checked(s.path(), [&] { sc.validate(); });
}

void read_solver(Section s, SolverSettings& st) {
  s.number("dt_s", st.dt);
  s.number("post_hold_s", st.post_hold);
  s.number("sync_horizon_s", st.sync_horizon);
  s.number("practical_sync_s", st.practical_sync);
  s.number("event_tolerance_s", st.event_tolerance);
  s.number("stick_tolerance_rad_s", st.stick_tolerance);
  s.finish();
  checked(s.path(), [&] { st.validate(); });
}

void read_sizing(Section s, SizingConfig& z, Fields& fields) {
  s.number("mass_kg", z.mass);
  s.number("efficiency", z.efficiency);
  s.text("active_ratio_set", z.active_ratio_set);

  if (const json* sets = s.raw("ratio_sets")) {
    if (!sets->is_object()) fail(s.at("ratio_sets"), "expected an object of ratio arrays");
    for (const auto& [name, arr] : sets->items()) {
      const std::string path = s.at("ratio_sets") + "." + name;
      if (!arr.is_array() || arr.empty()) fail(path, "expected a non-empty array of numbers");
      std::vector<double> ratios;
      std::string echo;
      for (const auto& r : arr) {
        if (!r.is_number() || !(r.get<double>() > 0.0)) fail(path, "ratios must be positive numbers");
        ratios.push_back(r.get<double>());
        echo += (echo.empty() ? "" : ", ") + fmt(ratios.back());
      }
      fields[path] = {"[" + echo + "]", Provenance::explicit_value};
      z.ratio_sets.emplace(name, std::move(ratios));
    }
  }

  if (const json* specs = s.raw("specs")) {
    if (!specs->is_array()) fail(s.at("specs"), "expected an array");
    for (std::size_t i = 0; i < specs->size(); ++i) {
      Section e(&(*specs)[i], s.at("specs") + "[" + std::to_string(i) + "]", fields);
      DesignSpec d;
      d.name = "spec" + std::to_string(i + 1);
      e.text("name", d.name);
      e.number("speed_kmh", d.speed, 1.0 / 3.6);
      e.number("grade_percent", d.grade, 0.01);
      e.choice("duration", d.duration,
               {{"continuous", DurationClass::continuous}, {"short", DurationClass::short_term}});
      e.finish();
      checked(e.path(), [&] { d.validate(); });
      z.specs.push_back(std::move(d));
    }
  }

  if (const json* motors = s.raw("comparison_motors")) {
    if (!motors->is_object()) fail(s.at("comparison_motors"), "expected an object of motors");
    for (const auto& [name, node] : motors->items()) {
      MotorLimits m;
      read_motor(Section(&node, s.at("comparison_motors") + "." + name, fields), m);
      z.comparison_motors.emplace(name, m);
    }
  }

  Section env = s.child("envelope");
  env.number("v_max_kmh", z.envelope_v_max_kmh);
  env.integer("samples", z.envelope_samples);
  env.finish();
  s.finish();

  if (!(z.mass > 0.0)) fail(s.at("mass_kg"), "must be positive");
  if (!(z.efficiency > 0.0 && z.efficiency <= 1.0)) fail(s.at("efficiency"), "must lie in (0, 1]");
  if (!z.active_ratio_set.empty() && !z.ratio_sets.count(z.active_ratio_set))
    fail(s.at("active_ratio_set"), "names no entry of ratio_sets");
  if (z.active_ratio_set.empty() && z.ratio_sets.size() == 1) z.active_ratio_set = z.ratio_sets.begin()->first;
  if (!(z.envelope_v_max_kmh > 0.0)) fail(env.at("v_max_kmh"), "must be positive");
  if (z.envelope_samples < 2) fail(env.at("samples"), "must be at least 2");
}

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": parse error: " << e.what();
    throw ConfigError(os.str());
  }
}

}  // namespace

const Scenario& ConfigDocument::scenario(const std::string& name) const {
  const auto it = scenarios.find(name);
  if (it == scenarios.end()) {
    std::string known;
    for (const auto& [k, _] : scenarios) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown scenario '" + name + "' (configured: " + (known.empty() ? "none" : known) + ")");
  }
  return it->second;
}

ShiftSetup ConfigDocument::setup(const std::string& scenario_name) const {
  ShiftSetup s;
  s.vehicle = vehicle;
  s.scenario = scenario(scenario_name);
  s.motor = motor;
  s.clutches = clutches;
  s.solver = solver;
  return s;
}

DrivelineModel ConfigDocument::model(ModelKind kind) const {
  return DrivelineModel::make(kind, driveline, gearing, gearset, clutches[0].kind);
}

ConfigDocument parse_config(const json& root) {
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  ConfigDocument doc;
  Section top(&root, "", doc.fields);

  read_vehicle(top.child("vehicle"), doc.vehicle);
  read_driveline(top.child("driveline"), doc.driveline);
  read_gearing(top.child("gearing"), doc.gearing);
  read_gearset(top.child("gearset"), doc.gearset);

  Section clutches = top.child("clutches");
  read_clutch(clutches.child("clutch1"), doc.clutches[0]);
  read_clutch(clutches.child("clutch2"), doc.clutches[1]);
  clutches.finish();
  if (doc.clutches[1].kind != ClutchKind::friction) fail("clutches.clutch2.kind", "the gear-2 element must be a friction clutch");

  read_motor(top.child("motor"), doc.motor);

  if (const json* sc = top.raw("scenarios")) {
    if (!sc->is_object()) fail("scenarios", "expected an object of named scenarios");
    for (const auto& [name, node] : sc->items()) {
      Scenario s;
      s.name = name;
      read_scenario(Section(&node, "scenarios." + name, doc.fields), s);
      doc.scenarios.emplace(name, std::move(s));
    }
  }

  read_solver(top.child("solver"), doc.solver);
  read_sizing(top.child("sizing"), doc.sizing, doc.fields);
  top.finish();
  return doc;
}

ConfigDocument parse_config_text(std::string_view text, std::string_view origin) {
  return parse_config(parse_json(text, origin));
}

nlohmann::json read_config_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

ConfigDocument load_config(const std::filesystem::path& path) {
  const json root = read_config_json(path);
  try {
    return parse_config(root);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string describe(const ConfigDocument& doc) {
  std::string out;
  for (const auto& [path, f] : doc.fields)
    out += path + " = " + f.value + (f.origin == Provenance::explicit_value ? "" : "  (default)") + "\n";
  return out;
}

}  // namespace gearshift::cli
