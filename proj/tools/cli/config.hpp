#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gearshift/driveline.hpp"
#include "gearshift/motor.hpp"
#include "gearshift/motor_sizing.hpp"
#include "gearshift/trajectory.hpp"
#include "gearshift/vehicle.hpp"

namespace gearshift::cli {

/// Malformed input: bad syntax, unknown key, wrong type or violated constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Provenance { default_value, explicit_value };

struct SizingConfig {
  double mass = 8500.0;       // kg, sizing vehicle
  double efficiency = 1.0;
  std::vector<DesignSpec> specs;
  std::map<std::string, std::vector<double>> ratio_sets;
  std::string active_ratio_set;
  std::map<std::string, MotorLimits> comparison_motors;
  double envelope_v_max_kmh = 140.0;
  int envelope_samples = 141;
};

struct ConfigDocument {
  VehicleParams vehicle;
  DrivelineParams driveline;
  GearingSpec gearing;
  DualBrakeGearset gearset;
  std::array<ClutchSpec, 2> clutches{};
  MotorLimits motor;
  std::map<std::string, Scenario> scenarios;
  SolverSettings solver;
  SizingConfig sizing;

  struct Field {
    std::string value;  // as echoed
    Provenance origin = Provenance::default_value;
  };
  /// Every known field keyed by dotted path, e.g. "vehicle.mass_kg".
  std::map<std::string, Field> fields;

  const Scenario& scenario(const std::string& name) const;
  ShiftSetup setup(const std::string& scenario_name) const;
  DrivelineModel model(ModelKind kind) const;
};

ConfigDocument parse_config(const nlohmann::json& doc);
/// Parses JSON text; syntax errors report line and column.
ConfigDocument parse_config_text(std::string_view text, std::string_view origin = "<input>");
nlohmann::json read_config_json(const std::filesystem::path& path);
ConfigDocument load_config(const std::filesystem::path& path);

/// Effective values with their provenance, one "path = value (origin)" per line.
std::string describe(const ConfigDocument& doc);

}  // namespace gearshift::cli
