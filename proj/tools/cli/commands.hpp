#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "gearshift/feasibility.hpp"

namespace gearshift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

inline constexpr const char* kTrajectoryHeader = "t,omega_m,omega_out,omega_v,T_m,T_1,T_2,T_o,P_m,phase";

ModelKind require_model(const std::string& name);

/// One row per sample, SI units, shortest round-trip numbers.
std::string trajectory_csv(const GearshiftTrajectory& traj);
std::string envelope_csv(const std::vector<EnvelopePoint>& env);

std::string render_text(const FeasibilityReport& r);
nlohmann::json to_json(const FeasibilityReport& r);

/// Speed-raise target used when simulating a dual-friction upshift: the
/// smallest sufficient one when it exists, else the largest reachable one.
double choose_delta_m(const DrivelineModel& model, const ShiftSetup& setup);

/// With `out_path` empty or "-" the CSV goes to `out` and the summary to `log`;
/// otherwise the CSV goes to the file and the summary to `out`.
int cmd_simulate(const ConfigDocument& cfg, const std::string& scenario, ModelKind model,
                 const std::string& out_path, bool machine_readable, std::ostream& out, std::ostream& log,
                 std::optional<double> delta_m = {});

int cmd_check(const ConfigDocument& cfg, const std::string& scenario, ModelKind model, bool machine_readable,
              std::ostream& out);

/// Checks the configured motor against the active ratio set, then the
/// comparison motors against every ratio set; only the first decides the exit code.
int cmd_size_motor(const ConfigDocument& cfg, const std::string& envelope_path, bool machine_readable,
                   std::ostream& out);

struct SweepSpec {
  /// Dotted config path; a leading "scenario." addresses the selected
  /// scenario, and "delta_m" sweeps the speed-raise target of a dual-friction upshift.
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::string scenario;
  ModelKind model = ModelKind::dct_friction;

  void validate() const;
  double value(int k) const { return from + (to - from) * k / (steps - 1); }
};

inline constexpr const char* kSweepHeader =
    "value,verdict,binding,margin,margin_unit,t_s,delta_m,delta_s,omega_m_t1,P_m_t_tr,T_max_required";

/// Evaluates the points concurrently; rows come out in sweep order.
int cmd_sweep(const nlohmann::json& raw_config, const SweepSpec& spec, const std::string& out_path,
              std::ostream& out);

}  // namespace gearshift::cli
