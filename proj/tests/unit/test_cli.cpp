#include <cmath>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

using namespace gearshift;
using namespace gearshift::cli;

namespace {

const char* const kExample = GEARSHIFT_EXAMPLE_CONFIG;

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string error_of(std::string_view text) {
  try {
    parse_config_text(text, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("shipped example config") {
  const auto doc = load_config(kExample);
  CHECK(doc.vehicle.mass == 6500.0);
  CHECK(doc.fields.at("vehicle.mass_kg").origin == Provenance::explicit_value);
  const auto partial = parse_config_text(R"({"vehicle": {"mass_kg": 7000}})");
  CHECK(partial.fields.at("vehicle.mass_kg").origin == Provenance::explicit_value);
  CHECK(partial.fields.at("vehicle.air_density_kg_m3").origin == Provenance::default_value);
  CHECK(doc.scenarios.size() == 3);
  CHECK(doc.scenario("scenario1").initial_speed == doctest::Approx(65.0 / 3.6));
  CHECK(doc.scenario("scenario2").direction == ShiftDirection::downshift);
  CHECK(doc.scenario("scenario3").quadrant == MotorQuadrant::braking);
  CHECK(doc.motor.max_speed == doctest::Approx(rpm_to_rad_s(8000.0)));
  CHECK(doc.sizing.mass == 8500.0);
  CHECK_THROWS_AS(doc.scenario("missing"), ConfigError);
  CHECK(describe(doc).find("vehicle.mass_kg") != std::string::npos);
}

TEST_CASE("config validation") {
  SUBCASE("empty input") { CHECK(error_of("").find("parse error") != std::string::npos); }
  SUBCASE("syntax error carries a position") {
    const auto e = error_of("{\n  \"vehicle\": {\"mass_kg\": 1,}\n}");
    CHECK(e.find("test.json:2:") != std::string::npos);
  }
  SUBCASE("unknown key is rejected") {
    CHECK(error_of(R"({"vehicle": {"mas_kg": 1}})").find("mas_kg") != std::string::npos);
  }
  SUBCASE("gear 2 ratio above gear 1") {
    const auto e = error_of(R"({"gearing": {"ratio1": 6, "ratio2": 12}})");
    CHECK(e.find("gearing") != std::string::npos);
    CHECK(e.find("gearing: gearing") == std::string::npos);
  }
  SUBCASE("wrong type") {
    CHECK_FALSE(error_of(R"({"vehicle": {"mass_kg": "heavy"}})").empty());
  }
  SUBCASE("second clutch cannot be one-way") {
    CHECK_FALSE(error_of(R"({"clutches": {"clutch2": {"kind": "one-way"}}})").empty());
  }
  SUBCASE("defaults only") {
    const auto doc = parse_config_text("{}");
    CHECK(doc.vehicle.mass == 6500.0);
    CHECK(doc.fields.at("vehicle.mass_kg").origin == Provenance::default_value);
  }
}

TEST_CASE("model names") {
  CHECK(require_model("dct-friction") == ModelKind::dct_friction);
  CHECK(require_model("dbt-full") == ModelKind::dbt_full);
  CHECK_THROWS(require_model("cvt"));
}

TEST_CASE("simulate writes one row per grid point") {
  const auto doc = load_config(kExample);
  std::ostringstream out, log;
  const int rc = cmd_simulate(doc, "scenario2", ModelKind::dct_friction, "", false, out, log);
  CHECK(rc == kExitOk);
  const auto csv = out.str();
  CHECK(first_line(csv) == kTrajectoryHeader);
  const auto traj = simulate_shift(doc.model(ModelKind::dct_friction), doc.setup("scenario2"), 0.0);
  const double duration = traj.samples.back().t;
  CHECK(count_lines(csv) == 1 + static_cast<std::size_t>(std::llround(duration / doc.solver.dt)) + 1);
  CHECK_FALSE(log.str().empty());

  // Same inputs, same bytes.
  std::ostringstream again, log2;
  cmd_simulate(doc, "scenario2", ModelKind::dct_friction, "", false, again, log2);
  CHECK(again.str() == csv);
}

TEST_CASE("exit codes follow the verdict") {
  const auto doc = load_config(kExample);
  std::ostringstream sink;
  CHECK(cmd_simulate(doc, "scenario1", ModelKind::dct_owc, "", false, sink, sink) == kExitInfeasible);
  CHECK(cmd_simulate(doc, "scenario1", ModelKind::dct_friction, "", false, sink, sink) == kExitOk);
  CHECK(cmd_check(doc, "scenario2", ModelKind::dct_friction, false, sink) == kExitOk);
  CHECK(cmd_check(doc, "scenario1", ModelKind::dct_owc, false, sink) == kExitInfeasible);
  CHECK(cmd_check(doc, "scenario3", ModelKind::dct_owc, false, sink) == kExitInfeasible);
  CHECK(cmd_size_motor(doc, "", false, sink) == kExitOk);
}

TEST_CASE("machine-readable check") {
  const auto doc = load_config(kExample);
  std::ostringstream out;
  cmd_check(doc, "scenario2", ModelKind::dct_friction, true, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.contains("verdict"));
  CHECK(j.dump().find("feasible") != std::string::npos);
}

TEST_CASE("sweep") {
  const auto raw = read_config_json(kExample);
  SweepSpec spec{"scenario.accel_m_s2", 0.2, 1.4, 13, "scenario2", ModelKind::dct_friction};
  CHECK_NOTHROW(spec.validate());
  std::ostringstream out;
  CHECK(cmd_sweep(raw, spec, "", out) == kExitOk);
  const auto csv = out.str();
  CHECK(first_line(csv) == kSweepHeader);
  CHECK(count_lines(csv) == 14);
  CHECK(csv.find("\n0.2,feasible") != std::string::npos);
  CHECK(csv.find("\n1.4,infeasible") != std::string::npos);

  std::ostringstream again;
  cmd_sweep(raw, spec, "", again);
  CHECK(again.str() == csv);

  SweepSpec flat = spec;
  flat.to = flat.from;
  CHECK_THROWS(flat.validate());
  SweepSpec single = spec;
  single.steps = 1;
  CHECK_THROWS(single.validate());
  SweepSpec bogus = spec;
  bogus.param = "vehicle.wings";
  std::ostringstream sink;
  CHECK_THROWS(cmd_sweep(raw, bogus, "", sink));
}
