#include <benchmark/benchmark.h>

#include "gearshift/driveline.hpp"
#include "gearshift/feasibility.hpp"
#include "gearshift/trajectory.hpp"

using namespace gearshift;

namespace {

Scenario upshift() {
  Scenario s;
  s.direction = ShiftDirection::upshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 65.0 / 3.6;
  s.accel = 1.0;
  s.torque_phase = 0.25;
  s.inertia_phase = 0.4;
  return s;
}

Scenario downshift() {
  Scenario s;
  s.direction = ShiftDirection::downshift;
  s.quadrant = MotorQuadrant::driving;
  s.initial_speed = 18.0 / 3.6;
  s.accel = 1.0;
  return s;
}

ShiftSetup setup(const Scenario& s) {
  ShiftSetup st;
  st.scenario = s;
  return st;
}

void BM_SimulateShift(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto model = DrivelineModel::make(kind, DrivelineParams{}, GearingSpec{}, DualBrakeGearset{},
                                          kind == ModelKind::dct_owc ? ClutchKind::one_way : ClutchKind::friction);
  const auto s = setup(downshift());
  for (auto _ : state) benchmark::DoNotOptimize(simulate_shift(model, s, 0.0));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_SimulateShift)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_DualFrictionUpshift(benchmark::State& state) {
  const auto model = DrivelineModel::dct(DrivelineParams{}, GearingSpec{}, ClutchKind::friction);
  const auto s = setup(upshift());
  for (auto _ : state) benchmark::DoNotOptimize(simulate_upshift_dualfriction(model, s, 60.0));
}
BENCHMARK(BM_DualFrictionUpshift)->Unit(benchmark::kMicrosecond);

void BM_Thm2(benchmark::State& state) {
  const auto model = DrivelineModel::dct(DrivelineParams{}, GearingSpec{}, ClutchKind::friction);
  const auto s = setup(upshift());
  for (auto _ : state) benchmark::DoNotOptimize(thm2_dualfriction_upshift(model, s));
}
BENCHMARK(BM_Thm2)->Unit(benchmark::kMillisecond);

void BM_Thm3(benchmark::State& state) {
  const auto s = downshift();
  for (auto _ : state)
    benchmark::DoNotOptimize(thm3_downshift(VehicleParams{}, DrivelineParams{}, GearingSpec{}, s, MotorLimits{}));
}
BENCHMARK(BM_Thm3)->Unit(benchmark::kMicrosecond);

void BM_DbtCoefficients(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(dbt_coefficients_numeric(DrivelineParams{}, GearingSpec{}, DualBrakeGearset{}));
}
BENCHMARK(BM_DbtCoefficients);

}  // namespace

BENCHMARK_MAIN();
