#include "gearshift/integrator.hpp"

namespace gearshift {

DrivelineState integrate_step(const DrivelineModel& model, const DrivelineState& x, const DrivelineInputs& in,
                              double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
  auto f = [&](double, const Vec<2>& s) {
    const auto a = model.accelerations({s[0], s[1]}, in);
    return Vec<2>{a.motor, a.output};
  };
  const auto next = rk4_step<2>(f, 0.0, Vec<2>{x.omega_m, x.omega_out}, dt);
  return {next[0], next[1]};
}

}  // namespace gearshift
