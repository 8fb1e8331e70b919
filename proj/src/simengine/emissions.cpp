#include <algorithm>

#include "roadchat/sim.hpp"

namespace roadchat::sim {

double tractive_power(double v, double a, const EmissionParams& p) {
  const double inertial = p.mass * a * v;
  const double rolling = p.rolling_coefficient * p.mass * p.gravity * v;
  const double aero = 0.5 * p.air_density * p.drag_area * v * v * v;
  return std::max(0.0, inertial + rolling + aero);
}

StepEmissions step_emissions(demand::Propulsion propulsion, double v, double a, double dt,
                             const EmissionParams& p) {
  const double power = tractive_power(v, a, p);
  StepEmissions e;
  if (propulsion == demand::Propulsion::electric) {
    e.electricity = power * dt / (3600.0 * p.drive_efficiency) + p.auxiliary_power * dt / 3600.0;
    return e;
  }
  e.fuel = power / (p.engine_efficiency * p.fuel_heating_value) * dt + p.idle_fuel_rate * dt;
  e.co2 = p.co2_per_fuel * e.fuel;
  e.co = p.co_per_fuel * e.fuel;
  e.pmx = p.pmx_per_fuel * e.fuel;
  return e;
}

}  // namespace roadchat::sim
