#include <omp.h>

#include "kernel_math.hpp"

namespace roadchat::sim {

void idm_speeds_omp(const SpeedInputs& in, const IdmParams& idm, double dt, std::vector<double>& out) {
  const auto n = static_cast<std::ptrdiff_t>(in.speed.size());
  out.resize(in.speed.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = detail::idm_speed(in.speed[i], in.desired_speed[i], in.max_accel[i], in.comfortable_decel[i],
                               in.gap[i], in.leader_speed[i], in.stop_distance[i], idm, dt);
  }
}

void emissions_omp(const EmissionInputs& in, const EmissionParams& p, double dt,
                   std::vector<StepEmissions>& out) {
  const auto n = static_cast<std::ptrdiff_t>(in.speed_after.size());
  out.resize(in.speed_after.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double a = (in.speed_after[i] - in.speed_before[i]) / dt;
    out[i] = step_emissions(in.electric[i] ? demand::Propulsion::electric : demand::Propulsion::gasoline,
                            in.speed_after[i], a, dt, p);
  }
}

}  // namespace roadchat::sim
