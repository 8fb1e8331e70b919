#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadchat/sim.hpp"

namespace roadchat::sim::detail {

inline double idm_interaction(double v, double gap, double dv, double sqrt_ab, const IdmParams& idm) {
  const double desired = idm.min_gap + std::max(0.0, v * idm.time_headway + v * dv / (2.0 * sqrt_ab));
  const double s = std::max(gap, 0.01);
  return (desired / s) * (desired / s);
}

// New speed for one vehicle; identical arithmetic in every kernel flavour.
inline double idm_speed(double v, double v0, double amax, double b, double gap, double leader_speed,
                        double stop_distance, const IdmParams& idm, double dt) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double sqrt_ab = std::sqrt(amax * b);
  double interaction = 0.0;
  if (gap < inf) interaction = idm_interaction(v, gap, v - leader_speed, sqrt_ab, idm);
  if (stop_distance < inf) interaction = std::max(interaction, idm_interaction(v, stop_distance, v, sqrt_ab, idm));
  const double accel = amax * (1.0 - std::pow(v / v0, idm.exponent) - interaction);
  double next = std::max(0.0, v + accel * dt);
  next = std::min(next, v0);
  if (gap < inf) next = std::min(next, std::max(0.0, gap) / dt);
  if (stop_distance < inf) next = std::min(next, std::max(0.0, stop_distance) / dt);
  return next;
}

}  // namespace roadchat::sim::detail
