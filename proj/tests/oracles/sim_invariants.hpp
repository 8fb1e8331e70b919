#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "roadchat/demand.hpp"
#include "roadchat/sim.hpp"

namespace testing {

// Per-step checks of the simulator contract: conservation, no overlap within a lane, speed and
// position bounds.
struct InvariantWatch {
  int conservation_violations = 0;
  int overlaps = 0;
  int over_speed = 0;
  int out_of_edge = 0;
  const roadchat::net::RoadNetwork* net = nullptr;
  const roadchat::demand::DemandSet* demand = nullptr;

  roadchat::sim::StepObserver observer() {
    return [this](const roadchat::sim::StepView& s) {
      if (static_cast<std::size_t>(s.inserted - s.arrived) != s.vehicles.size()) ++conservation_violations;
      std::map<std::pair<std::size_t, int>, std::vector<const roadchat::sim::VehicleView*>> lanes;
      for (const auto& v : s.vehicles) {
        lanes[{v.edge, v.lane}].push_back(&v);
        const auto& e = net->edges()[v.edge];
        const auto& vt = demand->vtype(demand->trips[v.trip].vtype);
        if (v.speed < -1e-9 || v.speed > std::min(vt.max_speed, e.speed_limit * 1.1) + 1e-9) ++over_speed;
        if (v.position < -1e-9 || v.position > e.length + 1e-9) ++out_of_edge;
      }
      for (auto& [key, vs] : lanes) {
        std::sort(vs.begin(), vs.end(), [](auto* a, auto* b) { return a->position < b->position; });
        for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
          const double gap = vs[i + 1]->position - vs[i + 1]->length - vs[i]->position;
          if (gap < -1e-6) ++overlaps;
        }
      }
    };
  }
};

}  // namespace testing
