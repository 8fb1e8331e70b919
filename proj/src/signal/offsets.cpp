#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/signal.hpp"

namespace roadchat::signal {

std::vector<double> corridor_offsets(const CorridorSpec& corridor, const std::vector<double>& cycles) {
  if (corridor.light_ids.empty()) return {};
  if (corridor.distances.size() + 1 != corridor.light_ids.size() ||
      cycles.size() != corridor.light_ids.size()) {
    throw InvalidArgument("corridor needs one distance between each pair of lights and one cycle per light");
  }
  if (!(corridor.progression_speed > 0.0)) throw InvalidArgument("progression speed must be positive");
  std::vector<double> offsets;
  double distance = 0.0;
  for (std::size_t j = 0; j < cycles.size(); ++j) {
    if (j > 0) {
      if (!(corridor.distances[j - 1] > 0.0)) throw InvalidArgument("corridor distances must be positive");
      distance += corridor.distances[j - 1];
    }
    if (!(cycles[j] > 0.0)) throw InvalidArgument("cycle must be positive");
    double offset = std::fmod(distance / corridor.progression_speed, cycles[j]);
    if (offset >= cycles[j]) offset = 0.0;
    offsets.push_back(offset);
  }
  return offsets;
}

namespace {

struct Crossing {
  std::size_t light;
  int link;
  double distance;  // from the corridor's first light
};

struct Candidate {
  const std::vector<std::string>* route;
  int count;
  std::vector<Crossing> crossings;
  double speed;
};

std::vector<Crossing> crossings_of(const net::RoadNetwork& net, const std::vector<std::string>& route,
                                   double& mean_speed) {
  std::vector<Crossing> out;
  std::vector<double> speeds;  // edges walked since the first light
  std::size_t speeds_at_last = 0;
  double distance = 0.0;
  for (std::size_t k = 0; k + 1 < route.size(); ++k) {
    const auto e = net.edge_index(route[k]);
    const auto f = net.edge_index(route[k + 1]);
    if (!e || !f) return {};
    if (!out.empty()) {
      distance += net.edges()[*e].length;
      speeds.push_back(net.edges()[*e].speed_limit);
    }
    const auto conn = net.connection(*e, *f);
    if (!conn) return {};
    const auto& c = net.connections()[*conn];
    if (!c.light) continue;
    out.push_back({*c.light, c.link_index, distance});
    speeds_at_last = speeds.size();
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < speeds_at_last; ++i) sum += speeds[i];
  mean_speed = speeds_at_last > 0 ? sum / static_cast<double>(speeds_at_last) : 0.0;
  return out;
}

bool is_green(char c) { return c == 'G' || c == 'g'; }

// Time from the start of phase 0 to the onset of the green serving `link`.
double green_onset(const std::vector<net::Phase>& phases, int link) {
  const auto n = phases.size();
  double lead = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto prev = (k + n - 1) % n;
    if (is_green(phases[k].state[static_cast<std::size_t>(link)]) &&
        !is_green(phases[prev].state[static_cast<std::size_t>(link)])) {
      return lead;
    }
    lead += phases[k].duration;
  }
  return 0.0;
}

}  // namespace

OffsetResult coordinate_offsets(const net::RoadNetwork& net, const demand::DemandSet& demand, int top_k) {
  if (net.traffic_lights().size() < 2) throw NoSignals("offset coordination needs at least two traffic lights");
  if (top_k < 1) throw InvalidArgument("corridor count must be positive");

  std::map<std::vector<std::string>, int> route_counts;
  for (const auto& trip : demand.trips) ++route_counts[trip.route];

  std::vector<Candidate> candidates;
  for (const auto& [route, count] : route_counts) {
    double speed = 0.0;
    auto crossings = crossings_of(net, route, speed);
    if (crossings.size() < 2 || !(speed > 0.0)) continue;
    candidates.push_back({&route, count, std::move(crossings), speed});
  }
  // map iteration already orders routes lexicographically; stable sort keeps that as the last key.
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.crossings.size() > b.crossings.size();
  });
  if (candidates.size() > static_cast<std::size_t>(top_k)) candidates.resize(static_cast<std::size_t>(top_k));

  OffsetResult result;
  auto lights = net.traffic_lights();
  std::set<std::size_t> assigned;
  for (const auto& cand : candidates) {
    CorridorSpec spec;
    spec.progression_speed = cand.speed;
    std::vector<double> cycles;
    for (std::size_t j = 0; j < cand.crossings.size(); ++j) {
      const auto& c = cand.crossings[j];
      spec.light_ids.push_back(lights[c.light].id);
      if (j > 0) spec.distances.push_back(c.distance - cand.crossings[j - 1].distance);
      cycles.push_back(lights[c.light].cycle());
    }
    const auto offsets = corridor_offsets(spec, cycles);
    for (std::size_t j = 0; j < cand.crossings.size(); ++j) {
      const auto& c = cand.crossings[j];
      if (!assigned.insert(c.light).second) continue;
      // Shifting the offset back by the green onset puts the through green at the corridor time,
      // so the program itself stays untouched and an offsets-only add file reproduces it.
      auto& light = lights[c.light];
      const double cycle = light.cycle();
      double offset = std::fmod(offsets[j] - green_onset(light.phases, c.link), cycle);
      if (offset < 0.0) offset += cycle;
      if (offset >= cycle) offset = 0.0;
      light.offset = offset;
      result.offsets[light.id] = offset;
    }
    result.corridors.push_back(std::move(spec));
  }
  result.network = net.with_lights(std::move(lights));
  return result;
}

}  // namespace roadchat::signal
