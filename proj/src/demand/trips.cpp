#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "roadchat/demand.hpp"
#include "roadchat/errors.hpp"

namespace roadchat::demand {

namespace {

constexpr int kRetryBound = 10;
// Type draws use their own stream so the mix never perturbs routes or departures.
constexpr std::uint64_t kMixStream = 0x9E3779B97F4A7C15ULL;

void sort_trips(std::vector<Trip>& trips) {
  std::stable_sort(trips.begin(), trips.end(), [](const Trip& a, const Trip& b) {
    return a.depart != b.depart ? a.depart < b.depart : a.id < b.id;
  });
}

double unit_draw(std::mt19937_64& rng) {
  // 53 random bits -> [0, 1); independent of the standard library's distribution code.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void assign_types(std::vector<Trip>& trips, double ev_proportion, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kMixStream);
  for (auto& trip : trips) {
    trip.vtype = std::string(unit_draw(rng) < ev_proportion ? kElectricType : kGasolineType);
  }
}

void check_mix(MixSpec mix) {
  if (!(mix.ev_proportion >= 0.0 && mix.ev_proportion <= 1.0)) {
    throw InvalidArgument("EV proportion must lie in [0, 1]");
  }
}

}  // namespace

std::vector<VehicleType> default_vehicle_types() {
  return {
      {std::string(kElectricType), Propulsion::electric, 5.0, 2.8, 4.5, 55.6, "Energy/unknown"},
      {std::string(kGasolineType), Propulsion::gasoline, 5.0, 2.6, 4.5, 55.6, "HBEFA3/PC_G_EU4"},
  };
}

const VehicleType& DemandSet::vtype(std::string_view id) const {
  for (const auto& t : vtypes) {
    if (t.id == id) return t;
  }
  throw InvalidArgument("unknown vehicle type '" + std::string(id) + "'");
}

RandomTrips random_trips(const net::RoadNetwork& net, double volume_veh_h, double duration_s,
                         std::uint64_t seed, MixSpec mix) {
  if (!(volume_veh_h > 0.0)) throw InvalidArgument("traffic volume must be positive");
  if (!(duration_s > 0.0)) throw InvalidArgument("demand duration must be positive");
  check_mix(mix);
  const auto& edges = net.edges();
  if (edges.size() < 2) throw NetworkTooSmall("network needs at least two edges for trips");

  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool fringe = net.degree(net.from_node(e)) == 1 || net.degree(net.to_node(e)) == 1;
    total += edges[e].length * (fringe ? 2.0 : 1.0);
    cumulative.push_back(total);
  }

  std::mt19937_64 rng(seed);
  auto draw_edge = [&]() {
    const double x = unit_draw(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                             static_cast<std::ptrdiff_t>(edges.size()) - 1));
  };

  const auto count = static_cast<std::size_t>(std::llround(volume_veh_h * duration_s / 3600.0));
  std::vector<double> departs(count);
  for (auto& d : departs) d = unit_draw(rng) * duration_s;
  std::sort(departs.begin(), departs.end());

  RandomTrips out;
  bool any_routed = false;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> route;
    for (int attempt = 0; attempt <= kRetryBound && route.empty(); ++attempt) {
      const auto origin = draw_edge();
      auto dest = draw_edge();
      if (dest == origin) continue;
      try {
        route = shortest_path(net, edges[origin].id, edges[dest].id, Weight::time);
      } catch (const NoPath&) {
        route.clear();
      }
    }
    if (route.empty()) {
      ++out.skipped;
      continue;
    }
    any_routed = true;
    out.trips.push_back({"veh" + std::to_string(i), departs[i], std::move(route), {}});
  }
  if (count > 0 && !any_routed) {
    throw NetworkTooSmall("no routable origin/destination pair found");
  }
  sort_trips(out.trips);
  assign_types(out.trips, mix.ev_proportion, seed);
  return out;
}

DemandSet generate_demand(const net::RoadNetwork& net, double volume_veh_h, double duration_s,
                          std::uint64_t seed, MixSpec mix) {
  DemandSet demand;
  demand.vtypes = default_vehicle_types();
  demand.trips = random_trips(net, volume_veh_h, duration_s, seed, mix).trips;
  demand.duration = duration_s;
  return demand;
}

DemandSet add_vehicle(const net::RoadNetwork& net, const DemandSet& demand,
                      std::string_view origin_edge, std::string_view dest_edge, double depart_s,
                      std::string_view vtype) {
  if (depart_s < 0.0) throw InvalidArgument("departure time must be non-negative");
  demand.vtype(vtype);
  auto route = shortest_path(net, origin_edge, dest_edge, Weight::time);
  DemandSet out = demand;
  int k = 0;
  auto taken = [&](const std::string& id) {
    return std::any_of(out.trips.begin(), out.trips.end(), [&](const Trip& t) { return t.id == id; });
  };
  std::string id;
  do {
    id = "added" + std::to_string(k++);
  } while (taken(id));
  out.trips.push_back({id, depart_s, std::move(route), std::string(vtype)});
  sort_trips(out.trips);
  return out;
}

DemandSet set_vehicle_mix(const DemandSet& demand, MixSpec mix, std::uint64_t seed) {
  check_mix(mix);
  DemandSet out = demand;
  assign_types(out.trips, mix.ev_proportion, seed);
  return out;
}

RerouteResult reroute_invalidated(const net::RoadNetwork& previous, const net::RoadNetwork& current,
                                  const DemandSet& demand) {
  auto nearest = [&](const std::string& old_id, bool at_start) -> std::optional<std::string> {
    if (current.edge_index(old_id)) return old_id;
    auto old_index = previous.edge_index(old_id);
    if (!old_index) return std::nullopt;
    const auto& anchor_node =
        previous.nodes()[at_start ? previous.from_node(*old_index) : previous.to_node(*old_index)];
    std::optional<std::string> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < current.edges().size(); ++e) {
      const auto& node = current.nodes()[at_start ? current.from_node(e) : current.to_node(e)];
      const double d = std::hypot(node.x - anchor_node.x, node.y - anchor_node.y);
      if (d < best_distance) {
        best_distance = d;
        best = current.edges()[e].id;
      }
    }
    return best;
  };

  RerouteResult result;
  result.demand = demand;
  result.demand.trips.clear();
  for (const auto& trip : demand.trips) {
    if (route_is_connected(current, trip.route)) {
      result.demand.trips.push_back(trip);
      continue;
    }
    auto origin = nearest(trip.route.front(), true);
    auto dest = nearest(trip.route.back(), false);
    if (!origin || !dest) {
      ++result.dropped;
      continue;
    }
    try {
      Trip rerouted = trip;
      rerouted.route = shortest_path(current, *origin, *dest, Weight::time);
      result.demand.trips.push_back(std::move(rerouted));
      ++result.rerouted;
    } catch (const NoPath&) {
      ++result.dropped;
    }
  }
  return result;
}

}  // namespace roadchat::demand
