#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "roadchat/netmodel.hpp"

namespace roadchat::demand {

enum class Propulsion { gasoline, electric };

struct VehicleType {
  std::string id;
  Propulsion propulsion = Propulsion::gasoline;
  double length = 5.0;
  double max_accel = 2.6;
  double max_decel = 4.5;
  double max_speed = 55.6;
  std::string emission_class;
  bool operator==(const VehicleType&) const = default;
};

inline constexpr std::string_view kGasolineType = "gasoline";
inline constexpr std::string_view kElectricType = "electric";

/// Gasoline and electric passenger cars with near-identical dynamics.
std::vector<VehicleType> default_vehicle_types();

struct Trip {
  std::string id;
  double depart = 0.0;
  std::vector<std::string> route;
  std::string vtype;
  bool operator==(const Trip&) const = default;
};

struct MixSpec {
  double ev_proportion = 0.5;
};

/// Trips are kept sorted by (depart, id).
struct DemandSet {
  std::vector<VehicleType> vtypes;
  std::vector<Trip> trips;
  double duration = 3600.0;  // span over which departures were drawn, seconds

  const VehicleType& vtype(std::string_view id) const;
  bool operator==(const DemandSet&) const = default;
};

enum class Weight { distance, time };

double edge_weight(const net::Edge& e, Weight weight);
/// Sum of edge weights along `route`, first and last edge included.
double route_cost(const net::RoadNetwork& net, const std::vector<std::string>& route, Weight weight);
/// True when every consecutive pair is a connection in `net` and all edges exist.
bool route_is_connected(const net::RoadNetwork& net, const std::vector<std::string>& route);

/// Dijkstra over the edge graph; equal-cost ties go to the lexicographically smaller edge-id
/// sequence. Throws UnknownEdge, NoPath.
std::vector<std::string> shortest_path(const net::RoadNetwork& net, std::string_view from_edge,
                                       std::string_view to_edge, Weight weight);

struct RandomTrips {
  std::vector<Trip> trips;
  int skipped = 0;  // OD draws abandoned after the retry bound
};

/// round(volume * duration / 3600) trips; departures uniform on [0, duration); origins and
/// destinations drawn by length, doubled on fringe edges; routed by travel time.
/// Throws NetworkTooSmall, InvalidArgument.
RandomTrips random_trips(const net::RoadNetwork& net, double volume_veh_h, double duration_s,
                         std::uint64_t seed, MixSpec mix);

/// random_trips packaged with the default vehicle types.
DemandSet generate_demand(const net::RoadNetwork& net, double volume_veh_h, double duration_s,
                          std::uint64_t seed, MixSpec mix);

/// Throws UnknownEdge, NoPath.
DemandSet add_vehicle(const net::RoadNetwork& net, const DemandSet& demand,
                      std::string_view origin_edge, std::string_view dest_edge, double depart_s,
                      std::string_view vtype = kGasolineType);

/// Redraws each trip's type: trip i is electric iff its i-th uniform draw from `seed` falls below
/// the EV proportion, so raising the proportion only ever converts gasoline trips.
DemandSet set_vehicle_mix(const DemandSet& demand, MixSpec mix, std::uint64_t seed);

struct RerouteResult {
  DemandSet demand;
  int rerouted = 0;
  int dropped = 0;
};

/// Re-routes trips whose route is no longer valid in `current`. Terminal edges that vanished are
/// replaced by the nearest surviving edge, measured on `previous` geometry.
RerouteResult reroute_invalidated(const net::RoadNetwork& previous, const net::RoadNetwork& current,
                                  const DemandSet& demand);

std::string emit_rou_xml(const DemandSet& demand);
/// Throws ParseError.
DemandSet parse_rou_xml(std::string_view xml_text, double duration_s);

}  // namespace roadchat::demand
