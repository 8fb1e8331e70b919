#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "roadchat/geodata.hpp"

namespace roadchat::net {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Node {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  /// Derived: three or more distinct neighbouring nodes.
  bool is_junction = false;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  std::string street_name;
  std::string type;  // e.g. "highway.residential"; free-form
  double length = 0.0;
  int lane_count = 1;
  double speed_limit = 13.89;
  int priority = 1;
  std::vector<Point> shape;  // from-node .. to-node polyline
  bool operator==(const Edge&) const = default;
};

/// Edge-to-edge movement through the junction at `from`'s downstream node.
/// Derived from topology: every outgoing edge except the U-turn, which is kept only when it is
/// the sole way out.
struct Connection {
  std::size_t from_edge = 0;  // edge indices
  std::size_t to_edge = 0;
  std::optional<std::size_t> light;  // traffic light index, when signalized
  int link_index = -1;               // position in the light's state strings
};

struct Phase {
  double duration = 0.0;
  std::string state;  // one char of {G, g, y, r} per controlled link
  bool operator==(const Phase&) const = default;
};

struct TrafficLight {
  std::string id;  // junction node id
  std::string program_id = "0";
  double offset = 0.0;
  std::vector<Phase> phases;

  double cycle() const;
  bool operator==(const TrafficLight&) const = default;
};

struct Projection {
  /// Abstract networks have no geographic anchor.
  std::optional<geodata::GeoPoint> origin;
  bool operator==(const Projection&) const = default;
};

/// Immutable directed road graph. Every container is sorted by id; lookups are O(1).
class RoadNetwork {
 public:
  RoadNetwork() = default;

  /// Sorts, validates and indexes. Throws InvalidArgument on dangling references, duplicate ids,
  /// or traffic-light programs whose state length does not match the junction's link count.
  static RoadNetwork build(std::vector<Node> nodes, std::vector<Edge> edges,
                           std::vector<TrafficLight> lights, Projection projection = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const std::vector<TrafficLight>& traffic_lights() const { return lights_; }
  const Projection& projection() const { return projection_; }

  std::optional<std::size_t> edge_index(std::string_view id) const;
  std::optional<std::size_t> node_index(std::string_view id) const;
  std::optional<std::size_t> light_index(std::string_view junction_id) const;
  const Edge& edge(std::string_view id) const;  // throws UnknownEdge

  std::size_t from_node(std::size_t edge) const { return edge_from_[edge]; }
  std::size_t to_node(std::size_t edge) const { return edge_to_[edge]; }
  /// Indices into connections() leaving `edge`, sorted by target edge id.
  const std::vector<std::size_t>& outgoing_connections(std::size_t edge) const {
    return out_connections_[edge];
  }
  const std::vector<std::size_t>& incoming_edges(std::size_t node) const { return node_in_[node]; }
  const std::vector<std::size_t>& outgoing_edges(std::size_t node) const { return node_out_[node]; }
  /// Number of distinct neighbouring nodes, ignoring direction.
  std::size_t degree(std::size_t node) const { return node_degree_[node]; }
  /// Connection index for a movement, if one exists.
  std::optional<std::size_t> connection(std::size_t from_edge, std::size_t to_edge) const;
  /// Links controlled by light `light`, in link-index order (indices into connections()).
  const std::vector<std::size_t>& light_links(std::size_t light) const { return light_links_[light]; }

  /// Copy with `lights` replaced; re-validated.
  RoadNetwork with_lights(std::vector<TrafficLight> lights) const;

  bool operator==(const RoadNetwork& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_ && lights_ == other.lights_ &&
           projection_ == other.projection_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<TrafficLight> lights_;
  Projection projection_;

  std::vector<Connection> connections_;
  std::unordered_map<std::string, std::size_t> edge_by_id_;
  std::unordered_map<std::string, std::size_t> node_by_id_;
  std::unordered_map<std::string, std::size_t> light_by_id_;
  std::vector<std::size_t> edge_from_;
  std::vector<std::size_t> edge_to_;
  std::vector<std::vector<std::size_t>> out_connections_;
  std::vector<std::vector<std::size_t>> node_in_;
  std::vector<std::vector<std::size_t>> node_out_;
  std::vector<std::size_t> node_degree_;
  std::vector<std::vector<std::size_t>> light_links_;
};

double polyline_length(const std::vector<Point>& shape);

/// Heading-based split of a junction's incoming edges into two approach groups (0 and 1). An
/// incoming edge is in group 0 when its final heading is within 45 degrees (mod 180) of the
/// heading of the junction's first incoming edge.
std::vector<int> approach_groups(const RoadNetwork& net, std::size_t node);

/// Green then 4 s yellow per non-empty approach group; 31 s green by default (70 s cycle).
TrafficLight default_program(const RoadNetwork& net, std::size_t node, double green_s = 31.0,
                             double yellow_s = 4.0);

/// Adds default-program lights at `junction_ids` (replacing existing ones there).
RoadNetwork with_default_signals(const RoadNetwork& net, const std::vector<std::string>& junction_ids);

// Generators

RoadNetwork generate_grid(int rows, int cols, double spacing_m);
RoadNetwork generate_spider(int arms, int circles, double spacing_m);

struct ConvertOptions {
  /// Projection origin; defaults to the centre of the node extent.
  std::optional<geodata::GeoPoint> origin;
};

/// OSM extract -> network (ways split at shared nodes, largest weak component kept).
/// Throws EmptyNetwork.
RoadNetwork convert_osm(const geodata::OsmDocument& doc, const ConvertOptions& options = {});

// Queries and edits

std::vector<Edge> find_edges_by_name(const RoadNetwork& net, std::string_view name);
/// Distinct street names containing `fragment` (case-insensitive), sorted.
std::vector<std::string> street_names_matching(const RoadNetwork& net, std::string_view fragment);

struct EditResult {
  RoadNetwork network;
  std::vector<std::string> warnings;
};

/// Throws UnknownEdge. Components cut off by the removal are pruned (largest kept) with a warning.
EditResult remove_edges(const RoadNetwork& net, const std::vector<std::string>& edge_ids);
/// Throws UnknownEdge, LastLane, InvalidArgument (lane index out of range).
RoadNetwork remove_lane(const RoadNetwork& net, std::string_view edge_id, int lane_index);

std::size_t weak_component_count(const RoadNetwork& net);
inline bool is_weakly_connected(const RoadNetwork& net) { return weak_component_count(net) <= 1; }

// SUMO network files

std::string emit_net_xml(const RoadNetwork& net);
/// Reads files produced by emit_net_xml. Throws ParseError.
RoadNetwork parse_net_xml(std::string_view xml_text);

/// Lane-level expansion of a light's state: each edge-level link becomes one link per source
/// lane, in emission order.
std::string expand_state_to_lanes(const RoadNetwork& net, std::size_t light, std::string_view state);

}  // namespace roadchat::net
