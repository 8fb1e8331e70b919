#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::net {

namespace {

struct ClassDefaults {
  double speed;
  int lanes;
  int priority;
};

ClassDefaults class_defaults(std::string highway) {
  if (highway.ends_with("_link")) highway.resize(highway.size() - 5);
  static const std::map<std::string, ClassDefaults> kTable = {
      {"motorway", {27.8, 2, 13}},    {"trunk", {22.2, 2, 12}},     {"primary", {13.9, 2, 11}},
      {"secondary", {13.9, 1, 10}},   {"tertiary", {12.5, 1, 9}},   {"residential", {8.3, 1, 4}},
      {"unclassified", {8.3, 1, 5}},  {"living_street", {5.6, 1, 3}}, {"service", {5.6, 1, 2}}};
  auto it = kTable.find(highway);
  return it == kTable.end() ? ClassDefaults{8.3, 1, 1} : it->second;
}

std::optional<double> parse_speed(const std::string& text) {
  // "50", "50 km/h", "30 mph"
  std::size_t end = 0;
  while (end < text.size() && (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) {
    ++end;
  }
  if (end == 0) return std::nullopt;
  double value = 0.0;
  try {
    value = xml::parse_number(text.substr(0, end));
  } catch (const ParseError&) {
    return std::nullopt;
  }
  if (!(value > 0.0)) return std::nullopt;
  const bool mph = text.find("mph") != std::string::npos;
  return mph ? value * 0.44704 : value / 3.6;
}

std::optional<int> parse_int(const geodata::Tags& tags, const std::string& key) {
  auto it = tags.find(key);
  if (it == tags.end()) return std::nullopt;
  try {
    int v = std::stoi(it->second);
    return v >= 1 ? std::optional<int>(v) : std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string tag_or(const geodata::Tags& tags, const std::string& key, std::string fallback = {}) {
  auto it = tags.find(key);
  return it == tags.end() ? fallback : it->second;
}

}  // namespace

RoadNetwork convert_osm(const geodata::OsmDocument& doc, const ConvertOptions& options) {
  if (doc.ways.empty()) throw EmptyNetwork("no drivable ways in the extract");

  // Projection origin.
  geodata::GeoPoint origin;
  if (options.origin) {
    origin = *options.origin;
  } else {
    double south = 90, north = -90, west = 180, east = -180;
    for (const auto& [id, node] : doc.nodes) {
      south = std::min(south, node.position.lat);
      north = std::max(north, node.position.lat);
      west = std::min(west, node.position.lon);
      east = std::max(east, node.position.lon);
    }
    origin = {(south + north) / 2.0, (west + east) / 2.0};
  }
  const double cos_lat = std::cos(origin.lat * std::numbers::pi / 180.0);
  auto project = [&](const geodata::GeoPoint& p) {
    return Point{(p.lon - origin.lon) * geodata::kMetersPerDegreeLat * cos_lat,
                 (p.lat - origin.lat) * geodata::kMetersPerDegreeLat};
  };

  // Split points: way endpoints, nodes used more than once, and signal nodes.
  std::map<long long, int> uses;
  std::set<long long> split;
  for (const auto& [id, way] : doc.ways) {
    for (auto ref : way.node_refs) ++uses[ref];
    split.insert(way.node_refs.front());
    split.insert(way.node_refs.back());
  }
  for (const auto& [ref, count] : uses) {
    if (count > 1) split.insert(ref);
    if (tag_or(doc.nodes.at(ref).tags, "highway") == "traffic_signals") split.insert(ref);
  }

  struct Segment {
    long long way;
    int index;
    std::vector<long long> refs;
  };
  std::vector<Segment> segments;
  for (const auto& [id, way] : doc.ways) {
    std::vector<long long> current{way.node_refs.front()};
    int index = 0;
    for (std::size_t i = 1; i < way.node_refs.size(); ++i) {
      current.push_back(way.node_refs[i]);
      if (split.contains(way.node_refs[i]) || i + 1 == way.node_refs.size()) {
        if (current.front() == current.back()) {
          // Closed piece: split at its middle vertex so no edge is a loop.
          if (current.size() >= 3) {
            const auto mid = current.size() / 2;
            segments.push_back({id, index++, {current.begin(), current.begin() + mid + 1}});
            segments.push_back({id, index++, {current.begin() + mid, current.end()}});
          }
        } else {
          segments.push_back({id, index++, current});
        }
        current = {way.node_refs[i]};
      }
    }
  }

  std::set<long long> used_nodes;
  std::vector<Edge> edges;
  for (const auto& seg : segments) {
    const auto& way = doc.ways.at(seg.way);
    const auto highway = tag_or(way.tags, "highway");
    const auto defaults = class_defaults(highway);
    const auto oneway_tag = tag_or(way.tags, "oneway");
    const bool roundabout = tag_or(way.tags, "junction") == "roundabout";
    const bool motorway = highway == "motorway" || highway == "motorway_link";
    bool forward = true, backward = true;
    if (oneway_tag == "yes" || oneway_tag == "true" || oneway_tag == "1" ||
        (oneway_tag.empty() && (roundabout || motorway))) {
      backward = false;
    } else if (oneway_tag == "-1" || oneway_tag == "reverse") {
      forward = false;
    }
    const double speed = parse_speed(tag_or(way.tags, "maxspeed")).value_or(defaults.speed);
    int lanes_fwd = defaults.lanes, lanes_bwd = defaults.lanes;
    if (auto total = parse_int(way.tags, "lanes")) {
      if (forward && backward) {
        lanes_fwd = std::max(1, *total / 2);
        lanes_bwd = std::max(1, *total - *total / 2);
      } else {
        lanes_fwd = lanes_bwd = *total;
      }
    }
    lanes_fwd = parse_int(way.tags, "lanes:forward").value_or(lanes_fwd);
    lanes_bwd = parse_int(way.tags, "lanes:backward").value_or(lanes_bwd);

    std::vector<Point> shape;
    for (auto ref : seg.refs) shape.push_back(project(doc.nodes.at(ref).position));
    const double length = std::max(polyline_length(shape), 0.1);
    const auto base_id = std::to_string(seg.way) + "#" + std::to_string(seg.index);

    auto make = [&](bool reverse, int lanes) {
      Edge e;
      e.id = reverse ? "-" + base_id : base_id;
      e.from = std::to_string(reverse ? seg.refs.back() : seg.refs.front());
      e.to = std::to_string(reverse ? seg.refs.front() : seg.refs.back());
      e.street_name = tag_or(way.tags, "name");
      e.type = "highway." + highway;
      e.length = length;
      e.lane_count = lanes;
      e.speed_limit = speed;
      e.priority = defaults.priority;
      e.shape = shape;
      if (reverse) std::reverse(e.shape.begin(), e.shape.end());
      edges.push_back(std::move(e));
    };
    if (forward) make(false, lanes_fwd);
    if (backward) make(true, lanes_bwd);
    used_nodes.insert(seg.refs.front());
    used_nodes.insert(seg.refs.back());
  }
  if (edges.empty()) throw EmptyNetwork("no drivable edges after conversion");

  // Largest weakly connected component (ties: the one holding the smallest node id).
  std::vector<long long> ids(used_nodes.begin(), used_nodes.end());
  std::map<long long, std::size_t> index_of;
  for (std::size_t i = 0; i < ids.size(); ++i) index_of[ids[i]] = i;
  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    auto a = find(index_of.at(std::stoll(e.from)));
    auto b = find(index_of.at(std::stoll(e.to)));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::size_t> edge_count;
  for (const auto& e : edges) ++edge_count[find(index_of.at(std::stoll(e.from)))];
  std::size_t best = edge_count.begin()->first;
  for (const auto& [root, count] : edge_count) {
    if (count > edge_count[best]) best = root;
  }

  std::vector<Edge> kept;
  std::set<long long> kept_nodes;
  for (auto& e : edges) {
    if (find(index_of.at(std::stoll(e.from))) != best) continue;
    kept_nodes.insert(std::stoll(e.from));
    kept_nodes.insert(std::stoll(e.to));
    kept.push_back(std::move(e));
  }

  std::vector<Node> nodes;
  std::vector<std::string> signalized;
  for (auto ref : kept_nodes) {
    const auto p = project(doc.nodes.at(ref).position);
    nodes.push_back({std::to_string(ref), p.x, p.y, false});
    if (tag_or(doc.nodes.at(ref).tags, "highway") == "traffic_signals") {
      signalized.push_back(std::to_string(ref));
    }
  }
  auto net = RoadNetwork::build(std::move(nodes), std::move(kept), {}, Projection{origin});
  return with_default_signals(net, signalized);
}

}  // namespace roadchat::net
