#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::net {

namespace {

template <typename T>
void sort_and_check_unique(std::vector<T>& items, const char* what) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].id == items[i - 1].id) {
      throw InvalidArgument(std::string("duplicate ") + what + " id '" + items[i].id + "'");
    }
  }
}

double heading(const Edge& e) {
  const auto& a = e.shape[e.shape.size() - 2];
  const auto& b = e.shape.back();
  return std::atan2(b.y - a.y, b.x - a.x);
}

}  // namespace

double TrafficLight::cycle() const {
  double total = 0.0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

double polyline_length(const std::vector<Point>& shape) {
  double total = 0.0;
  for (std::size_t i = 1; i < shape.size(); ++i) {
    total += std::hypot(shape[i].x - shape[i - 1].x, shape[i].y - shape[i - 1].y);
  }
  return total;
}

RoadNetwork RoadNetwork::build(std::vector<Node> nodes, std::vector<Edge> edges,
                               std::vector<TrafficLight> lights, Projection projection) {
  RoadNetwork net;
  sort_and_check_unique(nodes, "node");
  sort_and_check_unique(edges, "edge");
  sort_and_check_unique(lights, "traffic light");

  for (std::size_t i = 0; i < nodes.size(); ++i) net.node_by_id_.emplace(nodes[i].id, i);
  net.node_in_.assign(nodes.size(), {});
  net.node_out_.assign(nodes.size(), {});

  std::vector<std::set<std::size_t>> neighbours(nodes.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto& e = edges[i];
    auto from = net.node_by_id_.find(e.from);
    auto to = net.node_by_id_.find(e.to);
    if (from == net.node_by_id_.end() || to == net.node_by_id_.end()) {
      throw InvalidArgument("edge '" + e.id + "' references a missing node");
    }
    if (from->second == to->second) throw InvalidArgument("edge '" + e.id + "' is a loop");
    if (e.lane_count < 1) throw InvalidArgument("edge '" + e.id + "' has no lanes");
    if (!(e.speed_limit > 0.0)) throw InvalidArgument("edge '" + e.id + "' has no speed limit");
    const auto& a = nodes[from->second];
    const auto& b = nodes[to->second];
    if (e.shape.size() < 2) e.shape = {{a.x, a.y}, {b.x, b.y}};
    if (!(e.length > 0.0)) throw InvalidArgument("edge '" + e.id + "' has non-positive length");
    if (e.length < std::hypot(b.x - a.x, b.y - a.y) - 1e-6) {
      throw InvalidArgument("edge '" + e.id + "' is shorter than its endpoint distance");
    }
    net.edge_by_id_.emplace(e.id, i);
    net.edge_from_.push_back(from->second);
    net.edge_to_.push_back(to->second);
    net.node_out_[from->second].push_back(i);
    net.node_in_[to->second].push_back(i);
    neighbours[from->second].insert(to->second);
    neighbours[to->second].insert(from->second);
  }
  net.node_degree_.resize(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    net.node_degree_[n] = neighbours[n].size();
    nodes[n].is_junction = neighbours[n].size() >= 3;
  }

  net.out_connections_.assign(edges.size(), {});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& outs = net.node_out_[net.edge_to_[e]];
    const bool has_other = std::any_of(outs.begin(), outs.end(), [&](std::size_t f) {
      return net.edge_to_[f] != net.edge_from_[e];
    });
    for (auto f : outs) {
      if (has_other && net.edge_to_[f] == net.edge_from_[e]) continue;
      net.out_connections_[e].push_back(net.connections_.size());
      net.connections_.push_back({e, f, std::nullopt, -1});
    }
  }

  net.light_links_.assign(lights.size(), {});
  for (std::size_t l = 0; l < lights.size(); ++l) {
    const auto& light = lights[l];
    auto node = net.node_by_id_.find(light.id);
    if (node == net.node_by_id_.end()) {
      throw InvalidArgument("traffic light '" + light.id + "' is not at a node");
    }
    net.light_by_id_.emplace(light.id, l);
    auto& links = net.light_links_[l];
    for (auto e : net.node_in_[node->second]) {
      for (auto c : net.out_connections_[e]) {
        net.connections_[c].light = l;
        net.connections_[c].link_index = static_cast<int>(links.size());
        links.push_back(c);
      }
    }
    if (light.phases.empty()) throw InvalidArgument("traffic light '" + light.id + "' has no phases");
    for (const auto& phase : light.phases) {
      if (phase.state.size() != links.size()) {
        throw InvalidArgument("traffic light '" + light.id + "' state length " +
                              std::to_string(phase.state.size()) + " != link count " +
                              std::to_string(links.size()));
      }
      if (!(phase.duration > 0.0)) {
        throw InvalidArgument("traffic light '" + light.id + "' has a non-positive phase");
      }
      if (phase.state.find_first_not_of("GgyrO") != std::string::npos) {
        throw InvalidArgument("traffic light '" + light.id + "' has an invalid state character");
      }
    }
    if (light.offset < 0.0 || light.offset >= light.cycle()) {
      throw InvalidArgument("traffic light '" + light.id + "' offset outside [0, cycle)");
    }
  }

  net.nodes_ = std::move(nodes);
  net.edges_ = std::move(edges);
  net.lights_ = std::move(lights);
  net.projection_ = std::move(projection);
  return net;
}

RoadNetwork RoadNetwork::with_lights(std::vector<TrafficLight> lights) const {
  return build(nodes_, edges_, std::move(lights), projection_);
}

std::optional<std::size_t> RoadNetwork::edge_index(std::string_view id) const {
  auto it = edge_by_id_.find(std::string(id));
  if (it == edge_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RoadNetwork::node_index(std::string_view id) const {
  auto it = node_by_id_.find(std::string(id));
  if (it == node_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RoadNetwork::light_index(std::string_view junction_id) const {
  auto it = light_by_id_.find(std::string(junction_id));
  if (it == light_by_id_.end()) return std::nullopt;
  return it->second;
}

const Edge& RoadNetwork::edge(std::string_view id) const {
  auto index = edge_index(id);
  if (!index) throw UnknownEdge("unknown edge '" + std::string(id) + "'");
  return edges_[*index];
}

std::optional<std::size_t> RoadNetwork::connection(std::size_t from_edge, std::size_t to_edge) const {
  for (auto c : out_connections_[from_edge]) {
    if (connections_[c].to_edge == to_edge) return c;
  }
  return std::nullopt;
}

std::vector<int> approach_groups(const RoadNetwork& net, std::size_t node) {
  const auto& incoming = net.incoming_edges(node);
  std::vector<int> groups(incoming.size(), 0);
  if (incoming.empty()) return groups;
  const double reference = heading(net.edges()[incoming.front()]);
  const double limit = std::sin(std::numbers::pi / 4.0) + 1e-9;
  for (std::size_t i = 0; i < incoming.size(); ++i) {
    const double delta = heading(net.edges()[incoming[i]]) - reference;
    groups[i] = std::abs(std::sin(delta)) <= limit ? 0 : 1;
  }
  return groups;
}

TrafficLight default_program(const RoadNetwork& net, std::size_t node, double green_s,
                             double yellow_s) {
  const auto& incoming = net.incoming_edges(node);
  const auto groups = approach_groups(net, node);
  std::vector<int> link_group;
  for (std::size_t i = 0; i < incoming.size(); ++i) {
    for ([[maybe_unused]] auto c : net.outgoing_connections(incoming[i])) {
      link_group.push_back(groups[i]);
    }
  }
  TrafficLight light;
  light.id = net.nodes()[node].id;
  for (int g = 0; g < 2; ++g) {
    if (std::find(link_group.begin(), link_group.end(), g) == link_group.end()) continue;
    std::string green, yellow;
    for (int lg : link_group) {
      green += lg == g ? 'G' : 'r';
      yellow += lg == g ? 'y' : 'r';
    }
    light.phases.push_back({green_s, green});
    light.phases.push_back({yellow_s, yellow});
  }
  return light;
}

RoadNetwork with_default_signals(const RoadNetwork& net, const std::vector<std::string>& junction_ids) {
  std::set<std::string> targets(junction_ids.begin(), junction_ids.end());
  std::vector<TrafficLight> lights;
  for (const auto& light : net.traffic_lights()) {
    if (!targets.contains(light.id)) lights.push_back(light);
  }
  for (const auto& id : targets) {
    auto node = net.node_index(id);
    if (!node) throw InvalidArgument("cannot signalize unknown node '" + id + "'");
    bool has_links = false;
    for (auto e : net.incoming_edges(*node)) has_links |= !net.outgoing_connections(e).empty();
    if (!has_links) continue;
    lights.push_back(default_program(net, *node));
  }
  return net.with_lights(std::move(lights));
}

std::size_t weak_component_count(const RoadNetwork& net) {
  const auto n = net.nodes().size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    parent[find(net.from_node(e))] = find(net.to_node(e));
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += find(i) == i;
  return count;
}

}  // namespace roadchat::net
