#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::net {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

// Carries each light's phase timing over to a network with a different link set. A surviving
// link keeps its own state character; a new link copies a sibling from the same incoming edge.
std::vector<TrafficLight> remap_lights(const RoadNetwork& before, const RoadNetwork& after) {
  std::vector<TrafficLight> out;
  for (std::size_t l = 0; l < before.traffic_lights().size(); ++l) {
    const auto& old_light = before.traffic_lights()[l];
    auto node = after.node_index(old_light.id);
    if (!node) continue;

    std::map<std::pair<std::string, std::string>, std::size_t> old_link;
    std::map<std::string, std::size_t> old_sibling;
    const auto& old_links = before.light_links(l);
    for (std::size_t i = 0; i < old_links.size(); ++i) {
      const auto& c = before.connections()[old_links[i]];
      const auto& from = before.edges()[c.from_edge].id;
      old_link[{from, before.edges()[c.to_edge].id}] = i;
      old_sibling.emplace(from, i);
    }

    std::vector<std::optional<std::size_t>> source;
    for (auto e : after.incoming_edges(*node)) {
      for (auto c : after.outgoing_connections(e)) {
        const auto& from = after.edges()[e].id;
        const auto& to = after.edges()[after.connections()[c].to_edge].id;
        if (auto it = old_link.find({from, to}); it != old_link.end()) {
          source.push_back(it->second);
        } else if (auto sib = old_sibling.find(from); sib != old_sibling.end()) {
          source.push_back(sib->second);
        } else {
          source.push_back(std::nullopt);
        }
      }
    }
    if (source.empty()) continue;

    TrafficLight light = old_light;
    for (std::size_t p = 0; p < light.phases.size(); ++p) {
      std::string state;
      for (const auto& s : source) state += s ? old_light.phases[p].state[*s] : 'G';
      light.phases[p].state = std::move(state);
    }
    out.push_back(std::move(light));
  }
  return out;
}

}  // namespace

std::vector<Edge> find_edges_by_name(const RoadNetwork& net, std::string_view name) {
  const auto wanted = lower(trim(name));
  if (wanted.empty()) throw InvalidArgument("find_edges_by_name: empty name");
  std::vector<Edge> out;
  for (const auto& e : net.edges()) {
    if (!e.street_name.empty() && lower(e.street_name) == wanted) out.push_back(e);
  }
  return out;  // edges() is already sorted by id
}

std::vector<std::string> street_names_matching(const RoadNetwork& net, std::string_view fragment) {
  const auto wanted = lower(trim(fragment));
  std::set<std::string> names;
  if (wanted.empty()) return {};
  for (const auto& e : net.edges()) {
    if (!e.street_name.empty() && lower(e.street_name).find(wanted) != std::string::npos) {
      names.insert(e.street_name);
    }
  }
  return {names.begin(), names.end()};
}

EditResult remove_edges(const RoadNetwork& net, const std::vector<std::string>& edge_ids) {
  std::set<std::string> doomed;
  for (const auto& id : edge_ids) {
    if (!net.edge_index(id)) throw UnknownEdge("unknown edge '" + id + "'");
    doomed.insert(id);
  }

  std::vector<std::size_t> remaining;
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    if (!doomed.contains(net.edges()[e].id)) remaining.push_back(e);
  }
  if (remaining.empty()) throw EmptyNetwork("removal would leave no edges");

  // Weak components over the surviving edges; node indices are id-sorted, so the smallest
  // index is the root of each component.
  const auto n = net.nodes().size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto e : remaining) {
    auto a = find(net.from_node(e));
    auto b = find(net.to_node(e));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::size_t> size;
  for (auto e : remaining) ++size[find(net.from_node(e))];

  EditResult result;
  std::optional<std::size_t> keep;
  for (const auto& [root, count] : size) {
    if (!keep || count > size[*keep]) keep = root;
  }
  if (size.size() > 1) {
    std::size_t pruned = 0;
    for (const auto& [root, count] : size) pruned += root == *keep ? 0 : count;
    result.warnings.push_back("removal disconnected the network; pruned " + std::to_string(pruned) +
                              " edge(s) in " + std::to_string(size.size() - 1) +
                              " smaller component(s)");
  }

  std::vector<Edge> edges;
  std::set<std::size_t> node_keep;
  for (auto e : remaining) {
    if (find(net.from_node(e)) != *keep) continue;
    edges.push_back(net.edges()[e]);
    node_keep.insert(net.from_node(e));
    node_keep.insert(net.to_node(e));
  }
  std::vector<Node> nodes;
  for (auto i : node_keep) nodes.push_back(net.nodes()[i]);

  auto topology = RoadNetwork::build(std::move(nodes), std::move(edges), {}, net.projection());
  result.network = topology.with_lights(remap_lights(net, topology));
  return result;
}

RoadNetwork remove_lane(const RoadNetwork& net, std::string_view edge_id, int lane_index) {
  const auto& target = net.edge(edge_id);
  if (target.lane_count < 2) {
    throw LastLane("edge '" + target.id + "' has a single lane; remove the edge instead");
  }
  if (lane_index < 0 || lane_index >= target.lane_count) {
    throw InvalidArgument("lane index " + std::to_string(lane_index) + " out of range for edge '" +
                          target.id + "'");
  }
  auto edges = net.edges();
  for (auto& e : edges) {
    if (e.id == target.id) --e.lane_count;
  }
  return RoadNetwork::build(net.nodes(), std::move(edges), net.traffic_lights(), net.projection());
}

}  // namespace roadchat::net
