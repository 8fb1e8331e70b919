#include <algorithm>
#include <limits>
#include <queue>

#include "roadchat/demand.hpp"
#include "roadchat/errors.hpp"

namespace roadchat::demand {

double edge_weight(const net::Edge& e, Weight weight) {
  return weight == Weight::distance ? e.length : e.length / e.speed_limit;
}

double route_cost(const net::RoadNetwork& net, const std::vector<std::string>& route, Weight weight) {
  double total = 0.0;
  for (const auto& id : route) total += edge_weight(net.edge(id), weight);
  return total;
}

bool route_is_connected(const net::RoadNetwork& net, const std::vector<std::string>& route) {
  if (route.empty()) return false;
  std::optional<std::size_t> previous;
  for (const auto& id : route) {
    auto index = net.edge_index(id);
    if (!index) return false;
    if (previous && !net.connection(*previous, *index)) return false;
    previous = index;
  }
  return true;
}

std::vector<std::string> shortest_path(const net::RoadNetwork& net, std::string_view from_edge,
                                       std::string_view to_edge, Weight weight) {
  auto source = net.edge_index(from_edge);
  auto target = net.edge_index(to_edge);
  if (!source || !target) {
    throw UnknownEdge("Entered Roads are not in the current network");
  }
  if (*source == *target) return {std::string(from_edge)};

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  const auto n = net.edges().size();
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> previous(n, kNone);
  std::vector<bool> settled(n, false);

  // Edge indices follow id order, so comparing index sequences compares id sequences.
  auto path_to = [&](std::size_t e) {
    std::vector<std::size_t> path;
    for (; e != kNone; e = previous[e]) path.push_back(e);
    std::reverse(path.begin(), path.end());
    return path;
  };

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  cost[*source] = edge_weight(net.edges()[*source], weight);
  queue.emplace(cost[*source], *source);
  while (!queue.empty()) {
    auto [c, e] = queue.top();
    queue.pop();
    if (settled[e] || c > cost[e]) continue;
    settled[e] = true;
    if (e == *target) break;
    for (auto conn : net.outgoing_connections(e)) {
      const auto f = net.connections()[conn].to_edge;
      if (settled[f]) continue;
      const double candidate = c + edge_weight(net.edges()[f], weight);
      if (candidate < cost[f]) {
        cost[f] = candidate;
        previous[f] = e;
        queue.emplace(candidate, f);
      } else if (candidate == cost[f] && previous[f] != e) {
        auto current = path_to(previous[f]);
        auto alternative = path_to(e);
        current.push_back(f);
        alternative.push_back(f);
        if (alternative < current) previous[f] = e;
      }
    }
  }
  if (!settled[*target]) {
    throw NoPath("no route from '" + std::string(from_edge) + "' to '" + std::string(to_edge) + "'");
  }
  std::vector<std::string> route;
  for (auto e : path_to(*target)) route.push_back(net.edges()[e].id);
  return route;
}

}  // namespace roadchat::demand
