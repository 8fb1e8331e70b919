#include <cmath>
#include <numbers>

#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::net {

namespace {

constexpr double kAbstractSpeed = 13.89;

void add_two_way(std::vector<Edge>& edges, const Node& a, const Node& b, const std::string& name) {
  const double length = std::hypot(b.x - a.x, b.y - a.y);
  for (int dir = 0; dir < 2; ++dir) {
    const Node& from = dir == 0 ? a : b;
    const Node& to = dir == 0 ? b : a;
    Edge e;
    e.id = from.id + "to" + to.id;
    e.from = from.id;
    e.to = to.id;
    e.street_name = name;
    e.type = "abstract";
    e.length = length;
    e.lane_count = 1;
    e.speed_limit = kAbstractSpeed;
    e.priority = 1;
    e.shape = {{from.x, from.y}, {to.x, to.y}};
    edges.push_back(std::move(e));
  }
}

}  // namespace

RoadNetwork generate_grid(int rows, int cols, double spacing_m) {
  if (rows < 2 || cols < 2) throw InvalidArgument("grid needs at least 2 rows and 2 columns");
  if (!(spacing_m > 0.0)) throw InvalidArgument("grid spacing must be positive");

  auto node_id = [](int r, int c) { return "R" + std::to_string(r) + "C" + std::to_string(c); };
  std::vector<Node> nodes;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      nodes.push_back({node_id(r, c), c * spacing_m, r * spacing_m, false});
    }
  }
  auto at = [&](int r, int c) -> const Node& { return nodes[static_cast<std::size_t>(r * cols + c)]; };

  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      add_two_way(edges, at(r, c), at(r, c + 1), "Row " + std::to_string(r) + " Street");
    }
  }
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r + 1 < rows; ++r) {
      add_two_way(edges, at(r, c), at(r + 1, c), "Column " + std::to_string(c) + " Avenue");
    }
  }

  std::vector<std::string> signalized;
  for (int r = 1; r + 1 < rows; ++r) {
    for (int c = 1; c + 1 < cols; ++c) signalized.push_back(node_id(r, c));
  }
  auto net = RoadNetwork::build(std::move(nodes), std::move(edges), {});
  return with_default_signals(net, signalized);
}

RoadNetwork generate_spider(int arms, int circles, double spacing_m) {
  if (arms < 3) throw InvalidArgument("spider network needs at least 3 arms");
  if (circles < 1) throw InvalidArgument("spider network needs at least 1 circle");
  if (!(spacing_m > 0.0)) throw InvalidArgument("spider spacing must be positive");

  auto node_id = [](int arm, int circle) {
    return "A" + std::to_string(arm) + "K" + std::to_string(circle);
  };
  std::vector<Node> nodes;
  nodes.push_back({"C", 0.0, 0.0, false});
  for (int a = 0; a < arms; ++a) {
    const double angle = 2.0 * std::numbers::pi * a / arms;
    for (int k = 1; k <= circles; ++k) {
      // Rounded to the centimetre so emitted coordinates stay short.
      const double x = std::round(k * spacing_m * std::cos(angle) * 100.0) / 100.0;
      const double y = std::round(k * spacing_m * std::sin(angle) * 100.0) / 100.0;
      nodes.push_back({node_id(a, k), x, y, false});
    }
  }
  auto at = [&](int arm, int circle) -> const Node& {
    return circle == 0 ? nodes[0] : nodes[static_cast<std::size_t>(1 + arm * circles + circle - 1)];
  };

  std::vector<Edge> edges;
  std::vector<std::string> signalized;
  for (int a = 0; a < arms; ++a) {
    const auto arm_name = "Arm " + std::to_string(a) + " Road";
    for (int k = 1; k <= circles; ++k) {
      add_two_way(edges, at(a, k - 1), at(a, k), arm_name);
      add_two_way(edges, at(a, k), at((a + 1) % arms, k), "Circle " + std::to_string(k) + " Road");
      signalized.push_back(node_id(a, k));
    }
  }
  auto net = RoadNetwork::build(std::move(nodes), std::move(edges), {});
  return with_default_signals(net, signalized);
}

}  // namespace roadchat::net
