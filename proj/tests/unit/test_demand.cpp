#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "roadchat/demand.hpp"
#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"
#include "oracles/graphs.hpp"
#include "support.hpp"

using namespace roadchat;
using namespace roadchat::demand;
using roadchat::net::Edge;
using roadchat::net::Node;
using roadchat::net::RoadNetwork;
using testing::brute_force_cost;
using testing::make_edge;
using testing::random_small_net;

namespace {

RoadNetwork diamond() {
  // s -> a -> t is shorter than s -> b -> t.
  const Node s{"s", 0, 0, false}, a{"a", 100, 50, false}, b{"b", 100, -300, false}, t{"t", 200, 0, false},
      pre{"p", -100, 0, false}, post{"q", 300, 0, false};
  return RoadNetwork::build({s, a, b, t, pre, post},
                            {make_edge(pre, s, "in", 100), make_edge(s, a, "sa", 120), make_edge(a, t, "at", 120),
                             make_edge(s, b, "sb", 320), make_edge(b, t, "bt", 320), make_edge(t, post, "out", 100)},
                            {});
}

std::size_t ev_count(const DemandSet& d) {
  std::size_t n = 0;
  for (const auto& t : d.trips) n += t.vtype == kElectricType ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("shortest_path basics") {
  const auto d = diamond();
  CHECK(shortest_path(d, "in", "in", Weight::distance) == std::vector<std::string>{"in"});
  CHECK(shortest_path(d, "in", "out", Weight::distance) == std::vector<std::string>{"in", "sa", "at", "out"});
  CHECK(shortest_path(d, "in", "out", Weight::time) == std::vector<std::string>{"in", "sa", "at", "out"});
  CHECK_THROWS_AS(shortest_path(d, "out", "in", Weight::distance), NoPath);
  CHECK_THROWS_AS(shortest_path(d, "in", "nope", Weight::distance), UnknownEdge);
  CHECK(route_cost(d, {"in", "sa", "at", "out"}, Weight::distance) == doctest::Approx(440));
}

TEST_CASE("shortest_path matches exhaustive search on small graphs") {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (int g = 0; g < 200; ++g) {
    const auto net = random_small_net(rng);
    REQUIRE(net.edges().size() <= 8);
    for (const auto w : {Weight::distance, Weight::time}) {
      for (std::size_t a = 0; a < net.edges().size(); ++a) {
        for (std::size_t b = 0; b < net.edges().size(); ++b) {
          const double oracle = brute_force_cost(net, a, b, w);
          if (std::isinf(oracle)) {
            CHECK_THROWS_AS(shortest_path(net, net.edges()[a].id, net.edges()[b].id, w), NoPath);
            continue;
          }
          const auto path = shortest_path(net, net.edges()[a].id, net.edges()[b].id, w);
          CHECK(path.front() == net.edges()[a].id);
          CHECK(path.back() == net.edges()[b].id);
          CHECK(route_is_connected(net, path));
          CHECK(route_cost(net, path, w) == doctest::Approx(oracle).epsilon(1e-9));
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("equal-cost ties go to the lexicographically smaller sequence") {
  const Node s{"s", 0, 0, false}, a{"a", 100, 100, false}, b{"b", 100, -100, false}, t{"t", 200, 0, false},
      pre{"p", -100, 0, false};
  const auto net = RoadNetwork::build({s, a, b, t, pre},
                                      {make_edge(pre, s, "in", 100), make_edge(s, a, "z1", 150), make_edge(a, t, "z2", 150),
                                       make_edge(s, b, "m1", 150), make_edge(b, t, "m2", 150)},
                                      {});
  CHECK(shortest_path(net, "in", "m2", Weight::distance).size() == 3);
  // Both branches end at t but on different edges; extend with a common sink.
  const Node q{"q", 300, 0, false};
  const auto net2 = RoadNetwork::build({s, a, b, t, pre, q},
                                       {make_edge(pre, s, "in", 100), make_edge(s, a, "z1", 150), make_edge(a, t, "z2", 150),
                                        make_edge(s, b, "m1", 150), make_edge(b, t, "m2", 150), make_edge(t, q, "out", 100)},
                                       {});
  CHECK(shortest_path(net2, "in", "out", Weight::distance) == std::vector<std::string>{"in", "m1", "m2", "out"});
}

TEST_CASE("random_trips counts and validity") {
  const auto g = net::generate_grid(5, 5, 200);
  const auto r = random_trips(g, 2000, 3600, 42, {0.5});
  CHECK(r.trips.size() + static_cast<std::size_t>(r.skipped) == 2000);
  CHECK(r.skipped == 0);
  std::set<std::string> ids;
  for (const auto& t : r.trips) {
    CHECK(t.depart >= 0);
    CHECK(t.depart < 3600);
    CHECK(route_is_connected(g, t.route));
    ids.insert(t.id);
  }
  CHECK(ids.size() == r.trips.size());
  CHECK(std::is_sorted(r.trips.begin(), r.trips.end(),
                       [](const Trip& a, const Trip& b) { return std::tie(a.depart, a.id) < std::tie(b.depart, b.id); }));

  std::size_t ev = 0;
  for (const auto& t : r.trips) ev += t.vtype == kElectricType ? 1 : 0;
  // Binomial(2000, 0.5): mean 1000, sd 22.4; 4.4 sd covers > 99.99%.
  CHECK(ev >= 900);
  CHECK(ev <= 1100);

  CHECK(random_trips(g, 3600, 1, 1, {0.0}).trips.size() == 1);
  CHECK_THROWS_AS(random_trips(g, 0, 3600, 1, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(random_trips(g, 100, 0, 1, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(random_trips(g, 100, 100, 1, {1.5}), InvalidArgument);
}

TEST_CASE("random_trips is reproducible") {
  const auto g = net::generate_spider(6, 3, 100);
  const auto a = generate_demand(g, 500, 1800, 7, {0.3});
  const auto b = generate_demand(g, 500, 1800, 7, {0.3});
  CHECK(a == b);
  CHECK(emit_rou_xml(a) == emit_rou_xml(b));
  CHECK_FALSE(generate_demand(g, 500, 1800, 8, {0.3}) == a);
}

TEST_CASE("random_trips rejects tiny networks") {
  const Node a{"a", 0, 0, false}, b{"b", 100, 0, false};
  const auto one = RoadNetwork::build({a, b}, {make_edge(a, b, "ab", 100)}, {});
  CHECK_THROWS_AS(random_trips(one, 100, 3600, 1, {0.5}), NetworkTooSmall);
}

TEST_CASE("set_vehicle_mix") {
  const auto g = net::generate_grid(5, 5, 200);
  const auto base = generate_demand(g, 1000, 3600, 42, {0.0});
  CHECK(ev_count(base) == 0);
  CHECK(ev_count(set_vehicle_mix(base, {1.0}, 9)) == base.trips.size());
  CHECK(ev_count(set_vehicle_mix(base, {0.0}, 9)) == 0);

  const auto quarter = set_vehicle_mix(base, {0.25}, 9);
  CHECK(ev_count(quarter) == 239);  // pinned regression value

  std::size_t prev = 0;
  for (int step = 0; step <= 20; ++step) {
    const double p = step / 20.0;
    const auto m = set_vehicle_mix(base, {p}, 9);
    REQUIRE(m.trips.size() == base.trips.size());
    for (std::size_t i = 0; i < m.trips.size(); ++i) {
      CHECK(m.trips[i].route == base.trips[i].route);
      CHECK(m.trips[i].depart == base.trips[i].depart);
      CHECK(m.trips[i].id == base.trips[i].id);
    }
    const auto n = ev_count(m);
    CHECK(n >= prev);
    prev = n;
  }
  // Nested: every EV at a low share stays electric at a higher one.
  const auto lo = set_vehicle_mix(base, {0.3}, 9), hi = set_vehicle_mix(base, {0.6}, 9);
  for (std::size_t i = 0; i < lo.trips.size(); ++i)
    if (lo.trips[i].vtype == kElectricType) CHECK(hi.trips[i].vtype == kElectricType);
}

TEST_CASE("add_vehicle") {
  const auto g = net::generate_grid(4, 4, 100);
  const auto base = generate_demand(g, 200, 600, 3, {0.5});
  const auto& o = g.edges().front().id;
  const auto& d = g.edges().back().id;
  const auto more = add_vehicle(g, base, o, d, 10.0);
  REQUIRE(more.trips.size() == base.trips.size() + 1);
  std::set<std::string> ids;
  for (const auto& t : more.trips) ids.insert(t.id);
  CHECK(ids.size() == more.trips.size());
  const auto it = std::find_if(more.trips.begin(), more.trips.end(),
                               [&](const Trip& t) { return !t.route.empty() && t.route.front() == o && t.route.back() == d && t.depart == 10.0; });
  REQUIRE(it != more.trips.end());
  CHECK(it->route == shortest_path(g, o, d, Weight::time));
  CHECK_THROWS_AS(add_vehicle(g, base, "nope", d, 0), UnknownEdge);
  const auto dia = diamond();
  CHECK_THROWS_AS(add_vehicle(dia, DemandSet{default_vehicle_types(), {}, 3600}, "out", "in", 0), NoPath);
}

TEST_CASE("reroute_invalidated after an edge removal") {
  const auto g = net::generate_grid(5, 5, 200);
  const auto demand = generate_demand(g, 800, 3600, 42, {0.5});
  std::vector<std::string> gone;
  for (const auto& e : net::find_edges_by_name(g, g.edges()[10].street_name)) gone.push_back(e.id);
  const auto cut = net::remove_edges(g, gone).network;
  const auto r = reroute_invalidated(g, cut, demand);
  CHECK(r.rerouted > 0);
  CHECK(r.demand.trips.size() + static_cast<std::size_t>(r.dropped) == demand.trips.size());
  for (const auto& t : r.demand.trips) CHECK(route_is_connected(cut, t.route));

  const auto same = reroute_invalidated(g, g, demand);
  CHECK(same.rerouted == 0);
  CHECK(same.demand == demand);
}

TEST_CASE("rou.xml round trip") {
  const auto g = net::generate_grid(3, 3, 150);
  const auto d = generate_demand(g, 300, 900, 5, {0.5});
  const auto xml = emit_rou_xml(d);
  const auto back = parse_rou_xml(xml, 900);
  CHECK(back == d);
  CHECK(emit_rou_xml(back) == xml);
  for (const auto* tag : {"<routes", "<vType id=", "emissionClass=", "<vehicle id=", "<route edges="})
    CHECK(xml.find(tag) != std::string::npos);
  CHECK_THROWS_AS(parse_rou_xml("<routes><vehicle", 1), ParseError);
}

TEST_CASE("default vehicle types") {
  const auto types = default_vehicle_types();
  REQUIRE(types.size() == 2);
  for (const auto& t : types) {
    CHECK(t.length > 0);
    CHECK(t.max_accel > 0);
    CHECK(t.max_decel > 0);
    CHECK(t.max_speed > 0);
  }
  DemandSet d{types, {}, 3600};
  CHECK(d.vtype(kElectricType).propulsion == Propulsion::electric);
  CHECK(d.vtype(kGasolineType).propulsion == Propulsion::gasoline);
}
