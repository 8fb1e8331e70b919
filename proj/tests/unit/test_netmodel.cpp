#include <doctest.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/geodata.hpp"
#include "roadchat/netmodel.hpp"
#include "support.hpp"

using namespace roadchat;
using namespace roadchat::net;

namespace {

RoadNetwork albany() {
  return convert_osm(geodata::parse_osm_xml(testing::read_text(testing::fixture("albany/albany.osm"))));
}

std::size_t junction_count(const RoadNetwork& n) {
  std::size_t c = 0;
  for (const auto& node : n.nodes()) c += node.is_junction ? 1 : 0;
  return c;
}

std::vector<std::string> ids_named(const RoadNetwork& n, const std::string& name) {
  std::vector<std::string> out;
  for (const auto& e : find_edges_by_name(n, name)) out.push_back(e.id);
  return out;
}

void check_lights_valid(const RoadNetwork& n) {
  for (std::size_t i = 0; i < n.traffic_lights().size(); ++i) {
    const auto& tl = n.traffic_lights()[i];
    REQUIRE_FALSE(tl.phases.empty());
    for (const auto& p : tl.phases) {
      CHECK(p.duration > 0);
      CHECK(p.state.size() == n.light_links(i).size());
      CHECK(p.state.find_first_not_of("Ggyr") == std::string::npos);
    }
    CHECK(tl.offset >= 0);
    CHECK(tl.offset < tl.cycle());
  }
}

}  // namespace

TEST_CASE("grid generator") {
  auto g = generate_grid(2, 2, 100);
  CHECK(g.nodes().size() == 4);
  CHECK(g.edges().size() == 8);

  g = generate_grid(5, 5, 200);
  CHECK(g.nodes().size() == 25);
  CHECK(g.edges().size() == 2 * (5 * 4 + 5 * 4));
  CHECK(g.traffic_lights().size() == 9);  // interior nodes
  CHECK(is_weakly_connected(g));
  check_lights_valid(g);
  for (const auto& e : g.edges()) CHECK(e.length == doctest::Approx(200));

  CHECK_THROWS_AS(generate_grid(1, 5, 100), InvalidArgument);
  CHECK_THROWS_AS(generate_grid(3, 3, 0), InvalidArgument);
}

TEST_CASE("spider generator") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = generate_spider(20, 10, 150);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s.nodes().size() == 20 * 10 + 1);
  CHECK(s.edges().size() == 2 * (20 * 10 + 20 * 10));
  CHECK(is_weakly_connected(s));
  CHECK(secs < 1.0);
  check_lights_valid(s);

  const auto small = generate_spider(3, 1, 100);
  CHECK(small.nodes().size() == 4);
  CHECK(small.edges().size() == 12);
  CHECK_THROWS_AS(generate_spider(2, 1, 100), InvalidArgument);
  CHECK_THROWS_AS(generate_spider(5, 0, 100), InvalidArgument);
}

TEST_CASE("generators are connected over a parameter sweep") {
  for (int r = 2; r <= 6; ++r)
    for (int c = 2; c <= 6; ++c) {
      const auto g = generate_grid(r, c, 50.0 + r * c);
      CHECK(g.edges().size() == static_cast<std::size_t>(2 * (r * (c - 1) + c * (r - 1))));
      CHECK(is_weakly_connected(g));
    }
  for (int a = 3; a <= 8; ++a)
    for (int k = 1; k <= 4; ++k) {
      const auto s = generate_spider(a, k, 120);
      CHECK(s.nodes().size() == static_cast<std::size_t>(a * k + 1));
      CHECK(s.edges().size() == static_cast<std::size_t>(4 * a * k));
      CHECK(is_weakly_connected(s));
      check_lights_valid(s);
    }
}

TEST_CASE("convert tiny_cross") {
  const auto n = convert_osm(geodata::parse_osm_xml(testing::read_text(testing::fixture("tiny_cross.osm"))));
  CHECK(n.edges().size() == 8);
  CHECK(n.nodes().size() == 5);
  CHECK(junction_count(n) == 1);
  CHECK(n.traffic_lights().empty());
  for (const auto& e : n.edges()) {
    CHECK(e.lane_count == 1);
    CHECK(e.speed_limit == doctest::Approx(8.3));  // residential default
  }
}

TEST_CASE("convert minimal and empty documents") {
  const auto one = convert_osm(geodata::parse_osm_xml(R"(<osm>
    <node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.001"/>
    <way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="primary"/><tag k="oneway" v="yes"/>
      <tag k="maxspeed" v="30 mph"/></way></osm>)"));
  CHECK(one.edges().size() == 1);
  CHECK(junction_count(one) == 0);
  CHECK(one.edges()[0].lane_count == 2);
  CHECK(one.edges()[0].speed_limit == doctest::Approx(30 * 0.44704));

  CHECK_THROWS_AS(convert_osm(geodata::parse_osm_xml(R"(<osm>
    <node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="0.001"/>
    <way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="footway"/></way></osm>)")),
                  EmptyNetwork);
  CHECK_THROWS_AS(convert_osm(geodata::OsmDocument{}), EmptyNetwork);
}

TEST_CASE("convert the Albany fixture to the oracle counts") {
  const auto expected = nlohmann::json::parse(testing::read_text(testing::fixture("albany/expected.json")));
  const auto n = albany();
  CHECK(n.nodes().size() == expected.at("nodes").get<std::size_t>());
  CHECK(n.edges().size() == expected.at("edges").get<std::size_t>());
  CHECK(n.traffic_lights().size() == expected.at("traffic_lights").get<std::size_t>());
  std::map<std::string, std::size_t> per_name;
  for (const auto& e : n.edges()) ++per_name[e.street_name];
  for (const auto& [name, count] : expected.at("edges_per_name").items()) {
    INFO(name);
    CHECK(per_name[name] == count.get<std::size_t>());
  }
  CHECK(is_weakly_connected(n));
  check_lights_valid(n);

  for (const auto& e : n.edges()) {
    const auto& a = n.nodes()[n.from_node(n.edge_index(e.id).value())];
    const auto& b = n.nodes()[n.to_node(n.edge_index(e.id).value())];
    CHECK(e.length >= std::hypot(a.x - b.x, a.y - b.y) - 1e-6);
    CHECK(e.length > 0);
    CHECK(e.lane_count >= 1);
    CHECK(e.speed_limit > 0);
  }

  const auto wash = find_edges_by_name(n, "washington avenue");
  REQUIRE_FALSE(wash.empty());
  for (const auto& e : wash) CHECK(e.lane_count == 2);  // lanes=4 over two directions
  for (const auto& e : find_edges_by_name(n, "South Pearl Street")) CHECK(e.speed_limit == doctest::Approx(13.4112));
}

TEST_CASE("net.xml self round trip is byte stable") {
  for (const auto& n : {albany(), generate_grid(3, 4, 150), generate_spider(5, 3, 100)}) {
    const auto xml = emit_net_xml(n);
    const auto back = parse_net_xml(xml);
    CHECK(back == n);
    CHECK(emit_net_xml(back) == xml);
    CHECK(emit_net_xml(n) == xml);
  }
  CHECK(emit_net_xml(albany()) == emit_net_xml(albany()));
  CHECK_THROWS_AS(parse_net_xml("<net><edge id="), ParseError);
  CHECK_THROWS_AS(parse_net_xml("<routes/>"), ParseError);
}

TEST_CASE("net.xml has the expected SUMO elements") {
  const auto xml = emit_net_xml(generate_grid(3, 3, 100));
  for (const auto* tag : {"<net", "<edge id=", "<lane id=", "<junction id=", "<tlLogic id=", "type=\"static\"",
                          "<phase duration=", "<connection from="}) {
    CHECK(xml.find(tag) != std::string::npos);
  }
}

TEST_CASE("find_edges_by_name") {
  const auto n = albany();
  CHECK(find_edges_by_name(n, "Madison Avenue").size() == 14);
  CHECK(find_edges_by_name(n, "MADISON AVENUE").size() == 14);
  CHECK(find_edges_by_name(n, "Nowhere Road").empty());
  CHECK_THROWS_AS(find_edges_by_name(n, ""), InvalidArgument);
  const auto ids = ids_named(n, "Madison Avenue");
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(street_names_matching(n, "madison") == std::vector<std::string>{"Madison Avenue", "Madison Place"});
}

TEST_CASE("remove_edges") {
  const auto n = albany();
  const auto ids = ids_named(n, "Lark Street");
  const auto r = remove_edges(n, ids);
  CHECK(r.network.edges().size() <= n.edges().size() - ids.size());
  CHECK(find_edges_by_name(r.network, "Lark Street").empty());
  CHECK(n.edges().size() == 103);  // original untouched
  CHECK(is_weakly_connected(r.network));
  CHECK_THROWS_AS(remove_edges(n, {"no-such-edge"}), UnknownEdge);

  // A street whose removal leaves the graph connected changes the count by exactly its edges.
  const auto g = generate_grid(4, 4, 100);
  const auto rg = remove_edges(g, {g.edges()[0].id});
  CHECK(rg.network.edges().size() == g.edges().size() - 1);
  CHECK(rg.warnings.empty());
  for (const auto& c : rg.network.connections()) {
    CHECK(c.from_edge < rg.network.edges().size());
    CHECK(c.to_edge < rg.network.edges().size());
  }
}

TEST_CASE("remove_edges prunes a cut-off component") {
  // Two triangles joined by a single two-way bridge.
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  const std::vector<std::pair<double, double>> xy = {{0, 0}, {100, 0}, {50, 80}, {300, 0}, {400, 0}, {350, 80}, {400, 80}};
  for (std::size_t i = 0; i < xy.size(); ++i) nodes.push_back({"n" + std::to_string(i), xy[i].first, xy[i].second, false});
  auto link = [&](int a, int b) {
    for (int d = 0; d < 2; ++d) {
      const auto& f = nodes[static_cast<std::size_t>(d ? b : a)];
      const auto& t = nodes[static_cast<std::size_t>(d ? a : b)];
      Edge e;
      e.id = f.id + "_" + t.id;
      e.from = f.id;
      e.to = t.id;
      e.length = std::hypot(f.x - t.x, f.y - t.y);
      e.shape = {{f.x, f.y}, {t.x, t.y}};
      edges.push_back(e);
    }
  };
  link(0, 1), link(1, 2), link(2, 0);
  link(3, 4), link(4, 5), link(5, 3), link(4, 6);
  link(1, 3);  // bridge
  const auto net = RoadNetwork::build(nodes, edges, {});
  CHECK(is_weakly_connected(net));
  const auto r = remove_edges(net, {"n1_n3", "n3_n1"});
  CHECK(r.network.edges().size() == 8);  // larger side: 4 segments
  CHECK(r.warnings.size() == 1);
  CHECK(is_weakly_connected(r.network));
  CHECK(r.network.node_index("n6").has_value());
  CHECK_FALSE(r.network.node_index("n0").has_value());
}

TEST_CASE("remove_edges is commutative and idempotent over disjoint sets") {
  const auto g = generate_grid(5, 5, 100);
  std::mt19937_64 rng(11);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::string> all;
    for (const auto& e : g.edges()) all.push_back(e.id);
    std::shuffle(all.begin(), all.end(), rng);
    const std::vector<std::string> a(all.begin(), all.begin() + 2), b(all.begin() + 2, all.begin() + 4);
    const auto ab = remove_edges(remove_edges(g, a).network, b).network;
    const auto ba = remove_edges(remove_edges(g, b).network, a).network;
    CHECK(emit_net_xml(ab) == emit_net_xml(ba));
    const auto once = remove_edges(g, a).network;
    // Re-removing the same ids is an error, so idempotence is checked as "already gone".
    for (const auto& id : a) CHECK_FALSE(once.edge_index(id).has_value());
  }
}

TEST_CASE("remove_lane") {
  const auto n = albany();
  const auto wash = ids_named(n, "Washington Avenue");
  const auto id = wash.front();
  const auto r = remove_lane(n, id, 0);
  CHECK(r.edge(id).lane_count == n.edge(id).lane_count - 1);
  CHECK(r.edges().size() == n.edges().size());
  CHECK_THROWS_AS(remove_lane(r, id, 0), LastLane);
  CHECK_THROWS_AS(remove_lane(n, id, 2), InvalidArgument);
  CHECK_THROWS_AS(remove_lane(n, id, -1), InvalidArgument);
  CHECK_THROWS_AS(remove_lane(n, "nope", 0), UnknownEdge);
  CHECK(parse_net_xml(emit_net_xml(r)) == r);
}

TEST_CASE("edits keep traffic light programs consistent") {
  const auto g = generate_grid(5, 5, 200);
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    auto net = g;
    for (int k = 0; k < 3; ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, net.edges().size() - 1);
      net = remove_edges(net, {net.edges()[pick(rng)].id}).network;
      check_lights_valid(net);
      CHECK(is_weakly_connected(net));
    }
  }
}

TEST_CASE("default program and approach groups") {
  const auto g = generate_grid(3, 3, 100);
  const auto centre = g.node_index(g.traffic_lights().front().id).value();
  const auto tl = default_program(g, centre);
  CHECK(tl.cycle() == doctest::Approx(70.0));
  CHECK(tl.offset == 0.0);
  const auto groups = approach_groups(g, centre);
  CHECK(std::count(groups.begin(), groups.end(), 0) == 2);
  CHECK(std::count(groups.begin(), groups.end(), 1) == 2);
}
