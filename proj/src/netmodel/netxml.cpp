#include <algorithm>
#include <map>
#include <sstream>

#include "roadchat/errors.hpp"
#include "roadchat/netmodel.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::net {

namespace {

using xml::format_number;

std::string lane_id(const Edge& e, int index) { return e.id + "_" + std::to_string(index); }

std::string format_shape(const std::vector<Point>& shape) {
  std::string out;
  for (const auto& p : shape) {
    if (!out.empty()) out += ' ';
    out += format_number(p.x) + "," + format_number(p.y);
  }
  return out;
}

std::vector<Point> parse_shape(const std::string& text) {
  std::vector<Point> shape;
  std::istringstream in(text);
  std::string pair;
  while (in >> pair) {
    auto comma = pair.find(',');
    if (comma == std::string::npos) throw ParseError("bad shape point '" + pair + "'");
    shape.push_back({xml::parse_number(pair.substr(0, comma)), xml::parse_number(pair.substr(comma + 1))});
  }
  return shape;
}

constexpr std::string_view kProjPrefix = "+proj=eqc";

}  // namespace

std::string expand_state_to_lanes(const RoadNetwork& net, std::size_t light, std::string_view state) {
  std::string out;
  const auto& links = net.light_links(light);
  for (std::size_t k = 0; k < links.size(); ++k) {
    const auto& from = net.edges()[net.connections()[links[k]].from_edge];
    out.append(static_cast<std::size_t>(from.lane_count), state[k]);
  }
  return out;
}

std::string emit_net_xml(const RoadNetwork& net) {
  xml::Writer w;
  w.open("net", {{"version", "1.16"}, {"junctionCornerDetail", "5"}, {"limitTurnSpeed", "5.50"}});

  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  if (!net.nodes().empty()) {
    min_x = max_x = net.nodes().front().x;
    min_y = max_y = net.nodes().front().y;
  }
  for (const auto& n : net.nodes()) {
    min_x = std::min(min_x, n.x);
    max_x = std::max(max_x, n.x);
    min_y = std::min(min_y, n.y);
    max_y = std::max(max_y, n.y);
  }
  const auto boundary = format_number(min_x) + "," + format_number(min_y) + "," +
                        format_number(max_x) + "," + format_number(max_y);
  std::string projection = "!";
  if (const auto& origin = net.projection().origin) {
    projection = std::string(kProjPrefix) + " +lat_0=" + format_number(origin->lat) +
                 " +lon_0=" + format_number(origin->lon);
  }
  w.leaf("location", {{"netOffset", "0,0"},
                      {"convBoundary", boundary},
                      {"origBoundary", boundary},
                      {"projParameter", projection}});

  for (const auto& e : net.edges()) {
    xml::Attributes attrs = {{"id", e.id}, {"from", e.from}, {"to", e.to},
                             {"priority", std::to_string(e.priority)}};
    if (!e.type.empty()) attrs.emplace_back("type", e.type);
    if (!e.street_name.empty()) attrs.emplace_back("name", e.street_name);
    w.open("edge", attrs);
    for (int i = 0; i < e.lane_count; ++i) {
      w.leaf("lane", {{"id", lane_id(e, i)},
                      {"index", std::to_string(i)},
                      {"speed", format_number(e.speed_limit)},
                      {"length", format_number(e.length)},
                      {"shape", format_shape(e.shape)}});
    }
    w.close();
  }

  for (std::size_t l = 0; l < net.traffic_lights().size(); ++l) {
    const auto& light = net.traffic_lights()[l];
    w.open("tlLogic", {{"id", light.id},
                       {"type", "static"},
                       {"programID", light.program_id},
                       {"offset", format_number(light.offset)}});
    for (const auto& phase : light.phases) {
      w.leaf("phase", {{"duration", format_number(phase.duration)},
                       {"state", expand_state_to_lanes(net, l, phase.state)}});
    }
    w.close();
  }

  for (std::size_t n = 0; n < net.nodes().size(); ++n) {
    const auto& node = net.nodes()[n];
    std::string type = "priority";
    if (net.light_index(node.id)) {
      type = "traffic_light";
    } else if (net.outgoing_edges(n).empty()) {
      type = "dead_end";
    }
    std::string inc_lanes;
    for (auto e : net.incoming_edges(n)) {
      for (int i = 0; i < net.edges()[e].lane_count; ++i) {
        if (!inc_lanes.empty()) inc_lanes += ' ';
        inc_lanes += lane_id(net.edges()[e], i);
      }
    }
    w.leaf("junction", {{"id", node.id},
                        {"type", type},
                        {"x", format_number(node.x)},
                        {"y", format_number(node.y)},
                        {"incLanes", inc_lanes},
                        {"intLanes", ""},
                        {"shape", ""}});
  }

  std::vector<int> lane_link_counter(net.traffic_lights().size(), 0);
  for (const auto& c : net.connections()) {
    const auto& from = net.edges()[c.from_edge];
    const auto& to = net.edges()[c.to_edge];
    for (int i = 0; i < from.lane_count; ++i) {
      xml::Attributes attrs = {{"from", from.id},
                               {"to", to.id},
                               {"fromLane", std::to_string(i)},
                               {"toLane", std::to_string(std::min(i, to.lane_count - 1))}};
      if (c.light) {
        attrs.emplace_back("tl", net.traffic_lights()[*c.light].id);
        attrs.emplace_back("linkIndex", std::to_string(lane_link_counter[*c.light]++));
      }
      attrs.emplace_back("dir", "s");
      attrs.emplace_back("state", c.light ? "O" : "M");
      w.leaf("connection", attrs);
    }
  }
  return w.finish();
}

RoadNetwork parse_net_xml(std::string_view xml_text) {
  const auto root = xml::parse(xml_text);
  if (root.name != "net") throw ParseError("root element is <" + root.name + ">, expected <net>");

  Projection projection;
  if (const auto* location = root.first_child("location")) {
    if (const auto* proj = location->find_attribute("projParameter");
        proj && proj->starts_with(kProjPrefix)) {
      std::istringstream in(*proj);
      std::string token;
      geodata::GeoPoint origin;
      while (in >> token) {
        if (token.starts_with("+lat_0=")) origin.lat = xml::parse_number(token.substr(7));
        if (token.starts_with("+lon_0=")) origin.lon = xml::parse_number(token.substr(7));
      }
      projection.origin = origin;
    }
  }

  std::vector<Node> nodes;
  for (const auto* j : root.children_named("junction")) {
    nodes.push_back({j->attribute("id"), j->number("x"), j->number("y"), false});
  }

  std::vector<Edge> edges;
  for (const auto* e : root.children_named("edge")) {
    if (const auto* fn = e->find_attribute("function"); fn && *fn == "internal") continue;
    Edge edge;
    edge.id = e->attribute("id");
    edge.from = e->attribute("from");
    edge.to = e->attribute("to");
    edge.priority = static_cast<int>(e->integer("priority"));
    if (const auto* t = e->find_attribute("type")) edge.type = *t;
    if (const auto* n = e->find_attribute("name")) edge.street_name = *n;
    auto lanes = e->children_named("lane");
    if (lanes.empty()) throw ParseError("edge '" + edge.id + "' has no lanes");
    const auto* lane0 = *std::min_element(lanes.begin(), lanes.end(), [](auto* a, auto* b) {
      return a->integer("index") < b->integer("index");
    });
    edge.lane_count = static_cast<int>(lanes.size());
    edge.speed_limit = lane0->number("speed");
    edge.length = lane0->number("length");
    edge.shape = parse_shape(lane0->attribute("shape"));
    edges.push_back(std::move(edge));
  }

  RoadNetwork topology;
  try {
    topology = RoadNetwork::build(std::move(nodes), std::move(edges), {}, projection);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("inconsistent network: ") + e.what());
  }

  // Lane-level states collapse back onto edge-level links: every lane of a link shares its char.
  std::vector<TrafficLight> lights;
  for (const auto* tl : root.children_named("tlLogic")) {
    TrafficLight light;
    light.id = tl->attribute("id");
    light.program_id = tl->attribute("programID");
    light.offset = tl->number("offset");
    auto node = topology.node_index(light.id);
    if (!node) throw ParseError("tlLogic '" + light.id + "' is not at a junction");
    std::vector<std::size_t> first_lane;
    std::size_t position = 0;
    for (auto e : topology.incoming_edges(*node)) {
      for ([[maybe_unused]] auto c : topology.outgoing_connections(e)) {
        first_lane.push_back(position);
        position += static_cast<std::size_t>(topology.edges()[e].lane_count);
      }
    }
    for (const auto* p : tl->children_named("phase")) {
      const auto& lane_state = p->attribute("state");
      if (lane_state.size() != position) {
        throw ParseError("tlLogic '" + light.id + "' state length does not match its links");
      }
      std::string state;
      for (auto start : first_lane) state += lane_state[start];
      light.phases.push_back({p->number("duration"), state});
    }
    lights.push_back(std::move(light));
  }
  try {
    return topology.with_lights(std::move(lights));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("inconsistent traffic lights: ") + e.what());
  }
}

}  // namespace roadchat::net
