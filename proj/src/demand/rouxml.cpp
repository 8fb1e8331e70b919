#include <sstream>

#include "roadchat/demand.hpp"
#include "roadchat/errors.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::demand {

namespace {
constexpr std::string_view kElectricClass = "Energy/unknown";
}

std::string emit_rou_xml(const DemandSet& demand) {
  using xml::format_number;
  xml::Writer w;
  w.open("routes");
  for (const auto& t : demand.vtypes) {
    w.leaf("vType", {{"id", t.id},
                     {"vClass", "passenger"},
                     {"accel", format_number(t.max_accel)},
                     {"decel", format_number(t.max_decel)},
                     {"length", format_number(t.length)},
                     {"maxSpeed", format_number(t.max_speed)},
                     {"emissionClass", t.emission_class}});
  }
  for (const auto& trip : demand.trips) {
    w.open("vehicle", {{"id", trip.id}, {"type", trip.vtype}, {"depart", format_number(trip.depart)}});
    std::string edges;
    for (const auto& e : trip.route) {
      if (!edges.empty()) edges += ' ';
      edges += e;
    }
    w.leaf("route", {{"edges", edges}});
    w.close();
  }
  return w.finish();
}

DemandSet parse_rou_xml(std::string_view xml_text, double duration_s) {
  const auto root = xml::parse(xml_text);
  if (root.name != "routes") throw ParseError("root element is <" + root.name + ">, expected <routes>");
  DemandSet demand;
  demand.duration = duration_s;
  for (const auto* v : root.children_named("vType")) {
    VehicleType t;
    t.id = v->attribute("id");
    t.max_accel = v->number("accel");
    t.max_decel = v->number("decel");
    t.length = v->number("length");
    t.max_speed = v->number("maxSpeed");
    t.emission_class = v->attribute("emissionClass");
    t.propulsion = t.emission_class == kElectricClass ? Propulsion::electric : Propulsion::gasoline;
    demand.vtypes.push_back(std::move(t));
  }
  for (const auto* v : root.children_named("vehicle")) {
    Trip trip;
    trip.id = v->attribute("id");
    trip.vtype = v->attribute("type");
    trip.depart = v->number("depart");
    const auto* route = v->first_child("route");
    if (!route) throw ParseError("vehicle '" + trip.id + "' has no <route>");
    std::istringstream in(route->attribute("edges"));
    std::string edge;
    while (in >> edge) trip.route.push_back(edge);
    if (trip.route.empty()) throw ParseError("vehicle '" + trip.id + "' has an empty route");
    demand.vtype(trip.vtype);
    demand.trips.push_back(std::move(trip));
  }
  return demand;
}

}  // namespace roadchat::demand
