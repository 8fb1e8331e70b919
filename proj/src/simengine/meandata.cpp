#include "roadchat/errors.hpp"
#include "roadchat/sim.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::sim {

std::string emit_edge_data_xml(const net::RoadNetwork& net, const SimOutput& out, const std::string& interval_id) {
  using xml::format_number;
  xml::Writer w;
  w.open("meandata");
  w.open("interval", {{"begin", "0"}, {"end", format_number(out.end_time)}, {"id", interval_id}});
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    w.leaf("edge", {{"id", net.edges()[e].id},
                    {"sampledSeconds", format_number(out.edge_sampled_seconds.at(e))},
                    {"density", format_number(out.edge_density.at(e))}});
  }
  w.close();
  return w.finish();
}

std::vector<EdgeDataRow> parse_edge_data_xml(std::string_view xml_text) {
  const auto root = xml::parse(xml_text);
  if (root.name != "meandata") throw ParseError("root element is <" + root.name + ">, expected <meandata>");
  std::vector<EdgeDataRow> rows;
  for (const auto* interval : root.children_named("interval")) {
    for (const auto* e : interval->children_named("edge")) {
      rows.push_back({e->attribute("id"), e->number("density"), e->number("sampledSeconds")});
    }
  }
  return rows;
}

}  // namespace roadchat::sim
