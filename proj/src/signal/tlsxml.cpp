#include "roadchat/errors.hpp"
#include "roadchat/signal.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::signal {

std::string emit_tls_add_xml(const net::RoadNetwork& net, TlsFileKind kind) {
  using xml::format_number;
  xml::Writer w;
  w.open("additional");
  for (std::size_t l = 0; l < net.traffic_lights().size(); ++l) {
    const auto& light = net.traffic_lights()[l];
    if (kind == TlsFileKind::offsets) {
      w.leaf("tlLogic", {{"id", light.id}, {"programID", light.program_id}, {"offset", format_number(light.offset)}});
      continue;
    }
    w.open("tlLogic", {{"id", light.id},
                       {"type", "static"},
                       {"programID", kAdaptedProgramId},
                       {"offset", format_number(light.offset)}});
    for (const auto& phase : light.phases) {
      w.leaf("phase", {{"duration", format_number(phase.duration)},
                       {"state", net::expand_state_to_lanes(net, l, phase.state)}});
    }
    w.close();
  }
  return w.finish();
}

std::vector<TlsOverride> parse_tls_add_xml(std::string_view xml_text) {
  const auto root = xml::parse(xml_text);
  if (root.name != "additional") throw ParseError("root element is <" + root.name + ">, expected <additional>");
  std::vector<TlsOverride> out;
  for (const auto* tl : root.children_named("tlLogic")) {
    TlsOverride o;
    o.id = tl->attribute("id");
    o.program_id = tl->attribute("programID");
    o.offset = tl->number("offset");
    const auto phases = tl->children_named("phase");
    if (!phases.empty()) {
      o.lane_phases.emplace();
      for (const auto* p : phases) o.lane_phases->push_back({p->number("duration"), p->attribute("state")});
    }
    out.push_back(std::move(o));
  }
  return out;
}

net::RoadNetwork apply_tls_overrides(const net::RoadNetwork& net, const std::vector<TlsOverride>& overrides) {
  auto lights = net.traffic_lights();
  for (const auto& o : overrides) {
    const auto l = net.light_index(o.id);
    if (!l) throw ParseError("tlLogic '" + o.id + "' does not match a traffic light");
    auto& light = lights[*l];
    light.offset = o.offset;
    if (!o.lane_phases) continue;
    const auto& links = net.light_links(*l);
    std::vector<std::size_t> first_lane;
    std::size_t position = 0;
    for (auto c : links) {
      first_lane.push_back(position);
      position += static_cast<std::size_t>(net.edges()[net.connections()[c].from_edge].lane_count);
    }
    light.phases.clear();
    for (const auto& p : *o.lane_phases) {
      if (p.state.size() != position) throw ParseError("tlLogic '" + o.id + "' state length does not match its links");
      std::string state;
      for (auto start : first_lane) state += p.state[start];
      light.phases.push_back({p.duration, state});
    }
  }
  try {
    return net.with_lights(std::move(lights));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("inconsistent traffic light override: ") + e.what());
  }
}

}  // namespace roadchat::signal
