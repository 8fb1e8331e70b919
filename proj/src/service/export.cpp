#include <fstream>
#include <sstream>

#include "roadchat/errors.hpp"
#include "roadchat/service.hpp"
#include "roadchat/signal.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::service {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const xml::Element* value_of(const xml::Element* section, std::string_view name) {
  return section ? section->first_child(name) : nullptr;
}

}  // namespace

std::string emit_sumocfg(const SumoConfig& config) {
  xml::Writer w;
  w.open("configuration");
  w.open("input");
  w.leaf("net-file", {{"value", config.net_file}});
  if (!config.route_files.empty()) w.leaf("route-files", {{"value", join(config.route_files)}});
  if (!config.additional_files.empty()) w.leaf("additional-files", {{"value", join(config.additional_files)}});
  w.close();
  w.open("time");
  w.leaf("begin", {{"value", xml::format_number(config.begin)}});
  w.leaf("end", {{"value", xml::format_number(config.end)}});
  w.close();
  w.close();
  return w.finish();
}

SumoConfig parse_sumocfg(std::string_view xml_text) {
  const auto root = xml::parse(xml_text);
  if (root.name != "configuration") throw ParseError("root element is <" + root.name + ">, expected <configuration>");
  const auto* input = root.first_child("input");
  const auto* net = value_of(input, "net-file");
  if (!net) throw ParseError("sumocfg has no <net-file>");
  SumoConfig c;
  c.net_file = net->attribute("value");
  if (const auto* r = value_of(input, "route-files")) c.route_files = split_list(r->attribute("value"));
  if (const auto* a = value_of(input, "additional-files")) c.additional_files = split_list(a->attribute("value"));
  const auto* time = root.first_child("time");
  if (const auto* b = value_of(time, "begin")) c.begin = b->number("value");
  if (const auto* e = value_of(time, "end")) c.end = e->number("value");
  return c;
}

FileBundle make_bundle(const net::RoadNetwork& net, const demand::DemandSet& demand,
                       const std::optional<std::string>& add_xml, double end_time) {
  FileBundle files;
  SumoConfig cfg;
  cfg.net_file = kNetFile;
  cfg.route_files = {kRouFile};
  cfg.end = end_time;
  files[kNetFile] = net::emit_net_xml(net);
  files[kRouFile] = demand::emit_rou_xml(demand);
  if (add_xml) {
    files[kAddFile] = *add_xml;
    cfg.additional_files = {kAddFile};
  }
  files[kCfgFile] = emit_sumocfg(cfg);
  return files;
}

LoadedBundle load_bundle(const std::filesystem::path& sumocfg_path, double duration) {
  LoadedBundle out;
  out.config = parse_sumocfg(slurp(sumocfg_path));
  const auto dir = sumocfg_path.parent_path();
  out.network = net::parse_net_xml(slurp(dir / out.config.net_file));
  for (const auto& add : out.config.additional_files) {
    out.network = signal::apply_tls_overrides(out.network, signal::parse_tls_add_xml(slurp(dir / add)));
  }
  if (out.config.route_files.size() > 1) throw ParseError("only one route file is supported");
  if (out.config.route_files.empty()) {
    out.demand.duration = duration;
  } else {
    out.demand = demand::parse_rou_xml(slurp(dir / out.config.route_files.front()), duration);
  }
  return out;
}

}  // namespace roadchat::service
