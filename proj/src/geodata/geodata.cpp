#include "roadchat/geodata.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "roadchat/errors.hpp"
#include "roadchat/http_client.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::geodata {

namespace {

std::string normalize_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FetchFailed("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void check_point(const GeoPoint& p, long long id) {
  if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
    throw ParseError("node " + std::to_string(id) + " has out-of-range coordinates");
  }
}

}  // namespace

bool is_supported_highway(std::string_view highway_class) {
  static const std::set<std::string, std::less<>> kBase = {
      "motorway", "trunk", "primary", "secondary", "tertiary",
      "residential", "unclassified", "living_street", "service"};
  if (kBase.contains(highway_class)) return true;
  constexpr std::string_view kLink = "_link";
  if (highway_class.size() > kLink.size() && highway_class.ends_with(kLink)) {
    auto base = highway_class.substr(0, highway_class.size() - kLink.size());
    return base == "motorway" || base == "trunk" || base == "primary" || base == "secondary" ||
           base == "tertiary";
  }
  return false;
}

BoundingBox bbox_around(const GeoPoint& center, double radius_m) {
  if (!(radius_m > 0.0)) throw InvalidArgument("bbox_around: radius must be positive");
  const double half_lat = radius_m / kMetersPerDegreeLat;
  const double half_lon =
      radius_m / (kMetersPerDegreeLat * std::cos(center.lat * std::numbers::pi / 180.0));
  return {center.lat - half_lat, center.lon - half_lon, center.lat + half_lat,
          center.lon + half_lon};
}

OsmDocument parse_osm_xml(std::string_view xml_text) {
  const auto root = xml::parse(xml_text);
  if (root.name != "osm") throw ParseError("root element is <" + root.name + ">, expected <osm>");

  OsmDocument all;
  for (const auto& child : root.children) {
    if (child.name == "node") {
      OsmNode node;
      node.position = {child.number("lat"), child.number("lon")};
      const auto id = child.integer("id");
      check_point(node.position, id);
      for (const auto* tag : child.children_named("tag")) {
        node.tags[tag->attribute("k")] = tag->attribute("v");
      }
      all.nodes.emplace(id, std::move(node));
    } else if (child.name == "way") {
      OsmWay way;
      for (const auto* nd : child.children_named("nd")) way.node_refs.push_back(nd->integer("ref"));
      for (const auto* tag : child.children_named("tag")) {
        way.tags[tag->attribute("k")] = tag->attribute("v");
      }
      all.ways.emplace(child.integer("id"), std::move(way));
    }
  }

  OsmDocument doc;
  std::set<long long> used;
  for (auto& [id, way] : all.ways) {
    auto highway = way.tags.find("highway");
    if (highway == way.tags.end() || !is_supported_highway(highway->second)) continue;
    for (auto ref : way.node_refs) {
      if (!all.nodes.contains(ref)) {
        throw ParseError("way " + std::to_string(id) + " references missing node " +
                         std::to_string(ref));
      }
    }
    if (way.node_refs.size() < 2) continue;
    used.insert(way.node_refs.begin(), way.node_refs.end());
    doc.ways.emplace(id, std::move(way));
  }
  for (auto id : used) doc.nodes.emplace(id, all.nodes.at(id));
  return doc;
}

std::string emit_osm_xml(const OsmDocument& doc) {
  xml::Writer w;
  w.open("osm", {{"version", "0.6"}, {"generator", "roadchat"}});
  for (const auto& [id, node] : doc.nodes) {
    xml::Attributes attrs = {{"id", std::to_string(id)},
                             {"lat", xml::format_number(node.position.lat)},
                             {"lon", xml::format_number(node.position.lon)}};
    if (node.tags.empty()) {
      w.leaf("node", attrs);
      continue;
    }
    w.open("node", attrs);
    for (const auto& [k, v] : node.tags) w.leaf("tag", {{"k", k}, {"v", v}});
    w.close();
  }
  for (const auto& [id, way] : doc.ways) {
    w.open("way", {{"id", std::to_string(id)}});
    for (auto ref : way.node_refs) w.leaf("nd", {{"ref", std::to_string(ref)}});
    for (const auto& [k, v] : way.tags) w.leaf("tag", {{"k", k}, {"v", v}});
    w.close();
  }
  return w.finish();
}

OsmDocument clip_to_box(const OsmDocument& doc, const BoundingBox& box) {
  OsmDocument out;
  for (const auto& [id, way] : doc.ways) {
    bool inside = std::any_of(way.node_refs.begin(), way.node_refs.end(), [&](long long ref) {
      return box.contains(doc.nodes.at(ref).position);
    });
    if (!inside) continue;
    out.ways.emplace(id, way);
    for (auto ref : way.node_refs) out.nodes.emplace(ref, doc.nodes.at(ref));
  }
  return out;
}

Gazetteer Gazetteer::parse(std::string_view text) {
  Gazetteer g;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, lat, lon;
    if (!std::getline(fields, name, '\t') || !std::getline(fields, lat, '\t') ||
        !std::getline(fields, lon, '\t')) {
      throw ParseError("gazetteer line " + std::to_string(line_no) + " needs 3 tab-separated fields");
    }
    GeoPoint p{xml::parse_number(lat), xml::parse_number(lon)};
    check_point(p, line_no);
    g.entries_[normalize_name(name)] = p;
  }
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UnknownPlace("gazetteer not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::optional<GeoPoint> Gazetteer::find(std::string_view name) const {
  auto it = entries_.find(normalize_name(name));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Geocoder::Geocoder(Gazetteer gazetteer, std::optional<std::string> remote_url)
    : gazetteer_(std::move(gazetteer)), remote_url_(std::move(remote_url)) {}

GeoPoint Geocoder::geocode(std::string_view city) {
  const auto key = normalize_name(city);
  if (key.empty()) throw UnknownPlace("empty place name");
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::optional<GeoPoint> found = gazetteer_.find(key);
  if (!found && remote_url_) {
    auto res = http::get(*remote_url_, {{"format", "json"}, {"limit", "1"}, {"q", std::string(city)}},
                         {{"User-Agent", "roadchat"}});
    if (res && res->status == 200) {
      try {
        auto body = nlohmann::json::parse(res->body);
        if (body.is_array() && !body.empty()) {
          const auto& hit = body.front();
          auto as_double = [](const nlohmann::json& v) {
            return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
          };
          found = GeoPoint{as_double(hit.at("lat")), as_double(hit.at("lon"))};
        }
      } catch (const std::exception&) {
        found.reset();
      }
    }
  }
  if (!found) throw UnknownPlace("unknown place: '" + std::string(city) + "'");
  std::lock_guard lock(mutex_);
  cache_[key] = *found;
  return *found;
}

OsmFetcher OsmFetcher::fixture(std::filesystem::path path) {
  OsmFetcher f;
  f.fixture_path_ = std::move(path);
  return f;
}

OsmFetcher OsmFetcher::remote(std::string url) {
  OsmFetcher f;
  f.remote_url_ = std::move(url);
  return f;
}

OsmDocument OsmFetcher::fetch(const BoundingBox& box, std::string_view place) const {
  if (!(box.south < box.north) || !(box.west < box.east)) {
    throw InvalidArgument("fetch_osm: degenerate bounding box");
  }
  if (!remote_url_) {
    auto path = fixture_path_;
    if (std::filesystem::is_directory(path)) {
      auto name = normalize_name(place);
      std::replace(name.begin(), name.end(), ' ', '_');
      path /= name + ".osm";
    }
    if (!std::filesystem::exists(path)) throw FetchFailed("no OSM fixture at " + path.string());
    return clip_to_box(parse_osm_xml(read_file(path)), box);
  }

  std::ostringstream query;
  query.precision(9);
  query << "[out:xml][timeout:60];(way[\"highway\"](" << box.south << ',' << box.west << ','
        << box.north << ',' << box.east << "););(._;>;);out body;";
  auto res = http::post_form(*remote_url_, {{"data", query.str()}});
  if (!res) throw FetchFailed("OSM endpoint unreachable: " + *remote_url_);
  if (res->status != 200) {
    throw FetchFailed("OSM endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_osm_xml(res->body);
}

}  // namespace roadchat::geodata
