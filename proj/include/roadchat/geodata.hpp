#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace roadchat::geodata {

constexpr double kMetersPerDegreeLat = 111320.0;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= south && p.lat <= north && p.lon >= west && p.lon <= east;
  }
  GeoPoint center() const { return {(south + north) / 2.0, (west + east) / 2.0}; }
  bool operator==(const BoundingBox&) const = default;
};

using Tags = std::map<std::string, std::string>;

struct OsmNode {
  GeoPoint position;
  Tags tags;
  bool operator==(const OsmNode&) const = default;
};

struct OsmWay {
  std::vector<long long> node_refs;
  Tags tags;
  bool operator==(const OsmWay&) const = default;
};

/// Highway-filtered OSM extract. Ordered maps keep every downstream pass deterministic.
struct OsmDocument {
  std::map<long long, OsmNode> nodes;
  std::map<long long, OsmWay> ways;
  bool operator==(const OsmDocument&) const = default;
};

/// Vehicular highway classes kept by the parser (plus their `_link` variants).
bool is_supported_highway(std::string_view highway_class);

/// Half-height `radius`, half-width `radius / cos(lat)`, i.e. the box circumscribing the circle.
BoundingBox bbox_around(const GeoPoint& center, double radius_m);

OsmDocument parse_osm_xml(std::string_view xml_text);
/// Writes `doc` back as OSM XML (sorted by id).
std::string emit_osm_xml(const OsmDocument& doc);

/// Name -> centroid table loaded from a tab-separated file (`name<TAB>lat<TAB>lon`, `#` comments).
class Gazetteer {
 public:
  Gazetteer() = default;
  static Gazetteer load(const std::filesystem::path& path);
  static Gazetteer parse(std::string_view text);

  std::optional<GeoPoint> find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, GeoPoint> entries_;
};

/// Gazetteer first, then the optional remote endpoint (Nominatim-style `?q=&format=json`).
class Geocoder {
 public:
  explicit Geocoder(Gazetteer gazetteer, std::optional<std::string> remote_url = std::nullopt);

  /// Throws UnknownPlace.
  GeoPoint geocode(std::string_view city);

 private:
  Gazetteer gazetteer_;
  std::optional<std::string> remote_url_;
  std::mutex mutex_;
  std::unordered_map<std::string, GeoPoint> cache_;
};

/// Where OSM extracts come from: a local fixture (file or directory of `<city>.osm`) or a remote
/// Overpass-style endpoint.
class OsmFetcher {
 public:
  static OsmFetcher fixture(std::filesystem::path path);
  static OsmFetcher remote(std::string url);

  /// `place` selects `<place>.osm` when the fixture path is a directory. Throws FetchFailed, ParseError.
  OsmDocument fetch(const BoundingBox& box, std::string_view place = {}) const;

  bool is_fixture() const { return !remote_url_; }

 private:
  OsmFetcher() = default;

  std::filesystem::path fixture_path_;
  std::optional<std::string> remote_url_;
};

/// Keeps only ways with at least one node inside `box`, together with all their nodes.
OsmDocument clip_to_box(const OsmDocument& doc, const BoundingBox& box);

}  // namespace roadchat::geodata
