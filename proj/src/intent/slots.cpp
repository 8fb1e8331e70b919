#include <array>
#include <map>

#include "roadchat/errors.hpp"
#include "roadchat/intent.hpp"

namespace roadchat::intent {

namespace {

constexpr std::array<std::pair<Kind, std::string_view>, 10> kKindNames{{
    {Kind::GenerateRealWorld, "GenerateRealWorld"},
    {Kind::GenerateAbstract, "GenerateAbstract"},
    {Kind::EdgeRemove, "EdgeRemove"},
    {Kind::LaneRemove, "LaneRemove"},
    {Kind::TlsOffset, "TlsOffset"},
    {Kind::TlsAdaptation, "TlsAdaptation"},
    {Kind::AddVehicle, "AddVehicle"},
    {Kind::VehicleMix, "VehicleMix"},
    {Kind::Compare, "Compare"},
    {Kind::Clarify, "Clarify"},
}};

template <class T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <class T>
void get(const nlohmann::json& j, const char* key, std::optional<T>& value) {
  if (j.contains(key) && !j.at(key).is_null()) value = j.at(key).get<T>();
}

}  // namespace

std::string_view kind_name(Kind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Clarify";
}

std::optional<Kind> kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view traffic_name(TrafficCondition t) {
  switch (t) {
    case TrafficCondition::light: return "light";
    case TrafficCondition::medium: return "medium";
    case TrafficCondition::heavy: return "heavy";
  }
  return "medium";
}

std::string_view network_kind_name(NetworkKind k) { return k == NetworkKind::grid ? "grid" : "spider"; }

double traffic_volume(TrafficCondition t) {
  switch (t) {
    case TrafficCondition::light: return 1000.0;
    case TrafficCondition::medium: return 2000.0;
    case TrafficCondition::heavy: return 3000.0;
  }
  return 2000.0;
}

nlohmann::json to_json(const Intent& intent) {
  const auto& s = intent.slots;
  nlohmann::json slots = nlohmann::json::object();
  put(slots, "city", s.city);
  put(slots, "radius_m", s.radius);
  if (s.traffic_condition) slots["traffic_condition"] = traffic_name(*s.traffic_condition);
  if (s.network_kind) slots["network_kind"] = network_kind_name(*s.network_kind);
  if (s.grid_params) {
    slots["grid_params"] = {{"rows", s.grid_params->rows}, {"cols", s.grid_params->cols},
                            {"spacing_m", s.grid_params->spacing}};
  }
  if (s.spider_params) {
    slots["spider_params"] = {{"arms", s.spider_params->arms}, {"circles", s.spider_params->circles},
                              {"spacing_m", s.spider_params->spacing}};
  }
  put(slots, "edge_name", s.edge_name);
  put(slots, "lane_index", s.lane_index);
  put(slots, "origin_edge", s.origin_edge);
  put(slots, "dest_edge", s.dest_edge);
  put(slots, "depart_s", s.depart);
  put(slots, "ev_proportion", s.ev_proportion);
  put(slots, "compare_run_ids", s.compare_run_ids);
  return {{"kind", kind_name(intent.kind)}, {"slots", slots}};
}

Intent intent_from_json(const nlohmann::json& j) {
  Intent intent;
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw ParseError("unknown intent kind");
  intent.kind = *kind;
  const auto& slots = j.at("slots");
  auto& s = intent.slots;
  get(slots, "city", s.city);
  get(slots, "radius_m", s.radius);
  if (slots.contains("traffic_condition")) {
    const auto t = slots.at("traffic_condition").get<std::string>();
    s.traffic_condition = t == "light" ? TrafficCondition::light
                          : t == "heavy" ? TrafficCondition::heavy
                                         : TrafficCondition::medium;
  }
  if (slots.contains("network_kind")) {
    s.network_kind = slots.at("network_kind").get<std::string>() == "grid" ? NetworkKind::grid : NetworkKind::spider;
  }
  if (slots.contains("grid_params")) {
    const auto& g = slots.at("grid_params");
    s.grid_params = GridParams{g.at("rows").get<int>(), g.at("cols").get<int>(), g.at("spacing_m").get<double>()};
  }
  if (slots.contains("spider_params")) {
    const auto& g = slots.at("spider_params");
    s.spider_params =
        SpiderParams{g.at("arms").get<int>(), g.at("circles").get<int>(), g.at("spacing_m").get<double>()};
  }
  get(slots, "edge_name", s.edge_name);
  get(slots, "lane_index", s.lane_index);
  get(slots, "origin_edge", s.origin_edge);
  get(slots, "dest_edge", s.dest_edge);
  get(slots, "depart_s", s.depart);
  get(slots, "ev_proportion", s.ev_proportion);
  get(slots, "compare_run_ids", s.compare_run_ids);
  return intent;
}

SufficiencyReport check_sufficiency(const Intent& intent) {
  if (intent.kind == Kind::Clarify) throw InvalidArgument("a clarification request has no slots to check");
  SufficiencyReport r;
  r.completed = intent;
  auto& s = r.completed.slots;
  auto& missing = r.missing;
  auto need_text = [&](const std::optional<std::string>& v, const char* name) {
    if (!v || v->empty()) missing.emplace_back(name);
  };

  switch (intent.kind) {
    case Kind::GenerateRealWorld:
      need_text(s.city, "city");
      if (!s.radius) s.radius = kMetersPerMile;
      if (!(*s.radius > 0.0)) missing.emplace_back("radius");
      if (!s.traffic_condition) s.traffic_condition = TrafficCondition::medium;
      break;
    case Kind::GenerateAbstract:
      if (!s.traffic_condition) s.traffic_condition = TrafficCondition::medium;
      if (!s.network_kind) {
        missing.emplace_back("network_kind");
      } else if (*s.network_kind == NetworkKind::grid) {
        if (!s.grid_params) s.grid_params = GridParams{};
        const auto& g = *s.grid_params;
        if (g.rows < 2 || g.cols < 2 || !(g.spacing > 0.0)) missing.emplace_back("grid_params");
      } else {
        if (!s.spider_params) s.spider_params = SpiderParams{};
        const auto& p = *s.spider_params;
        if (p.arms < 3 || p.circles < 1 || !(p.spacing > 0.0)) missing.emplace_back("spider_params");
      }
      break;
    case Kind::EdgeRemove:
      need_text(s.edge_name, "edge_name");
      break;
    case Kind::LaneRemove:
      need_text(s.edge_name, "edge_name");
      if (!s.lane_index || *s.lane_index < 0) missing.emplace_back("lane_index");
      break;
    case Kind::AddVehicle:
      need_text(s.origin_edge, "origin_edge");
      need_text(s.dest_edge, "dest_edge");
      if (!s.depart) s.depart = 0.0;
      if (!(*s.depart >= 0.0)) missing.emplace_back("depart");
      break;
    case Kind::VehicleMix:
      if (!s.ev_proportion || !(*s.ev_proportion >= 0.0 && *s.ev_proportion <= 1.0)) {
        missing.emplace_back("ev_proportion");
      }
      break;
    case Kind::TlsOffset:
    case Kind::TlsAdaptation:
    case Kind::Compare:
    case Kind::Clarify:
      break;
  }
  r.sufficient = missing.empty();
  return r;
}

std::string render_clarification(const SufficiencyReport& report) {
  if (report.missing.empty()) throw InvalidArgument("nothing is missing");
  static const std::map<std::string, std::string> kQuestions{
      {"network_kind", "Which network type do you want: grid or spider?"},
      {"edge_name", "Which street should I remove?"},
      {"city", "Which city should the simulation cover?"},
      {"radius", "What radius should the simulated area have?"},
      {"grid_params", "How many rows and columns (at least 2 each) and what spacing should the grid have?"},
      {"spider_params", "How many arms (at least 3) and circles, and what spacing should the spider network have?"},
      {"lane_index", "Which lane should I remove, for example the first or the second?"},
      {"ev_proportion", "What proportion of electric vehicles do you want, between 0 and 1?"},
      {"depart", "When should the vehicle depart, in seconds from the start?"},
  };
  static const std::map<std::string, std::string> kNouns{
      {"origin_edge", "the road the vehicle starts on"},
      {"dest_edge", "the road it should reach"},
      {"network_kind", "the network type (grid or spider)"},
      {"edge_name", "the street name"},
      {"city", "the city"},
      {"radius", "a positive radius"},
      {"grid_params", "the grid size"},
      {"spider_params", "the spider size"},
      {"lane_index", "which lane"},
      {"ev_proportion", "the electric vehicle proportion"},
      {"depart", "the departure time"},
  };
  if (report.missing.size() == 1 && kQuestions.contains(report.missing.front())) {
    return kQuestions.at(report.missing.front());
  }
  if (report.missing == std::vector<std::string>{"origin_edge", "dest_edge"}) {
    return "Which road should the vehicle start on, and which road should it reach?";
  }
  std::string text = "Please tell me ";
  for (std::size_t i = 0; i < report.missing.size(); ++i) {
    const auto& m = report.missing[i];
    if (i > 0) text += i + 1 == report.missing.size() ? " and " : ", ";
    text += kNouns.contains(m) ? kNouns.at(m) : "the " + m;
  }
  return text + ".";
}

}  // namespace roadchat::intent
