#include <cctype>
#include <cstdlib>
#include <map>
#include <regex>

#include "roadchat/errors.hpp"
#include "roadchat/http_client.hpp"
#include "roadchat/intent.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::intent {

const char* const kSystemPrompt =
    "You are taking input and generate keywords for a transportation simulation. Analyze the user input and "
    "give a python dictionary with these keywords: 'kind' (one of GenerateRealWorld, GenerateAbstract, "
    "EdgeRemove, LaneRemove, TlsOffset, TlsAdaptation, AddVehicle, VehicleMix, Compare, Clarify), 'city', "
    "'radius' (with its unit, e.g. '3 miles'), 'traffic condition' (light, medium or heavy), 'network type' "
    "(grid or spider), 'rows', 'columns', 'arms', 'circles', 'spacing' (meters), 'edge name' (the street "
    "name as written), 'lane index' (0 for the first lane), 'origin edge', 'destination edge', 'depart' "
    "(seconds), 'ev proportion' (a fraction between 0 and 1), 'run ids' (a list). Only include keywords the "
    "user actually gave. Reply with the dictionary only.";

std::optional<LlmConfig> LlmConfig::from_env() {
  const char* url = std::getenv("ROADCHAT_LLM_URL");
  if (!url || !*url) return std::nullopt;
  LlmConfig c;
  c.base_url = url;
  if (const char* model = std::getenv("ROADCHAT_LLM_MODEL"); model && *model) c.model = model;
  if (const char* key = std::getenv("ROADCHAT_LLM_API_KEY"); key && *key) c.api_key = key;
  return c;
}

std::string chat_completion(const LlmConfig& config, std::string_view system_prompt, std::string_view user_text) {
  nlohmann::json body = {
      {"model", config.model},
      {"temperature", 0},
      {"messages",
       {{{"role", "system"}, {"content", system_prompt}}, {{"role", "user"}, {"content", user_text}}}},
  };
  http::Headers headers;
  if (!config.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config.api_key);
  auto url = config.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto response = http::post_json(url + "/chat/completions", body.dump(), headers, config.timeout_s);
  if (!response) throw BackendUnavailable("LLM endpoint " + config.base_url + " is unreachable");
  if (response->status < 200 || response->status >= 300) {
    throw BackendUnavailable("LLM endpoint answered HTTP " + std::to_string(response->status));
  }
  try {
    const auto reply = nlohmann::json::parse(response->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UnparseableReply(std::string("LLM response has no message content: ") + e.what());
  }
}

namespace {

using Value = std::vector<std::string>;  // scalars are one-element lists

class RecordReader {
 public:
  explicit RecordReader(std::string_view text) : text_(text) {}

  std::map<std::string, Value> read() {
    const auto open = text_.find('{');
    if (open == std::string_view::npos) throw UnparseableReply("reply contains no key/value record");
    pos_ = open + 1;
    std::map<std::string, Value> out;
    skip();
    if (peek() == '}') return out;
    while (true) {
      skip();
      auto key = scalar(":");
      skip();
      expect(':');
      skip();
      Value value;
      if (peek() == '[' || peek() == '(') {
        const char close = peek() == '[' ? ']' : ')';
        ++pos_;
        skip();
        while (peek() != close) {
          value.push_back(scalar(std::string(",") + close));
          skip();
          if (peek() == ',') ++pos_, skip();
        }
        ++pos_;
      } else {
        value.push_back(scalar(",}"));
      }
      out[normalize_key(key)] = std::move(value);
      skip();
      if (peek() == ',') {
        ++pos_;
        skip();
        if (peek() == '}') break;
        continue;
      }
      expect('}');
      break;
    }
    return out;
  }

 private:
  char peek() const {
    if (pos_ >= text_.size()) throw UnparseableReply("record is not terminated");
    return text_[pos_];
  }
  void expect(char c) {
    if (peek() != c) throw UnparseableReply(std::string("expected '") + c + "' in record");
    ++pos_;
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string scalar(std::string_view terminators) {
    const char c = peek();
    if (c == '"' || c == '\'') {
      ++pos_;
      std::string out;
      while (peek() != c) {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        out += text_[pos_++];
      }
      ++pos_;
      return out;
    }
    std::string out;
    while (pos_ < text_.size() && terminators.find(text_[pos_]) == std::string_view::npos) out += text_[pos_++];
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    if (out.empty()) throw UnparseableReply("empty token in record");
    return out;
  }
  static std::string normalize_key(std::string key) {
    std::string out;
    for (char c : key) {
      if (c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c))) {
        if (!out.empty() && out.back() != ' ') out += ' ';
      } else {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_null(const std::string& s) {
  const auto q = squash(s);
  return q.empty() || q == "none" || q == "null" || q == "nan" || q == "unknown" || q == "na";
}

std::optional<Kind> kind_from_text(const std::string& raw) {
  const auto v = squash(raw);
  if (auto exact = kind_from_name(raw)) return exact;
  static const std::vector<std::pair<const char*, Kind>> hints{
      {"clarif", Kind::Clarify},        {"lane", Kind::LaneRemove},        {"offset", Kind::TlsOffset},
      {"adapt", Kind::TlsAdaptation},   {"webster", Kind::TlsAdaptation},  {"cycle", Kind::TlsAdaptation},
      {"compar", Kind::Compare},        {"mix", Kind::VehicleMix},         {"proportion", Kind::VehicleMix},
      {"vehicletype", Kind::VehicleMix}, {"addvehicle", Kind::AddVehicle}, {"vehiclegenerat", Kind::AddVehicle},
      {"route", Kind::AddVehicle},      {"edge", Kind::EdgeRemove},        {"remov", Kind::EdgeRemove},
      {"grid", Kind::GenerateAbstract}, {"spider", Kind::GenerateAbstract}, {"abstract", Kind::GenerateAbstract},
      {"real", Kind::GenerateRealWorld}, {"city", Kind::GenerateRealWorld}, {"generat", Kind::GenerateRealWorld},
  };
  for (const auto& [hint, kind] : hints) {
    if (v.find(hint) != std::string::npos) return kind;
  }
  return std::nullopt;
}

std::optional<double> number_in(const std::string& s) {
  static const std::regex pattern(R"(-?(\d+(?:\.\d+)?|\.\d+))");
  std::smatch m;
  if (!std::regex_search(s, m, pattern)) return std::nullopt;
  return xml::parse_number(m[0].str());
}

}  // namespace

Intent intent_from_reply(std::string_view reply) {
  const auto record = RecordReader(reply).read();
  if (record.empty()) throw UnparseableReply("reply record is empty");

  auto find = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
    for (const char* k : keys) {
      auto it = record.find(k);
      if (it != record.end() && !it->second.empty() && !is_null(it->second.front())) return it->second.front();
    }
    return std::nullopt;
  };

  Intent intent;
  auto& s = intent.slots;
  if (auto v = find({"city", "place", "location", "region"})) s.city = *v;
  if (auto v = find({"radius", "radius miles", "size"})) {
    const auto q = parse_rules("radius " + *v);
    if (q.slots.radius) {
      s.radius = q.slots.radius;
    } else if (auto n = number_in(*v)) {
      s.radius = *n * kMetersPerMile;
    }
  }
  if (auto v = find({"traffic condition", "traffic", "volume", "traffic volume", "condition", "traffic level"})) {
    const auto lv = squash(*v);
    if (lv.find("light") != std::string::npos || lv.find("low") != std::string::npos) {
      s.traffic_condition = TrafficCondition::light;
    } else if (lv.find("heavy") != std::string::npos || lv.find("high") != std::string::npos) {
      s.traffic_condition = TrafficCondition::heavy;
    } else if (lv.find("medium") != std::string::npos || lv.find("moderate") != std::string::npos) {
      s.traffic_condition = TrafficCondition::medium;
    }
  }
  if (auto v = find({"network type", "network kind", "network", "type of network"})) {
    const auto lv = squash(*v);
    if (lv.find("grid") != std::string::npos) s.network_kind = NetworkKind::grid;
    if (lv.find("spider") != std::string::npos) s.network_kind = NetworkKind::spider;
  }
  auto integer = [&](std::initializer_list<const char*> keys) -> std::optional<int> {
    if (auto v = find(keys)) {
      if (auto n = number_in(*v)) return static_cast<int>(*n);
    }
    return std::nullopt;
  };
  const auto spacing = [&]() -> std::optional<double> {
    if (auto v = find({"spacing", "distance", "spacing m", "block length"})) return number_in(*v);
    return std::nullopt;
  }();
  const auto rows = integer({"rows", "number of rows"});
  const auto cols = integer({"columns", "cols", "number of columns"});
  const auto arms = integer({"arms", "number of arms"});
  const auto circles = integer({"circles", "rings", "number of circles"});
  if (s.network_kind == NetworkKind::grid && (rows || cols || spacing)) {
    GridParams g;
    g.rows = rows.value_or(g.rows);
    g.cols = cols.value_or(g.cols);
    g.spacing = spacing.value_or(g.spacing);
    s.grid_params = g;
  }
  if (s.network_kind == NetworkKind::spider && (arms || circles || spacing)) {
    SpiderParams p;
    p.arms = arms.value_or(p.arms);
    p.circles = circles.value_or(p.circles);
    p.spacing = spacing.value_or(p.spacing);
    s.spider_params = p;
  }
  if (auto v = find({"edge name", "street", "street name", "road", "road name", "edge", "removed street"})) {
    s.edge_name = *v;
  }
  if (auto v = find({"lane index", "lane", "lane number"})) {
    const auto q = parse_rules("remove the " + *v + " lane");
    if (q.slots.lane_index) {
      s.lane_index = q.slots.lane_index;
    } else if (auto n = number_in(*v)) {
      s.lane_index = static_cast<int>(*n);
    }
  }
  if (auto v = find({"origin edge", "origin", "from", "start", "source"})) s.origin_edge = *v;
  if (auto v = find({"destination edge", "dest edge", "destination", "to", "end", "target"})) s.dest_edge = *v;
  if (auto v = find({"depart", "departure", "depart time", "departure time"})) s.depart = number_in(*v);
  if (auto v = find({"ev proportion", "electric proportion", "proportion of electric vehicles",
                     "electric vehicle proportion", "electric vehicles", "electric", "proportion"})) {
    if (auto n = number_in(*v)) s.ev_proportion = *n > 1.0 ? *n / 100.0 : *n;
  } else if (auto g = find({"gasoline proportion", "gas proportion", "proportion of gasoline vehicles", "gasoline"})) {
    if (auto n = number_in(*g)) s.ev_proportion = 1.0 - (*n > 1.0 ? *n / 100.0 : *n);
  }
  for (const char* key : {"run ids", "runs", "compare run ids"}) {
    auto it = record.find(key);
    if (it != record.end() && !it->second.empty()) s.compare_run_ids = it->second;
  }

  std::optional<Kind> kind;
  if (auto v = find({"kind", "intent", "action", "task", "modification", "modification type", "request", "type"})) {
    kind = kind_from_text(*v);
  }
  if (!kind) {
    if (s.city || s.radius) kind = Kind::GenerateRealWorld;
    else if (s.network_kind) kind = Kind::GenerateAbstract;
    else if (s.edge_name && s.lane_index) kind = Kind::LaneRemove;
    else if (s.edge_name) kind = Kind::EdgeRemove;
    else if (s.origin_edge || s.dest_edge) kind = Kind::AddVehicle;
    else if (s.ev_proportion) kind = Kind::VehicleMix;
    else if (s.compare_run_ids) kind = Kind::Compare;
  }
  if (!kind) throw UnparseableReply("reply names no recognizable request");
  intent.kind = *kind;
  if (intent.kind == Kind::Clarify) intent.slots = {};
  return intent;
}

}  // namespace roadchat::intent
