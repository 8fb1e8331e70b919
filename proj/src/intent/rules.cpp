#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>

#include "roadchat/intent.hpp"
#include "roadchat/xml.hpp"

namespace roadchat::intent {

namespace {

// ASCII-only lowering keeps byte offsets aligned with the original text.
std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (static_cast<unsigned char>(c) < 128) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string collapse_spaces(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : trim(text)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string strip_trailing_punctuation(std::string text) {
  while (!text.empty() && std::string_view(".,!?;:\"'").find(text.back()) != std::string_view::npos) {
    text.pop_back();
  }
  return trim(text);
}

bool has(const std::string& lowered, const char* pattern) {
  return std::regex_search(lowered, std::regex(pattern));
}

constexpr std::array<std::string_view, 10> kOrdinals{"first", "second", "third", "fourth", "fifth",
                                                     "sixth", "seventh", "eighth", "ninth", "tenth"};

std::optional<int> ordinal_value(const std::string& word) {
  for (std::size_t i = 0; i < kOrdinals.size(); ++i) {
    if (word == kOrdinals[i]) return static_cast<int>(i);
  }
  static const std::regex numeric(R"((\d+)(st|nd|rd|th))");
  std::smatch m;
  if (std::regex_match(word, m, numeric)) {
    const int n = std::stoi(m[1]);
    if (n >= 1) return n - 1;
  }
  return std::nullopt;
}

std::optional<double> radius_meters(const std::string& lowered) {
  static const std::regex pattern(
      R"((\d+(?:\.\d+)?)\s*-?\s*(miles?|mi|kilometers?|kilometres?|km|meters?|metres?|m)\b)");
  std::smatch m;
  if (std::regex_search(lowered, m, pattern)) {
    const double value = xml::parse_number(m[1].str());
    const auto unit = m[2].str();
    if (unit.rfind("mi", 0) == 0) return value * kMetersPerMile;
    if (unit.rfind("k", 0) == 0) return value * 1000.0;
    return value;
  }
  if (has(lowered, R"(\ba mile\b)")) return kMetersPerMile;
  return std::nullopt;
}

std::optional<TrafficCondition> traffic_condition(const std::string& lowered) {
  static const std::regex pattern(
      R"(\b(light|medium|heavy|low|moderate|high)\b(?!\s+(?:signals?|offsets?|programs?|cycles?|phases?)\b))");
  std::smatch m;
  if (!std::regex_search(lowered, m, pattern)) return std::nullopt;
  const auto w = m[1].str();
  if (w == "light" || w == "low") return TrafficCondition::light;
  if (w == "heavy" || w == "high") return TrafficCondition::heavy;
  return TrafficCondition::medium;
}

const std::set<std::string>& place_stopwords() {
  static const std::set<std::string> words{
      "a", "an", "the", "my", "this", "that", "it", "which", "medium", "light", "heavy", "traffic", "radius",
      "order", "city", "simulation", "streets", "roads", "vehicles", "total", "addition", "general", "sumo"};
  return words;
}

// City after "city [of]", else after the first " in / for / of / simulate " that is followed by a place-like word.
std::optional<std::string> city_name(const std::string& text, const std::string& lowered) {
  auto take_words = [&](std::size_t pos) -> std::optional<std::string> {
    std::vector<std::string> words;
    while (pos < text.size()) {
      while (pos < text.size() && text[pos] == ' ') ++pos;
      std::size_t end = pos;
      while (end < text.size() && (std::isalpha(static_cast<unsigned char>(text[end])) ||
                                   static_cast<unsigned char>(text[end]) >= 128 ||
                                   std::string_view(".'-").find(text[end]) != std::string_view::npos)) {
        ++end;
      }
      if (end == pos) break;
      std::string word = text.substr(pos, end - pos);
      const std::string lw = lower(word);
      const std::string bare = strip_trailing_punctuation(lw);
      if (place_stopwords().contains(bare) || bare.empty()) break;
      if (!words.empty() && !std::isupper(static_cast<unsigned char>(word[0]))) break;
      words.push_back(word);
      const bool sentence_end = word.back() == '.' && word.size() > 3;
      pos = end;
      if (sentence_end || (pos < text.size() && text[pos] != ' ')) break;
    }
    if (words.empty()) return std::nullopt;
    std::string out;
    for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
    out = strip_trailing_punctuation(out);
    if (out.empty()) return std::nullopt;
    return out;
  };

  static const std::regex city_kw(R"(\bcity\s+(?:of\s+)?)");
  std::smatch m;
  if (std::regex_search(lowered, m, city_kw)) {
    if (auto c = take_words(static_cast<std::size_t>(m.position(0) + m.length(0)))) return c;
  }
  static const std::regex place_kw(R"(\b(?:in|for|of|around|near|simulate)\s+)");
  for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), place_kw); it != std::sregex_iterator(); ++it) {
    if (auto c = take_words(static_cast<std::size_t>(it->position(0) + it->length(0)))) return c;
  }
  return std::nullopt;
}

struct NumberAt {
  double value;
  std::size_t pos;
  bool percent;
};

std::vector<NumberAt> numbers(const std::string& lowered) {
  static const std::regex pattern(R"((\d+(?:\.\d+)?|\.\d+)\s*(%|percent)?)");
  std::vector<NumberAt> out;
  for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), pattern); it != std::sregex_iterator(); ++it) {
    out.push_back({xml::parse_number((*it)[1].str()), static_cast<std::size_t>(it->position(0)), (*it)[2].matched});
  }
  static const std::regex half(R"(\bhalf\b)");
  std::smatch m;
  if (std::regex_search(lowered, m, half)) out.push_back({0.5, static_cast<std::size_t>(m.position(0)), false});
  return out;
}

std::optional<double> proportion(const std::string& lowered) {
  static const std::regex ev(R"(\b(electric|evs?|battery)\b)");
  static const std::regex gas(R"(\b(gasoline|gas|petrol|fuel|combustion)\b)");
  std::smatch me, mg;
  const bool has_ev = std::regex_search(lowered, me, ev);
  const bool has_gas = std::regex_search(lowered, mg, gas);
  const auto nums = numbers(lowered);
  if (nums.empty()) return std::nullopt;
  const bool for_gas = has_gas && !has_ev;
  const auto anchor = static_cast<std::size_t>(for_gas ? mg.position(0) : (has_ev ? me.position(0) : 0));
  const auto nearest = std::min_element(nums.begin(), nums.end(), [&](const NumberAt& a, const NumberAt& b) {
    const auto da = a.pos > anchor ? a.pos - anchor : anchor - a.pos;
    const auto db = b.pos > anchor ? b.pos - anchor : anchor - b.pos;
    return da < db;
  });
  double value = nearest->value;
  if (nearest->percent || value > 1.0) value /= 100.0;
  return for_gas ? 1.0 - value : value;
}

std::string clean_name(std::string name) {
  name = strip_trailing_punctuation(collapse_spaces(name));
  static const std::regex tail(R"(\s+(?:from|in|on|out of)\s+(?:the\s+)?(?:simulation|network|map|scenario)$|\s+please$)",
                               std::regex::icase);
  name = std::regex_replace(name, tail, "");
  static const std::regex head(R"(^(?:the\s+)?(?:(?:street|road|avenue|edge)\s+(?:called|named)\s+)?(?:the\s+)?)",
                               std::regex::icase);
  name = std::regex_replace(name, head, "");
  return strip_trailing_punctuation(name);
}

bool is_placeholder_name(const std::string& name) {
  static const std::regex vague(
      R"(^((an?|some|one|any)\s+)?(streets?|roads?|edges?|avenues?|lanes?|ways?)(\s+.*)?$|^(it|that|this|one)$)");
  return name.empty() || std::regex_match(lower(name), vague);
}

void fill_grid(const std::string& lowered, Intent& intent) {
  std::smatch m;
  GridParams g;
  bool any = false;
  static const std::regex dims(R"((\d+)\s*(?:x|by|\*)\s*(\d+))");
  static const std::regex rows(R"((\d+)\s+rows?)");
  static const std::regex cols(R"((\d+)\s+col(?:umn)?s?)");
  if (std::regex_search(lowered, m, dims)) {
    g.rows = std::stoi(m[1]);
    g.cols = std::stoi(m[2]);
    any = true;
  }
  if (std::regex_search(lowered, m, rows)) g.rows = std::stoi(m[1]), any = true;
  if (std::regex_search(lowered, m, cols)) g.cols = std::stoi(m[1]), any = true;
  static const std::regex spacing(R"((\d+(?:\.\d+)?)\s*(?:m|meters?|metres?)\b)");
  if (std::regex_search(lowered, m, spacing)) g.spacing = xml::parse_number(m[1].str()), any = true;
  if (any) intent.slots.grid_params = g;
}

void fill_spider(const std::string& lowered, Intent& intent) {
  std::smatch m;
  SpiderParams p;
  bool any = false;
  static const std::regex arms(R"((\d+)\s+arms?)");
  static const std::regex circles(R"((\d+)\s+(?:circles?|rings?))");
  static const std::regex spacing(R"((\d+(?:\.\d+)?)\s*(?:m|meters?|metres?)\b)");
  if (std::regex_search(lowered, m, arms)) p.arms = std::stoi(m[1]), any = true;
  if (std::regex_search(lowered, m, circles)) p.circles = std::stoi(m[1]), any = true;
  if (std::regex_search(lowered, m, spacing)) p.spacing = xml::parse_number(m[1].str()), any = true;
  if (any) intent.slots.spider_params = p;
}

std::optional<std::pair<std::string, std::string>> od_pair(const std::string& text, const std::string& lowered,
                                                           bool require_from) {
  static const std::regex with_from(R"(\bfrom\s+(.+?)\s+to\s+(.+?)(?:\s+(?:at|departing|leaving|starting)\b.*)?$)");
  static const std::regex bare(R"(^(.+?)\s+to\s+(.+?)(?:\s+(?:at|departing|leaving|starting)\b.*)?$)");
  std::smatch m;
  if (std::regex_search(lowered, m, require_from ? with_from : bare)) {
    auto origin = clean_name(text.substr(static_cast<std::size_t>(m.position(1)), static_cast<std::size_t>(m.length(1))));
    auto dest = clean_name(text.substr(static_cast<std::size_t>(m.position(2)), static_cast<std::size_t>(m.length(2))));
    if (!origin.empty() && !dest.empty()) return std::make_pair(origin, dest);
  }
  return std::nullopt;
}

std::optional<double> depart_time(const std::string& lowered) {
  static const std::regex pattern(
      R"(\b(?:at|departing at|departing|leaving at|starting at)\s+(?:time\s+)?(\d+(?:\.\d+)?)\s*(?:s|sec|secs|seconds)?\b)");
  std::smatch m;
  if (std::regex_search(lowered, m, pattern)) return xml::parse_number(m[1].str());
  return std::nullopt;
}

std::vector<std::string> run_ids(const std::string& text) {
  static const std::regex pattern(R"(\b([A-Za-z0-9]+-\d+)\b)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

}  // namespace

Intent parse_rules(std::string_view raw) {
  const std::string text = collapse_spaces(raw);
  const std::string lowered = lower(text);
  Intent intent;
  if (text.empty()) return intent;
  std::smatch m;

  static const std::regex affirm(R"(^(yes|yeah|yep|sure|ok|okay)(\s+please)?[.!]*$)");
  if (std::regex_match(lowered, affirm) || has(lowered, R"(\bcompar(e|ison|ing)\b)")) {
    intent.kind = Kind::Compare;
    auto ids = run_ids(text);
    if (!ids.empty()) intent.slots.compare_run_ids = ids;
    return intent;
  }

  static const std::regex remove_verb(R"(\b(?:remove|delete|close|block|drop|take out)\s+)");
  static const std::regex lane(R"(^(?:the\s+|a\s+|one\s+)?(?:(first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth|\d+(?:st|nd|rd|th))\s+)?lane(?:\s+index\s+(\d+))?\b\s*(?:(?:in|on|of|from)\s+(.+))?$)");
  if (std::regex_search(lowered, m, remove_verb)) {
    const auto start = static_cast<std::size_t>(m.position(0) + m.length(0));
    const std::string rest_lower = lowered.substr(start);
    const std::string rest = text.substr(start);
    std::smatch lm;
    if (std::regex_match(rest_lower, lm, lane)) {
      intent.kind = Kind::LaneRemove;
      if (lm[1].matched) intent.slots.lane_index = ordinal_value(lm[1].str());
      if (lm[2].matched) intent.slots.lane_index = std::stoi(lm[2].str());
      if (lm[3].matched) {
        auto name = clean_name(rest.substr(static_cast<std::size_t>(lm.position(3))));
        if (!is_placeholder_name(name)) intent.slots.edge_name = name;
      }
      return intent;
    }
    intent.kind = Kind::EdgeRemove;
    auto name = clean_name(rest);
    if (!is_placeholder_name(name)) intent.slots.edge_name = name;
    return intent;
  }

  if (has(lowered, R"(offset|green wave|coordinat)")) {
    intent.kind = Kind::TlsOffset;
    return intent;
  }
  if (has(lowered, R"(\badapt|webster|cycle length|signal timing|green (?:phase|time|split|duration)|optimi[sz]e\b.*\b(?:signals?|lights?|intersections?)|(?:signal|light)s?\b.*\boptimi[sz])")) {
    intent.kind = Kind::TlsAdaptation;
    return intent;
  }

  if (has(lowered, R"(\b(electric|evs?|gasoline|gas|petrol)\b)") &&
      has(lowered, R"(proportion|share|percent|fraction|ratio|\bmix|%|\bhalf\b|\bvehicle types?\b)")) {
    intent.kind = Kind::VehicleMix;
    intent.slots.ev_proportion = proportion(lowered);
    return intent;
  }

  if (has(lowered, R"(\b(add|insert|spawn|put)\b.*\b(vehicles?|cars?|trips?)\b)")) {
    intent.kind = Kind::AddVehicle;
    if (auto od = od_pair(text, lowered, true)) {
      intent.slots.origin_edge = od->first;
      intent.slots.dest_edge = od->second;
    }
    intent.slots.depart = depart_time(lowered);
    return intent;
  }

  const auto traffic = traffic_condition(lowered);
  if (has(lowered, R"(\b(grid|spider|abstract|manhattan)\b)")) {
    intent.kind = Kind::GenerateAbstract;
    intent.slots.traffic_condition = traffic;
    if (has(lowered, R"(\b(grid|manhattan)\b)")) {
      intent.slots.network_kind = NetworkKind::grid;
      fill_grid(lowered, intent);
    } else if (has(lowered, R"(\bspider\b)")) {
      intent.slots.network_kind = NetworkKind::spider;
      fill_spider(lowered, intent);
    }
    return intent;
  }

  const auto city = city_name(text, lowered);
  const auto radius = radius_meters(lowered);
  if (city || radius ||
      has(lowered, R"(\b(simulat\w*|generate|create|build|scenario)\b)")) {
    intent.kind = Kind::GenerateRealWorld;
    intent.slots.city = city;
    intent.slots.radius = radius;
    intent.slots.traffic_condition = traffic;
    return intent;
  }
  return intent;
}

std::string canonical_phrasing(const Intent& intent) {
  const auto& s = intent.slots;
  auto num = [](double v) { return xml::format_number(v); };
  std::string out;
  switch (intent.kind) {
    case Kind::GenerateRealWorld:
      out = "Generate a simulation";
      if (s.city) out += " in city " + *s.city;
      if (s.radius) out += " with a radius of " + num(*s.radius) + " meters";
      if (s.traffic_condition) out += ", and the volume of traffic should be " + std::string(traffic_name(*s.traffic_condition));
      return out + ".";
    case Kind::GenerateAbstract:
      out = "Generate an abstract";
      if (s.network_kind == NetworkKind::grid) {
        out = "Generate a grid network";
        if (s.grid_params) {
          out += " with " + std::to_string(s.grid_params->rows) + " rows and " + std::to_string(s.grid_params->cols) +
                 " columns spaced " + num(s.grid_params->spacing) + " meters apart";
        }
      } else if (s.network_kind == NetworkKind::spider) {
        out = "Generate a spider network";
        if (s.spider_params) {
          out += " with " + std::to_string(s.spider_params->arms) + " arms and " +
                 std::to_string(s.spider_params->circles) + " circles spaced " + num(s.spider_params->spacing) +
                 " meters apart";
        }
      } else {
        out += " network";
      }
      if (s.traffic_condition) out += " and " + std::string(traffic_name(*s.traffic_condition)) + " traffic";
      return out + ".";
    case Kind::EdgeRemove:
      return s.edge_name ? "I want to remove " + *s.edge_name : "I want to remove a street";
    case Kind::LaneRemove:
      out = "I'd like to remove the ";
      if (s.lane_index && *s.lane_index >= 0 && *s.lane_index < static_cast<int>(kOrdinals.size())) {
        out += std::string(kOrdinals[static_cast<std::size_t>(*s.lane_index)]) + " lane";
      } else if (s.lane_index) {
        out += "lane index " + std::to_string(*s.lane_index);
      } else {
        out += "lane";
      }
      if (s.edge_name) out += " in " + *s.edge_name;
      return out;
    case Kind::TlsOffset:
      return "I want to set traffic light offsets for the simulation";
    case Kind::TlsAdaptation:
      return "I want to adapt the traffic light cycles to the demand";
    case Kind::AddVehicle:
      out = "Add a vehicle";
      if (s.origin_edge && s.dest_edge) out += " from " + *s.origin_edge + " to " + *s.dest_edge;
      if (s.depart) out += " departing at " + num(*s.depart) + " seconds";
      return out;
    case Kind::VehicleMix:
      out = "I want to set the proportion of electric vehicles";
      if (s.ev_proportion) out += " as " + num(*s.ev_proportion);
      return out + ".";
    case Kind::Compare:
      if (s.compare_run_ids && !s.compare_run_ids->empty()) {
        out = "Compare runs";
        for (std::size_t i = 0; i < s.compare_run_ids->size(); ++i) {
          out += (i == 0 ? " " : " and ") + (*s.compare_run_ids)[i];
        }
        return out;
      }
      return "Compare the last two runs";
    case Kind::Clarify:
      return "";
  }
  return "";
}

}  // namespace roadchat::intent
