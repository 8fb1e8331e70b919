#include <regex>

#include "roadchat/errors.hpp"
#include "roadchat/intent.hpp"

namespace roadchat::intent {

namespace {

template <class T>
void fill(std::optional<T>& target, const std::optional<T>& source) {
  if (!target && source) target = source;
}

SlotMap merged(SlotMap newer, const SlotMap& older) {
  fill(newer.city, older.city);
  fill(newer.radius, older.radius);
  fill(newer.traffic_condition, older.traffic_condition);
  fill(newer.network_kind, older.network_kind);
  fill(newer.grid_params, older.grid_params);
  fill(newer.spider_params, older.spider_params);
  fill(newer.edge_name, older.edge_name);
  fill(newer.lane_index, older.lane_index);
  fill(newer.origin_edge, older.origin_edge);
  fill(newer.dest_edge, older.dest_edge);
  fill(newer.depart, older.depart);
  fill(newer.ev_proportion, older.ev_proportion);
  fill(newer.compare_run_ids, older.compare_run_ids);
  return newer;
}

std::string strip(std::string text) {
  static const std::regex edges(R"(^\s*(?:the\s+)?|[\s.!?,;:]+$)", std::regex::icase);
  return std::regex_replace(text, edges, "");
}

// A bare answer to the question asked for `pending`.
std::optional<Intent> answer_to(const Intent& pending, const std::vector<std::string>& missing,
                                const std::string& text) {
  Intent out = pending;
  auto& s = out.slots;
  const auto& first = missing.front();
  if (first == "edge_name") {
    const auto name = strip(text);
    if (name.empty()) return std::nullopt;
    s.edge_name = name;
  } else if (first == "city") {
    const auto name = strip(text);
    if (name.empty()) return std::nullopt;
    s.city = name;
  } else if (first == "lane_index") {
    const auto lane = parse_rules("remove the " + strip(text) + " lane");
    if (!lane.slots.lane_index) return std::nullopt;
    s.lane_index = lane.slots.lane_index;
  } else if (first == "ev_proportion") {
    const auto mix = parse_rules("proportion of electric vehicles " + text);
    if (!mix.slots.ev_proportion) return std::nullopt;
    s.ev_proportion = mix.slots.ev_proportion;
  } else if (first == "origin_edge" || first == "dest_edge") {
    const auto add = parse_rules("add a vehicle from " + text);
    if (!add.slots.origin_edge) return std::nullopt;
    s.origin_edge = add.slots.origin_edge;
    s.dest_edge = add.slots.dest_edge;
    fill(s.depart, add.slots.depart);
  } else if (first == "radius") {
    const auto gen = parse_rules("radius " + text);
    if (!gen.slots.radius) return std::nullopt;
    s.radius = gen.slots.radius;
  } else {
    return std::nullopt;
  }
  return out;
}

}  // namespace

ParseResult Parser::parse_turn(const UserTurn& turn, const std::vector<Intent>& history) const {
  ParseResult result;
  if (llm_) {
    try {
      result.intent = intent_from_reply(chat_completion(*llm_, kSystemPrompt, turn.text));
    } catch (const BackendUnavailable&) {
      result.degraded = true;
      result.intent = parse_rules(turn.text);
    } catch (const UnparseableReply&) {
      result.intent = Intent{};
    }
  } else {
    result.intent = parse_rules(turn.text);
  }

  if (history.empty() || history.back().kind == Kind::Clarify) return result;
  const auto& previous = history.back();
  const auto pending = check_sufficiency(previous);
  if (pending.sufficient) return result;

  if (result.intent.kind == previous.kind) {
    result.intent.slots = merged(result.intent.slots, previous.slots);
  } else if (result.intent.kind == Kind::Clarify) {
    if (auto answered = answer_to(previous, pending.missing, turn.text)) result.intent = *answered;
  }
  return result;
}

}  // namespace roadchat::intent
