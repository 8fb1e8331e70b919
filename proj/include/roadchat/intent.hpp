#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace roadchat::intent {

enum class Kind {
  GenerateRealWorld,
  GenerateAbstract,
  EdgeRemove,
  LaneRemove,
  TlsOffset,
  TlsAdaptation,
  AddVehicle,
  VehicleMix,
  Compare,
  Clarify,
};

enum class TrafficCondition { light, medium, heavy };
enum class NetworkKind { grid, spider };

inline constexpr double kMetersPerMile = 1609.344;

struct GridParams {
  int rows = 5;
  int cols = 5;
  double spacing = 200.0;  // m
  bool operator==(const GridParams&) const = default;
};

struct SpiderParams {
  int arms = 20;
  int circles = 10;
  double spacing = 150.0;  // m
  bool operator==(const SpiderParams&) const = default;
};

struct SlotMap {
  std::optional<std::string> city;
  std::optional<double> radius;  // metres
  std::optional<TrafficCondition> traffic_condition;
  std::optional<NetworkKind> network_kind;
  std::optional<GridParams> grid_params;
  std::optional<SpiderParams> spider_params;
  std::optional<std::string> edge_name;
  std::optional<int> lane_index;  // 0-based
  std::optional<std::string> origin_edge;
  std::optional<std::string> dest_edge;
  std::optional<double> depart;  // s, AddVehicle only; defaults to 0
  std::optional<double> ev_proportion;
  std::optional<std::vector<std::string>> compare_run_ids;
  bool operator==(const SlotMap&) const = default;
};

struct Intent {
  Kind kind = Kind::Clarify;
  SlotMap slots;
  bool operator==(const Intent&) const = default;
};

struct UserTurn {
  std::string session_id;
  std::string text;
  int turn_index = 0;
};

std::string_view kind_name(Kind kind);
std::optional<Kind> kind_from_name(std::string_view name);
std::string_view traffic_name(TrafficCondition t);
std::string_view network_kind_name(NetworkKind k);

/// Vehicles per hour for a traffic condition.
double traffic_volume(TrafficCondition t);

nlohmann::json to_json(const Intent& intent);
Intent intent_from_json(const nlohmann::json& j);

struct SufficiencyReport {
  bool sufficient = false;
  std::vector<std::string> missing;  // slot names, also invalid ones
  Intent completed;                  // input with defaults applied
};

/// Throws InvalidArgument for Clarify intents.
SufficiencyReport check_sufficiency(const Intent& intent);

/// One-sentence question for the missing slots. Throws InvalidArgument when nothing is missing.
std::string render_clarification(const SufficiencyReport& report);

/// Deterministic keyword grammar.
Intent parse_rules(std::string_view text);

/// Text that parse_rules maps back to `intent`.
std::string canonical_phrasing(const Intent& intent);

struct LlmConfig {
  std::string base_url;  // OpenAI-style, e.g. http://host:port/v1
  std::string model = "default";
  std::string api_key;
  int timeout_s = 60;

  /// ROADCHAT_LLM_URL, ROADCHAT_LLM_MODEL, ROADCHAT_LLM_API_KEY; nullopt without a URL.
  static std::optional<LlmConfig> from_env();
};

/// Fixed instruction sent ahead of every user turn.
extern const char* const kSystemPrompt;

/// One chat completion. Throws BackendUnavailable when the endpoint cannot be reached or
/// answers with an error status, UnparseableReply when the body has no message content.
std::string chat_completion(const LlmConfig& config, std::string_view system_prompt, std::string_view user_text);

/// Reads a flat key/value record (JSON object or Python dict literal) into an intent.
/// Throws UnparseableReply.
Intent intent_from_reply(std::string_view reply);

struct ParseResult {
  Intent intent;
  bool degraded = false;  // the LLM was configured but unreachable; rules were used
};

class Parser {
 public:
  explicit Parser(std::optional<LlmConfig> llm = std::nullopt) : llm_(std::move(llm)) {}

  /// `history` holds earlier intents of the session; a bare reply to a clarification question
  /// fills the slot that was asked for.
  ParseResult parse_turn(const UserTurn& turn, const std::vector<Intent>& history) const;

  bool uses_llm() const { return llm_.has_value(); }
  const std::optional<LlmConfig>& llm() const { return llm_; }

 private:
  std::optional<LlmConfig> llm_;
};

}  // namespace roadchat::intent
