#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadchat/analysis.hpp"
#include "roadchat/demand.hpp"
#include "roadchat/intent.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::service {

/// What a run was built from. `network_source` is "osm:<city>:<radius m>", "grid:<r>x<c>x<s>"
/// or "spider:<a>x<c>x<s>"; `edits` lists the customizations applied since, oldest first.
struct ScenarioInputs {
  std::string network_source;
  std::vector<std::string> edits;
  double volume = 0.0;    // veh/h
  double duration = 0.0;  // s of departures
  std::uint64_t seed = 0;
  double ev_proportion = 0.0;
  std::string signal_plan = "default";  // default, offsets, adapted, adapted+offsets
  bool operator==(const ScenarioInputs&) const = default;
};

// Artifact kinds and the file names they get inside a run directory.
inline constexpr const char* kNetFile = "net.net.xml";
inline constexpr const char* kRouFile = "routes.rou.xml";
inline constexpr const char* kAddFile = "signals.add.xml";
inline constexpr const char* kCfgFile = "scenario.sumocfg";
inline constexpr const char* kMetricsFile = "metrics.json";

struct Run {
  std::string run_id;  // "<session>-<n>", n counting from 1 within the session
  std::string session_id;
  int index = 0;
  std::string label;
  std::string status = "complete";
  ScenarioInputs inputs;
  std::map<std::string, std::string> artifacts;  // net, rou, add, sumocfg, metrics -> file name
  analysis::MetricsReport metrics;
  bool operator==(const Run&) const = default;
};

nlohmann::json to_json(const ScenarioInputs& inputs);
ScenarioInputs inputs_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Run& run);
Run run_from_json(const nlohmann::json& j);

// SUMO bundle

struct SumoConfig {
  std::string net_file;
  std::vector<std::string> route_files;
  std::vector<std::string> additional_files;
  double begin = 0.0;
  double end = 0.0;
  bool operator==(const SumoConfig&) const = default;
};

std::string emit_sumocfg(const SumoConfig& config);
/// Throws ParseError.
SumoConfig parse_sumocfg(std::string_view xml_text);

/// File name -> content for one scenario, sumocfg included.
using FileBundle = std::map<std::string, std::string>;

FileBundle make_bundle(const net::RoadNetwork& net, const demand::DemandSet& demand,
                       const std::optional<std::string>& add_xml, double end_time);

struct LoadedBundle {
  SumoConfig config;
  net::RoadNetwork network;  // additional-file signal programs applied
  demand::DemandSet demand;
};

/// Re-reads a bundle written by make_bundle from the directory holding `sumocfg_path`.
LoadedBundle load_bundle(const std::filesystem::path& sumocfg_path, double duration);

// Run store

/// Flat directory: `index.jsonl` (append-only: sessions and runs), `runs/<run id>/` with the
/// artifacts plus `run.json`, and `sessions/<session id>.jsonl` with the recorded turns.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::string new_session_id();
  bool has_session(const std::string& session_id) const;
  std::vector<std::string> sessions() const;

  /// Writes the bundle and metrics, then records the run. `run.artifacts` is filled in.
  /// Nothing is left behind when it throws.
  Run persist(Run run, const FileBundle& files);
  Run load(const std::string& run_id) const;  // throws UnknownRun
  std::vector<Run> list(const std::optional<std::string>& session_id = std::nullopt) const;
  std::filesystem::path run_dir(const std::string& run_id) const;
  /// `kind` is net, rou, add, sumocfg or metrics. Throws UnknownRun (also for an absent add file),
  /// InvalidArgument for any other kind.
  std::string read_artifact(const std::string& run_id, const std::string& kind) const;

  void append_turn(const std::string& session_id, const nlohmann::json& turn);
  std::vector<nlohmann::json> history(const std::string& session_id) const;  // throws UnknownSession

 private:
  void append_index(const nlohmann::json& entry);
  std::vector<nlohmann::json> read_index() const;

  std::filesystem::path root_;
  mutable std::mutex index_mutex_;
};

// Sessions

struct TurnRecord {
  int index = 0;
  std::string text;
  intent::Intent intent;
  std::string response;
  std::optional<std::string> run_id;
  std::vector<std::string> options;
  bool degraded = false;
  bool operator==(const TurnRecord&) const = default;
};

nlohmann::json to_json(const TurnRecord& turn);
TurnRecord turn_from_json(const nlohmann::json& j);

struct ScenarioState {
  net::RoadNetwork network;
  demand::DemandSet demand;
  ScenarioInputs inputs;
};

/// A removal waiting for the user to pick one of several matching street names.
struct PendingChoice {
  intent::Intent intent;
  std::vector<std::string> options;
};

struct Session {
  std::string id;
  std::vector<TurnRecord> turns;
  std::optional<ScenarioState> current;
  std::vector<std::string> run_ids;
  std::optional<PendingChoice> pending;
};

struct TurnResult {
  std::string session_id;
  int turn_index = 0;
  std::string response;
  intent::Intent intent;
  bool degraded = false;
  std::optional<Run> run;
  std::optional<std::string> clarification;
  std::vector<std::string> options;  // disambiguation choices
  std::optional<analysis::ComparisonReport> comparison;
  std::optional<std::string> error;  // error code of a failed turn
};

nlohmann::json to_json(const TurnResult& result);

struct ServiceConfig {
  std::filesystem::path store_dir = "roadchat-store";
  std::filesystem::path gazetteer = std::filesystem::path(ROADCHAT_DATA_DIR) / "gazetteer.tsv";
  /// Offline geodata: a `.osm` file or a directory of `<city>.osm`.
  std::optional<std::filesystem::path> fixture_dir;
  std::optional<std::string> geocoder_url;
  std::optional<std::string> osm_url;
  std::optional<intent::LlmConfig> llm;
  analysis::ReportMode report_mode = analysis::ReportMode::template_text;
  std::uint64_t seed = 42;
  double initial_ev_proportion = 0.3;
  double demand_duration = 3600.0;
  double clearance = 1800.0;  // extra simulated time after the last departure
  bool parallel_kernels = false;

  /// ROADCHAT_STORE, ROADCHAT_FIXTURE_DIR, ROADCHAT_GEOCODER_URL, ROADCHAT_OSM_URL and the LLM variables.
  static ServiceConfig from_env();
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  std::string create_session();
  /// Never throws for domain errors: they come back as `error` with the session untouched.
  /// Throws UnknownSession.
  TurnResult handle_turn(const std::string& session_id, const std::string& text);

  Session session(const std::string& session_id) const;  // snapshot; throws UnknownSession
  std::vector<TurnRecord> history(const std::string& session_id) const;

  Run load_run(const std::string& run_id) const;
  std::vector<Run> list_runs(const std::optional<std::string>& session_id = std::nullopt) const;
  analysis::ComparisonReport compare_runs(const std::string& run_a, const std::string& run_b) const;
  std::string run_file(const std::string& run_id, const std::string& kind) const;
  /// Copies the run's bundle into `dir`; returns the written paths.
  std::vector<std::filesystem::path> export_run(const std::string& run_id, const std::filesystem::path& dir) const;
  /// Node positions and edge polylines of the run's network, top-10 edges flagged.
  nlohmann::json geometry(const std::string& run_id) const;

  /// Feeds the recorded turns of `session_id` into a fresh session; returns its id.
  std::string replay(const std::string& session_id);

  const ServiceConfig& config() const { return config_; }
  RunStore& store() { return store_; }

 private:
  struct Slot;
  struct Backends;

  /// Sessions known only to the store are rebuilt from their history and last run.
  Slot& slot(const std::string& session_id) const;

  ServiceConfig config_;
  RunStore store_;
  intent::Parser parser_;
  std::unique_ptr<Backends> backends_;
  mutable std::mutex sessions_mutex_;
  mutable std::map<std::string, std::unique_ptr<Slot>> sessions_;
};

// HTTP API

class HttpApi {
 public:
  explicit HttpApi(Service& service);
  ~HttpApi();

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; call listen_after_bind() to serve.
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace roadchat::service
