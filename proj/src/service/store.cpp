#include <cctype>
#include <fstream>
#include <sstream>

#include "roadchat/errors.hpp"
#include "roadchat/service.hpp"

namespace roadchat::service {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& artifact_files() {
  static const std::map<std::string, std::string> files = {
      {"net", kNetFile}, {"rou", kRouFile}, {"add", kAddFile}, {"sumocfg", kCfgFile}, {"metrics", kMetricsFile}};
  return files;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

void append_line(const fs::path& path, const nlohmann::json& entry) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << entry.dump() << '\n';
  out.close();
  if (!out) throw Error("cannot append to " + path.string());
}

std::vector<nlohmann::json> read_lines(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

}  // namespace

nlohmann::json to_json(const ScenarioInputs& in) {
  return {{"network_source", in.network_source}, {"edits", in.edits},
          {"volume_veh_h", in.volume},           {"duration_s", in.duration},
          {"seed", in.seed},                     {"ev_proportion", in.ev_proportion},
          {"signal_plan", in.signal_plan}};
}

ScenarioInputs inputs_from_json(const nlohmann::json& j) {
  ScenarioInputs in;
  in.network_source = j.at("network_source").get<std::string>();
  in.edits = j.at("edits").get<std::vector<std::string>>();
  in.volume = j.at("volume_veh_h").get<double>();
  in.duration = j.at("duration_s").get<double>();
  in.seed = j.at("seed").get<std::uint64_t>();
  in.ev_proportion = j.at("ev_proportion").get<double>();
  in.signal_plan = j.at("signal_plan").get<std::string>();
  return in;
}

nlohmann::json to_json(const Run& run) {
  return {{"run_id", run.run_id},       {"session_id", run.session_id}, {"index", run.index},
          {"label", run.label},         {"status", run.status},         {"inputs", to_json(run.inputs)},
          {"artifacts", run.artifacts}, {"metrics", analysis::to_json(run.metrics)}};
}

Run run_from_json(const nlohmann::json& j) {
  Run run;
  run.run_id = j.at("run_id").get<std::string>();
  run.session_id = j.at("session_id").get<std::string>();
  run.index = j.at("index").get<int>();
  run.label = j.at("label").get<std::string>();
  run.status = j.at("status").get<std::string>();
  run.inputs = inputs_from_json(j.at("inputs"));
  run.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  run.metrics = analysis::metrics_from_json(j.at("metrics"));
  return run;
}

nlohmann::json to_json(const TurnRecord& t) {
  return {{"index", t.index},
          {"text", t.text},
          {"intent", intent::to_json(t.intent)},
          {"response", t.response},
          {"run_id", t.run_id ? nlohmann::json(*t.run_id) : nlohmann::json(nullptr)},
          {"options", t.options},
          {"degraded", t.degraded}};
}

TurnRecord turn_from_json(const nlohmann::json& j) {
  TurnRecord t;
  t.index = j.at("index").get<int>();
  t.text = j.at("text").get<std::string>();
  t.intent = intent::intent_from_json(j.at("intent"));
  t.response = j.at("response").get<std::string>();
  if (!j.at("run_id").is_null()) t.run_id = j.at("run_id").get<std::string>();
  t.options = j.at("options").get<std::vector<std::string>>();
  t.degraded = j.at("degraded").get<bool>();
  return t;
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "runs");
  fs::create_directories(root_ / "sessions");
}

void RunStore::append_index(const nlohmann::json& entry) { append_line(root_ / "index.jsonl", entry); }

std::vector<nlohmann::json> RunStore::read_index() const { return read_lines(root_ / "index.jsonl"); }

std::string RunStore::new_session_id() {
  std::lock_guard lock(index_mutex_);
  int sessions = 0;
  for (const auto& e : read_index()) sessions += e.at("type") == "session";
  const auto id = "s" + std::to_string(sessions + 1);
  append_index({{"type", "session"}, {"session_id", id}});
  return id;
}

bool RunStore::has_session(const std::string& session_id) const {
  std::lock_guard lock(index_mutex_);
  for (const auto& e : read_index()) {
    if (e.at("type") == "session" && e.at("session_id") == session_id) return true;
  }
  return false;
}

std::vector<std::string> RunStore::sessions() const {
  std::lock_guard lock(index_mutex_);
  std::vector<std::string> out;
  for (const auto& e : read_index()) {
    if (e.at("type") == "session") out.push_back(e.at("session_id").get<std::string>());
  }
  return out;
}

fs::path RunStore::run_dir(const std::string& run_id) const { return root_ / "runs" / run_id; }

Run RunStore::persist(Run run, const FileBundle& files) {
  if (!safe_id(run.run_id)) throw InvalidArgument("bad run id '" + run.run_id + "'");
  std::lock_guard lock(index_mutex_);
  const auto dir = run_dir(run.run_id);
  if (fs::exists(dir)) throw InvalidArgument("run '" + run.run_id + "' already exists");
  const auto staging = root_ / "runs" / (".staging-" + run.run_id);
  fs::remove_all(staging);
  try {
    fs::create_directories(staging);
    run.artifacts.clear();
    for (const auto& [kind, name] : artifact_files()) {
      if (kind == "metrics") continue;
      auto it = files.find(name);
      if (it == files.end()) continue;
      write_file(staging / name, it->second);
      run.artifacts[kind] = name;
    }
    write_file(staging / kMetricsFile, analysis::to_json(run.metrics).dump(2) + "\n");
    run.artifacts["metrics"] = kMetricsFile;
    write_file(staging / "run.json", to_json(run).dump(2) + "\n");
    fs::rename(staging, dir);
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
  try {
    append_index({{"type", "run"}, {"run_id", run.run_id}, {"session_id", run.session_id}, {"label", run.label}});
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(dir, ignored);
    throw;
  }
  return run;
}

Run RunStore::load(const std::string& run_id) const {
  if (!safe_id(run_id)) throw UnknownRun("unknown run '" + run_id + "'");
  const auto path = run_dir(run_id) / "run.json";
  if (!fs::exists(path)) throw UnknownRun("unknown run '" + run_id + "'");
  return run_from_json(nlohmann::json::parse(slurp(path)));
}

std::vector<Run> RunStore::list(const std::optional<std::string>& session_id) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(index_mutex_);
    for (const auto& e : read_index()) {
      if (e.at("type") != "run") continue;
      if (session_id && e.at("session_id") != *session_id) continue;
      ids.push_back(e.at("run_id").get<std::string>());
    }
  }
  std::vector<Run> out;
  for (const auto& id : ids) out.push_back(load(id));
  return out;
}

std::string RunStore::read_artifact(const std::string& run_id, const std::string& kind) const {
  const auto run = load(run_id);
  if (!artifact_files().count(kind)) throw InvalidArgument("unknown artifact kind '" + kind + "'");
  auto it = run.artifacts.find(kind);
  if (it == run.artifacts.end()) throw UnknownRun("run '" + run_id + "' has no " + kind + " file");
  return slurp(run_dir(run_id) / it->second);
}

void RunStore::append_turn(const std::string& session_id, const nlohmann::json& turn) {
  if (!safe_id(session_id)) throw UnknownSession("unknown session '" + session_id + "'");
  append_line(root_ / "sessions" / (session_id + ".jsonl"), turn);
}

std::vector<nlohmann::json> RunStore::history(const std::string& session_id) const {
  if (!safe_id(session_id) || !has_session(session_id)) {
    throw UnknownSession("unknown session '" + session_id + "'");
  }
  return read_lines(root_ / "sessions" / (session_id + ".jsonl"));
}

}  // namespace roadchat::service
