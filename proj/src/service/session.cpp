#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "roadchat/errors.hpp"
#include "roadchat/geodata.hpp"
#include "roadchat/service.hpp"
#include "roadchat/signal.hpp"
#include "roadchat/sim.hpp"

namespace roadchat::service {

namespace fs = std::filesystem;
using intent::Kind;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n.!?\"'");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n.!?\"'");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

constexpr const char* kHelp =
    "I can generate a simulation for a city or an abstract grid or spider network, remove a street or one of "
    "its lanes, set traffic light offsets, adapt the traffic light cycles, add a vehicle between two roads, "
    "change the share of electric vehicles, or compare runs. What would you like to do?";

constexpr const char* kNoScenario = "There is no simulation to change yet. Please generate one first, for example "
                                    "\"Generate a simulation in city Albany with radius 1 mile and medium traffic.\"";

constexpr const char* kRoadsNotFound = "Entered Roads are not in the current network";

std::string describe(const net::RoadNetwork& net, const demand::DemandSet& demand) {
  std::size_t junctions = 0;
  for (const auto& n : net.nodes()) junctions += n.is_junction;
  return std::to_string(net.nodes().size()) + " nodes (" + std::to_string(junctions) + " junctions), " +
         std::to_string(net.edges().size()) + " edges, " + std::to_string(net.traffic_lights().size()) +
         " traffic lights and " + std::to_string(demand.trips.size()) + " trips";
}

std::optional<std::string> signal_file(const net::RoadNetwork& net, const std::string& plan) {
  if (plan.find("adapted") != std::string::npos) return signal::emit_tls_add_xml(net, signal::TlsFileKind::programs);
  if (plan == "offsets") return signal::emit_tls_add_xml(net, signal::TlsFileKind::offsets);
  return std::nullopt;
}

std::string with_plan(const std::string& plan, const std::string& added) {
  if (plan == "default" || plan == added) return added;
  if (plan.find(added) != std::string::npos) return plan;
  return added == "adapted" ? "adapted+" + plan : plan + "+" + added;
}

// Outcome of applying one intent to a session copy.
struct Step {
  std::string response;
  std::optional<std::string> label;  // set when a run must follow
  std::optional<std::string> clarification;
  std::vector<std::string> options;
  std::optional<analysis::ComparisonReport> comparison;
};

}  // namespace

struct Service::Backends {
  geodata::Geocoder geocoder;
  std::optional<geodata::OsmFetcher> fetcher;

  Backends(geodata::Gazetteer gazetteer, const ServiceConfig& config)
      : geocoder(std::move(gazetteer), config.geocoder_url) {
    if (config.fixture_dir) {
      fetcher = geodata::OsmFetcher::fixture(*config.fixture_dir);
    } else if (config.osm_url) {
      fetcher = geodata::OsmFetcher::remote(*config.osm_url);
    }
  }
};

struct Service::Slot {
  std::mutex mutex;
  Session session;
};

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (auto v = env("ROADCHAT_STORE")) c.store_dir = *v;
  if (auto v = env("ROADCHAT_FIXTURE_DIR")) c.fixture_dir = fs::path(*v);
  if (auto v = env("ROADCHAT_GAZETTEER")) c.gazetteer = *v;
  c.geocoder_url = env("ROADCHAT_GEOCODER_URL");
  c.osm_url = env("ROADCHAT_OSM_URL");
  c.llm = intent::LlmConfig::from_env();
  return c;
}

namespace {

geodata::Gazetteer load_gazetteer(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return geodata::Gazetteer::load(path);
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(config_.store_dir),
      parser_(config_.llm),
      backends_(std::make_unique<Backends>(load_gazetteer(config_.gazetteer), config_)) {}

Service::~Service() = default;

std::string Service::create_session() {
  auto id = store_.new_session_id();
  auto slot = std::make_unique<Slot>();
  slot->session.id = id;
  std::lock_guard lock(sessions_mutex_);
  sessions_[id] = std::move(slot);
  return id;
}

Service::Slot& Service::slot(const std::string& session_id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it != sessions_.end()) return *it->second;
  if (!store_.has_session(session_id)) throw UnknownSession("unknown session '" + session_id + "'");

  auto restored = std::make_unique<Slot>();
  auto& session = restored->session;
  session.id = session_id;
  session.turns = history(session_id);
  for (const auto& run : store_.list(session_id)) session.run_ids.push_back(run.run_id);
  if (!session.run_ids.empty()) {
    const auto last = store_.load(session.run_ids.back());
    auto bundle = load_bundle(store_.run_dir(last.run_id) / kCfgFile, last.inputs.duration);
    session.current = ScenarioState{std::move(bundle.network), std::move(bundle.demand), last.inputs};
  }
  if (!session.turns.empty() && !session.turns.back().options.empty()) {
    session.pending = PendingChoice{session.turns.back().intent, session.turns.back().options};
  }
  return *(sessions_[session_id] = std::move(restored));
}

Session Service::session(const std::string& session_id) const {
  auto& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  return s.session;
}

std::vector<TurnRecord> Service::history(const std::string& session_id) const {
  std::vector<TurnRecord> out;
  for (const auto& j : store_.history(session_id)) out.push_back(turn_from_json(j));
  return out;
}

Run Service::load_run(const std::string& run_id) const { return store_.load(run_id); }

std::vector<Run> Service::list_runs(const std::optional<std::string>& session_id) const {
  return store_.list(session_id);
}

analysis::ComparisonReport Service::compare_runs(const std::string& run_a, const std::string& run_b) const {
  return analysis::compare(store_.load(run_a).metrics, store_.load(run_b).metrics, run_a, run_b);
}

std::string Service::run_file(const std::string& run_id, const std::string& kind) const {
  return store_.read_artifact(run_id, kind);
}

std::vector<fs::path> Service::export_run(const std::string& run_id, const fs::path& dir) const {
  const auto run = store_.load(run_id);
  fs::create_directories(dir);
  std::vector<fs::path> written;
  for (const auto& [kind, name] : run.artifacts) {
    const auto target = dir / name;
    fs::copy_file(store_.run_dir(run_id) / name, target, fs::copy_options::overwrite_existing);
    written.push_back(target);
  }
  return written;
}

nlohmann::json Service::geometry(const std::string& run_id) const {
  const auto run = store_.load(run_id);
  const auto net = net::parse_net_xml(store_.read_artifact(run_id, "net"));
  std::map<std::string, double> top;
  for (const auto& e : run.metrics.top10_edges) top[e.edge] = e.density;

  nlohmann::json nodes = nlohmann::json::array();
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  bool first = true;
  auto extend = [&](double x, double y) {
    if (first) {
      min_x = max_x = x;
      min_y = max_y = y;
      first = false;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  for (const auto& n : net.nodes()) {
    nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"junction", n.is_junction},
                     {"signalized", net.light_index(n.id).has_value()}});
    extend(n.x, n.y);
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : net.edges()) {
    nlohmann::json shape = nlohmann::json::array();
    for (const auto& p : e.shape) {
      shape.push_back({p.x, p.y});
      extend(p.x, p.y);
    }
    nlohmann::json edge = {{"id", e.id}, {"street_name", e.street_name}, {"lanes", e.lane_count},
                           {"shape", shape}, {"top10", top.count(e.id) > 0}};
    if (auto it = top.find(e.id); it != top.end()) edge["density_veh_per_km"] = it->second;
    edges.push_back(std::move(edge));
  }
  return {{"run_id", run_id},
          {"bounds", {{"min_x", min_x}, {"min_y", min_y}, {"max_x", max_x}, {"max_y", max_y}}},
          {"nodes", nodes},
          {"edges", edges}};
}

std::string Service::replay(const std::string& session_id) {
  const auto turns = history(session_id);
  const auto fresh = create_session();
  for (const auto& t : turns) handle_turn(fresh, t.text);
  return fresh;
}

namespace {

struct Context {
  const ServiceConfig& config;
  geodata::Geocoder& geocoder;
  const std::optional<geodata::OsmFetcher>& fetcher;
};

ScenarioState generate(const Context& ctx, const intent::Intent& in) {
  const auto& s = in.slots;
  ScenarioState state;
  auto& inputs = state.inputs;
  if (in.kind == Kind::GenerateRealWorld) {
    if (!ctx.fetcher) throw FetchFailed("no OSM source configured; set a fixture directory or an OSM endpoint");
    const auto center = ctx.geocoder.geocode(*s.city);
    const auto box = geodata::bbox_around(center, *s.radius);
    const auto doc = ctx.fetcher->fetch(box, *s.city);
    net::ConvertOptions options;
    options.origin = center;
    state.network = net::convert_osm(doc, options);
    inputs.network_source = "osm:" + lower(*s.city) + ":" + fixed(*s.radius, 1);
  } else if (*s.network_kind == intent::NetworkKind::grid) {
    const auto& g = *s.grid_params;
    state.network = net::generate_grid(g.rows, g.cols, g.spacing);
    inputs.network_source = "grid:" + std::to_string(g.rows) + "x" + std::to_string(g.cols) + "x" + fixed(g.spacing, 1);
  } else {
    const auto& p = *s.spider_params;
    state.network = net::generate_spider(p.arms, p.circles, p.spacing);
    inputs.network_source =
        "spider:" + std::to_string(p.arms) + "x" + std::to_string(p.circles) + "x" + fixed(p.spacing, 1);
  }
  inputs.volume = intent::traffic_volume(*s.traffic_condition);
  inputs.duration = ctx.config.demand_duration;
  inputs.seed = ctx.config.seed;
  inputs.ev_proportion = ctx.config.initial_ev_proportion;
  inputs.signal_plan = "default";
  state.demand = demand::generate_demand(state.network, inputs.volume, inputs.duration, inputs.seed,
                                         demand::MixSpec{inputs.ev_proportion});
  return state;
}

// Edges to remove for a street name, or the names to choose from.
struct NameLookup {
  std::vector<net::Edge> edges;
  std::vector<std::string> options;
  std::string name;
};

NameLookup lookup_street(const net::RoadNetwork& net, const std::string& wanted) {
  NameLookup out;
  out.edges = net::find_edges_by_name(net, wanted);
  if (!out.edges.empty()) {
    out.name = out.edges.front().street_name;
    return out;
  }
  if (auto e = net.edge_index(wanted)) {
    out.edges.push_back(net.edges()[*e]);
    out.name = wanted;
    return out;
  }
  const auto names = net::street_names_matching(net, wanted);
  if (names.empty()) throw UnknownEdge("There is no street called '" + wanted + "' in the current network");
  if (names.size() > 1) {
    out.options = names;
    return out;
  }
  out.name = names.front();
  out.edges = net::find_edges_by_name(net, out.name);
  return out;
}

std::string resolve_road(const net::RoadNetwork& net, const std::string& name) {
  if (net.edge_index(name)) return name;
  const auto edges = net::find_edges_by_name(net, name);
  if (edges.empty()) throw UnknownEdge(kRoadsNotFound);
  return edges.front().id;
}

Step remove_street(ScenarioState& state, const intent::Intent& in) {
  Step step;
  const auto found = lookup_street(state.network, *in.slots.edge_name);
  if (!found.options.empty()) {
    step.options = found.options;
    step.response = "Several streets match '" + *in.slots.edge_name + "'. Which one do you mean?";
    for (std::size_t i = 0; i < found.options.size(); ++i) {
      step.response += "\n" + std::to_string(i + 1) + ". " + found.options[i];
    }
    return step;
  }

  if (in.kind == Kind::EdgeRemove) {
    std::vector<std::string> ids;
    for (const auto& e : found.edges) ids.push_back(e.id);
    const auto previous = state.network;
    auto edit = net::remove_edges(state.network, ids);
    auto rerouted = demand::reroute_invalidated(previous, edit.network, state.demand);
    state.network = std::move(edit.network);
    state.demand = std::move(rerouted.demand);
    step.response = "Removed " + found.name + " (" + std::to_string(ids.size()) + " edges). " +
                    std::to_string(rerouted.rerouted) + " trips were rerouted and " +
                    std::to_string(rerouted.dropped) + " dropped.";
    for (auto w : edit.warnings) {
      if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      step.response += " " + w + ".";
    }
    step.label = "removed " + found.name;
  } else {
    const int lane = *in.slots.lane_index;
    auto net = state.network;
    int changed = 0;
    std::optional<std::string> last_error;
    for (const auto& e : found.edges) {
      try {
        net = net::remove_lane(net, e.id, lane);
        ++changed;
      } catch (const LastLane& err) {
        last_error = err.what();
      } catch (const InvalidArgument& err) {
        last_error = err.what();
      }
    }
    if (changed == 0) throw LastLane(last_error.value_or("no lane could be removed from " + found.name));
    state.network = std::move(net);
    step.response = "Removed lane " + std::to_string(lane + 1) + " on " + std::to_string(changed) + " edges of " +
                    found.name + ".";
    step.label = "removed lane " + std::to_string(lane + 1) + " of " + found.name;
  }
  state.inputs.edits.push_back(*step.label);
  return step;
}

Step customize(ScenarioState& state, const intent::Intent& in, std::uint64_t seed) {
  const auto& s = in.slots;
  Step step;
  auto& inputs = state.inputs;
  switch (in.kind) {
    case Kind::EdgeRemove:
    case Kind::LaneRemove:
      return remove_street(state, in);
    case Kind::TlsOffset: {
      auto result = signal::coordinate_offsets(state.network, state.demand);
      state.network = std::move(result.network);
      step.response = "Coordinated offsets for " + std::to_string(result.offsets.size()) + " traffic lights along " +
                      std::to_string(result.corridors.size()) + " busy corridors.";
      inputs.signal_plan = with_plan(inputs.signal_plan, "offsets");
      step.label = "traffic light offsets";
      break;
    }
    case Kind::TlsAdaptation: {
      if (state.network.traffic_lights().empty()) throw NoSignals("the network has no traffic lights to adapt");
      auto result = signal::adapt_all(state.network, state.demand);
      if (result.adapted.empty()) {
        std::string why = "no traffic light could be adapted";
        if (!result.skipped.empty()) why += ": " + result.skipped.begin()->second;
        throw Oversaturated(why);
      }
      state.network = std::move(result.network);
      step.response = "Adapted the cycle of " + std::to_string(result.adapted.size()) + " traffic lights to the demand";
      if (!result.skipped.empty()) step.response += "; " + std::to_string(result.skipped.size()) + " were left as they were";
      step.response += ".";
      inputs.signal_plan = with_plan(inputs.signal_plan, "adapted");
      step.label = "traffic light adaptation";
      break;
    }
    case Kind::AddVehicle: {
      const auto origin = resolve_road(state.network, *s.origin_edge);
      const auto dest = resolve_road(state.network, *s.dest_edge);
      try {
        state.demand = demand::add_vehicle(state.network, state.demand, origin, dest, *s.depart);
      } catch (const UnknownEdge&) {
        throw UnknownEdge(kRoadsNotFound);
      }
      step.response = "Added a vehicle from " + *s.origin_edge + " to " + *s.dest_edge + " departing at " +
                      fixed(*s.depart, 0) + " s.";
      step.label = "added vehicle from " + *s.origin_edge + " to " + *s.dest_edge;
      break;
    }
    case Kind::VehicleMix: {
      state.demand = demand::set_vehicle_mix(state.demand, demand::MixSpec{*s.ev_proportion}, seed);
      inputs.ev_proportion = *s.ev_proportion;
      step.response = "Set the proportion of electric vehicles to " + fixed(*s.ev_proportion, 2) + ".";
      step.label = "electric vehicle share " + fixed(*s.ev_proportion, 2);
      break;
    }
    default:
      throw InvalidArgument("not a customization");
  }
  inputs.edits.push_back(*step.label);
  return step;
}

std::optional<std::string> pick_option(const PendingChoice& pending, const std::string& text) {
  const auto answer = lower(trim(text));
  if (answer.empty()) return std::nullopt;
  if (std::all_of(answer.begin(), answer.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const auto n = std::stoul(answer);
    if (n >= 1 && n <= pending.options.size()) return pending.options[n - 1];
    return std::nullopt;
  }
  for (const auto& o : pending.options) {
    if (lower(o) == answer) return o;
  }
  std::optional<std::string> hit;
  for (const auto& o : pending.options) {
    if (answer.find(lower(o)) != std::string::npos) {
      if (hit) return std::nullopt;
      hit = o;
    }
  }
  return hit;
}

}  // namespace

TurnResult Service::handle_turn(const std::string& session_id, const std::string& text) {
  auto& s = slot(session_id);
  std::lock_guard lock(s.mutex);
  Session work = s.session;

  TurnResult result;
  result.session_id = session_id;
  result.turn_index = static_cast<int>(work.turns.size());

  intent::Intent parsed;
  bool from_choice = false;
  if (work.pending) {
    if (auto choice = pick_option(*work.pending, text)) {
      parsed = work.pending->intent;
      parsed.slots.edge_name = *choice;
      from_choice = true;
    }
  }
  if (!from_choice) {
    std::vector<intent::Intent> history;
    for (const auto& t : work.turns) history.push_back(t.intent);
    intent::UserTurn turn{session_id, text, result.turn_index};
    auto p = parser_.parse_turn(turn, history);
    parsed = p.intent;
    result.degraded = p.degraded;
  }
  work.pending.reset();
  result.intent = parsed;

  Step step;
  Context ctx{config_, backends_->geocoder, backends_->fetcher};
  try {
    if (parsed.kind == Kind::Clarify) {
      step.response = kHelp;
      step.clarification = kHelp;
    } else {
      const auto report = intent::check_sufficiency(parsed);
      if (!report.sufficient) {
        step.response = intent::render_clarification(report);
        step.clarification = step.response;
      } else {
        const auto& in = report.completed;
        result.intent = in;
        switch (in.kind) {
          case Kind::GenerateRealWorld:
          case Kind::GenerateAbstract: {
            work.current = generate(ctx, in);
            step.response = "Generated a network with " + describe(work.current->network, work.current->demand) + ".";
            step.label = "initial";
            break;
          }
          case Kind::Compare: {
            std::vector<std::string> ids = in.slots.compare_run_ids.value_or(std::vector<std::string>{});
            if (ids.size() == 1 && !work.run_ids.empty()) ids.push_back(work.run_ids.back());
            if (ids.empty() && work.run_ids.size() >= 2) {
              ids = {work.run_ids[work.run_ids.size() - 2], work.run_ids.back()};
            }
            if (ids.size() < 2) {
              step.response = "There is nothing to compare yet. Customize the simulation first, then ask for a comparison.";
              break;
            }
            auto cmp = compare_runs(ids[0], ids[1]);
            step.response = analysis::render_comparison(cmp, config_.report_mode, config_.llm);
            step.comparison = std::move(cmp);
            break;
          }
          default: {
            if (!work.current) {
              step.response = kNoScenario;
              break;
            }
            step = customize(*work.current, in, config_.seed);
            if (!step.options.empty()) work.pending = PendingChoice{in, step.options};
            break;
          }
        }
      }
    }

    if (step.label) {
      const auto& state = *work.current;
      sim::SimConfig cfg;
      double last_depart = state.inputs.duration;
      for (const auto& t : state.demand.trips) last_depart = std::max(last_depart, t.depart);
      cfg.end_time = last_depart + config_.clearance;
      cfg.seed = state.inputs.seed;
      cfg.parallel_kernels = config_.parallel_kernels;
      const auto out = sim::run(state.network, state.demand, cfg);

      Run run;
      run.index = static_cast<int>(work.run_ids.size()) + 1;
      run.run_id = session_id + "-" + std::to_string(run.index);
      run.session_id = session_id;
      run.label = *step.label;
      run.inputs = state.inputs;
      run.metrics = analysis::compute_metrics(out, state.network);
      const auto files =
          make_bundle(state.network, state.demand, signal_file(state.network, state.inputs.signal_plan), cfg.end_time);

      std::string response = step.response + "\nRun " + run.run_id + " (" + run.label + ") finished.\n" +
                             analysis::render_report(run.metrics, config_.report_mode, config_.llm);
      if (!work.run_ids.empty()) {
        response += "\nWould you like to compare this run with the previous one (" + work.run_ids.back() + ")?";
      }
      step.response = std::move(response);
      result.run = store_.persist(std::move(run), files);
      work.run_ids.push_back(result.run->run_id);
    }
  } catch (const Error& e) {
    TurnResult failed;
    failed.session_id = session_id;
    failed.turn_index = result.turn_index;
    failed.intent = result.intent;
    failed.degraded = result.degraded;
    failed.error = e.code();
    failed.response = std::string("Sorry, I could not do that: ") + e.what();
    return failed;
  }

  if (result.degraded) {
    step.response = "(The language model is unreachable, so I used the built-in parser.) " + step.response;
  }
  result.response = step.response;
  result.clarification = step.clarification;
  result.options = step.options;
  result.comparison = step.comparison;

  TurnRecord record;
  record.index = result.turn_index;
  record.text = text;
  record.intent = result.intent;
  record.response = result.response;
  if (result.run) record.run_id = result.run->run_id;
  record.options = result.options;
  record.degraded = result.degraded;
  store_.append_turn(session_id, to_json(record));
  work.turns.push_back(std::move(record));
  s.session = std::move(work);
  return result;
}

nlohmann::json to_json(const TurnResult& r) {
  nlohmann::json j = {{"session_id", r.session_id},
                      {"turn_index", r.turn_index},
                      {"response", r.response},
                      {"intent", intent::to_json(r.intent)},
                      {"degraded", r.degraded},
                      {"options", r.options}};
  j["run"] = r.run ? to_json(*r.run) : nlohmann::json(nullptr);
  j["clarification"] = r.clarification ? nlohmann::json(*r.clarification) : nlohmann::json(nullptr);
  j["comparison"] = r.comparison ? analysis::to_json(*r.comparison) : nlohmann::json(nullptr);
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
  return j;
}

}  // namespace roadchat::service
