// One PASS/FAIL line per primary acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golden_intents.hpp"
#include "oracles/graphs.hpp"
#include "oracles/sim_invariants.hpp"
#include "roadchat/errors.hpp"
#include "roadchat/service.hpp"
#include "roadchat/signal.hpp"
#include "roadchat/sim.hpp"
#include "support.hpp"

using namespace roadchat;

namespace {

// Pinned limits.
constexpr double kIntentSeconds = 1.0;
constexpr std::size_t kMinParaphrases = 20;
constexpr double kSpiderSeconds = 1.0;
constexpr double kDijkstraSeconds = 5.0;
constexpr int kDijkstraGraphs = 200;
constexpr double kCostTolerance = 1e-9;  // relative
constexpr int kWebsterSamples = 100;
constexpr double kSimSeconds = 30.0;
constexpr double kEndToEndSeconds = 60.0;
constexpr double kMixDensitySpread = 0.05;  // relative
constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

Outcome intent_golden() {
  const auto cases = testing::golden_intents();
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t ok = 0;
  std::string first_bad;
  for (const auto& c : cases) {
    if (intent::parse_rules(c.text) == c.expected) {
      ++ok;
    } else if (first_bad.empty()) {
      first_bad = c.text;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = ok == cases.size() && cases.size() >= kMinParaphrases && secs < kIntentSeconds;
  return {pass, std::to_string(ok) + "/" + std::to_string(cases.size()) + " exact in " + fmt(secs, 3) + " s" +
                    (first_bad.empty() ? "" : "; first mismatch: \"" + first_bad + "\"")};
}

Outcome spider() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = net::generate_spider(20, 10, 150);
  const bool connected = net::is_weakly_connected(s);
  const double secs = seconds_since(t0);
  const bool pass = s.nodes().size() == 201 && s.edges().size() == 800 && connected && secs < kSpiderSeconds;
  return {pass, std::to_string(s.nodes().size()) + " nodes, " + std::to_string(s.edges().size()) + " edges, " +
                    (connected ? "connected" : "disconnected") + ", " + fmt(secs, 3) + " s"};
}

Outcome osm_fixture() {
  const auto expected = nlohmann::json::parse(testing::read_text(testing::fixture("albany/expected.json")));
  const auto doc = geodata::parse_osm_xml(testing::read_text(testing::fixture("albany/albany.osm")));
  const auto n = net::convert_osm(doc);
  const auto xml = net::emit_net_xml(n);
  const auto back = net::parse_net_xml(xml);
  const bool stable = back == n && net::emit_net_xml(back) == xml;
  const bool counts = n.nodes().size() == expected.at("nodes").get<std::size_t>() &&
                      n.edges().size() == expected.at("edges").get<std::size_t>() &&
                      n.traffic_lights().size() == expected.at("traffic_lights").get<std::size_t>();
  return {counts && stable, std::to_string(n.nodes().size()) + " nodes, " + std::to_string(n.edges().size()) +
                                " edges, " + std::to_string(n.traffic_lights().size()) + " lights (oracle " +
                                std::to_string(expected.at("nodes").get<int>()) + "/" +
                                std::to_string(expected.at("edges").get<int>()) + "/" +
                                std::to_string(expected.at("traffic_lights").get<int>()) + "), round trip " +
                                (stable ? "byte-stable" : "differs")};
}

Outcome dijkstra() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(kSeed);
  int pairs = 0, agree = 0;
  for (int g = 0; g < kDijkstraGraphs; ++g) {
    const auto n = testing::random_small_net(rng);
    for (const auto w : {demand::Weight::distance, demand::Weight::time}) {
      for (std::size_t a = 0; a < n.edges().size(); ++a) {
        for (std::size_t b = 0; b < n.edges().size(); ++b) {
          ++pairs;
          const double oracle = testing::brute_force_cost(n, a, b, w);
          try {
            const auto path = demand::shortest_path(n, n.edges()[a].id, n.edges()[b].id, w);
            const double cost = demand::route_cost(n, path, w);
            if (std::isfinite(oracle) && std::abs(cost - oracle) <= kCostTolerance * std::max(1.0, oracle)) ++agree;
          } catch (const NoPath&) {
            if (std::isinf(oracle)) ++agree;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {agree == pairs && secs < kDijkstraSeconds,
          std::to_string(agree) + "/" + std::to_string(pairs) + " OD pairs on " + std::to_string(kDijkstraGraphs) +
              " graphs agree, " + fmt(secs, 2) + " s"};
}

Outcome webster() {
  signal::WebsterInput hand;
  hand.phases = {{{"a", 0.3 * 1800, 1800}}, {{"b", 0.2 * 1800, 1800}}};
  const auto t = signal::webster_program(hand);
  const bool hand_ok = t.cycle == 40 && t.greens == std::vector<int>{18, 12};

  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> y(0.02, 0.4);
  int checked = 0, monotone = 0;
  while (checked < kWebsterSamples) {
    std::vector<double> ys = {y(rng), y(rng)};
    if (ys[0] + ys[1] + 0.05 >= 0.95) continue;
    signal::WebsterInput in, more;
    in.phases = {{{"a", ys[0] * 1800, 1800}}, {{"b", ys[1] * 1800, 1800}}};
    more = in;
    more.phases[checked % 2][0].flow += 0.05 * 1800;
    const auto base = signal::webster_program(in);
    const auto up = signal::webster_program(more);
    ++checked;
    if (up.raw_cycle >= base.raw_cycle) ++monotone;
  }
  return {hand_ok && monotone == checked, "hand case C=" + std::to_string(t.cycle) + " greens " +
                                              std::to_string(t.greens[0]) + "/" + std::to_string(t.greens[1]) +
                                              "; monotone " + std::to_string(monotone) + "/" + std::to_string(checked)};
}

Outcome offsets() {
  const auto o = signal::corridor_offsets({{"A", "B"}, {500}, 10}, {70, 70});
  const bool exact = o == std::vector<double>{0, 50};

  const auto g = net::generate_grid(5, 5, 200);
  const auto d = demand::generate_demand(g, 2000, 3600, kSeed, {0.3});
  const auto r = signal::coordinate_offsets(g, d);
  int in_range = 0;
  for (const auto& tl : r.network.traffic_lights()) in_range += (tl.offset >= 0 && tl.offset < tl.cycle()) ? 1 : 0;
  const bool all = in_range == static_cast<int>(r.network.traffic_lights().size());
  return {exact && all, "corridor offsets (" + fmt(o[0], 1) + ", " + fmt(o[1], 1) + "); " + std::to_string(in_range) +
                            "/" + std::to_string(r.network.traffic_lights().size()) + " grid offsets in [0, cycle)"};
}

Outcome simulator() {
  const auto g = net::generate_grid(5, 5, 200);
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = demand::generate_demand(g, 400, 1800, seed, {0.5});
    sim::SimConfig cfg;
    cfg.end_time = 1800;
    cfg.record_crossings = true;
    testing::InvariantWatch w{0, 0, 0, 0, &g, &d};
    const auto out = sim::run(g, d, cfg, w.observer());
    int red = 0;
    for (const auto& c : out.crossings) red += (!c.teleport && c.signal == 'r') ? 1 : 0;
    const auto again = sim::run(g, d, cfg);
    const bool same = again.edge_density == out.edge_density && again.counts == out.counts;
    const bool ok = d.trips.size() == 200 && w.conservation_violations == 0 && w.overlaps == 0 && red == 0 && same &&
                    out.counts.arrived + out.counts.unfinished == out.counts.inserted;
    pass = pass && ok;
    detail += "seed " + std::to_string(seed) + ": " + std::to_string(out.counts.arrived) + " arrived, " +
              std::to_string(w.overlaps) + " overlaps, " + std::to_string(red) + " red crossings, " +
              (same ? "deterministic" : "NONDETERMINISTIC") + "; ";
  }
  const double secs = seconds_since(t0);
  return {pass && secs < kSimSeconds, detail + fmt(secs, 2) + " s"};
}

service::ServiceConfig scratch_config(const std::string& name) {
  service::ServiceConfig c;
  c.store_dir = testing::scratch_dir(name);
  c.seed = kSeed;
  return c;
}

std::vector<service::Run> session_runs(const std::vector<std::string>& turns, const std::string& name) {
  service::Service svc(scratch_config(name));
  const auto sid = svc.create_session();
  std::vector<service::Run> runs;
  for (const auto& text : turns) {
    const auto r = svc.handle_turn(sid, text);
    if (r.error || !r.run) throw std::runtime_error("turn failed: \"" + text + "\": " + r.response);
    runs.push_back(*r.run);
  }
  return runs;
}

const char* kGridMedium = "Generate a 5 by 5 grid network with 200 m spacing and medium traffic";
const char* kGridHeavy = "Generate a 5 by 5 grid network with 200 m spacing and heavy traffic";
const char* kRemoveCentral = "I want to remove Row 2 Street";

Outcome edge_removal() {
  const auto medium = session_runs({kGridMedium, kRemoveCentral}, "acc-remove-medium");
  const auto heavy = session_runs({kGridHeavy, kRemoveCentral}, "acc-remove-heavy");
  const auto& m0 = medium[0].metrics;
  const auto& m1 = medium[1].metrics;
  const auto& h0 = heavy[0].metrics;
  const auto& h1 = heavy[1].metrics;
  const bool density_changed = m1.top10_density != m0.top10_density;
  const bool co2_kept = m1.totals.co2_t >= m0.totals.co2_t;
  const bool heavy_slower = h1.avg_travel_time >= h0.avg_travel_time;
  return {density_changed && co2_kept && heavy_slower,
          "medium top-10 density " + fmt(m0.top10_density) + " -> " + fmt(m1.top10_density) + " veh/km, CO2 " +
              fmt(m0.totals.co2_t, 4) + " -> " + fmt(m1.totals.co2_t, 4) + " t; heavy travel time " +
              fmt(h0.avg_travel_time) + " -> " + fmt(h1.avg_travel_time) + " s"};
}

Outcome adaptation() {
  const auto runs = session_runs({kGridMedium, "I want to adapt the traffic light cycles"}, "acc-adapt");
  const double before = runs[0].metrics.avg_travel_time;
  const double after = runs[1].metrics.avg_travel_time;
  return {after < before, "average travel time " + fmt(before) + " -> " + fmt(after) + " s"};
}

Outcome vehicle_mix() {
  const auto g = net::generate_grid(5, 5, 200);
  const auto base = demand::generate_demand(g, 2000, 3600, kSeed, {0.0});
  sim::SimConfig cfg;
  cfg.end_time = 3600 + 1800;
  std::vector<double> co2, kwh, density;
  for (double gasoline : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto d = demand::set_vehicle_mix(base, {1.0 - gasoline}, kSeed);
    const auto m = analysis::compute_metrics(sim::run(g, d, cfg), g);
    co2.push_back(m.totals.co2_t);
    kwh.push_back(m.totals.electricity_kwh);
    density.push_back(m.top10_density);
  }
  bool co2_up = true, kwh_down = true;
  for (std::size_t i = 1; i < co2.size(); ++i) {
    co2_up = co2_up && co2[i] >= co2[i - 1];
    kwh_down = kwh_down && kwh[i] <= kwh[i - 1];
  }
  const auto [lo, hi] = std::minmax_element(density.begin(), density.end());
  const double spread = *hi > 0 ? (*hi - *lo) / *hi : 0.0;
  std::string detail = "CO2 t";
  for (double v : co2) detail += " " + fmt(v, 4);
  detail += "; kWh";
  for (double v : kwh) detail += " " + fmt(v, 1);
  detail += "; density spread " + fmt(spread * 100, 2) + "%";
  return {co2_up && kwh_down && spread < kMixDensitySpread, detail};
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = session_runs({kGridMedium}, "acc-e2e");
  const double secs = seconds_since(t0);
  return {secs < kEndToEndSeconds && !runs.empty(),
          "generate, simulate and report in " + fmt(secs, 2) + " s (" +
              std::to_string(runs[0].metrics.counts.inserted) + " vehicles)"};
}

Outcome export_bundle() {
  service::Service svc(scratch_config("acc-export"));
  const auto sid = svc.create_session();
  svc.handle_turn(sid, kGridMedium);
  const auto r = svc.handle_turn(sid, "I want to adapt the traffic light cycles");
  if (!r.run) return {false, "adaptation turn failed: " + r.response};
  const auto dir = testing::scratch_dir("acc-export-out");
  svc.export_run(r.run->run_id, dir);

  const auto cfg = service::parse_sumocfg(testing::read_text(dir / service::kCfgFile));
  const auto net_xml = testing::read_text(dir / cfg.net_file);
  const auto rou_xml = testing::read_text(dir / cfg.route_files.at(0));
  const auto add_xml = testing::read_text(dir / cfg.additional_files.at(0));
  const auto n = net::parse_net_xml(net_xml);
  const auto d = demand::parse_rou_xml(rou_xml, r.run->inputs.duration);
  const bool net_ok = net::emit_net_xml(n) == net_xml;
  const bool rou_ok = demand::emit_rou_xml(d) == rou_xml;
  const auto overrides = signal::parse_tls_add_xml(add_xml);
  const auto adapted = signal::apply_tls_overrides(n, overrides);
  const bool add_ok = signal::emit_tls_add_xml(adapted, signal::TlsFileKind::programs) == add_xml;
  const bool cfg_ok = service::emit_sumocfg(cfg) == testing::read_text(dir / service::kCfgFile);
  bool routes_ok = true;
  for (const auto& t : d.trips) routes_ok = routes_ok && demand::route_is_connected(n, t.route);
  return {net_ok && rou_ok && add_ok && cfg_ok && routes_ok,
          std::string("net ") + (net_ok ? "ok" : "differs") + ", rou " + (rou_ok ? "ok" : "differs") + ", add " +
              (add_ok ? "ok" : "differs") + ", sumocfg " + (cfg_ok ? "ok" : "differs") + ", " +
              std::to_string(d.trips.size()) + " routes " + (routes_ok ? "connected" : "broken")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"intent golden suite", intent_golden},
      {"spider generator", spider},
      {"OSM conversion fixture", osm_fixture},
      {"Dijkstra oracle", dijkstra},
      {"Webster timing", webster},
      {"offset arithmetic", offsets},
      {"simulator invariants", simulator},
      {"trend: edge removal", edge_removal},
      {"trend: signal adaptation", adaptation},
      {"trend: vehicle mix", vehicle_mix},
      {"end-to-end timing", end_to_end},
      {"export bundle", export_bundle},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
