// roadchat: scripted access to the scenario service.
#include <cstdio>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "roadchat/errors.hpp"
#include "roadchat/service.hpp"

namespace rs = roadchat::service;
namespace ri = roadchat::intent;

namespace {

// "1mi", "1.5 km", "800m", "800" (metres)
double parse_radius(const std::string& text) {
  static const std::regex re(R"(^\s*([0-9]*\.?[0-9]+)\s*(mi|mile|miles|km|m)?\s*$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw CLI::ValidationError("--radius", "expected e.g. 1mi, 1.5km or 800m");
  const double v = std::stod(m[1]);
  std::string unit = m[2];
  for (auto& c : unit) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (unit.rfind("mi", 0) == 0) return v * ri::kMetersPerMile;
  if (unit == "km") return v * 1000.0;
  return v;
}

void print_turn(const rs::TurnResult& r, bool json) {
  if (json) {
    std::cout << rs::to_json(r).dump(2) << "\n";
    return;
  }
  std::cout << "[session " << r.session_id;
  if (r.run) std::cout << ", run " << r.run->run_id;
  std::cout << "]\n" << r.response << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational traffic scenario engine"};
  app.require_subcommand(1);

  auto config = rs::ServiceConfig::from_env();
  std::string store = config.store_dir.string();
  std::string fixture_dir;
  std::string llm;
  bool json = false;
  bool parallel = false;
  app.add_option("--store", store, "Run store directory")->capture_default_str();
  app.add_option("--fixture-dir", fixture_dir, "Offline OSM extracts (<city>.osm files)");
  app.add_option("--llm", llm, "LLM endpoint base URL, or 'off' for the rules parser");
  app.add_option("--seed", config.seed, "Demand seed")->capture_default_str();
  app.add_option("--duration", config.demand_duration, "Seconds of departures")->capture_default_str();
  app.add_flag("--parallel", parallel, "Use the OpenMP simulation kernels");
  app.add_flag("--json", json, "Print JSON instead of text");

  auto* gen = app.add_subcommand("generate", "Generate a scenario and run it");
  std::string city, radius = "1mi", traffic = "medium", network;
  gen->add_option("--city", city, "City for a real-world network");
  gen->add_option("--radius", radius, "Radius around the city centre")->capture_default_str();
  gen->add_option("--traffic", traffic, "light, medium or heavy")
      ->check(CLI::IsMember({"light", "medium", "heavy"}))
      ->capture_default_str();
  gen->add_option("--network", network, "grid or spider instead of a city")->check(CLI::IsMember({"grid", "spider"}));

  auto* cust = app.add_subcommand("customize", "Send one chat turn to a session");
  std::string session;
  std::string text;
  cust->add_option("--session", session, "Session id")->required();
  cust->add_option("text", text, "What to change")->required();

  auto* cmp = app.add_subcommand("compare", "Compare two runs");
  std::string run_a, run_b;
  cmp->add_option("A", run_a)->required();
  cmp->add_option("B", run_b)->required();

  auto* exp = app.add_subcommand("export", "Write a run's SUMO bundle to a directory");
  std::string run_id, out_dir;
  exp->add_option("RUN", run_id)->required();
  exp->add_option("DIR", out_dir)->required();

  auto* runs = app.add_subcommand("runs", "List stored runs");
  std::string runs_session;
  runs->add_option("--session", runs_session);

  auto* hist = app.add_subcommand("history", "Show a session's turns");
  std::string hist_session;
  hist->add_option("SESSION", hist_session)->required();

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  config.store_dir = store;
  if (!fixture_dir.empty()) config.fixture_dir = fixture_dir;
  if (llm == "off") {
    config.llm.reset();
  } else if (!llm.empty()) {
    config.llm = config.llm.value_or(ri::LlmConfig{});
    config.llm->base_url = llm;
  }
  config.parallel_kernels = parallel;

  try {
    rs::Service service(config);

    if (*gen) {
      ri::Intent in;
      if (!network.empty()) {
        in.kind = ri::Kind::GenerateAbstract;
        in.slots.network_kind = network == "grid" ? ri::NetworkKind::grid : ri::NetworkKind::spider;
      } else {
        if (city.empty()) throw roadchat::InvalidArgument("generate needs --city or --network");
        in.kind = ri::Kind::GenerateRealWorld;
        in.slots.city = city;
        in.slots.radius = parse_radius(radius);
      }
      in.slots.traffic_condition = traffic == "light"   ? ri::TrafficCondition::light
                                   : traffic == "heavy" ? ri::TrafficCondition::heavy
                                                        : ri::TrafficCondition::medium;
      const auto id = service.create_session();
      const auto r = service.handle_turn(id, ri::canonical_phrasing(in));
      print_turn(r, json);
      return r.error ? 1 : 0;
    }
    if (*cust) {
      const auto r = service.handle_turn(session, text);
      print_turn(r, json);
      return r.error ? 1 : 0;
    }
    if (*cmp) {
      const auto report = service.compare_runs(run_a, run_b);
      if (json) {
        std::cout << roadchat::analysis::to_json(report).dump(2) << "\n";
      } else {
        std::cout << roadchat::analysis::render_comparison(report) << "\n";
      }
      return 0;
    }
    if (*exp) {
      for (const auto& p : service.export_run(run_id, out_dir)) std::cout << p.string() << "\n";
      return 0;
    }
    if (*runs) {
      const auto list = runs_session.empty() ? service.list_runs() : service.list_runs(runs_session);
      for (const auto& r : list) {
        if (json) {
          std::cout << rs::to_json(r).dump() << "\n";
        } else {
          std::printf("%-10s %-40s top10 %.2f veh/km  travel %.1f s\n", r.run_id.c_str(), r.label.c_str(),
                      r.metrics.top10_density, r.metrics.avg_travel_time);
        }
      }
      return 0;
    }
    if (*hist) {
      for (const auto& t : service.history(hist_session)) {
        if (json) {
          std::cout << rs::to_json(t).dump() << "\n";
        } else {
          std::cout << "> " << t.text << "\n" << t.response << "\n\n";
        }
      }
      return 0;
    }
    if (*serve) {
      rs::HttpApi api(service);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      return api.listen(host, port) ? 0 : 1;
    }
  } catch (const roadchat::Error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
