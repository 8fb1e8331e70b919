#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "roadchat/demand.hpp"
#include "roadchat/errors.hpp"
#include "roadchat/signal.hpp"
#include "support.hpp"

using namespace roadchat;
using namespace roadchat::signal;

namespace {

// Two-phase input with one approach per phase, ratio y_i at saturation 1800.
WebsterInput ratios(std::vector<double> y) {
  WebsterInput in;
  for (std::size_t i = 0; i < y.size(); ++i) in.phases.push_back({{"a" + std::to_string(i), y[i] * 1800.0, 1800.0}});
  return in;
}

double oracle_raw_cycle(const std::vector<double>& y, double lost_per_phase) {
  const double L = lost_per_phase * static_cast<double>(y.size());
  const double Y = std::accumulate(y.begin(), y.end(), 0.0);
  return (1.5 * L + 5.0) / (1.0 - Y);
}

double mod_pos(double a, double m) {
  const double r = std::fmod(a, m);
  return r < 0 ? r + m : r;
}

}  // namespace

TEST_CASE("webster hand cases") {
  auto t = webster_program(ratios({0.3, 0.2}));
  CHECK(t.lost_time == doctest::Approx(10));
  CHECK(t.flow_ratio_sum == doctest::Approx(0.5));
  CHECK(t.raw_cycle == doctest::Approx(40));
  CHECK(t.cycle == 40);
  CHECK(t.greens == std::vector<int>{18, 12});

  t = webster_program(ratios({0.2, 0.2}));
  CHECK(t.raw_cycle == doctest::Approx(20.0 / 0.6));
  CHECK(t.cycle == 33);
  CHECK(t.greens[0] + t.greens[1] == 23);
  CHECK(std::abs(t.greens[0] - t.greens[1]) <= 1);

  CHECK_THROWS_AS(webster_program(ratios({0.5, 0.5})), Oversaturated);
  CHECK_THROWS_AS(webster_program(ratios({0.5, 0.45})), Oversaturated);
  CHECK_THROWS_AS(webster_program(WebsterInput{}), InvalidArgument);
  CHECK_THROWS_AS(webster_program(ratios({0.0, 0.0})), InvalidArgument);
}

TEST_CASE("webster phases sum to the cycle") {
  const auto t = webster_program(ratios({0.3, 0.2}));
  const auto phases = timing_phases(t, {0, 0, 1, 1});
  double total = 0;
  for (const auto& p : phases) {
    total += p.duration;
    CHECK(p.state.size() == 4);
  }
  CHECK(total == doctest::Approx(40));
  CHECK(phases.front().duration == doctest::Approx(18));
  CHECK(phases.front().state == "GGrr");
}

TEST_CASE("webster properties over random inputs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> y(0.02, 0.45);
  std::uniform_int_distribution<int> phases(2, 4);
  const WebsterParams params;
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> ys(static_cast<std::size_t>(phases(rng)));
    for (auto& v : ys) v = y(rng);
    const double Y = std::accumulate(ys.begin(), ys.end(), 0.0);
    if (Y >= params.max_flow_ratio) {
      CHECK_THROWS_AS(webster_program(ratios(ys)), Oversaturated);
      continue;
    }
    const auto t = webster_program(ratios(ys));
    const double raw = oracle_raw_cycle(ys, params.lost_time_per_phase);
    CHECK(t.raw_cycle == doctest::Approx(raw));
    CHECK(t.cycle >= params.min_cycle);
    CHECK(t.cycle <= params.max_cycle);
    const int green_sum = std::accumulate(t.greens.begin(), t.greens.end(), 0);
    CHECK(green_sum == t.cycle - static_cast<int>(t.lost_time));
    for (int g : t.greens) CHECK(g >= params.min_green);

    std::vector<int> links;
    for (std::size_t p = 0; p < ys.size(); ++p) links.push_back(static_cast<int>(p));
    double total = 0;
    for (const auto& ph : timing_phases(t, links)) total += ph.duration;
    CHECK(total == doctest::Approx(t.cycle));

    // Raising one flow never lowers the unclamped cycle.
    auto more = ys;
    std::uniform_int_distribution<std::size_t> which(0, ys.size() - 1);
    more[which(rng)] += 0.01;
    if (std::accumulate(more.begin(), more.end(), 0.0) < params.max_flow_ratio) {
      CHECK(webster_program(ratios(more)).raw_cycle >= t.raw_cycle);
      CHECK(webster_program(ratios(more)).cycle >= t.cycle);
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("critical ratio is the largest in the phase") {
  WebsterInput in;
  in.phases = {{{"a", 540, 1800}, {"b", 180, 1800}}, {{"c", 360, 3600}, {"d", 360, 1800}}};
  const auto t = webster_program(in);
  CHECK(t.critical_ratios[0] == doctest::Approx(0.3));
  CHECK(t.critical_ratios[1] == doctest::Approx(0.2));
  CHECK(t.cycle == 40);
}

TEST_CASE("corridor offsets") {
  CorridorSpec two{{"A", "B"}, {500}, 10};
  auto o = corridor_offsets(two, {70, 70});
  CHECK(o == std::vector<double>{0, 50});

  CorridorSpec three{{"A", "B", "C"}, {300, 300}, 10};
  o = corridor_offsets(three, {70, 70, 70});
  CHECK(o[0] == doctest::Approx(0));
  CHECK(o[1] == doctest::Approx(30));
  CHECK(o[2] == doctest::Approx(60));

  CorridorSpec wrap{{"A", "B"}, {900}, 10};
  CHECK(corridor_offsets(wrap, {70, 70})[1] == doctest::Approx(20));

  CHECK_THROWS_AS(corridor_offsets(CorridorSpec{{"A", "B"}, {500}, 0}, {70, 70}), InvalidArgument);
  CHECK_THROWS_AS(corridor_offsets(CorridorSpec{{"A", "B"}, {-1}, 10}, {70, 70}), InvalidArgument);
}

TEST_CASE("corridor offsets: range and shift invariance") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist(50, 800), speed(5, 20), shift(0, 500);
  std::uniform_int_distribution<int> n(2, 8);
  for (int i = 0; i < 300; ++i) {
    CorridorSpec c;
    const int k = n(rng);
    for (int j = 0; j < k; ++j) c.light_ids.push_back("L" + std::to_string(j));
    for (int j = 0; j + 1 < k; ++j) c.distances.push_back(dist(rng));
    c.progression_speed = speed(rng);
    const std::vector<double> cycles(static_cast<std::size_t>(k), 70.0);
    const auto o = corridor_offsets(c, cycles);
    for (double v : o) {
      CHECK(v >= 0);
      CHECK(v < 70.0);
    }
    const double s = shift(rng);
    for (std::size_t a = 0; a < o.size(); ++a)
      for (std::size_t b = 0; b < o.size(); ++b) {
        const double before = mod_pos(o[b] - o[a], 70.0);
        const double after = mod_pos((o[b] + s) - (o[a] + s), 70.0);
        CHECK(before == doctest::Approx(after).epsilon(1e-9));
      }
  }
}

TEST_CASE("coordinate_offsets on a grid") {
  const auto g = net::generate_grid(5, 5, 200);
  const auto d = demand::generate_demand(g, 1200, 3600, 42, {0.3});
  const auto r = coordinate_offsets(g, d);
  CHECK_FALSE(r.corridors.empty());
  CHECK_FALSE(r.offsets.empty());
  for (const auto& tl : r.network.traffic_lights()) {
    CHECK(tl.offset >= 0);
    CHECK(tl.offset < tl.cycle());
  }
  for (const auto& c : r.corridors) {
    CHECK(c.light_ids.size() >= 2);
    CHECK(c.distances.size() + 1 == c.light_ids.size());
    CHECK(c.progression_speed > 0);
  }
  for (std::size_t i = 0; i < g.traffic_lights().size(); ++i)
    CHECK(r.network.traffic_lights()[i].phases == g.traffic_lights()[i].phases);
  CHECK_THROWS_AS(coordinate_offsets(testing::corridor(4, 200), demand::DemandSet{}), NoSignals);
}

TEST_CASE("estimate_flows and adapt_all") {
  const auto g = net::generate_grid(5, 5, 200);
  const auto d = demand::generate_demand(g, 1200, 3600, 42, {0.3});
  const auto flows = estimate_flows(g, d);
  CHECK(flows.size() == g.traffic_lights().size());
  for (const auto& [id, in] : flows) {
    CHECK(in.phases.size() == 2);
    for (const auto& ph : in.phases)
      for (const auto& a : ph) {
        CHECK(a.saturation == doctest::Approx(1800.0 * g.edge(a.edge).lane_count));
        CHECK(a.flow >= 0);
      }
  }

  // Hand count for one approach: routes entering the junction on that edge, per hour.
  const auto& [jid, jin] = *flows.begin();
  const auto& approach = jin.phases.front().front();
  double count = 0;
  for (const auto& t : d.trips) {
    for (std::size_t i = 0; i + 1 < t.route.size(); ++i) {
      if (t.route[i] == approach.edge) ++count;
    }
  }
  CHECK(approach.flow == doctest::Approx(count * 3600.0 / d.duration));

  const auto r = adapt_all(g, d);
  CHECK(r.adapted.size() + r.skipped.size() == g.traffic_lights().size());
  for (const auto& id : r.adapted) {
    const auto& tl = r.network.traffic_lights()[r.network.light_index(id).value()];
    CHECK(tl.cycle() >= 20);
    CHECK(tl.cycle() <= 120);
    CHECK(tl.phases != g.traffic_lights()[g.light_index(id).value()].phases);
  }
}

TEST_CASE("adaptation keeps existing offsets inside the new cycle") {
  const auto g = net::generate_grid(4, 4, 200);
  const auto d = demand::generate_demand(g, 1000, 3600, 42, {0.3});
  const auto coordinated = coordinate_offsets(g, d).network;
  const auto adapted = adapt_all(coordinated, d).network;
  for (const auto& tl : adapted.traffic_lights()) {
    CHECK(tl.offset >= 0);
    CHECK(tl.offset < tl.cycle());
  }
}

TEST_CASE("tls add file round trip") {
  const auto g = net::generate_grid(4, 4, 200);
  const auto d = demand::generate_demand(g, 1000, 3600, 42, {0.3});
  const auto coordinated = coordinate_offsets(g, d).network;
  const auto offsets_xml = emit_tls_add_xml(coordinated, TlsFileKind::offsets);
  CHECK(offsets_xml.find("<additional") != std::string::npos);
  CHECK(offsets_xml == emit_tls_add_xml(coordinated, TlsFileKind::offsets));
  CHECK(apply_tls_overrides(g, parse_tls_add_xml(offsets_xml)) == coordinated);

  const auto adapted = adapt_all(g, d).network;
  const auto programs_xml = emit_tls_add_xml(adapted, TlsFileKind::programs);
  CHECK(programs_xml.find("programID=\"adapted\"") != std::string::npos);
  CHECK(programs_xml.find("<phase duration=") != std::string::npos);
  CHECK(apply_tls_overrides(g, parse_tls_add_xml(programs_xml)) == adapted);
  CHECK_THROWS_AS(parse_tls_add_xml("<additional><tlLogic"), ParseError);
}
