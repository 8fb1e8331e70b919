#include <algorithm>
#include <numeric>

#include "roadchat/analysis.hpp"

namespace roadchat::analysis {

double top10_mean(std::vector<double> densities) {
  if (densities.empty()) return 0.0;
  const auto k = std::min<std::size_t>(10, densities.size());
  std::partial_sort(densities.begin(), densities.begin() + static_cast<std::ptrdiff_t>(k), densities.end(),
                    std::greater<>());
  return std::accumulate(densities.begin(), densities.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
         static_cast<double>(k);
}

MetricsReport compute_metrics(const sim::SimOutput& out, const net::RoadNetwork& net) {
  MetricsReport r;
  r.counts = out.counts;

  const auto& density = out.edge_density;
  std::vector<std::size_t> order(density.size());
  std::iota(order.begin(), order.end(), 0);
  // Edges are id-sorted, so index order breaks ties by id.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
  const auto k = std::min<std::size_t>(10, order.size());
  double top = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto e = order[i];
    top += density[e];
    const auto& edge = net.edges().at(e);
    r.top10_edges.push_back({edge.id, edge.street_name, density[e]});
  }
  r.top10_density = k > 0 ? top / static_cast<double>(k) : 0.0;
  r.mean_density = density.empty() ? 0.0
                                   : std::accumulate(density.begin(), density.end(), 0.0) /
                                         static_cast<double>(density.size());

  double travel = 0.0;
  int arrived = 0;
  sim::StepEmissions sums;
  for (const auto& v : out.vehicles) {
    if (v.arrival) {
      travel += v.travel_time;
      ++arrived;
    }
    sums.co2 += v.totals.co2;
    sums.co += v.totals.co;
    sums.pmx += v.totals.pmx;
    sums.fuel += v.totals.fuel;
    sums.electricity += v.totals.electricity;
  }
  r.avg_travel_time = arrived > 0 ? travel / arrived : 0.0;
  r.totals.co2_t = sums.co2 / 1e6;
  r.totals.co_kg = sums.co / 1e3;
  r.totals.pmx_kg = sums.pmx / 1e3;
  r.totals.fuel_t = sums.fuel / 1e6;
  r.totals.electricity_kwh = sums.electricity / 1e3;
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : r.top10_edges) {
    edges.push_back({{"edge", e.edge}, {"street_name", e.street_name}, {"density_veh_per_km", e.density}});
  }
  return {
      {"top10_density_veh_per_km", r.top10_density},
      {"mean_density_veh_per_km", r.mean_density},
      {"avg_travel_time_s", r.avg_travel_time},
      {"co2_t", r.totals.co2_t},
      {"co_kg", r.totals.co_kg},
      {"pmx_kg", r.totals.pmx_kg},
      {"fuel_t", r.totals.fuel_t},
      {"electricity_kwh", r.totals.electricity_kwh},
      {"top10_edges", edges},
      {"counts",
       {{"inserted", r.counts.inserted},
        {"arrived", r.counts.arrived},
        {"teleported", r.counts.teleported},
        {"unfinished", r.counts.unfinished},
        {"not_inserted", r.counts.not_inserted}}},
  };
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.top10_density = j.at("top10_density_veh_per_km").get<double>();
  r.mean_density = j.at("mean_density_veh_per_km").get<double>();
  r.avg_travel_time = j.at("avg_travel_time_s").get<double>();
  r.totals.co2_t = j.at("co2_t").get<double>();
  r.totals.co_kg = j.at("co_kg").get<double>();
  r.totals.pmx_kg = j.at("pmx_kg").get<double>();
  r.totals.fuel_t = j.at("fuel_t").get<double>();
  r.totals.electricity_kwh = j.at("electricity_kwh").get<double>();
  for (const auto& e : j.at("top10_edges")) {
    r.top10_edges.push_back({e.at("edge").get<std::string>(), e.at("street_name").get<std::string>(),
                             e.at("density_veh_per_km").get<double>()});
  }
  const auto& c = j.at("counts");
  r.counts.inserted = c.at("inserted").get<int>();
  r.counts.arrived = c.at("arrived").get<int>();
  r.counts.teleported = c.at("teleported").get<int>();
  r.counts.unfinished = c.at("unfinished").get<int>();
  r.counts.not_inserted = c.at("not_inserted").get<int>();
  return r;
}

}  // namespace roadchat::analysis
