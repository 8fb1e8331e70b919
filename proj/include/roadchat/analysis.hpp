#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadchat/intent.hpp"
#include "roadchat/netmodel.hpp"
#include "roadchat/sim.hpp"

namespace roadchat::analysis {

struct RankedEdge {
  std::string edge;
  std::string street_name;
  double density = 0.0;  // veh/km
  bool operator==(const RankedEdge&) const = default;
};

struct Totals {
  double co2_t = 0.0;
  double co_kg = 0.0;
  double pmx_kg = 0.0;
  double fuel_t = 0.0;
  double electricity_kwh = 0.0;
  bool operator==(const Totals&) const = default;
};

/// Densities are per edge (vehicles per km of edge, all lanes together).
struct MetricsReport {
  double top10_density = 0.0;
  double mean_density = 0.0;
  double avg_travel_time = 0.0;  // arrived vehicles only
  Totals totals;
  std::vector<RankedEdge> top10_edges;
  sim::SimCounts counts;
  bool operator==(const MetricsReport&) const = default;
};

/// Mean of the min(10, n) largest values; 0 for an empty input.
double top10_mean(std::vector<double> densities);

MetricsReport compute_metrics(const sim::SimOutput& out, const net::RoadNetwork& net);

struct MetricDelta {
  std::string name;
  std::string unit;
  double a = 0.0;
  double b = 0.0;
  double absolute = 0.0;           // b - a
  std::optional<double> percent;   // (b - a) / a * 100, none when a == 0
  std::string direction;           // increased, decreased, unchanged
};

struct ComparisonReport {
  std::string run_a;
  std::string run_b;
  std::vector<MetricDelta> metrics;
  std::string summary;
};

inline constexpr double kUnchangedPercent = 0.5;

std::optional<double> percent_delta(double a, double b);
ComparisonReport compare(const MetricsReport& a, const MetricsReport& b, const std::string& run_a = "a",
                         const std::string& run_b = "b");

enum class ReportMode { template_text, llm };

/// Template prose always works; llm mode asks the configured endpoint and falls back to the template.
std::string render_report(const MetricsReport& report, ReportMode mode = ReportMode::template_text,
                          const std::optional<intent::LlmConfig>& llm = std::nullopt);
std::string render_comparison(const ComparisonReport& report, ReportMode mode = ReportMode::template_text,
                              const std::optional<intent::LlmConfig>& llm = std::nullopt);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComparisonReport& report);

}  // namespace roadchat::analysis
