#include <cstdio>

#include "roadchat/analysis.hpp"
#include "roadchat/errors.hpp"

namespace roadchat::analysis {

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr const char* kReportPrompt =
    "You summarize traffic simulation results for a non-expert. Write a short report covering general "
    "traffic, traffic density, travel time, pollutant emission and fuel and electricity consumption. Use only "
    "the numbers in the JSON you are given.";

std::optional<std::string> ask_llm(const std::optional<intent::LlmConfig>& llm, const nlohmann::json& payload) {
  if (!llm) return std::nullopt;
  try {
    auto text = intent::chat_completion(*llm, kReportPrompt, payload.dump());
    if (text.empty()) return std::nullopt;
    return text;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::string render_report(const MetricsReport& r, ReportMode mode, const std::optional<intent::LlmConfig>& llm) {
  if (mode == ReportMode::llm) {
    if (auto prose = ask_llm(llm, to_json(r))) return *prose;
  }
  const auto& c = r.counts;
  std::string out;
  out += "General traffic: " + std::to_string(c.inserted) + " vehicles entered the network, " +
         std::to_string(c.arrived) + " reached their destination and " + std::to_string(c.unfinished) +
         " were still driving when the simulation ended";
  if (c.not_inserted > 0) out += "; " + std::to_string(c.not_inserted) + " could not enter";
  if (c.teleported > 0) out += "; " + std::to_string(c.teleported) + " were teleported out of a jam";
  out += ".\n";
  out += "Traffic density: the 10 most congested roads averaged " + fixed(r.top10_density) + " veh/km";
  if (!r.top10_edges.empty()) {
    const auto& top = r.top10_edges.front();
    out += ", led by " + (top.street_name.empty() ? "edge " + top.edge : top.street_name + " (" + top.edge + ")") +
           " at " + fixed(top.density) + " veh/km";
  }
  out += ".\n";
  out += "Travel time: the average completed trip took " + fixed(r.avg_travel_time) + " s.\n";
  out += "Pollutant emission: " + fixed(r.totals.co2_t, 3) + " t of CO2, " + fixed(r.totals.co_kg, 3) +
         " kg of CO and " + fixed(r.totals.pmx_kg, 4) + " kg of PMx.\n";
  out += "Energy: " + fixed(r.totals.fuel_t, 3) + " t of fuel and " + fixed(r.totals.electricity_kwh) +
         " kWh of electricity.";
  return out;
}

std::string render_comparison(const ComparisonReport& r, ReportMode mode, const std::optional<intent::LlmConfig>& llm) {
  if (mode == ReportMode::llm) {
    if (auto prose = ask_llm(llm, to_json(r))) return *prose;
  }
  return r.summary;
}

}  // namespace roadchat::analysis
