#include <cmath>
#include <cstdio>

#include "roadchat/analysis.hpp"

namespace roadchat::analysis {

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Small totals such as tonnes of CO2 need more than two decimals to show a difference.
std::string value(double v) {
  if (v == 0.0 || std::abs(v) >= 10.0) return fixed(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string sentence(const MetricDelta& d) {
  std::string s = d.name;
  if (d.direction == "unchanged") {
    s += " was essentially unchanged (" + value(d.a) + " to " + value(d.b) + " " + d.unit + ")";
  } else {
    s += " " + d.direction;
    if (d.percent) s += " by " + fixed(std::abs(*d.percent)) + "%";
    s += " (" + value(d.a) + " to " + value(d.b) + " " + d.unit;
    if (!d.percent) s += ", percent change n/a";
    s += ")";
  }
  return s + ".";
}

}  // namespace

std::optional<double> percent_delta(double a, double b) {
  if (a == 0.0) return std::nullopt;
  return (b - a) / a * 100.0;
}

ComparisonReport compare(const MetricsReport& a, const MetricsReport& b, const std::string& run_a,
                         const std::string& run_b) {
  ComparisonReport r;
  r.run_a = run_a;
  r.run_b = run_b;
  auto add = [&](const char* name, const char* unit, double va, double vb) {
    MetricDelta d;
    d.name = name;
    d.unit = unit;
    d.a = va;
    d.b = vb;
    d.absolute = vb - va;
    d.percent = percent_delta(va, vb);
    if (d.percent) {
      d.direction = std::abs(*d.percent) < kUnchangedPercent ? "unchanged"
                    : *d.percent > 0.0                       ? "increased"
                                                             : "decreased";
    } else {
      d.direction = d.absolute > 0.0 ? "increased" : d.absolute < 0.0 ? "decreased" : "unchanged";
    }
    r.metrics.push_back(std::move(d));
  };
  add("Top-10 road density", "veh/km", a.top10_density, b.top10_density);
  add("Average travel time", "s", a.avg_travel_time, b.avg_travel_time);
  add("CO2 emission", "t", a.totals.co2_t, b.totals.co2_t);
  add("CO emission", "kg", a.totals.co_kg, b.totals.co_kg);
  add("PMx emission", "kg", a.totals.pmx_kg, b.totals.pmx_kg);
  add("Fuel consumption", "t", a.totals.fuel_t, b.totals.fuel_t);
  add("Electricity consumption", "kWh", a.totals.electricity_kwh, b.totals.electricity_kwh);

  r.summary = "Comparing run " + run_a + " with run " + run_b + ":";
  for (const auto& d : r.metrics) r.summary += " " + sentence(d);
  return r;
}

nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& d : r.metrics) {
    metrics.push_back({
        {"name", d.name},
        {"unit", d.unit},
        {"value_a", d.a},
        {"value_b", d.b},
        {"absolute_delta", d.absolute},
        {"percent_delta", d.percent ? nlohmann::json(*d.percent) : nlohmann::json("n/a")},
        {"direction", d.direction},
    });
  }
  return {{"run_a", r.run_a}, {"run_b", r.run_b}, {"metrics", metrics}, {"summary", r.summary}};
}

}  // namespace roadchat::analysis
