#include <algorithm>
#include <cmath>
#include <numeric>

#include "roadchat/errors.hpp"
#include "roadchat/signal.hpp"

namespace roadchat::signal {

namespace {

// Proportional split of `total` with a floor per entry; entries pinned at the floor are removed
// from the proportional pool until the rest clear it.
std::vector<double> split_with_floor(const std::vector<double>& weights, double total, double floor) {
  const auto n = weights.size();
  std::vector<double> out(n, 0.0);
  std::vector<bool> pinned(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    double free_total = total;
    double free_weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        free_total -= floor;
      } else {
        free_weight += weights[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        out[i] = floor;
        continue;
      }
      out[i] = free_weight > 0.0 ? weights[i] / free_weight * free_total : 0.0;
      if (out[i] < floor) {
        pinned[i] = true;
        changed = true;
      }
    }
  }
  return out;
}

// Integers summing to `target`, largest fractional parts rounded up first (lower index wins ties).
std::vector<int> largest_remainder(const std::vector<double>& values, int target) {
  std::vector<int> out;
  int sum = 0;
  for (double v : values) {
    out.push_back(static_cast<int>(std::floor(v)));
    sum += out.back();
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] - std::floor(values[a]) > values[b] - std::floor(values[b]);
  });
  for (std::size_t k = 0; sum < target; k = (k + 1) % order.size()) {
    ++out[order[k]];
    ++sum;
  }
  return out;
}

}  // namespace

WebsterTiming webster_program(const WebsterInput& input, const WebsterParams& params) {
  if (input.phases.empty()) throw InvalidArgument("Webster timing needs at least one phase");
  WebsterTiming t;
  for (const auto& phase : input.phases) {
    double y = 0.0;
    for (const auto& a : phase) {
      if (!(a.saturation > 0.0) || a.flow < 0.0) {
        throw InvalidArgument("approach '" + a.edge + "' has invalid flow or saturation");
      }
      if (a.flow >= a.saturation) {
        throw Oversaturated("approach '" + a.edge + "' flow reaches its saturation flow");
      }
      y = std::max(y, a.flow / a.saturation);
    }
    t.critical_ratios.push_back(y);
    t.flow_ratio_sum += y;
  }
  if (t.flow_ratio_sum >= params.max_flow_ratio) {
    throw Oversaturated("flow ratio sum " + std::to_string(t.flow_ratio_sum) + " is at or above " +
                        std::to_string(params.max_flow_ratio));
  }
  if (!(t.flow_ratio_sum > 0.0)) throw InvalidArgument("no demand on any phase");

  const auto p = static_cast<double>(input.phases.size());
  t.lost_time = p * params.lost_time_per_phase;
  t.raw_cycle = (1.5 * t.lost_time + 5.0) / (1.0 - t.flow_ratio_sum);
  double cycle = std::clamp(t.raw_cycle, params.min_cycle, params.max_cycle);
  cycle = std::max(cycle, t.lost_time + p * params.min_green);
  t.cycle = static_cast<int>(std::lround(cycle));
  if (t.cycle < t.lost_time + p * params.min_green) {
    t.cycle = static_cast<int>(std::ceil(t.lost_time + p * params.min_green));
  }

  const double green_total = t.cycle - t.lost_time;
  const auto target = static_cast<int>(std::lround(green_total));
  t.greens = largest_remainder(split_with_floor(t.critical_ratios, target, params.min_green), target);
  return t;
}

std::vector<net::Phase> timing_phases(const WebsterTiming& timing, const std::vector<int>& link_phase,
                                      const WebsterParams& params) {
  std::vector<net::Phase> phases;
  const double all_red = params.lost_time_per_phase - params.yellow;
  for (std::size_t i = 0; i < timing.greens.size(); ++i) {
    std::string green, yellow;
    for (int lp : link_phase) {
      const bool served = lp == static_cast<int>(i);
      green += served ? 'G' : 'r';
      yellow += served ? 'y' : 'r';
    }
    phases.push_back({static_cast<double>(timing.greens[i]), green});
    phases.push_back({params.yellow, yellow});
    if (all_red > 0.0) phases.push_back({all_red, std::string(link_phase.size(), 'r')});
  }
  return phases;
}

namespace {

struct JunctionLayout {
  std::vector<int> link_group;  // per link, in link-index order
  std::vector<int> groups;      // distinct groups in use, ascending
  std::vector<std::size_t> incoming;
  std::vector<int> incoming_group;
};

JunctionLayout layout_of(const net::RoadNetwork& net, std::size_t node) {
  JunctionLayout out;
  out.incoming = net.incoming_edges(node);
  out.incoming_group = net::approach_groups(net, node);
  for (std::size_t i = 0; i < out.incoming.size(); ++i) {
    const auto links = net.outgoing_connections(out.incoming[i]).size();
    for (std::size_t k = 0; k < links; ++k) out.link_group.push_back(out.incoming_group[i]);
    if (links > 0 && std::find(out.groups.begin(), out.groups.end(), out.incoming_group[i]) == out.groups.end()) {
      out.groups.push_back(out.incoming_group[i]);
    }
  }
  std::sort(out.groups.begin(), out.groups.end());
  return out;
}

}  // namespace

std::map<std::string, WebsterInput> estimate_flows(const net::RoadNetwork& net,
                                                   const demand::DemandSet& demand,
                                                   const WebsterParams& params) {
  if (!(demand.duration > 0.0)) throw InvalidArgument("demand duration must be positive");
  // Trips crossing the downstream junction of each edge.
  std::vector<double> through(net.edges().size(), 0.0);
  for (const auto& trip : demand.trips) {
    for (std::size_t k = 0; k + 1 < trip.route.size(); ++k) {
      if (auto e = net.edge_index(trip.route[k])) through[*e] += 1.0;
    }
  }
  const double scale = 3600.0 / demand.duration;

  std::map<std::string, WebsterInput> out;
  for (const auto& light : net.traffic_lights()) {
    const auto node = *net.node_index(light.id);
    const auto layout = layout_of(net, node);
    WebsterInput input;
    for (int g : layout.groups) {
      std::vector<Approach> approaches;
      for (std::size_t i = 0; i < layout.incoming.size(); ++i) {
        const auto e = layout.incoming[i];
        if (layout.incoming_group[i] != g || net.outgoing_connections(e).empty()) continue;
        const auto& edge = net.edges()[e];
        approaches.push_back({edge.id, through[e] * scale, params.saturation_per_lane * edge.lane_count});
      }
      input.phases.push_back(std::move(approaches));
    }
    out.emplace(light.id, std::move(input));
  }
  return out;
}

AdaptResult adapt_all(const net::RoadNetwork& net, const demand::DemandSet& demand,
                      const WebsterParams& params) {
  const auto flows = estimate_flows(net, demand, params);
  AdaptResult result;
  std::vector<net::TrafficLight> lights;
  for (const auto& light : net.traffic_lights()) {
    const auto node = *net.node_index(light.id);
    const auto layout = layout_of(net, node);
    try {
      const auto timing = webster_program(flows.at(light.id), params);
      std::vector<int> link_phase;
      for (int g : layout.link_group) {
        link_phase.push_back(static_cast<int>(
            std::find(layout.groups.begin(), layout.groups.end(), g) - layout.groups.begin()));
      }
      net::TrafficLight adapted = light;
      adapted.phases = timing_phases(timing, link_phase, params);
      adapted.offset = std::fmod(light.offset, adapted.cycle());
      lights.push_back(std::move(adapted));
      result.adapted.push_back(light.id);
    } catch (const Error& e) {
      lights.push_back(light);
      result.skipped.emplace(light.id, e.what());
    }
  }
  result.network = net.with_lights(std::move(lights));
  return result;
}

}  // namespace roadchat::signal
