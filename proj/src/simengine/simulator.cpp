#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

#include "roadchat/errors.hpp"
#include "roadchat/sim.hpp"

namespace roadchat::sim {

char signal_state(const net::TrafficLight& light, int link, double t) {
  const double cycle = light.cycle();
  double in_cycle = std::fmod(t - light.offset, cycle);
  if (in_cycle < 0.0) in_cycle += cycle;
  double start = 0.0;
  for (const auto& phase : light.phases) {
    if (in_cycle < start + phase.duration) return phase.state[static_cast<std::size_t>(link)];
    start += phase.duration;
  }
  return light.phases.back().state[static_cast<std::size_t>(link)];
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Vehicle {
  std::size_t cursor = 0;  // index into the trip's route
  std::size_t edge = 0;
  int lane = 0;
  double pos = 0.0;
  double speed = 0.0;
  double waiting = 0.0;
  double length = 5.0;
  double max_accel = 2.6;
  double decel = 4.5;
  double max_speed = 55.6;
  bool electric = false;
  bool active = false;
};

struct Hop {
  std::size_t to_edge;
  std::optional<std::size_t> light;
  int link;
};

class Engine {
 public:
  Engine(const net::RoadNetwork& net, const demand::DemandSet& demand, const SimConfig& config)
      : net_(net), demand_(demand), config_(config) {
    if (!(config.step_length > 0.0)) throw InvalidArgument("step length must be positive");
    if (!(config.end_time >= config.step_length)) throw InvalidArgument("end time must cover at least one step");
    prepare_routes();
    lanes_.resize(net.edges().size());
    for (std::size_t e = 0; e < net.edges().size(); ++e) {
      lanes_[e].resize(static_cast<std::size_t>(net.edges()[e].lane_count));
    }
    insert_queue_.resize(net.edges().size());
    out_.edge_density.assign(net.edges().size(), 0.0);
    out_.edge_sampled_seconds.assign(net.edges().size(), 0.0);
    out_.end_time = config.end_time;
    out_.step_length = config.step_length;
  }

  SimOutput run(const StepObserver& observer) {
    const double dt = config_.step_length;
    const auto steps = static_cast<long long>(std::floor(config_.end_time / dt + 1e-9));
    std::vector<std::size_t> schedule(demand_.trips.size());
    std::iota(schedule.begin(), schedule.end(), 0);
    std::stable_sort(schedule.begin(), schedule.end(), [&](std::size_t a, std::size_t b) {
      return demand_.trips[a].depart < demand_.trips[b].depart;
    });
    std::size_t next_due = 0;
    std::vector<double> density(net_.edges().size(), 0.0);

    for (long long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      while (next_due < schedule.size() && demand_.trips[schedule[next_due]].depart <= t + 1e-9) {
        const auto trip = schedule[next_due++];
        const auto first = routes_[trip].front();
        if (insert_queue_[first].empty()) waiting_edges_.insert(first);
        insert_queue_[first].push_back(trip);
      }
      insert_vehicles(t);
      move_vehicles(t, dt);
      transfer_vehicles(t, dt);
      teleport_vehicles(t);
      for (std::size_t e = 0; e < net_.edges().size(); ++e) {
        std::size_t n = 0;
        for (const auto& lane : lanes_[e]) n += lane.size();
        out_.edge_density[e] += static_cast<double>(n) / (net_.edges()[e].length / 1000.0);
        out_.edge_sampled_seconds[e] += static_cast<double>(n) * dt;
      }
      if (observer) observer(snapshot(t + dt));
    }

    for (auto& d : out_.edge_density) d = d * dt / config_.end_time;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (vehicles_[i].active) ++out_.counts.unfinished;
      if (!out_.vehicles[i].inserted_at) ++out_.counts.not_inserted;
    }
    return std::move(out_);
  }

 private:
  void prepare_routes() {
    const auto& trips = demand_.trips;
    routes_.resize(trips.size());
    hops_.resize(trips.size());
    vehicles_.resize(trips.size());
    out_.vehicles.resize(trips.size());
    for (std::size_t i = 0; i < trips.size(); ++i) {
      const auto& trip = trips[i];
      if (trip.route.empty()) throw InvalidRoute("trip '" + trip.id + "' has an empty route");
      const demand::VehicleType* type = nullptr;
      for (const auto& t : demand_.vtypes) {
        if (t.id == trip.vtype) type = &t;
      }
      if (!type) throw InvalidRoute("trip '" + trip.id + "' uses unknown vehicle type '" + trip.vtype + "'");
      for (const auto& id : trip.route) {
        auto e = net_.edge_index(id);
        if (!e) throw InvalidRoute("trip '" + trip.id + "' uses unknown edge '" + id + "'");
        routes_[i].push_back(*e);
      }
      for (std::size_t k = 0; k + 1 < routes_[i].size(); ++k) {
        auto c = net_.connection(routes_[i][k], routes_[i][k + 1]);
        if (!c) {
          throw InvalidRoute("trip '" + trip.id + "' has no connection from '" + trip.route[k] + "' to '" +
                             trip.route[k + 1] + "'");
        }
        const auto& conn = net_.connections()[*c];
        hops_[i].push_back({conn.to_edge, conn.light, conn.link_index});
      }
      auto& v = vehicles_[i];
      v.length = type->length;
      v.max_accel = type->max_accel;
      v.decel = type->max_decel;
      v.max_speed = type->max_speed;
      v.electric = type->propulsion == demand::Propulsion::electric;
      out_.vehicles[i].id = trip.id;
      out_.vehicles[i].vtype = trip.vtype;
      out_.vehicles[i].depart = trip.depart;
    }
  }

  // Rear position of the last vehicle on a lane, or the lane length when empty.
  double lane_free(std::size_t edge, int lane) const {
    const auto& q = lanes_[edge][static_cast<std::size_t>(lane)];
    if (q.empty()) return net_.edges()[edge].length;
    const auto& last = vehicles_[q.back()];
    return last.pos - last.length;
  }

  int best_lane(std::size_t edge) const {
    int best = 0;
    for (int l = 1; l < static_cast<int>(lanes_[edge].size()); ++l) {
      if (lane_free(edge, l) > lane_free(edge, best)) best = l;
    }
    return best;
  }

  char hop_state(std::size_t trip, std::size_t cursor, double t) const {
    const auto& hop = hops_[trip][cursor];
    if (!hop.light) return ' ';
    return signal_state(net_.traffic_lights()[*hop.light], hop.link, t);
  }

  void insert_vehicles(double t) {
    const double s0 = config_.idm.min_gap;
    std::vector<std::size_t> drained;
    for (auto edge : waiting_edges_) {
      auto& queue = insert_queue_[edge];
      const double len = net_.edges()[edge].length;
      while (!queue.empty()) {
        const auto trip = queue.front();
        auto& v = vehicles_[trip];
        const int lane = best_lane(edge);
        const bool empty = lanes_[edge][static_cast<std::size_t>(lane)].empty();
        const double pos = std::min(v.length, len);
        if (!empty && lane_free(edge, lane) < pos + s0) break;
        v.active = true;
        v.edge = edge;
        v.lane = lane;
        v.cursor = 0;
        v.pos = pos;
        v.speed = 0.0;
        v.waiting = 0.0;
        lanes_[edge][static_cast<std::size_t>(lane)].push_back(trip);
        out_.vehicles[trip].inserted_at = t;
        ++out_.counts.inserted;
        queue.pop_front();
      }
      if (queue.empty()) drained.push_back(edge);
    }
    for (auto e : drained) waiting_edges_.erase(e);
  }

  void move_vehicles(double t, double dt) {
    order_.clear();
    for (std::size_t e = 0; e < lanes_.size(); ++e) {
      for (const auto& lane : lanes_[e]) order_.insert(order_.end(), lane.begin(), lane.end());
    }
    const auto n = order_.size();
    speed_in_.speed.resize(n);
    speed_in_.desired_speed.resize(n);
    speed_in_.max_accel.resize(n);
    speed_in_.comfortable_decel.resize(n);
    speed_in_.gap.resize(n);
    speed_in_.leader_speed.resize(n);
    speed_in_.stop_distance.resize(n);

    std::size_t i = 0;
    for (std::size_t e = 0; e < lanes_.size(); ++e) {
      const auto& edge = net_.edges()[e];
      for (const auto& lane : lanes_[e]) {
        for (std::size_t q = 0; q < lane.size(); ++q, ++i) {
          const auto trip = lane[q];
          const auto& v = vehicles_[trip];
          double gap = kInf, leader_speed = 0.0, stop = kInf;
          const double to_end = edge.length - v.pos;
          if (q > 0) {
            const auto& leader = vehicles_[lane[q - 1]];
            gap = leader.pos - leader.length - v.pos;
            leader_speed = leader.speed;
          } else if (v.cursor + 1 < routes_[trip].size()) {
            const auto next = routes_[trip][v.cursor + 1];
            const int next_lane = best_lane(next);
            const auto& nq = lanes_[next][static_cast<std::size_t>(next_lane)];
            if (!nq.empty()) {
              gap = to_end + lane_free(next, next_lane);
              leader_speed = vehicles_[nq.back()].speed;
            }
            const char state = hop_state(trip, v.cursor, t);
            if (state == 'r' || (state == 'y' && v.speed * v.speed / (2.0 * v.decel) <= to_end)) {
              stop = to_end;
            }
          }
          speed_in_.speed[i] = v.speed;
          speed_in_.desired_speed[i] = std::min(v.max_speed, edge.speed_limit);
          speed_in_.max_accel[i] = v.max_accel;
          speed_in_.comfortable_decel[i] = v.decel;
          speed_in_.gap[i] = gap;
          speed_in_.leader_speed[i] = leader_speed;
          speed_in_.stop_distance[i] = stop;
        }
      }
    }

    if (config_.parallel_kernels) {
      idm_speeds_omp(speed_in_, config_.idm, dt, new_speed_);
    } else {
      idm_speeds_serial(speed_in_, config_.idm, dt, new_speed_);
    }
    emission_in_.speed_before = speed_in_.speed;
    emission_in_.speed_after = new_speed_;
    emission_in_.electric.resize(n);
    for (std::size_t j = 0; j < n; ++j) emission_in_.electric[j] = vehicles_[order_[j]].electric ? 1 : 0;
    if (config_.parallel_kernels) {
      emissions_omp(emission_in_, config_.emissions, dt, step_emissions_);
    } else {
      emissions_serial(emission_in_, config_.emissions, dt, step_emissions_);
    }

    for (std::size_t j = 0; j < n; ++j) {
      auto& v = vehicles_[order_[j]];
      auto& rec = out_.vehicles[order_[j]];
      v.speed = new_speed_[j];
      v.pos += v.speed * dt;
      rec.distance += v.speed * dt;
      v.waiting = v.speed < config_.stationary_speed ? v.waiting + dt : 0.0;
      const auto& e = step_emissions_[j];
      rec.totals.co2 += e.co2;
      rec.totals.co += e.co;
      rec.totals.pmx += e.pmx;
      rec.totals.fuel += e.fuel;
      rec.totals.electricity += e.electricity;
    }
  }

  void arrive(std::size_t trip, double when) {
    auto& v = vehicles_[trip];
    auto& lane = lanes_[v.edge][static_cast<std::size_t>(v.lane)];
    lane.erase(std::find(lane.begin(), lane.end(), trip));
    v.active = false;
    auto& rec = out_.vehicles[trip];
    rec.arrival = when;
    rec.travel_time = when - rec.depart;
    ++out_.counts.arrived;
  }

  // Moves `trip` from the front of its lane onto the next route edge at `pos`.
  void advance(std::size_t trip, int lane, double pos, double t, bool teleport) {
    auto& v = vehicles_[trip];
    const auto from = v.edge;
    const char state = hop_state(trip, v.cursor, t);
    lanes_[v.edge][static_cast<std::size_t>(v.lane)].pop_front();
    ++v.cursor;
    v.edge = routes_[trip][v.cursor];
    v.lane = lane;
    v.pos = pos;
    lanes_[v.edge][static_cast<std::size_t>(lane)].push_back(trip);
    if (config_.record_crossings) out_.crossings.push_back({t, trip, from, v.edge, state, teleport});
  }

  void transfer_vehicles(double t, double dt) {
    struct Candidate {
      std::size_t trip;
      double waiting;
      double overshoot;
    };
    std::vector<Candidate> candidates;
    for (std::size_t e = 0; e < lanes_.size(); ++e) {
      const double len = net_.edges()[e].length;
      for (auto& lane : lanes_[e]) {
        if (lane.empty()) continue;
        const auto trip = lane.front();
        const auto& v = vehicles_[trip];
        if (v.pos < len) continue;
        if (v.cursor + 1 == routes_[trip].size()) {
          arrive(trip, t + dt);
          continue;
        }
        candidates.push_back({trip, v.waiting, v.pos - len});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.waiting != b.waiting) return a.waiting > b.waiting;
      if (a.overshoot != b.overshoot) return a.overshoot > b.overshoot;
      return a.trip < b.trip;
    });
    for (const auto& c : candidates) {
      auto& v = vehicles_[c.trip];
      const auto next = routes_[c.trip][v.cursor + 1];
      const int lane = best_lane(next);
      const bool empty = lanes_[next][static_cast<std::size_t>(lane)].empty();
      const double free = lane_free(next, lane);
      if (hop_state(c.trip, v.cursor, t) != 'r' && (empty || free >= c.overshoot)) {
        advance(c.trip, lane, std::min(c.overshoot, free), t, false);
      } else {
        v.pos = net_.edges()[v.edge].length;
        v.speed = 0.0;
      }
    }
  }

  void teleport_vehicles(double t) {
    std::vector<std::size_t> stuck;
    for (std::size_t e = 0; e < lanes_.size(); ++e) {
      for (const auto& lane : lanes_[e]) {
        if (!lane.empty() && vehicles_[lane.front()].waiting >= config_.teleport_after) {
          stuck.push_back(lane.front());
        }
      }
    }
    for (auto trip : stuck) {
      auto& v = vehicles_[trip];
      if (v.cursor + 1 == routes_[trip].size()) {
        ++out_.counts.teleported;
        ++out_.vehicles[trip].teleports;
        arrive(trip, t + config_.step_length);
        continue;
      }
      if (hop_state(trip, v.cursor, t) == 'r') continue;
      const auto next = routes_[trip][v.cursor + 1];
      const int lane = best_lane(next);
      const bool empty = lanes_[next][static_cast<std::size_t>(lane)].empty();
      const double free = lane_free(next, lane);
      if (!empty && free < config_.idm.min_gap) continue;
      advance(trip, lane, std::min(free, v.length), t, true);
      v.waiting = 0.0;
      v.speed = 0.0;
      ++out_.counts.teleported;
      ++out_.vehicles[trip].teleports;
    }
  }

  StepView snapshot(double t) const {
    StepView view;
    view.time = t;
    view.inserted = out_.counts.inserted;
    view.arrived = out_.counts.arrived;
    for (std::size_t e = 0; e < lanes_.size(); ++e) {
      for (std::size_t l = 0; l < lanes_[e].size(); ++l) {
        for (auto trip : lanes_[e][l]) {
          const auto& v = vehicles_[trip];
          view.vehicles.push_back({trip, e, static_cast<int>(l), v.pos, v.speed, v.length});
        }
      }
    }
    return view;
  }

  const net::RoadNetwork& net_;
  const demand::DemandSet& demand_;
  const SimConfig& config_;
  std::vector<std::vector<std::size_t>> routes_;
  std::vector<std::vector<Hop>> hops_;
  std::vector<Vehicle> vehicles_;
  std::vector<std::vector<std::deque<std::size_t>>> lanes_;  // front = most downstream
  std::vector<std::deque<std::size_t>> insert_queue_;
  std::set<std::size_t> waiting_edges_;
  SimOutput out_;

  std::vector<std::size_t> order_;
  SpeedInputs speed_in_;
  EmissionInputs emission_in_;
  std::vector<double> new_speed_;
  std::vector<StepEmissions> step_emissions_;
};

}  // namespace

SimOutput run(const net::RoadNetwork& net, const demand::DemandSet& demand, const SimConfig& config,
              const StepObserver& observer) {
  Engine engine(net, demand, config);
  return engine.run(observer);
}

}  // namespace roadchat::sim
