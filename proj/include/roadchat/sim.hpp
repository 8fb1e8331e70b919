#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roadchat/demand.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::sim {

/// Intelligent Driver Model constants shared by every vehicle.
struct IdmParams {
  double min_gap = 2.0;       // s0, m
  double time_headway = 1.2;  // T, s
  double exponent = 4.0;      // delta
};

/// Synthetic longitudinal power model; not calibrated to HBEFA.
struct EmissionParams {
  double mass = 1500.0;            // kg
  double rolling_coefficient = 0.01;
  double gravity = 9.81;           // m/s^2
  double air_density = 1.2;        // kg/m^3
  double drag_area = 0.7;          // Cd*A, m^2
  double engine_efficiency = 0.30;
  double fuel_heating_value = 43500.0;  // J/g
  double idle_fuel_rate = 0.15;         // g/s
  double co2_per_fuel = 3.17;
  double co_per_fuel = 0.02;
  double pmx_per_fuel = 0.0002;
  double drive_efficiency = 0.80;  // electric
  double auxiliary_power = 300.0;  // W, electric
};

struct StepEmissions {
  double co2 = 0.0;          // g
  double co = 0.0;           // g
  double pmx = 0.0;          // g
  double fuel = 0.0;         // g
  double electricity = 0.0;  // Wh
};

double tractive_power(double v, double a, const EmissionParams& p = {});
StepEmissions step_emissions(demand::Propulsion propulsion, double v, double a, double dt,
                             const EmissionParams& p = {});
inline StepEmissions step_emissions(const demand::VehicleType& vtype, double v, double a, double dt,
                                    const EmissionParams& p = {}) {
  return step_emissions(vtype.propulsion, v, a, dt, p);
}

struct SimConfig {
  double step_length = 1.0;   // s
  double end_time = 3600.0;   // s
  std::uint64_t seed = 0;     // the engine itself has no stochastic term
  double teleport_after = 300.0;  // s stationary before a forced jump
  double stationary_speed = 0.1;  // m/s
  IdmParams idm;
  EmissionParams emissions;
  bool parallel_kernels = false;  // OpenMP speed/emission kernels; results are bit-identical
  bool record_crossings = false;
};

struct VehicleRecord {
  std::string id;
  std::string vtype;
  double depart = 0.0;  // scheduled
  std::optional<double> inserted_at;
  std::optional<double> arrival;
  double travel_time = 0.0;  // arrival - depart, arrived vehicles only
  double distance = 0.0;     // m
  StepEmissions totals;
  int teleports = 0;
};

struct SimCounts {
  int inserted = 0;
  int arrived = 0;
  int teleported = 0;    // teleport events
  int unfinished = 0;    // inserted but still driving at end_time
  int not_inserted = 0;  // never entered the network
  bool operator==(const SimCounts&) const = default;
};

/// One movement across a junction.
struct Crossing {
  double time = 0.0;  // start of the step in which it happened
  std::size_t trip = 0;
  std::size_t from_edge = 0;
  std::size_t to_edge = 0;
  char signal = ' ';  // state of the controlling link, ' ' when unsignalized
  bool teleport = false;
};

struct SimOutput {
  std::vector<double> edge_density;  // veh/km time-mean, aligned with net.edges()
  std::vector<double> edge_sampled_seconds;
  std::vector<VehicleRecord> vehicles;  // aligned with demand.trips
  SimCounts counts;
  double end_time = 0.0;
  double step_length = 0.0;
  std::vector<Crossing> crossings;  // when record_crossings
};

struct VehicleView {
  std::size_t trip = 0;
  std::size_t edge = 0;
  int lane = 0;
  double position = 0.0;  // front bumper, metres from the edge start
  double speed = 0.0;
  double length = 0.0;
};

struct StepView {
  double time = 0.0;  // end of the step
  std::vector<VehicleView> vehicles;
  int inserted = 0;
  int arrived = 0;
};

using StepObserver = std::function<void(const StepView&)>;

/// Traffic light state character for link `link` of light `light` at time `t`.
char signal_state(const net::TrafficLight& light, int link, double t);

/// Deterministic IDM microsimulation. Throws InvalidRoute when a trip's route is not a connected
/// edge sequence of `net` or names an unknown vehicle type.
SimOutput run(const net::RoadNetwork& net, const demand::DemandSet& demand, const SimConfig& config,
              const StepObserver& observer = {});

// Per-vehicle kernels, structure-of-arrays. The serial versions are the reference.

struct SpeedInputs {
  std::vector<double> speed;
  std::vector<double> desired_speed;  // v0
  std::vector<double> max_accel;
  std::vector<double> comfortable_decel;
  std::vector<double> gap;          // to the leader's rear, +inf when free
  std::vector<double> leader_speed;
  std::vector<double> stop_distance;  // to a stop line that must be honoured, +inf when none
};

void idm_speeds_serial(const SpeedInputs& in, const IdmParams& idm, double dt, std::vector<double>& out);
void idm_speeds_omp(const SpeedInputs& in, const IdmParams& idm, double dt, std::vector<double>& out);

struct EmissionInputs {
  std::vector<double> speed_before;
  std::vector<double> speed_after;
  std::vector<unsigned char> electric;
};

void emissions_serial(const EmissionInputs& in, const EmissionParams& p, double dt,
                      std::vector<StepEmissions>& out);
void emissions_omp(const EmissionInputs& in, const EmissionParams& p, double dt,
                   std::vector<StepEmissions>& out);

/// SUMO edge-data (meandata) layout: one interval covering the run.
std::string emit_edge_data_xml(const net::RoadNetwork& net, const SimOutput& out,
                               const std::string& interval_id = "roadchat");

struct EdgeDataRow {
  std::string edge;
  double density = 0.0;
  double sampled_seconds = 0.0;
};
std::vector<EdgeDataRow> parse_edge_data_xml(std::string_view xml_text);

}  // namespace roadchat::sim
