#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roadchat/demand.hpp"
#include "roadchat/netmodel.hpp"

namespace roadchat::signal {

/// Classical Webster constants; all overridable.
struct WebsterParams {
  double lost_time_per_phase = 5.0;  // s
  double yellow = 4.0;               // s, part of the lost time
  double min_green = 5.0;            // s
  double min_cycle = 20.0;           // s
  double max_cycle = 120.0;          // s
  double max_flow_ratio = 0.95;      // Y at or above this is oversaturated
  double saturation_per_lane = 1800.0;  // veh/h/lane
};

struct Approach {
  std::string edge;
  double flow = 0.0;        // veh/h
  double saturation = 0.0;  // veh/h
};

/// One entry per signal phase; each phase serves a set of approaches.
struct WebsterInput {
  std::vector<std::vector<Approach>> phases;
};

struct WebsterTiming {
  std::vector<double> critical_ratios;  // y_i per phase
  double flow_ratio_sum = 0.0;          // Y
  double lost_time = 0.0;               // L
  double raw_cycle = 0.0;               // (1.5 L + 5) / (1 - Y), before clamping
  int cycle = 0;                        // clamped, whole seconds
  std::vector<int> greens;              // effective greens, sum = cycle - L
};

/// Webster cycle = (1.5 L + 5)/(1 - Y), green_i = (y_i / Y)(C - L).
/// Throws Oversaturated (Y >= max_flow_ratio or an approach with flow >= saturation) and
/// InvalidArgument (no demand, empty phases).
WebsterTiming webster_program(const WebsterInput& input, const WebsterParams& params = {});

/// Phase list for a timing: green_i, yellow, then all-red for the rest of the lost time.
/// `link_phase[k]` names the phase serving link k.
std::vector<net::Phase> timing_phases(const WebsterTiming& timing, const std::vector<int>& link_phase,
                                      const WebsterParams& params = {});

/// Per signalized junction, keyed by junction id. Phases follow the junction's approach groups.
std::map<std::string, WebsterInput> estimate_flows(const net::RoadNetwork& net,
                                                   const demand::DemandSet& demand,
                                                   const WebsterParams& params = {});

struct AdaptResult {
  net::RoadNetwork network;
  std::vector<std::string> adapted;
  std::map<std::string, std::string> skipped;  // junction id -> reason
};

/// Webster timing at every signalized junction whose input is feasible. Offsets are kept
/// (wrapped into the new cycle).
AdaptResult adapt_all(const net::RoadNetwork& net, const demand::DemandSet& demand,
                      const WebsterParams& params = {});

struct CorridorSpec {
  std::vector<std::string> light_ids;
  std::vector<double> distances;  // metres between consecutive lights, size = lights - 1
  double progression_speed = 0.0;  // m/s
};

/// offset_j = (distance from the first light / speed) mod cycle_j.
std::vector<double> corridor_offsets(const CorridorSpec& corridor, const std::vector<double>& cycles);

struct OffsetResult {
  net::RoadNetwork network;
  std::vector<CorridorSpec> corridors;
  std::map<std::string, double> offsets;  // lights that received an offset
};

/// Green-wave offsets along the `top_k` most-travelled routes that pass at least two lights.
/// Throws NoSignals when the network has fewer than two traffic lights.
OffsetResult coordinate_offsets(const net::RoadNetwork& net, const demand::DemandSet& demand,
                                int top_k = 3);

enum class TlsFileKind { offsets, programs };

inline constexpr const char* kAdaptedProgramId = "adapted";

/// SUMO additional file: `offsets` patches the offset of the network's own program;
/// `programs` carries full phase lists under program id "adapted".
std::string emit_tls_add_xml(const net::RoadNetwork& net, TlsFileKind kind);

struct TlsOverride {
  std::string id;
  std::string program_id;
  double offset = 0.0;
  std::optional<std::vector<net::Phase>> lane_phases;  // lane-level states as written
};

std::vector<TlsOverride> parse_tls_add_xml(std::string_view xml_text);

/// Applies overrides from an additional file onto `net` (lane states collapsed to links).
net::RoadNetwork apply_tls_overrides(const net::RoadNetwork& net, const std::vector<TlsOverride>& overrides);

}  // namespace roadchat::signal
