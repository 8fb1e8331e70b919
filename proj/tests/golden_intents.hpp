#pragma once

#include <string>
#include <vector>

#include "roadchat/intent.hpp"

namespace testing {

struct GoldenCase {
  std::string text;
  roadchat::intent::Intent expected;
};

inline std::vector<GoldenCase> golden_intents() {
  using namespace roadchat::intent;
  const double mile = kMetersPerMile;
  auto real = [](std::string city, double radius, TrafficCondition t) {
    Intent i{Kind::GenerateRealWorld, {}};
    i.slots.city = std::move(city);
    i.slots.radius = radius;
    i.slots.traffic_condition = t;
    return i;
  };
  auto remove = [](std::string name) {
    Intent i{Kind::EdgeRemove, {}};
    i.slots.edge_name = std::move(name);
    return i;
  };
  auto lane = [](std::string name, int index) {
    Intent i{Kind::LaneRemove, {}};
    i.slots.edge_name = std::move(name);
    i.slots.lane_index = index;
    return i;
  };
  auto mix = [](double p) {
    Intent i{Kind::VehicleMix, {}};
    i.slots.ev_proportion = p;
    return i;
  };
  auto abstract = [](NetworkKind k, TrafficCondition t) {
    Intent i{Kind::GenerateAbstract, {}};
    i.slots.network_kind = k;
    i.slots.traffic_condition = t;
    return i;
  };
  auto add = [](std::string o, std::string d) {
    Intent i{Kind::AddVehicle, {}};
    i.slots.origin_edge = std::move(o);
    i.slots.dest_edge = std::move(d);
    return i;
  };
  const Intent offsets{Kind::TlsOffset, {}};
  const Intent adapt{Kind::TlsAdaptation, {}};
  const Intent compare{Kind::Compare, {}};

  Intent spider = abstract(NetworkKind::spider, TrafficCondition::medium);
  spider.slots.spider_params = SpiderParams{20, 10, 150};
  Intent grid = abstract(NetworkKind::grid, TrafficCondition::heavy);
  grid.slots.grid_params = GridParams{4, 6, 250};

  return {
      // Utterances quoted in the source material.
      {"Generate a simulation in city Albany with a radius of 3miles, and the volume of traffic should be medium.",
       real("Albany", 3 * mile, TrafficCondition::medium)},
      {"I want to remove Madison Avenue", remove("Madison Avenue")},
      {"I'd like to remove the first lane in Madison Avenue", lane("Madison Avenue", 0)},
      {"I want to set traffic light offsets for the simulation", offsets},
      {"I want to set offsets to all the traffic light in the simulation", offsets},
      {"I want to set the proportion of electric vehicles as 0.5.", mix(0.5)},
      {"I want to see a traffic simulation in Albany. There should be medium traffic and it should show me streets "
       "in a 1 mile radius.",
       real("Albany", mile, TrafficCondition::medium)},
      // Paraphrases.
      {"generate a simulation in the city of Albany with a 2 mile radius and heavy traffic",
       real("Albany", 2 * mile, TrafficCondition::heavy)},
      {"Simulate Troy, radius 3 km, light traffic", real("Troy", 3000, TrafficCondition::light)},
      {"Can you build a traffic simulation for Boston with radius 500 m and medium traffic?",
       real("Boston", 500, TrafficCondition::medium)},
      {"Please delete Washington Avenue.", remove("Washington Avenue")},
      {"remove State Street from the network", remove("State Street")},
      {"Close Lark Street please", remove("Lark Street")},
      {"Remove the second lane of Washington Avenue", lane("Washington Avenue", 1)},
      {"remove the 3rd lane on South Pearl Street", lane("South Pearl Street", 2)},
      {"Set traffic light offsets", offsets},
      {"Coordinate the signal offsets to create a green wave", offsets},
      {"I want to adapt the traffic light cycles", adapt},
      {"Optimize the traffic light cycle lengths with Webster's formula", adapt},
      {"Set the proportion of electric vehicles to 30%", mix(0.3)},
      {"make half of the vehicles electric", mix(0.5)},
      {"I want 25 percent electric vehicles", mix(0.25)},
      {"Add a vehicle from Lark Street to Eagle Street", add("Lark Street", "Eagle Street")},
      {"Generate a spider network with 20 arms and 10 circles spaced 150 meters apart and medium traffic", spider},
      {"Create a 4 by 6 grid network with 250 m spacing and heavy traffic", grid},
      {"yes", compare},
      {"Compare the last two runs", compare},
      {"", Intent{}},
  };
}

}  // namespace testing
