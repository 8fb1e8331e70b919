#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "roadchat/netmodel.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ROADCHAT_FIXTURES) / name; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("roadchat-" + name + "-" + std::to_string(rng() % 1000000007));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Straight two-way corridor of `n` nodes spaced `spacing` metres, no signals.
inline roadchat::net::RoadNetwork corridor(int n, double spacing, double speed = 13.89) {
  using namespace roadchat::net;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) nodes.push_back({"n" + std::to_string(i), i * spacing, 0.0, false});
  for (int i = 0; i + 1 < n; ++i) {
    for (int d = 0; d < 2; ++d) {
      const auto& a = nodes[static_cast<std::size_t>(d ? i + 1 : i)];
      const auto& b = nodes[static_cast<std::size_t>(d ? i : i + 1)];
      Edge e;
      e.id = a.id + "_" + b.id;
      e.from = a.id;
      e.to = b.id;
      e.street_name = "Main Street";
      e.length = spacing;
      e.speed_limit = speed;
      e.shape = {{a.x, a.y}, {b.x, b.y}};
      edges.push_back(e);
    }
  }
  return RoadNetwork::build(nodes, edges, {});
}

}  // namespace testing
