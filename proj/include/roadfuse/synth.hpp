#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "roadfuse/graph.hpp"
#include "roadfuse/ingest.hpp"

namespace roadfuse {

/// A point in grid units: column and row, fractional values allowed.
struct GridPoint {
  double col = 0.0;
  double row = 0.0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Horizontal or vertical grid street between two adjacent intersections.
struct GridStreet {
  std::size_t row0 = 0, col0 = 0, row1 = 0, col1 = 0;
  friend auto operator<=>(const GridStreet&, const GridStreet&) = default;
};

struct SynthSpec {
  std::size_t rows = 8;
  std::size_t cols = 8;
  double spacing = 200.0;        ///< meters between intersections
  double node_spacing = 50.0;    ///< streets are subdivided into pieces of at most this length; 0 = no subdivision
  double irregularity = 0.0;     ///< uniform jitter of intersections, meters
  double origin_lat = 25.28;
  double origin_lon = 51.52;

  std::uint64_t seed = 1;
  std::size_t n_vehicles = 40;
  std::size_t trips_per_vehicle = 10;
  std::int64_t sample_interval = 10;  ///< seconds
  double gps_noise_sigma = 3.0;       ///< meters, truncated at 4 sigma
  double map_jitter_sigma = -1.0;     ///< inferred-map node jitter; negative = gps_noise_sigma
  double speed_kmph = 36.0;
  double demand_skew = 1.0;           ///< Zipf exponent over endpoint popularity
  double train_fraction = 0.75;
  std::int64_t start_time = 1'600'000'000;
  std::int64_t trip_gap = 900;        ///< idle seconds between one vehicle's trips

  std::vector<std::vector<GridPoint>> planted_new_roads;
  std::vector<GridStreet> planted_closures;

  double jitter_sigma() const noexcept { return map_jitter_sigma < 0.0 ? gps_noise_sigma : map_jitter_sigma; }
  /// Throws InvalidArgument.
  void validate() const;
};

/// Plain `key = value` lines; `#` starts a comment. Repeatable keys:
///   new_road = c,r; c,r; ...
///   closure  = r0,c0,r1,c1
SynthSpec parse_synth_spec(std::string_view text);
std::string format_synth_spec(const SynthSpec& spec);

struct SynthWorld {
  RoadGraph base;          ///< grid, with closed streets, without new roads
  RoadGraph ground_truth;  ///< grid + new roads - closures
  RoadGraph inferred;      ///< training-route subgraph of ground_truth, jittered
  std::vector<Trajectory> trajectories;
  std::vector<NodePath> routes;  ///< true route behind each trajectory
  std::vector<Trajectory> train;
  std::vector<Trajectory> test;
  std::set<NodeId> new_road_nodes;               ///< ground-truth ids not on the grid
  std::vector<std::vector<NodeId>> closed_streets;  ///< base node chain per planted closure

  /// Intersection node id (base and ground truth share grid ids).
  NodeId intersection(std::size_t row, std::size_t col) const { return static_cast<NodeId>(row * cols + col); }
  std::size_t rows = 0, cols = 0;
};

/// Deterministic per seed. Throws GenerationError when the ground truth is
/// not connected, InvalidArgument on an invalid spec.
SynthWorld generate(const SynthSpec& spec);

}  // namespace roadfuse
