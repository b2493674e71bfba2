#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roadfuse/geometry.hpp"
#include "roadfuse/graph.hpp"

namespace roadfuse {

struct GpsRecord {
  std::string vehicle_id;
  std::int64_t timestamp = 0;  ///< epoch seconds
  GeoPoint position;
  double speed_kmph = 0.0;
  double heading_deg = 0.0;  ///< clockwise from north, [0, 360]
};

/// One trip of one vehicle: records strictly increasing in time.
struct Trajectory {
  std::string vehicle_id;
  std::vector<GpsRecord> records;

  Polyline polyline() const;
  double length(const LocalFrame& frame) const;
};

struct TrajectoryReadOptions {
  std::int64_t gap_threshold_s = 300;  ///< split a stream where the gap exceeds this
  double speed_floor_kmph = 5.0;       ///< rows at or below this speed are dropped
};

struct TrajectoryReadStats {
  std::size_t rows = 0;
  std::size_t dropped_slow = 0;
  std::size_t dropped_duplicate = 0;
};

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t rng_seed = 0;
};

/// Coordinates closer than this (degrees) are one node.
inline constexpr double kCoordinateQuantum = 1e-6;

/// FeatureCollection of LineStrings. Optional properties: `oneway`
/// (default false, i.e. both directions) and `provenance`.
RoadGraph read_map_geojson(std::string_view bytes);

/// <node>/<way> subset of OSM XML. Only ways tagged `highway` are roads;
/// `oneway=yes|true|1` keeps the way direction, `oneway=-1` reverses it.
RoadGraph read_map_osm_xml(std::string_view bytes);

/// Picks the reader by extension (.osm/.xml vs anything else as GeoJSON).
RoadGraph read_map_file(const std::filesystem::path& path);

/// One LineString per directed edge, ascending (from, to).
std::string write_map_geojson(const RoadGraph& g);

/// Header: vehicle_id,timestamp,lat,lon,speed_kmph,heading_deg
std::vector<Trajectory> read_trajectories(std::string_view csv,
                                          const TrajectoryReadOptions& options = {},
                                          TrajectoryReadStats* stats = nullptr);
std::string write_trajectories_csv(const std::vector<Trajectory>& trajectories);

/// Partition by driver: the first ceil(fraction * D) drivers of a seeded
/// shuffle go to training (capped so testing keeps at least one driver).
std::pair<std::vector<Trajectory>, std::vector<Trajectory>> split_by_driver(
    const std::vector<Trajectory>& trajectories, const SplitSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace roadfuse
