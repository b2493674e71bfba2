#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadfuse/closure.hpp"
#include "roadfuse/graph.hpp"
#include "roadfuse/ingest.hpp"
#include "roadfuse/spatial_index.hpp"

namespace roadfuse {

/// Max over the trajectory's points of the distance to the nearest map
/// segment. Throws InvalidArgument on an empty trajectory or map.
double delta(const Trajectory& traj, const RoadGraph& g);
double delta(const Trajectory& traj, const GridIndex& index);

/// delta for every trajectory, in input order.
std::vector<double> deltas(const std::vector<Trajectory>& trajs, const RoadGraph& g);

/// Nearest-rank percentile: the value of rank ceil(p * N), p in (0, 1].
double nearest_rank(std::vector<double> values, double p);

struct MatchSummary {
  std::string map;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p99 = 0.0;
};

MatchSummary summarize_values(std::string name, const std::vector<double>& values);

struct NamedMap {
  std::string name;
  const RoadGraph* map = nullptr;
};

/// One row per map. Throws InvalidArgument on an empty trajectory set.
std::vector<MatchSummary> summarize(const std::vector<Trajectory>& trajs, const std::vector<NamedMap>& maps);

/// map,count,mean,median,p99
std::string summary_csv(const std::vector<MatchSummary>& rows);

struct CoveragePoint {
  double relative_length = 0.0;   ///< cumulative trajectory length / road length
  double covered_fraction = 0.0;  ///< nodes matched at least once / all nodes
};

/// Leading (0, 0), then one point after each trajectory. The road length is
/// g.total_road_length(), counting a two-way street once.
std::vector<CoveragePoint> coverage_curve(const RoadGraph& g, const std::vector<Trajectory>& trajs,
                                          const MatchParams& params = {});

/// relative_length,covered_fraction
std::string coverage_csv(const std::vector<CoveragePoint>& curve);

/// max / mean inter-arrival time, once two arrivals exist.
std::optional<double> interarrival_ratio(const NodeArrivalStats& s);

struct DistributionTables {
  std::string nodes;          ///< node_id,bc,arrival_count
  std::string bc_cdf;         ///< class,bc,cumulative_fraction (class traffic|no_traffic)
  std::string arrivals_cdf;   ///< arrival_count,cumulative_fraction
  std::string ratio_histogram;  ///< bin_low,bin_high,count
};

/// Nodes are the union of the keys of `bc` and `arrivals`. The ratio
/// histogram uses unit-width bins starting at 1 and only nodes with at least
/// two arrivals per day over the span of the whole log.
DistributionTables export_distributions(const CentralityTable& bc, const NodeArrivals& arrivals);

}  // namespace roadfuse
