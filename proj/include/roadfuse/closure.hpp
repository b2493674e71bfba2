#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roadfuse/errors.hpp"
#include "roadfuse/graph.hpp"
#include "roadfuse/ingest.hpp"

namespace roadfuse {

struct MatchParams {
  double match_radius = 20.0;       ///< meters
  double heading_tolerance = 45.0;  ///< degrees, direction-aware matching only

  void validate() const;
};

/// Arrival log summary for one node (or one directed edge).
struct NodeArrivalStats {
  std::size_t arrival_count = 0;
  std::int64_t first_arrival = 0;
  std::int64_t last_arrival = 0;
  double max_interarrival = 0.0;

  /// Mean inter-arrival time; defined once two arrivals exist.
  std::optional<double> mean_interarrival() const;
  /// Time elapsed since the last arrival at query time t.
  double elapsed(std::int64_t t) const { return static_cast<double>(t - last_arrival); }
};

/// Single-writer fold over arrival times. Arrivals must be recorded in
/// non-decreasing time order per key.
template <typename Key>
class ArrivalLog {
 public:
  void record(const Key& key, std::int64_t t);
  const std::map<Key, NodeArrivalStats>& stats() const noexcept { return stats_; }
  /// Zero-count stats for keys never seen.
  NodeArrivalStats at(const Key& key) const {
    auto it = stats_.find(key);
    return it == stats_.end() ? NodeArrivalStats{} : it->second;
  }
  std::int64_t latest() const noexcept { return latest_; }

 private:
  std::map<Key, NodeArrivalStats> stats_;
  std::int64_t latest_ = std::numeric_limits<std::int64_t>::min();
};

template <typename Key>
void ArrivalLog<Key>::record(const Key& key, std::int64_t t) {
  auto& s = stats_[key];
  if (s.arrival_count == 0) {
    s.first_arrival = s.last_arrival = t;
  } else {
    if (t < s.last_arrival) throw InvalidArgument("ArrivalLog: arrivals must be recorded in time order");
    s.max_interarrival = std::max(s.max_interarrival, static_cast<double>(t - s.last_arrival));
    s.last_arrival = t;
  }
  ++s.arrival_count;
  latest_ = std::max(latest_, t);
}

using NodeArrivals = ArrivalLog<NodeId>;
using EdgeArrivals = ArrivalLog<Edge>;

/// A record matches node n when n is its nearest node and lies within
/// match_radius. With `direction_aware`, n must also have an incident edge
/// whose travel bearing is within heading_tolerance of the record heading.
/// Only the first match of each trajectory at a node is logged.
NodeArrivals match_arrivals(const RoadGraph& g, const std::vector<Trajectory>& trajectories,
                            const MatchParams& params = {}, bool direction_aware = false);

/// Directional arrivals: a record matches directed edge (u, v) when it lies
/// within match_radius of the segment and its heading is within
/// heading_tolerance of bearing(u, v). First match per trajectory and edge.
EdgeArrivals match_edge_arrivals(const RoadGraph& g, const std::vector<Trajectory>& trajectories,
                                 const MatchParams& params = {});

struct ClosureParams {
  double gamma = 0.01;            ///< normalized betweenness threshold
  double min_run_length = 100.0;  ///< meters, cold-start and one-way runs
  double alpha = 40.0;            ///< gap multiplier for the anomaly rule
  std::size_t min_arrivals = 10;  ///< history needed before the anomaly rule applies

  void validate() const;
};

enum class ClosureKind { cold_start, anomaly, oneway_inconsistency };
std::string_view to_string(ClosureKind k) noexcept;

/// A connected run of closed nodes.
struct ClosureRun {
  ClosureKind kind = ClosureKind::cold_start;
  std::vector<NodeId> nodes;   ///< walk order
  std::vector<Edge> edges;     ///< graph edges inside the run (directed for one-way runs)
  double length_m = 0.0;       ///< one count per street, not per direction
  std::map<NodeId, double> evidence;  ///< betweenness, or elapsed/mean ratio
};

struct ClosureReport {
  std::vector<ClosureRun> runs;
  bool empty() const noexcept { return runs.empty(); }
};

/// Nodes without arrivals whose betweenness exceeds gamma, grouped into
/// connected runs; runs shorter than min_run_length are dropped.
ClosureReport coldstart_closures(const RoadGraph& g, const CentralityTable& bc, const NodeArrivals& arrivals,
                                 const ClosureParams& params = {});

/// Two-way streets where one direction carries no directional arrivals while
/// the opposite direction has at least min_arrivals. Silent directed edges
/// whose endpoints both exceed gamma are grouped into runs; runs shorter than
/// min_run_length are dropped.
ClosureReport oneway_inconsistencies(const RoadGraph& g, const CentralityTable& bc,
                                     const EdgeArrivals& arrivals, const ClosureParams& params = {});

/// Nodes with at least min_arrivals whose elapsed time at t exceeds
/// alpha * mean inter-arrival, grouped into adjacent runs. Throws
/// InvalidArgument when t precedes a logged arrival.
ClosureReport anomaly_closures(const RoadGraph& g, const NodeArrivals& arrivals, std::int64_t t,
                               const ClosureParams& params = {});

/// Removes the edges of each run (every edge between two run nodes; only the
/// listed directions for one-way runs) and marks run nodes closed.
RoadGraph apply_closures(const RoadGraph& g, const ClosureReport& report);

/// Runs as LineString (or MultiLineString for branched runs) features.
std::string closure_report_geojson(const RoadGraph& g, const ClosureReport& report);
/// node_id,kind,evidence,run_id
std::string closure_report_csv(const ClosureReport& report);

}  // namespace roadfuse
