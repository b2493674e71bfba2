#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "roadfuse/geometry.hpp"
#include "roadfuse/graph.hpp"

namespace roadfuse {

struct NodeHit {
  NodeId node = 0;
  double distance = 0.0;
};

/// An undirected road segment. `a < b` for real segments; isolated nodes
/// are indexed as degenerate segments with a == b.
struct SegmentHit {
  NodeId a = 0;
  NodeId b = 0;
  double distance = 0.0;
};

/// Counters for the cost of the most recent queries (diagnostics only).
struct QueryStats {
  std::size_t cells_visited = 0;
};

/// Uniform grid over the nodes and edge segments of a graph.
///
/// Results are exact: a ring search only stops once no unvisited cell can
/// hold anything closer. Ties resolve to the smallest id.
class GridIndex {
 public:
  static constexpr double kDefaultCellSize = 50.0;

  explicit GridIndex(const RoadGraph& g, double cell_size = kDefaultCellSize);
  GridIndex(const RoadGraph& g, const LocalFrame& frame, double cell_size = kDefaultCellSize);

  const LocalFrame& frame() const noexcept { return frame_; }
  double cell_size() const noexcept { return cell_size_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t segment_count() const noexcept { return segments_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// Throws NotFound on an empty index.
  NodeHit nearest_node(const GeoPoint& p, QueryStats* stats = nullptr) const;
  NodeHit nearest_node(const PlanarPoint& p, QueryStats* stats = nullptr) const;

  /// Nearest segment (or isolated node). Throws NotFound on an empty index.
  SegmentHit nearest_segment(const GeoPoint& p, QueryStats* stats = nullptr) const;
  SegmentHit nearest_segment(const PlanarPoint& p, QueryStats* stats = nullptr) const;

  /// Distance to the closest point of the indexed map.
  double distance_to_map(const GeoPoint& p, QueryStats* stats = nullptr) const {
    return nearest_segment(p, stats).distance;
  }
  double distance_to_map(const PlanarPoint& p, QueryStats* stats = nullptr) const {
    return nearest_segment(p, stats).distance;
  }

  /// Nodes with distance <= radius, sorted by distance then id.
  std::vector<NodeHit> nodes_within(const GeoPoint& p, double radius) const;
  std::vector<NodeHit> nodes_within(const PlanarPoint& p, double radius) const;

  /// Segments with distance <= radius, sorted by distance then (a, b).
  std::vector<SegmentHit> segments_within(const PlanarPoint& p, double radius) const;

 private:
  struct IndexedNode {
    NodeId id;
    PlanarPoint xy;
  };
  struct IndexedSegment {
    NodeId a, b;
    PlanarPoint pa, pb;
  };
  struct Cell {
    std::vector<std::uint32_t> nodes;
    std::vector<std::uint32_t> segments;
  };

  static std::int64_t key(std::int64_t ix, std::int64_t iy) noexcept {
    return (ix << 32) ^ (iy & 0xffffffffLL);
  }
  std::int64_t cell_of(double v) const noexcept;
  const Cell* find_cell(std::int64_t ix, std::int64_t iy) const;
  void build(const RoadGraph& g);

  // Visits cells in Chebyshev rings around p until `done(ring)` holds or the
  // grid extent is exhausted.
  template <typename Visit, typename Done>
  void ring_search(const PlanarPoint& p, Visit&& visit, Done&& done, QueryStats* stats) const;

  LocalFrame frame_;
  double cell_size_;
  std::vector<IndexedNode> nodes_;
  std::vector<IndexedSegment> segments_;
  std::unordered_map<std::int64_t, Cell> cells_;
  std::int64_t min_ix_ = 0, max_ix_ = -1, min_iy_ = 0, max_iy_ = -1;
};

}  // namespace roadfuse
