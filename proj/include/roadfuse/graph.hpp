#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "roadfuse/geometry.hpp"

namespace roadfuse {

using NodeId = std::int64_t;

/// Where a node or edge of a fused map came from.
enum class Provenance : std::uint8_t { base, inferred, merged };

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> provenance_from_string(std::string_view s) noexcept;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed geometric graph: node ids with coordinates, directed edges whose
/// length is the projected distance between their endpoints.
///
/// Ids iterate in ascending order everywhere, which keeps every algorithm on
/// top of this type deterministic.
class RoadGraph {
 public:
  RoadGraph() = default;
  explicit RoadGraph(LocalFrame frame) : frame_(frame) {}

  const LocalFrame& frame() const noexcept { return frame_; }
  void set_frame(const LocalFrame& frame) noexcept { frame_ = frame; }
  /// Re-anchor the frame at the mean node coordinate.
  void fit_frame();

  /// Throws InvalidArgument on duplicate id or invalid coordinates.
  void add_node(NodeId id, const GeoPoint& pos, Provenance prov = Provenance::base);
  /// Returns false if the edge already exists. Throws on unknown endpoints
  /// or self-loops.
  bool add_edge(NodeId from, NodeId to, Provenance prov = Provenance::base);
  bool remove_edge(NodeId from, NodeId to);
  /// Removes the node together with all incident edges.
  void remove_node(NodeId id);

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  bool has_edge(NodeId from, NodeId to) const;
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const GeoPoint& position(NodeId id) const;
  PlanarPoint planar(NodeId id) const { return frame_.project(position(id)); }
  Provenance node_provenance(NodeId id) const;
  Provenance edge_provenance(NodeId from, NodeId to) const;
  void set_node_provenance(NodeId id, Provenance prov);

  void set_closed(NodeId id, bool closed);
  bool is_closed(NodeId id) const;

  /// Ascending ids of out-/in-neighbors.
  std::vector<NodeId> out_neighbors(NodeId id) const;
  std::vector<NodeId> in_neighbors(NodeId id) const;
  /// Union of out- and in-neighbors, ascending, without duplicates.
  std::vector<NodeId> neighbors(NodeId id) const;
  std::size_t out_degree(NodeId id) const;
  std::size_t in_degree(NodeId id) const;

  std::vector<NodeId> node_ids() const;
  std::vector<Edge> edges() const;
  std::vector<GeoPoint> positions() const;
  NodeId max_node_id() const;  ///< throws NotFound on an empty graph

  double edge_length(NodeId from, NodeId to) const;
  /// Sum of directed edge lengths.
  double total_edge_length() const;
  /// Sum of lengths over unordered node pairs joined by at least one edge:
  /// a two-way street counts once.
  double total_road_length() const;

  /// Checks the structural invariants, throwing std::logic_error on failure.
  void validate() const;

  /// Same node ids, coordinates and edge set (provenance and frame ignored).
  bool same_structure(const RoadGraph& other) const;

  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (const auto& [id, rec] : nodes_)
      for (const auto& [to, prov] : rec.out) fn(id, to, prov);
  }

 private:
  struct NodeRecord {
    GeoPoint pos;
    Provenance prov = Provenance::base;
    bool closed = false;
    std::map<NodeId, Provenance> out;
    std::set<NodeId> in;
  };

  const NodeRecord& record(NodeId id) const;
  NodeRecord& record(NodeId id);

  std::map<NodeId, NodeRecord> nodes_;
  std::size_t edge_count_ = 0;
  LocalFrame frame_;
};

struct NodePath {
  std::vector<NodeId> nodes;
  double length = 0.0;

  Polyline polyline(const RoadGraph& g) const;
  std::vector<PlanarPoint> planar(const RoadGraph& g) const;
};

/// Normalized betweenness per node, in [0, 1].
class CentralityTable {
 public:
  CentralityTable() = default;
  explicit CentralityTable(std::map<NodeId, double> values) : values_(std::move(values)) {}

  double at(NodeId id) const;
  bool contains(NodeId id) const { return values_.contains(id); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::map<NodeId, double>& values() const noexcept { return values_; }

 private:
  std::map<NodeId, double> values_;
};

/// Nodes = keep; edges = every edge of g with both endpoints kept.
RoadGraph induced_subgraph(const RoadGraph& g, const std::set<NodeId>& keep);

/// Breadth-first search that treats edges as undirected. Nodes matching
/// `stop` are visited but not expanded; the start node is always expanded.
/// Neighbors are visited in ascending id order.
std::vector<NodeId> bfs_reach(const RoadGraph& g, NodeId start,
                              const std::function<bool(NodeId)>& stop);

/// Minimum-length directed path; among equal-length paths the
/// lexicographically smallest id sequence. Empty when t is unreachable.
std::optional<NodePath> shortest_path(const RoadGraph& g, NodeId s, NodeId t);

/// Dense index view used by the path algorithms below.
class CompactGraph {
 public:
  explicit CompactGraph(const RoadGraph& g, bool undirected = false);

  std::size_t size() const noexcept { return ids_.size(); }
  NodeId id(std::size_t index) const { return ids_[index]; }
  std::size_t index(NodeId id) const;  ///< throws InvalidArgument
  const std::vector<NodeId>& ids() const noexcept { return ids_; }

  struct Arc {
    std::uint32_t target;
    double length;
  };

  std::span<const Arc> out(std::size_t v) const {
    return {out_arcs_.data() + out_begin_[v], out_arcs_.data() + out_begin_[v + 1]};
  }
  std::span<const Arc> in(std::size_t v) const {
    return {in_arcs_.data() + in_begin_[v], in_arcs_.data() + in_begin_[v + 1]};
  }

 private:
  std::vector<NodeId> ids_;
  std::vector<std::size_t> out_begin_, in_begin_;
  std::vector<Arc> out_arcs_, in_arcs_;
};

/// shortest_path on a prebuilt view, for callers issuing many queries.
std::optional<NodePath> shortest_path(const CompactGraph& g, NodeId s, NodeId t);

/// Lengths from one source; +inf where unreachable. parent is the settled
/// predecessor, smallest index among exact ties, or -1.
struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<std::int64_t> parent;
};
ShortestPathTree dijkstra(const CompactGraph& g, std::size_t source, bool reverse = false);

/// Two lengths are treated as one when they differ by less than this
/// relative tolerance.
inline constexpr double kLengthTieTolerance = 1e-9;
bool lengths_tie(double a, double b) noexcept;

/// Every shortest path of a small graph, lexicographically tie-broken.
class AllPairsPaths {
 public:
  explicit AllPairsPaths(const RoadGraph& g);

  const CompactGraph& graph() const noexcept { return compact_; }
  double distance(std::size_t s, std::size_t t) const { return dist_[s * compact_.size() + t]; }
  /// Indices of the lexicographically smallest shortest path, empty if unreachable.
  std::vector<std::size_t> path_indices(std::size_t s, std::size_t t) const;
  std::optional<NodePath> path(NodeId s, NodeId t) const;
  /// All shortest paths between distinct, mutually reachable node pairs.
  std::vector<NodePath> all_paths() const;

 private:
  CompactGraph compact_;
  std::vector<double> dist_;
};

struct BetweennessOptions {
  bool undirected = false;  ///< treat every edge as two-way
  unsigned threads = 0;     ///< 0 = hardware concurrency
};

/// Length-weighted node betweenness (Brandes), normalized by (n-1)(n-2).
/// Endpoints of a path do not count as passed through.
CentralityTable betweenness(const RoadGraph& g, const BetweennessOptions& options = {});

/// Re-target edges of `from` onto `into`, dropping self-loops and duplicates,
/// then delete `from`. `into` keeps its coordinates.
RoadGraph merge_node(const RoadGraph& g, NodeId from, NodeId into);
void merge_node_in_place(RoadGraph& g, NodeId from, NodeId into);

/// Weakly connected components, each sorted ascending, ordered by first id.
std::vector<std::vector<NodeId>> weak_components(const RoadGraph& g);

}  // namespace roadfuse
