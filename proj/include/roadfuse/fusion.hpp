#pragma once

#include <map>
#include <set>
#include <vector>

#include "roadfuse/graph.hpp"

namespace roadfuse {

/// Which graph the per-outlier BFS walks.
enum class BfsDomain {
  inferred_map,      ///< the whole inferred map; stops at nodes close to the base map
  outlier_subgraph,  ///< only the subgraph induced by the outliers
};

struct FusionParams {
  double theta = 20.0;            ///< outlier threshold, meters
  double collision_radius = 2.0;  ///< merge radius, meters
  BfsDomain bfs_domain = BfsDomain::inferred_map;

  void validate() const;  ///< requires 0 < collision_radius < theta
};

struct FusionResult {
  RoadGraph fused;
  std::set<NodeId> added_nodes;       ///< ids in `fused`
  std::set<Edge> added_edges;         ///< ids in `fused`
  std::map<NodeId, NodeId> merges;    ///< inferred node -> base node
  std::map<NodeId, NodeId> id_map;    ///< inferred node -> fused id, for added nodes
  std::vector<NodeId> outliers;       ///< inferred ids in processing order
};

/// Inferred-map nodes at distance >= theta from the base map's segments.
/// With an empty base map every node is an outlier.
std::set<NodeId> find_outliers(const RoadGraph& base, const RoadGraph& inferred, double theta);

/// Fuse an inferred map into a base map.
///
/// Outliers are processed farthest-first (ties by id). From each outlier not
/// yet consumed, a BFS over the inferred map (edges undirected) collects new
/// road geometry; it halts at nodes within `collision_radius` of a base node,
/// which are merged into that base node. Every other visited node is added
/// verbatim, together with the inferred edges of the expanded nodes. The base
/// map is never modified: its nodes and edges appear in the output unchanged.
FusionResult fuse(const RoadGraph& base, const RoadGraph& inferred, const FusionParams& params = {});

// ---------------------------------------------------------------------------
// Connectivity property checker

enum class WitnessSearch {
  shortest_paths,  ///< p-hat must be a shortest path of the fused graph
  any_path,        ///< also accept any fused path inside the theta-corridor of p
};

struct VerifyOptions {
  WitnessSearch search = WitnessSearch::any_path;
  std::size_t max_nodes = 300;  ///< per source graph; the fused graph may have twice this
};

struct ConnectivityViolation {
  int source = 1;  ///< 1 or 2
  NodePath path;
  double best_distance = 0.0;  ///< smallest path distance found to any candidate
};

struct ConnectivityReport {
  std::size_t paths_checked = 0;
  std::size_t matched_by_shortest_path = 0;
  std::size_t matched_by_corridor = 0;
  std::vector<ConnectivityViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// For every shortest path p between distinct nodes of g1 and g2, look for a
/// path p-hat of gf with path_distance(p, p-hat) <= theta. Candidates are, in
/// order: the gf shortest path between the gf nodes nearest to p's
/// endpoints; gf shortest paths between all gf nodes within theta of the
/// endpoints; and (WitnessSearch::any_path) the shortest gf path confined to
/// gf nodes within theta of p. Throws SizeGuardError above the size guard.
ConnectivityReport verify_connectivity_property(const RoadGraph& g1, const RoadGraph& g2,
                                                const RoadGraph& gf, double theta,
                                                const VerifyOptions& options = {});

// ---------------------------------------------------------------------------
// Exact oracle for tiny instances

/// Bipartite similarity graph: left = shortest paths of g1, right = those of
/// g2, edge (i, j) when their path distance is <= theta.
struct BipartiteSimilarity {
  std::vector<NodePath> left;
  std::vector<NodePath> right;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

BipartiteSimilarity build_similarity_graph(const RoadGraph& g1, const RoadGraph& g2, double theta);

/// Minimum vertex cover of a bipartite graph via maximum matching and
/// Koenig's construction. Indices < left_count are left vertices, the rest
/// are right vertices offset by left_count.
std::vector<std::size_t> minimum_vertex_cover(std::size_t left_count, std::size_t right_count,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& edges);

struct ExactFusion {
  RoadGraph graph;
  BipartiteSimilarity similarity;
  std::vector<std::size_t> cover;     ///< minimum vertex cover (bipartite indexing as above)
  std::vector<std::size_t> isolated;  ///< H-vertices without any edge, also included
};

inline constexpr std::size_t kExactOracleMaxNodes = 12;

/// Union of the paths in a minimum vertex cover of the similarity graph plus
/// every isolated path. Nodes of g2 that coincide with a g1 node (same
/// quantized coordinate) are identified with it; other g2 nodes get fresh ids
/// above g1's. Refuses graphs with more than kExactOracleMaxNodes nodes.
ExactFusion exact_fusion_oracle(const RoadGraph& g1, const RoadGraph& g2, double theta);

}  // namespace roadfuse
