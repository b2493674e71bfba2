#include "roadfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "roadfuse/errors.hpp"
#include "roadfuse/ingest.hpp"
#include "roadfuse/spatial_index.hpp"

namespace roadfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<PlanarPoint> planar_path(const RoadGraph& g, const std::vector<NodeId>& nodes,
                                     const LocalFrame& frame) {
  std::vector<PlanarPoint> out;
  out.reserve(nodes.size());
  for (NodeId id : nodes) out.push_back(frame.project(g.position(id)));
  return out;
}

const LocalFrame& common_frame(const RoadGraph& a, const RoadGraph& b) {
  return a.empty() ? b.frame() : a.frame();
}

}  // namespace

void FusionParams::validate() const {
  if (!(collision_radius > 0.0 && collision_radius < theta))
    throw InvalidArgument("FusionParams: need 0 < collision_radius < theta");
}

std::set<NodeId> find_outliers(const RoadGraph& base, const RoadGraph& inferred, double theta) {
  std::set<NodeId> out;
  if (base.empty()) {
    for (NodeId id : inferred.node_ids()) out.insert(id);
    return out;
  }
  const GridIndex index(base);
  for (NodeId id : inferred.node_ids())
    if (index.distance_to_map(inferred.position(id)) >= theta) out.insert(id);
  return out;
}

FusionResult fuse(const RoadGraph& base, const RoadGraph& inferred, const FusionParams& params) {
  params.validate();
  FusionResult result;
  result.fused = base;
  if (inferred.empty()) return result;

  const auto ids = inferred.node_ids();
  std::unordered_map<NodeId, double> to_map;   // distance to base segments
  std::unordered_map<NodeId, NodeHit> nearest;  // nearest base node
  std::optional<GridIndex> index;
  if (!base.empty()) index.emplace(base);
  for (NodeId id : ids) {
    const auto& p = inferred.position(id);
    if (index) {
      to_map[id] = index->distance_to_map(p);
      nearest[id] = index->nearest_node(p);
    } else {
      to_map[id] = kInf;
    }
  }

  std::vector<NodeId> order;
  for (NodeId id : ids)
    if (to_map[id] >= params.theta) order.push_back(id);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return to_map[a] > to_map[b]; });
  result.outliers = order;

  const bool near_base_possible = index.has_value();
  auto is_stop = [&](NodeId n) {
    return near_base_possible && nearest.at(n).distance <= params.collision_radius;
  };

  const RoadGraph* domain = &inferred;
  RoadGraph outlier_graph;
  if (params.bfs_domain == BfsDomain::outlier_subgraph) {
    outlier_graph = induced_subgraph(inferred, std::set<NodeId>(order.begin(), order.end()));
    domain = &outlier_graph;
  }

  // Added inferred nodes keep their relative ids, shifted above the base ids.
  const NodeId shift = (base.empty() ? 0 : base.max_node_id() + 1) - ids.front();
  std::unordered_set<NodeId> pool(order.begin(), order.end());
  auto fused_id = [&](NodeId n) {
    return is_stop(n) ? nearest.at(n).node : result.id_map.at(n);
  };

  for (NodeId start : order) {
    if (!pool.contains(start)) continue;
    const auto visited = bfs_reach(*domain, start, is_stop);
    const std::unordered_set<NodeId> in_tree(visited.begin(), visited.end());
    for (NodeId n : visited) {
      pool.erase(n);
      if (is_stop(n)) {
        result.merges[n] = nearest.at(n).node;
      } else if (!result.id_map.contains(n)) {
        const NodeId fid = n + shift;
        result.fused.add_node(fid, inferred.position(n), Provenance::inferred);
        result.id_map[n] = fid;
        result.added_nodes.insert(fid);
      }
    }
    for (NodeId u : visited) {
      if (is_stop(u)) continue;
      auto link = [&](NodeId from, NodeId to) {
        if (!in_tree.contains(from) || !in_tree.contains(to)) return;
        const NodeId a = fused_id(from);
        const NodeId b = fused_id(to);
        if (a == b) return;
        const auto prov = is_stop(from) || is_stop(to) ? Provenance::merged : Provenance::inferred;
        if (result.fused.add_edge(a, b, prov)) result.added_edges.insert({a, b});
      };
      for (NodeId w : domain->out_neighbors(u)) link(u, w);
      for (NodeId w : domain->in_neighbors(u)) link(w, u);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Connectivity property checker

namespace {

class FusedSearch {
 public:
  FusedSearch(const RoadGraph& gf, const LocalFrame& frame)
      : all_(gf), index_(gf, frame), frame_(frame) {
    const auto& cg = all_.graph();
    xy_.reserve(cg.size());
    for (std::size_t i = 0; i < cg.size(); ++i) xy_.push_back(frame.project(gf.position(cg.id(i))));
  }

  bool empty() const { return xy_.empty(); }

  // Path distance from P to the gf shortest path between node indices a, b.
  double shortest_candidate(std::span<const PlanarPoint> p, std::size_t a, std::size_t b) const {
    // Witnesses, like the paths they cover, join two distinct nodes.
    if (a == b) return kInf;
    const auto idx = all_.path_indices(a, b);
    if (idx.empty()) return kInf;
    return path_distance(p, points(idx));
  }

  std::size_t nearest(const PlanarPoint& p) const {
    return all_.graph().index(index_.nearest_node(p).node);
  }

  std::vector<std::size_t> within(const PlanarPoint& p, double radius) const {
    std::vector<std::size_t> out;
    for (const auto& hit : index_.nodes_within(p, radius)) out.push_back(all_.graph().index(hit.node));
    return out;
  }

  // Shortest gf path that stays on nodes within theta of P, starting within
  // theta of P's first vertex and ending within theta of its last.
  double corridor_candidate(std::span<const PlanarPoint> p, double theta) const {
    const auto& cg = all_.graph();
    double max_half = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) max_half = std::max(max_half, planar_distance(p[i - 1], p[i]) / 2);
    std::unordered_set<std::size_t> corridor;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const PlanarPoint c = i + 1 < p.size()
                                ? PlanarPoint{(p[i].x + p[i + 1].x) / 2, (p[i].y + p[i + 1].y) / 2}
                                : p[i];
      for (const auto& hit : index_.nodes_within(c, theta + max_half)) {
        const auto k = cg.index(hit.node);
        if (point_to_path(xy_[k], p) <= theta) corridor.insert(k);
      }
    }
    std::unordered_set<std::size_t> targets;
    for (auto k : within(p.back(), theta))
      if (corridor.contains(k)) targets.insert(k);
    if (targets.empty()) return kInf;

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::unordered_map<std::size_t, double> dist;
    std::unordered_map<std::size_t, std::size_t> parent;
    // State 2k+1 means node k reached after at least one edge.
    for (auto k : within(p.front(), theta)) {
      if (!corridor.contains(k)) continue;
      dist[2 * k] = 0.0;
      parent[2 * k] = 2 * k;
      pq.emplace(0.0, 2 * k);
    }
    while (!pq.empty()) {
      auto [d, state] = pq.top();
      pq.pop();
      if (d > dist[state]) continue;
      const std::size_t v = state / 2;
      if ((state & 1) && targets.contains(v)) {
        std::vector<std::size_t> idx{state};
        while (parent[idx.back()] != idx.back()) idx.push_back(parent[idx.back()]);
        std::reverse(idx.begin(), idx.end());
        for (auto& i : idx) i /= 2;
        return path_distance(p, points(idx));
      }
      for (const auto& arc : cg.out(v)) {
        if (!corridor.contains(arc.target)) continue;
        const std::size_t next = 2 * arc.target + 1;
        const double nd = d + arc.length;
        auto it = dist.find(next);
        if (it == dist.end() || nd < it->second) {
          dist[next] = nd;
          parent[next] = state;
          pq.emplace(nd, next);
        }
      }
    }
    return kInf;
  }

 private:
  std::vector<PlanarPoint> points(const std::vector<std::size_t>& idx) const {
    std::vector<PlanarPoint> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(xy_[i]);
    return out;
  }

  AllPairsPaths all_;
  GridIndex index_;
  LocalFrame frame_;
  std::vector<PlanarPoint> xy_;
};

}  // namespace

ConnectivityReport verify_connectivity_property(const RoadGraph& g1, const RoadGraph& g2,
                                                const RoadGraph& gf, double theta,
                                                const VerifyOptions& options) {
  if (g1.node_count() > options.max_nodes)
    throw SizeGuardError("verify_connectivity_property: g1 too large", g1.node_count(), options.max_nodes);
  if (g2.node_count() > options.max_nodes)
    throw SizeGuardError("verify_connectivity_property: g2 too large", g2.node_count(), options.max_nodes);
  if (gf.node_count() > 2 * options.max_nodes)
    throw SizeGuardError("verify_connectivity_property: gf too large", gf.node_count(), 2 * options.max_nodes);

  const LocalFrame frame = common_frame(g1, gf.empty() ? g2 : gf);
  ConnectivityReport report;
  std::optional<FusedSearch> fused;
  if (!gf.empty()) fused.emplace(gf, frame);

  auto check_source = [&](const RoadGraph& g, int which) {
    const AllPairsPaths paths(g);
    const auto& cg = paths.graph();
    for (std::size_t s = 0; s < cg.size(); ++s) {
      for (std::size_t t = 0; t < cg.size(); ++t) {
        if (s == t || !std::isfinite(paths.distance(s, t))) continue;
        ++report.paths_checked;
        auto path = *paths.path(cg.id(s), cg.id(t));
        const auto p = planar_path(g, path.nodes, frame);
        double best = kInf;
        if (fused) {
          best = fused->shortest_candidate(p, fused->nearest(p.front()), fused->nearest(p.back()));
          if (best > theta) {
            for (auto a : fused->within(p.front(), theta)) {
              for (auto b : fused->within(p.back(), theta)) {
                best = std::min(best, fused->shortest_candidate(p, a, b));
                if (best <= theta) break;
              }
              if (best <= theta) break;
            }
          }
          if (best <= theta) {
            ++report.matched_by_shortest_path;
            continue;
          }
          if (options.search == WitnessSearch::any_path) {
            const double corridor = fused->corridor_candidate(p, theta);
            if (corridor <= theta) {
              ++report.matched_by_corridor;
              continue;
            }
            best = std::min(best, corridor);
          }
        }
        report.violations.push_back({which, std::move(path), best});
      }
    }
  };
  check_source(g1, 1);
  check_source(g2, 2);
  return report;
}

// ---------------------------------------------------------------------------
// Exact oracle

BipartiteSimilarity build_similarity_graph(const RoadGraph& g1, const RoadGraph& g2, double theta) {
  const LocalFrame frame = common_frame(g1, g2);
  BipartiteSimilarity h;
  h.left = AllPairsPaths(g1).all_paths();
  h.right = AllPairsPaths(g2).all_paths();
  std::vector<std::vector<PlanarPoint>> right_xy;
  right_xy.reserve(h.right.size());
  for (const auto& p : h.right) right_xy.push_back(planar_path(g2, p.nodes, frame));
  for (std::size_t i = 0; i < h.left.size(); ++i) {
    const auto a = planar_path(g1, h.left[i].nodes, frame);
    for (std::size_t j = 0; j < h.right.size(); ++j)
      if (path_distance(a, right_xy[j]) <= theta) h.edges.emplace_back(i, j);
  }
  return h;
}

std::vector<std::size_t> minimum_vertex_cover(std::size_t left_count, std::size_t right_count,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(left_count);
  for (auto [l, r] : edges) {
    if (l >= left_count || r >= right_count) throw InvalidArgument("minimum_vertex_cover: edge out of range");
    adj[l].push_back(r);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_left(left_count, kNone), match_right(right_count, kNone);
  std::vector<char> seen;
  // Kuhn's augmenting paths; instances here are small.
  std::function<bool(std::size_t)> augment = [&](std::size_t u) {
    for (auto v : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_right[v] == kNone || augment(match_right[v])) {
        match_left[u] = v;
        match_right[v] = u;
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < left_count; ++u) {
    seen.assign(right_count, 0);
    augment(u);
  }

  // Koenig: Z = vertices reachable from free left vertices by alternating
  // paths; the cover is (L \ Z) + (R n Z).
  std::vector<char> z_left(left_count, 0), z_right(right_count, 0);
  std::deque<std::size_t> queue;
  for (std::size_t u = 0; u < left_count; ++u) {
    if (match_left[u] == kNone) {
      z_left[u] = 1;
      queue.push_back(u);
    }
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u]) {
      if (z_right[v] || match_left[u] == v) continue;
      z_right[v] = 1;
      const auto w = match_right[v];
      if (w != kNone && !z_left[w]) {
        z_left[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::vector<std::size_t> cover;
  for (std::size_t u = 0; u < left_count; ++u)
    if (!z_left[u]) cover.push_back(u);
  for (std::size_t v = 0; v < right_count; ++v)
    if (z_right[v]) cover.push_back(left_count + v);
  return cover;
}

ExactFusion exact_fusion_oracle(const RoadGraph& g1, const RoadGraph& g2, double theta) {
  if (g1.node_count() > kExactOracleMaxNodes)
    throw SizeGuardError("exact_fusion_oracle: g1 too large", g1.node_count(), kExactOracleMaxNodes);
  if (g2.node_count() > kExactOracleMaxNodes)
    throw SizeGuardError("exact_fusion_oracle: g2 too large", g2.node_count(), kExactOracleMaxNodes);

  ExactFusion out;
  out.similarity = build_similarity_graph(g1, g2, theta);
  const auto& h = out.similarity;
  const std::size_t nl = h.left.size();
  const std::size_t nr = h.right.size();
  out.cover = minimum_vertex_cover(nl, nr, h.edges);

  std::vector<char> has_edge(nl + nr, 0);
  for (auto [l, r] : h.edges) has_edge[l] = has_edge[nl + r] = 1;
  for (std::size_t v = 0; v < nl + nr; ++v)
    if (!has_edge[v]) out.isolated.push_back(v);

  // g2 nodes that sit on a g1 node are the same intersection.
  std::map<std::pair<std::int64_t, std::int64_t>, NodeId> g1_at;
  for (NodeId id : g1.node_ids()) {
    const auto& p = g1.position(id);
    g1_at[{std::llround(p.lat / kCoordinateQuantum), std::llround(p.lon / kCoordinateQuantum)}] = id;
  }
  const NodeId shift = g2.empty() ? 0 : (g1.empty() ? 0 : g1.max_node_id() + 1) - g2.node_ids().front();
  auto g2_id = [&](NodeId id) {
    const auto& p = g2.position(id);
    auto it = g1_at.find({std::llround(p.lat / kCoordinateQuantum), std::llround(p.lon / kCoordinateQuantum)});
    return it != g1_at.end() ? it->second : id + shift;
  };

  out.graph = RoadGraph(common_frame(g1, g2));
  auto add_path = [&](const RoadGraph& src, const NodePath& path, bool second) {
    NodeId prev = 0;
    for (std::size_t k = 0; k < path.nodes.size(); ++k) {
      const NodeId id = second ? g2_id(path.nodes[k]) : path.nodes[k];
      if (!out.graph.has_node(id))
        out.graph.add_node(id, src.position(path.nodes[k]), second ? Provenance::inferred : Provenance::base);
      if (k > 0 && prev != id) out.graph.add_edge(prev, id, second ? Provenance::inferred : Provenance::base);
      prev = id;
    }
  };
  std::vector<std::size_t> selected = out.cover;
  selected.insert(selected.end(), out.isolated.begin(), out.isolated.end());
  std::sort(selected.begin(), selected.end());
  for (auto v : selected) {
    if (v < nl) add_path(g1, h.left[v], false);
    else add_path(g2, h.right[v - nl], true);
  }
  return out;
}

}  // namespace roadfuse
