// Independent reference implementations used by the tests. Nothing here
// calls the algorithm it checks.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "roadfuse/geometry.hpp"
#include "roadfuse/graph.hpp"
#include "roadfuse/random.hpp"

namespace oracle {

using roadfuse::GeoPoint;
using roadfuse::LocalFrame;
using roadfuse::NodeId;
using roadfuse::PlanarPoint;
using roadfuse::RoadGraph;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double haversine(const GeoPoint& a, const GeoPoint& b) {
  const double rad = std::acos(-1.0) / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * roadfuse::kEarthRadiusM * std::asin(std::sqrt(h));
}

/// Segment distance by ternary search over the (convex) parameter.
inline double segment_distance_search(const PlanarPoint& u, const PlanarPoint& a, const PlanarPoint& b) {
  auto at = [&](double t) { return std::hypot(a.x + t * (b.x - a.x) - u.x, a.y + t * (b.y - a.y) - u.y); };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (at(m1) < at(m2)) hi = m2;
    else lo = m1;
  }
  return std::min({at(0.0), at(1.0), at((lo + hi) / 2.0)});
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }
  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// Undirected connectivity over node ids.
inline bool connected_undirected(const RoadGraph& g, NodeId a, NodeId b) {
  const auto ids = g.node_ids();
  std::map<NodeId, std::size_t> idx;
  for (std::size_t i = 0; i < ids.size(); ++i) idx[ids[i]] = i;
  UnionFind uf(ids.size());
  for (const auto& e : g.edges()) uf.unite(idx.at(e.from), idx.at(e.to));
  return uf.same(idx.at(a), idx.at(b));
}

inline bool ties(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Node betweenness by Floyd-Warshall distances and shortest-path counting
/// over the shortest-path DAG, summed pairwise. Directed, length-weighted,
/// normalized by (n-1)(n-2).
inline std::map<NodeId, double> betweenness_bruteforce(const RoadGraph& g, bool undirected = false) {
  const auto ids = g.node_ids();
  const std::size_t n = ids.size();
  std::map<NodeId, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[ids[i]] = i;
  std::vector<std::vector<double>> w(n, std::vector<double>(n, kInf));
  for (const auto& e : g.edges()) {
    const double len = g.edge_length(e.from, e.to);
    w[idx[e.from]][idx[e.to]] = std::min(w[idx[e.from]][idx[e.to]], len);
    if (undirected) w[idx[e.to]][idx[e.from]] = std::min(w[idx[e.to]][idx[e.from]], len);
  }
  auto d = w;
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];

  // sigma[s][t]: number of shortest s-t paths.
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < n; ++t)
      if (d[s][t] < kInf) order.push_back(t);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[s][a] < d[s][b]; });
    sigma[s][s] = 1.0;
    for (std::size_t t : order) {
      if (t == s) continue;
      for (std::size_t u = 0; u < n; ++u)
        if (u != t && w[u][t] < kInf && d[s][u] < kInf && ties(d[s][u] + w[u][t], d[s][t])) sigma[s][t] += sigma[s][u];
    }
  }
  std::map<NodeId, double> out;
  for (std::size_t v = 0; v < n; ++v) {
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t) {
        if (s == v || t == v || s == t || d[s][t] == kInf) continue;
        if (d[s][v] < kInf && d[v][t] < kInf && ties(d[s][v] + d[v][t], d[s][t]))
          total += sigma[s][v] * sigma[v][t] / sigma[s][t];
      }
    out[ids[v]] = n > 2 ? total / (static_cast<double>(n - 1) * static_cast<double>(n - 2)) : 0.0;
  }
  return out;
}

struct EnumeratedPath {
  std::vector<NodeId> nodes;
  double length = kInf;
};

/// Shortest directed s-t path by enumerating every simple path; ties go
/// to the lexicographically smallest id sequence.
inline EnumeratedPath shortest_by_enumeration(const RoadGraph& g, NodeId s, NodeId t) {
  EnumeratedPath best;
  std::vector<NodeId> stack{s};
  std::set<NodeId> on_path{s};
  std::function<void(double)> dfs = [&](double len) {
    const NodeId v = stack.back();
    if (v == t) {
      if (best.nodes.empty() || (len < best.length && !ties(len, best.length)) ||
          (ties(len, best.length) && stack < best.nodes)) {
        best.nodes = stack;
        best.length = len;
      }
      return;
    }
    for (NodeId w : g.out_neighbors(v)) {
      if (on_path.contains(w)) continue;
      stack.push_back(w);
      on_path.insert(w);
      dfs(len + g.edge_length(v, w));
      on_path.erase(w);
      stack.pop_back();
    }
  };
  dfs(0.0);
  return best;
}

/// Minimum vertex cover size of a general graph by trying every subset.
inline std::size_t vertex_cover_bruteforce(std::size_t vertices,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::size_t best = vertices;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << vertices); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size >= best) continue;
    bool covers = true;
    for (const auto& [a, b] : edges)
      if (!((mask >> a) & 1) && !((mask >> b) & 1)) {
        covers = false;
        break;
      }
    if (covers) best = size;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Fixture builders. Coordinates are meters in a frame anchored at (lat0, lon0).

inline constexpr double kLat0 = 25.28;
inline constexpr double kLon0 = 51.52;

inline LocalFrame test_frame() { return LocalFrame(kLat0, kLon0); }

inline GeoPoint at(double x, double y) { return test_frame().unproject({x, y}); }

inline void node(RoadGraph& g, NodeId id, double x, double y,
                 roadfuse::Provenance p = roadfuse::Provenance::base) {
  g.add_node(id, at(x, y), p);
}

inline void two_way(RoadGraph& g, NodeId a, NodeId b, roadfuse::Provenance p = roadfuse::Provenance::base) {
  g.add_edge(a, b, p);
  g.add_edge(b, a, p);
}

inline RoadGraph empty_graph() { return RoadGraph(test_frame()); }

/// Random geometric digraph: n nodes in a box, each with a few arcs to near
/// neighbors; `two_way_share` of them in both directions.
inline RoadGraph random_graph(roadfuse::Rng& rng, std::size_t n, double box = 1000.0, double two_way_share = 0.5,
                              std::size_t degree = 3) {
  RoadGraph g = empty_graph();
  std::vector<PlanarPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({rng.uniform(0, box), rng.uniform(0, box)});
    node(g, static_cast<NodeId>(i), pts.back().x, pts.back().y);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return roadfuse::planar_distance(pts[i], pts[a]) < roadfuse::planar_distance(pts[i], pts[b]);
    });
    for (std::size_t k = 1; k <= std::min(degree, n - 1); ++k) {
      const auto a = static_cast<NodeId>(i), b = static_cast<NodeId>(order[k]);
      if (rng.uniform() < two_way_share) {
        g.add_edge(a, b);
        g.add_edge(b, a);
      } else if (rng.uniform() < 0.5) {
        g.add_edge(a, b);
      } else {
        g.add_edge(b, a);
      }
    }
  }
  return g;
}

}  // namespace oracle
