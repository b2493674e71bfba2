#include "roadfuse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "roadfuse/errors.hpp"

namespace roadfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string id_str(NodeId id) { return std::to_string(id); }

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::base: return "base";
    case Provenance::inferred: return "inferred";
    case Provenance::merged: return "merged";
  }
  return "base";
}

std::optional<Provenance> provenance_from_string(std::string_view s) noexcept {
  if (s == "base") return Provenance::base;
  if (s == "inferred") return Provenance::inferred;
  if (s == "merged") return Provenance::merged;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RoadGraph

void RoadGraph::fit_frame() {
  const auto pts = positions();
  frame_ = LocalFrame::fit(pts);
}

void RoadGraph::add_node(NodeId id, const GeoPoint& pos, Provenance prov) {
  if (!pos.valid()) throw InvalidArgument("add_node: invalid coordinates for node " + id_str(id));
  auto [it, inserted] = nodes_.try_emplace(id);
  if (!inserted) throw InvalidArgument("add_node: duplicate node id " + id_str(id));
  it->second.pos = pos;
  it->second.prov = prov;
}

bool RoadGraph::add_edge(NodeId from, NodeId to, Provenance prov) {
  if (from == to) throw InvalidArgument("add_edge: self-loop on node " + id_str(from));
  auto& a = record(from);
  auto& b = record(to);
  if (!a.out.try_emplace(to, prov).second) return false;
  b.in.insert(from);
  ++edge_count_;
  return true;
}

bool RoadGraph::remove_edge(NodeId from, NodeId to) {
  auto it = nodes_.find(from);
  if (it == nodes_.end() || it->second.out.erase(to) == 0) return false;
  nodes_.at(to).in.erase(from);
  --edge_count_;
  return true;
}

void RoadGraph::remove_node(NodeId id) {
  auto& rec = record(id);
  for (const auto& [to, prov] : rec.out) {
    nodes_.at(to).in.erase(id);
    --edge_count_;
  }
  for (NodeId from : rec.in) {
    nodes_.at(from).out.erase(id);
    --edge_count_;
  }
  nodes_.erase(id);
}

bool RoadGraph::has_edge(NodeId from, NodeId to) const {
  auto it = nodes_.find(from);
  return it != nodes_.end() && it->second.out.contains(to);
}

const RoadGraph::NodeRecord& RoadGraph::record(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw InvalidArgument("unknown node id " + id_str(id));
  return it->second;
}

RoadGraph::NodeRecord& RoadGraph::record(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw InvalidArgument("unknown node id " + id_str(id));
  return it->second;
}

const GeoPoint& RoadGraph::position(NodeId id) const { return record(id).pos; }
Provenance RoadGraph::node_provenance(NodeId id) const { return record(id).prov; }

Provenance RoadGraph::edge_provenance(NodeId from, NodeId to) const {
  const auto& rec = record(from);
  auto it = rec.out.find(to);
  if (it == rec.out.end())
    throw InvalidArgument("unknown edge " + id_str(from) + "->" + id_str(to));
  return it->second;
}

void RoadGraph::set_node_provenance(NodeId id, Provenance prov) { record(id).prov = prov; }
void RoadGraph::set_closed(NodeId id, bool closed) { record(id).closed = closed; }
bool RoadGraph::is_closed(NodeId id) const { return record(id).closed; }

std::vector<NodeId> RoadGraph::out_neighbors(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& [to, prov] : record(id).out) out.push_back(to);
  return out;
}

std::vector<NodeId> RoadGraph::in_neighbors(NodeId id) const {
  const auto& in = record(id).in;
  return {in.begin(), in.end()};
}

std::vector<NodeId> RoadGraph::neighbors(NodeId id) const {
  const auto& rec = record(id);
  std::vector<NodeId> out;
  out.reserve(rec.out.size() + rec.in.size());
  auto o = rec.out.begin();
  auto i = rec.in.begin();
  while (o != rec.out.end() || i != rec.in.end()) {
    if (i == rec.in.end() || (o != rec.out.end() && o->first < *i)) {
      out.push_back((o++)->first);
    } else if (o == rec.out.end() || *i < o->first) {
      out.push_back(*i++);
    } else {
      out.push_back(*i++);
      ++o;
    }
  }
  return out;
}

std::size_t RoadGraph::out_degree(NodeId id) const { return record(id).out.size(); }
std::size_t RoadGraph::in_degree(NodeId id) const { return record(id).in.size(); }

std::vector<NodeId> RoadGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, rec] : nodes_) ids.push_back(id);
  return ids;
}

std::vector<Edge> RoadGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for_each_edge([&](NodeId u, NodeId v, Provenance) { out.push_back({u, v}); });
  return out;
}

std::vector<GeoPoint> RoadGraph::positions() const {
  std::vector<GeoPoint> out;
  out.reserve(nodes_.size());
  for (const auto& [id, rec] : nodes_) out.push_back(rec.pos);
  return out;
}

NodeId RoadGraph::max_node_id() const {
  if (nodes_.empty()) throw NotFound("max_node_id: empty graph");
  return nodes_.rbegin()->first;
}

double RoadGraph::edge_length(NodeId from, NodeId to) const {
  if (!has_edge(from, to))
    throw InvalidArgument("unknown edge " + id_str(from) + "->" + id_str(to));
  return planar_distance(planar(from), planar(to));
}

double RoadGraph::total_edge_length() const {
  double total = 0.0;
  for_each_edge([&](NodeId u, NodeId v, Provenance) {
    total += planar_distance(planar(u), planar(v));
  });
  return total;
}

double RoadGraph::total_road_length() const {
  double total = 0.0;
  for_each_edge([&](NodeId u, NodeId v, Provenance) {
    // Count a two-way pair once, from its smaller endpoint.
    if (u < v || !has_edge(v, u)) total += planar_distance(planar(u), planar(v));
  });
  return total;
}

void RoadGraph::validate() const {
  std::size_t count = 0;
  for (const auto& [id, rec] : nodes_) {
    if (!rec.pos.valid()) throw std::logic_error("node " + id_str(id) + " has invalid coordinates");
    for (const auto& [to, prov] : rec.out) {
      if (to == id) throw std::logic_error("self-loop at " + id_str(id));
      auto it = nodes_.find(to);
      if (it == nodes_.end()) throw std::logic_error("dangling edge to " + id_str(to));
      if (!it->second.in.contains(id))
        throw std::logic_error("missing reverse index for " + id_str(id) + "->" + id_str(to));
      ++count;
    }
    for (NodeId from : rec.in) {
      auto it = nodes_.find(from);
      if (it == nodes_.end() || !it->second.out.contains(id))
        throw std::logic_error("stale in-edge " + id_str(from) + "->" + id_str(id));
    }
  }
  if (count != edge_count_) throw std::logic_error("edge count out of sync");
}

bool RoadGraph::same_structure(const RoadGraph& other) const {
  if (nodes_.size() != other.nodes_.size() || edge_count_ != other.edge_count_) return false;
  auto a = nodes_.begin();
  auto b = other.nodes_.begin();
  for (; a != nodes_.end(); ++a, ++b) {
    if (a->first != b->first || !(a->second.pos == b->second.pos)) return false;
    if (a->second.out.size() != b->second.out.size()) return false;
    auto x = a->second.out.begin();
    auto y = b->second.out.begin();
    for (; x != a->second.out.end(); ++x, ++y)
      if (x->first != y->first) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// NodePath / CentralityTable

Polyline NodePath::polyline(const RoadGraph& g) const {
  Polyline out;
  out.reserve(nodes.size());
  for (NodeId id : nodes) out.push_back(g.position(id));
  return out;
}

std::vector<PlanarPoint> NodePath::planar(const RoadGraph& g) const {
  std::vector<PlanarPoint> out;
  out.reserve(nodes.size());
  for (NodeId id : nodes) out.push_back(g.planar(id));
  return out;
}

double CentralityTable::at(NodeId id) const {
  auto it = values_.find(id);
  if (it == values_.end()) throw InvalidArgument("no centrality for node " + id_str(id));
  return it->second;
}

// ---------------------------------------------------------------------------
// Structural operations

RoadGraph induced_subgraph(const RoadGraph& g, const std::set<NodeId>& keep) {
  RoadGraph out(g.frame());
  for (NodeId id : keep) {
    if (!g.has_node(id)) throw InvalidArgument("induced_subgraph: unknown node id " + id_str(id));
    out.add_node(id, g.position(id), g.node_provenance(id));
    if (g.is_closed(id)) out.set_closed(id, true);
  }
  g.for_each_edge([&](NodeId u, NodeId v, Provenance prov) {
    if (keep.contains(u) && keep.contains(v)) out.add_edge(u, v, prov);
  });
  return out;
}

std::vector<NodeId> bfs_reach(const RoadGraph& g, NodeId start,
                              const std::function<bool(NodeId)>& stop) {
  if (!g.has_node(start)) throw InvalidArgument("bfs_reach: unknown start node " + id_str(start));
  std::vector<NodeId> order{start};
  std::unordered_set<NodeId> seen{start};
  std::deque<NodeId> frontier{start};
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    for (NodeId w : g.neighbors(v)) {
      if (!seen.insert(w).second) continue;
      order.push_back(w);
      if (!stop || !stop(w)) frontier.push_back(w);
    }
  }
  return order;
}

void merge_node_in_place(RoadGraph& g, NodeId from, NodeId into) {
  if (from == into) throw InvalidArgument("merge_node: cannot merge node " + id_str(from) + " into itself");
  if (!g.has_node(from) || !g.has_node(into))
    throw InvalidArgument("merge_node: unknown node id");
  for (NodeId w : g.out_neighbors(from))
    if (w != into) g.add_edge(into, w, g.edge_provenance(from, w));
  for (NodeId w : g.in_neighbors(from))
    if (w != into) g.add_edge(w, into, g.edge_provenance(w, from));
  g.remove_node(from);
}

RoadGraph merge_node(const RoadGraph& g, NodeId from, NodeId into) {
  RoadGraph out = g;
  merge_node_in_place(out, from, into);
  return out;
}

std::vector<std::vector<NodeId>> weak_components(const RoadGraph& g) {
  std::vector<std::vector<NodeId>> out;
  std::unordered_set<NodeId> seen;
  for (NodeId id : g.node_ids()) {
    if (seen.contains(id)) continue;
    auto comp = bfs_reach(g, id, {});
    seen.insert(comp.begin(), comp.end());
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path algorithms

bool lengths_tie(double a, double b) noexcept {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= kLengthTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

CompactGraph::CompactGraph(const RoadGraph& g, bool undirected) : ids_(g.node_ids()) {
  const std::size_t n = ids_.size();
  std::vector<std::vector<Arc>> out(n), in(n);
  std::vector<PlanarPoint> xy(n);
  for (std::size_t i = 0; i < n; ++i) xy[i] = g.planar(ids_[i]);
  g.for_each_edge([&](NodeId u, NodeId v, Provenance) {
    const auto a = static_cast<std::uint32_t>(index(u));
    const auto b = static_cast<std::uint32_t>(index(v));
    const double len = planar_distance(xy[a], xy[b]);
    out[a].push_back({b, len});
    in[b].push_back({a, len});
    if (undirected) {
      out[b].push_back({a, len});
      in[a].push_back({b, len});
    }
  });
  auto flatten = [n](std::vector<std::vector<Arc>>& lists, std::vector<std::size_t>& begin,
                     std::vector<Arc>& arcs) {
    begin.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& l = lists[i];
      std::sort(l.begin(), l.end(), [](const Arc& x, const Arc& y) { return x.target < y.target; });
      l.erase(std::unique(l.begin(), l.end(),
                          [](const Arc& x, const Arc& y) { return x.target == y.target; }),
              l.end());
      begin[i + 1] = begin[i] + l.size();
    }
    arcs.reserve(begin[n]);
    for (auto& l : lists) arcs.insert(arcs.end(), l.begin(), l.end());
  };
  flatten(out, out_begin_, out_arcs_);
  flatten(in, in_begin_, in_arcs_);
}

std::size_t CompactGraph::index(NodeId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) throw InvalidArgument("unknown node id " + id_str(id));
  return static_cast<std::size_t>(it - ids_.begin());
}

ShortestPathTree dijkstra(const CompactGraph& g, std::size_t source, bool reverse) {
  const std::size_t n = g.size();
  ShortestPathTree tree{std::vector<double>(n, kInf), std::vector<std::int64_t>(n, -1)};
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  tree.dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    for (const auto& arc : reverse ? g.in(v) : g.out(v)) {
      const double nd = d + arc.length;
      double& cur = tree.dist[arc.target];
      if (nd < cur) {
        cur = nd;
        tree.parent[arc.target] = static_cast<std::int64_t>(v);
        pq.emplace(nd, arc.target);
      } else if (nd == cur && static_cast<std::int64_t>(v) < tree.parent[arc.target]) {
        tree.parent[arc.target] = static_cast<std::int64_t>(v);
      }
    }
  }
  return tree;
}

namespace {

// Walks from s towards t, always taking the smallest-id successor that stays
// on a shortest path according to `dist_to_t`.
template <typename DistToT>
std::vector<std::size_t> lexicographic_path(const CompactGraph& g, std::size_t s, std::size_t t,
                                            DistToT&& dist_to_t) {
  if (!std::isfinite(dist_to_t(s))) return {};
  std::vector<std::size_t> path{s};
  std::size_t v = s;
  while (v != t) {
    if (path.size() > g.size()) throw std::logic_error("shortest path reconstruction looped");
    std::optional<std::size_t> next;
    for (const auto& arc : g.out(v)) {
      const double rest = dist_to_t(arc.target);
      if (std::isfinite(rest) && lengths_tie(arc.length + rest, dist_to_t(v))) {
        next = arc.target;
        break;
      }
    }
    if (!next) throw std::logic_error("shortest path reconstruction failed");
    v = *next;
    path.push_back(v);
  }
  return path;
}

double path_length(const CompactGraph& g, const std::vector<std::size_t>& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    for (const auto& arc : g.out(path[i - 1])) {
      if (arc.target == path[i]) {
        total += arc.length;
        break;
      }
    }
  }
  return total;
}

NodePath to_node_path(const CompactGraph& g, const std::vector<std::size_t>& idx) {
  NodePath p;
  p.nodes.reserve(idx.size());
  for (auto i : idx) p.nodes.push_back(g.id(i));
  p.length = path_length(g, idx);
  return p;
}

}  // namespace

std::optional<NodePath> shortest_path(const RoadGraph& g, NodeId s, NodeId t) {
  if (!g.has_node(s) || !g.has_node(t)) throw InvalidArgument("shortest_path: unknown endpoint");
  return shortest_path(CompactGraph(g), s, t);
}

std::optional<NodePath> shortest_path(const CompactGraph& cg, NodeId s, NodeId t) {
  const auto si = cg.index(s);
  const auto ti = cg.index(t);
  const auto to_t = dijkstra(cg, ti, /*reverse=*/true);
  auto idx = lexicographic_path(cg, si, ti, [&](std::size_t v) { return to_t.dist[v]; });
  if (idx.empty()) return std::nullopt;
  return to_node_path(cg, idx);
}

AllPairsPaths::AllPairsPaths(const RoadGraph& g) : compact_(g) {
  const std::size_t n = compact_.size();
  dist_.assign(n * n, kInf);
  for (std::size_t s = 0; s < n; ++s) {
    const auto tree = dijkstra(compact_, s);
    std::copy(tree.dist.begin(), tree.dist.end(), dist_.begin() + static_cast<std::ptrdiff_t>(s * n));
  }
}

std::vector<std::size_t> AllPairsPaths::path_indices(std::size_t s, std::size_t t) const {
  return lexicographic_path(compact_, s, t, [&](std::size_t v) { return distance(v, t); });
}

std::optional<NodePath> AllPairsPaths::path(NodeId s, NodeId t) const {
  auto idx = path_indices(compact_.index(s), compact_.index(t));
  if (idx.empty()) return std::nullopt;
  return to_node_path(compact_, idx);
}

std::vector<NodePath> AllPairsPaths::all_paths() const {
  std::vector<NodePath> out;
  const std::size_t n = compact_.size();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || !std::isfinite(distance(s, t))) continue;
      out.push_back(to_node_path(compact_, path_indices(s, t)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Betweenness

namespace {

struct BrandesWorkspace {
  explicit BrandesWorkspace(std::size_t n)
      : dist(n), sigma(n), delta(n), settled(n), preds(n) {}
  std::vector<double> dist, sigma, delta;
  std::vector<char> settled;
  std::vector<std::vector<std::uint32_t>> preds;
  std::vector<std::uint32_t> order;
};

void brandes_single_source(const CompactGraph& g, std::size_t s, BrandesWorkspace& ws,
                           std::vector<double>& acc) {
  const std::size_t n = g.size();
  std::fill(ws.dist.begin(), ws.dist.end(), kInf);
  std::fill(ws.sigma.begin(), ws.sigma.end(), 0.0);
  std::fill(ws.delta.begin(), ws.delta.end(), 0.0);
  std::fill(ws.settled.begin(), ws.settled.end(), 0);
  for (auto& p : ws.preds) p.clear();
  ws.order.clear();

  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  ws.dist[s] = 0.0;
  ws.sigma[s] = 1.0;
  pq.emplace(0.0, static_cast<std::uint32_t>(s));
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (ws.settled[v] || d != ws.dist[v]) continue;
    ws.settled[v] = 1;
    ws.order.push_back(v);
    for (const auto& arc : g.out(v)) {
      const auto w = arc.target;
      if (ws.settled[w]) continue;
      const double nd = d + arc.length;
      if (lengths_tie(nd, ws.dist[w])) {
        ws.sigma[w] += ws.sigma[v];
        ws.preds[w].push_back(v);
      } else if (nd < ws.dist[w]) {
        ws.dist[w] = nd;
        ws.sigma[w] = ws.sigma[v];
        ws.preds[w].assign(1, v);
        pq.emplace(nd, w);
      }
    }
  }
  for (auto it = ws.order.rbegin(); it != ws.order.rend(); ++it) {
    const auto w = *it;
    const double coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
    for (auto v : ws.preds[w]) ws.delta[v] += ws.sigma[v] * coeff;
    if (w != s) acc[w] += ws.delta[w];
  }
  (void)n;
}

}  // namespace

CentralityTable betweenness(const RoadGraph& g, const BetweennessOptions& options) {
  const CompactGraph cg(g, options.undirected);
  const std::size_t n = cg.size();
  // Sources are split into a fixed number of blocks whose partial sums are
  // added in block order, so the result does not depend on the thread count.
  constexpr std::size_t kBlocks = 32;
  const std::size_t blocks = std::min(kBlocks, std::max<std::size_t>(n, 1));
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  auto run_block = [&](std::size_t b) {
    BrandesWorkspace ws(n);
    for (std::size_t s = b; s < n; s += blocks) brandes_single_source(cg, s, ws, partial[b]);
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < blocks; b += threads) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  const double norm = n >= 3 ? static_cast<double>((n - 1) * (n - 2)) : 0.0;
  std::map<NodeId, double> values;
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) sum += partial[b][v];
    values.emplace(cg.id(v), norm > 0.0 ? sum / norm : 0.0);
  }
  return CentralityTable(std::move(values));
}

}  // namespace roadfuse
