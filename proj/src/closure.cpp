#include "roadfuse/closure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "roadfuse/spatial_index.hpp"

namespace roadfuse {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double undirected_length(const RoadGraph& g, const std::vector<Edge>& edges) {
  std::set<std::pair<NodeId, NodeId>> seen;
  double total = 0.0;
  for (const auto& e : edges) {
    if (seen.insert({std::min(e.from, e.to), std::max(e.from, e.to)}).second)
      total += g.edge_length(e.from, e.to);
  }
  return total;
}

// Connected components of `members` under the adjacency `adjacent`.
template <typename Adjacent>
std::vector<std::vector<NodeId>> components(const std::set<NodeId>& members, Adjacent&& adjacent) {
  std::vector<std::vector<NodeId>> out;
  std::unordered_set<NodeId> seen;
  for (NodeId start : members) {
    if (seen.contains(start)) continue;
    std::vector<NodeId> comp;
    std::vector<NodeId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (NodeId w : adjacent(v)) {
        if (members.contains(w) && seen.insert(w).second) stack.push_back(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// Depth-first walk order over the run's undirected edges, starting from the
// lowest-degree node (smallest id among those). For a path this is the path.
std::vector<NodeId> walk_order(const std::vector<NodeId>& comp, const std::vector<Edge>& edges) {
  std::map<NodeId, std::set<NodeId>> adj;
  for (NodeId v : comp) adj[v];
  for (const auto& e : edges) {
    adj[e.from].insert(e.to);
    adj[e.to].insert(e.from);
  }
  NodeId start = comp.front();
  for (NodeId v : comp)
    if (adj[v].size() < adj[start].size()) start = v;
  std::vector<NodeId> order;
  std::set<NodeId> seen;
  std::vector<NodeId> stack{start};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (!seen.insert(v).second) continue;
    order.push_back(v);
    for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it)
      if (!seen.contains(*it)) stack.push_back(*it);
  }
  return order;
}

std::vector<Edge> edges_among(const RoadGraph& g, const std::vector<NodeId>& comp) {
  const std::set<NodeId> members(comp.begin(), comp.end());
  std::vector<Edge> out;
  for (NodeId u : comp)
    for (NodeId v : g.out_neighbors(u))
      if (members.contains(v)) out.push_back({u, v});
  return out;
}

bool heading_matches(const RoadGraph& g, NodeId n, double heading, double tolerance) {
  const auto here = g.planar(n);
  for (NodeId w : g.out_neighbors(n)) {
    if (auto b = bearing(here, g.planar(w)); b && heading_difference(*b, heading) <= tolerance) return true;
  }
  for (NodeId w : g.in_neighbors(n)) {
    if (auto b = bearing(g.planar(w), here); b && heading_difference(*b, heading) <= tolerance) return true;
  }
  return false;
}

template <typename Key>
ArrivalLog<Key> fold_arrivals(std::vector<std::pair<std::int64_t, Key>>& arrivals) {
  std::sort(arrivals.begin(), arrivals.end());
  ArrivalLog<Key> log;
  for (const auto& [t, key] : arrivals) log.record(key, t);
  return log;
}

}  // namespace

void MatchParams::validate() const {
  if (!(match_radius > 0.0) || !(heading_tolerance > 0.0))
    throw InvalidArgument("MatchParams: match_radius and heading_tolerance must be positive");
}

void ClosureParams::validate() const {
  if (!(gamma > 0.0) || !(min_run_length > 0.0) || !(alpha > 0.0) || min_arrivals == 0)
    throw InvalidArgument("ClosureParams: all parameters must be positive");
}

std::optional<double> NodeArrivalStats::mean_interarrival() const {
  if (arrival_count < 2) return std::nullopt;
  return static_cast<double>(last_arrival - first_arrival) / static_cast<double>(arrival_count - 1);
}

std::string_view to_string(ClosureKind k) noexcept {
  switch (k) {
    case ClosureKind::cold_start: return "cold-start";
    case ClosureKind::anomaly: return "anomaly";
    case ClosureKind::oneway_inconsistency: return "oneway-inconsistency";
  }
  return "cold-start";
}

// ---------------------------------------------------------------------------
// Matching

NodeArrivals match_arrivals(const RoadGraph& g, const std::vector<Trajectory>& trajectories,
                            const MatchParams& params, bool direction_aware) {
  params.validate();
  std::vector<std::pair<std::int64_t, NodeId>> arrivals;
  if (g.empty()) return {};
  const GridIndex index(g);
  for (const auto& traj : trajectories) {
    std::unordered_set<NodeId> seen;
    for (const auto& r : traj.records) {
      const auto hit = index.nearest_node(r.position);
      if (hit.distance > params.match_radius) continue;
      if (direction_aware && !heading_matches(g, hit.node, r.heading_deg, params.heading_tolerance)) continue;
      if (seen.insert(hit.node).second) arrivals.emplace_back(r.timestamp, hit.node);
    }
  }
  return fold_arrivals(arrivals);
}

EdgeArrivals match_edge_arrivals(const RoadGraph& g, const std::vector<Trajectory>& trajectories,
                                 const MatchParams& params) {
  params.validate();
  std::vector<std::pair<std::int64_t, Edge>> arrivals;
  if (g.empty()) return {};
  const GridIndex index(g);
  for (const auto& traj : trajectories) {
    std::set<Edge> seen;
    for (const auto& r : traj.records) {
      const auto xy = index.frame().project(r.position);
      for (const auto& seg : index.segments_within(xy, params.match_radius)) {
        if (seg.a == seg.b) continue;
        for (const Edge e : {Edge{seg.a, seg.b}, Edge{seg.b, seg.a}}) {
          if (!g.has_edge(e.from, e.to)) continue;
          const auto b = bearing(g.planar(e.from), g.planar(e.to));
          if (!b || heading_difference(*b, r.heading_deg) > params.heading_tolerance) continue;
          if (seen.insert(e).second) arrivals.emplace_back(r.timestamp, e);
        }
      }
    }
  }
  return fold_arrivals(arrivals);
}

// ---------------------------------------------------------------------------
// Detection

ClosureReport coldstart_closures(const RoadGraph& g, const CentralityTable& bc, const NodeArrivals& arrivals,
                                 const ClosureParams& params) {
  params.validate();
  std::set<NodeId> candidates;
  for (NodeId n : g.node_ids())
    if (arrivals.at(n).arrival_count == 0 && bc.at(n) > params.gamma) candidates.insert(n);

  ClosureReport report;
  for (auto& comp : components(candidates, [&](NodeId v) { return g.neighbors(v); })) {
    auto edges = edges_among(g, comp);
    const double length = undirected_length(g, edges);
    if (length < params.min_run_length) continue;
    ClosureRun run;
    run.kind = ClosureKind::cold_start;
    run.nodes = walk_order(comp, edges);
    run.edges = std::move(edges);
    run.length_m = length;
    for (NodeId n : comp) run.evidence[n] = bc.at(n);
    report.runs.push_back(std::move(run));
  }
  return report;
}

ClosureReport oneway_inconsistencies(const RoadGraph& g, const CentralityTable& bc,
                                     const EdgeArrivals& arrivals, const ClosureParams& params) {
  params.validate();
  std::vector<Edge> silent;
  g.for_each_edge([&](NodeId u, NodeId v, Provenance) {
    if (!g.has_edge(v, u)) return;
    if (arrivals.at({u, v}).arrival_count != 0) return;
    if (arrivals.at({v, u}).arrival_count < params.min_arrivals) return;
    if (bc.at(u) > params.gamma && bc.at(v) > params.gamma) silent.push_back({u, v});
  });

  std::set<NodeId> members;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : silent) {
    members.insert(e.from);
    members.insert(e.to);
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  ClosureReport report;
  for (auto& comp : components(members, [&](NodeId v) { return adj[v]; })) {
    const std::set<NodeId> in_comp(comp.begin(), comp.end());
    std::vector<Edge> edges;
    for (const auto& e : silent)
      if (in_comp.contains(e.from)) edges.push_back(e);
    const double length = undirected_length(g, edges);
    if (length < params.min_run_length) continue;
    ClosureRun run;
    run.kind = ClosureKind::oneway_inconsistency;
    run.nodes = walk_order(comp, edges);
    run.edges = std::move(edges);
    run.length_m = length;
    for (NodeId n : comp) run.evidence[n] = bc.at(n);
    report.runs.push_back(std::move(run));
  }
  return report;
}

ClosureReport anomaly_closures(const RoadGraph& g, const NodeArrivals& arrivals, std::int64_t t,
                               const ClosureParams& params) {
  params.validate();
  std::set<NodeId> flagged;
  std::map<NodeId, double> ratio;
  for (const auto& [node, s] : arrivals.stats()) {
    if (t < s.last_arrival)
      throw InvalidArgument("anomaly_closures: query time precedes the last arrival at node " +
                            std::to_string(node));
    if (!g.has_node(node)) throw InvalidArgument("anomaly_closures: unknown node " + std::to_string(node));
    if (s.arrival_count < params.min_arrivals) continue;
    const double mean = *s.mean_interarrival();
    const double elapsed = s.elapsed(t);
    if (elapsed > params.alpha * mean) {
      flagged.insert(node);
      ratio[node] = mean > 0.0 ? elapsed / mean : std::numeric_limits<double>::infinity();
    }
  }
  ClosureReport report;
  for (auto& comp : components(flagged, [&](NodeId v) { return g.neighbors(v); })) {
    auto edges = edges_among(g, comp);
    ClosureRun run;
    run.kind = ClosureKind::anomaly;
    run.length_m = undirected_length(g, edges);
    run.nodes = walk_order(comp, edges);
    run.edges = std::move(edges);
    for (NodeId n : comp) run.evidence[n] = ratio[n];
    report.runs.push_back(std::move(run));
  }
  return report;
}

RoadGraph apply_closures(const RoadGraph& g, const ClosureReport& report) {
  RoadGraph out = g;
  for (const auto& run : report.runs) {
    for (NodeId n : run.nodes)
      if (!g.has_node(n)) throw InvalidArgument("apply_closures: stale report, unknown node " + std::to_string(n));
    if (run.kind == ClosureKind::oneway_inconsistency) {
      for (const auto& e : run.edges) {
        if (!g.has_edge(e.from, e.to))
          throw InvalidArgument("apply_closures: stale report, unknown edge " + std::to_string(e.from) + "->" +
                                std::to_string(e.to));
        out.remove_edge(e.from, e.to);
      }
      continue;
    }
    const std::set<NodeId> members(run.nodes.begin(), run.nodes.end());
    for (NodeId u : run.nodes) {
      for (NodeId v : out.out_neighbors(u))
        if (members.contains(v)) out.remove_edge(u, v);
      out.set_closed(u, true);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string closure_report_geojson(const RoadGraph& g, const ClosureReport& report) {
  using ojson = nlohmann::ordered_json;
  auto coord = [&](NodeId n) {
    const auto& p = g.position(n);
    return ojson::array({p.lon, p.lat});
  };
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& run = report.runs[i];
    ojson f;
    f["type"] = "Feature";
    ojson evidence = ojson::object();
    for (const auto& [n, v] : run.evidence) evidence[std::to_string(n)] = std::isfinite(v) ? ojson(v) : ojson(nullptr);
    f["properties"] = {{"run_id", i},
                       {"kind", std::string(to_string(run.kind))},
                       {"length_m", run.length_m},
                       {"nodes", run.nodes},
                       {"evidence", evidence}};
    // A walk whose consecutive nodes are all adjacent is a LineString;
    // otherwise each edge is emitted separately.
    bool chain = run.nodes.size() >= 2;
    for (std::size_t k = 1; chain && k < run.nodes.size(); ++k) {
      const NodeId a = run.nodes[k - 1];
      const NodeId b = run.nodes[k];
      chain = g.has_edge(a, b) || g.has_edge(b, a);
    }
    if (chain) {
      ojson coords = ojson::array();
      for (NodeId n : run.nodes) coords.push_back(coord(n));
      const NodeId first = run.nodes.front();
      const NodeId last = run.nodes.back();
      if (run.nodes.size() > 2 && (g.has_edge(last, first) || g.has_edge(first, last))) coords.push_back(coord(first));
      f["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
    } else if (!run.edges.empty()) {
      ojson lines = ojson::array();
      for (const auto& e : run.edges) lines.push_back(ojson::array({coord(e.from), coord(e.to)}));
      f["geometry"] = {{"type", "MultiLineString"}, {"coordinates", lines}};
    } else {
      f["geometry"] = {{"type", "Point"}, {"coordinates", coord(run.nodes.front())}};
    }
    out += i == 0 ? "\n" : ",\n";
    out += f.dump();
  }
  out += report.runs.empty() ? "]}\n" : "\n]}\n";
  return out;
}

std::string closure_report_csv(const ClosureReport& report) {
  std::string out = "node_id,kind,evidence,run_id\n";
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const auto& run = report.runs[i];
    for (NodeId n : run.nodes) {
      auto it = run.evidence.find(n);
      const double ev = it == run.evidence.end() ? 0.0 : it->second;
      out += std::to_string(n) + "," + std::string(to_string(run.kind)) + "," +
             (std::isfinite(ev) ? fmt6(ev) : std::string("inf")) + "," + std::to_string(i) + "\n";
    }
  }
  return out;
}

}  // namespace roadfuse
