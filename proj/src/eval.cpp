#include "roadfuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_set>

#include "roadfuse/errors.hpp"

namespace roadfuse {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// (value, cumulative fraction) at the last occurrence of each distinct value.
template <typename T>
std::vector<std::pair<T, double>> empirical_cdf(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<T, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

}  // namespace

double delta(const Trajectory& traj, const GridIndex& index) {
  if (traj.records.empty()) throw InvalidArgument("delta: empty trajectory");
  if (index.empty()) throw InvalidArgument("delta: empty map");
  double worst = 0.0;
  for (const auto& r : traj.records) worst = std::max(worst, index.distance_to_map(r.position));
  return worst;
}

double delta(const Trajectory& traj, const RoadGraph& g) {
  if (g.empty()) throw InvalidArgument("delta: empty map");
  return delta(traj, GridIndex(g));
}

std::vector<double> deltas(const std::vector<Trajectory>& trajs, const RoadGraph& g) {
  if (g.empty()) throw InvalidArgument("delta: empty map");
  const GridIndex index(g);
  std::vector<double> out;
  out.reserve(trajs.size());
  for (const auto& t : trajs) out.push_back(delta(t, index));
  return out;
}

double nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("nearest_rank: no values");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("nearest_rank: p must be in (0, 1]");
  std::sort(values.begin(), values.end());
  // Rank ceil(p*N), guarding against p*N landing a hair above an integer.
  const double scaled = p * static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

MatchSummary summarize_values(std::string name, const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("summarize: empty trajectory set");
  MatchSummary s;
  s.map = std::move(name);
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = nearest_rank(values, 0.5);
  s.p99 = nearest_rank(values, 0.99);
  return s;
}

std::vector<MatchSummary> summarize(const std::vector<Trajectory>& trajs, const std::vector<NamedMap>& maps) {
  if (trajs.empty()) throw InvalidArgument("summarize: empty trajectory set");
  std::vector<MatchSummary> rows;
  for (const auto& m : maps) {
    if (m.map == nullptr) throw InvalidArgument("summarize: null map '" + m.name + "'");
    rows.push_back(summarize_values(m.name, deltas(trajs, *m.map)));
  }
  return rows;
}

std::string summary_csv(const std::vector<MatchSummary>& rows) {
  std::string out = "map,count,mean,median,p99\n";
  for (const auto& r : rows)
    out += r.map + "," + std::to_string(r.count) + "," + fmt6(r.mean) + "," + fmt6(r.median) + "," + fmt6(r.p99) +
           "\n";
  return out;
}

std::vector<CoveragePoint> coverage_curve(const RoadGraph& g, const std::vector<Trajectory>& trajs,
                                          const MatchParams& params) {
  params.validate();
  if (g.empty()) throw InvalidArgument("coverage_curve: empty map");
  const double road_length = g.total_road_length();
  if (!(road_length > 0.0)) throw InvalidArgument("coverage_curve: map has zero road length");
  const GridIndex index(g);
  std::unordered_set<NodeId> covered;
  std::vector<CoveragePoint> curve{{0.0, 0.0}};
  curve.reserve(trajs.size() + 1);
  double travelled = 0.0;
  const double n = static_cast<double>(g.node_count());
  for (const auto& t : trajs) {
    for (const auto& r : t.records) {
      const auto hit = index.nearest_node(r.position);
      if (hit.distance <= params.match_radius) covered.insert(hit.node);
    }
    travelled += t.length(g.frame());
    curve.push_back({travelled / road_length, static_cast<double>(covered.size()) / n});
  }
  return curve;
}

std::string coverage_csv(const std::vector<CoveragePoint>& curve) {
  std::string out = "relative_length,covered_fraction\n";
  for (const auto& p : curve) out += fmt6(p.relative_length) + "," + fmt6(p.covered_fraction) + "\n";
  return out;
}

std::optional<double> interarrival_ratio(const NodeArrivalStats& s) {
  const auto mean = s.mean_interarrival();
  if (!mean || !(*mean > 0.0)) return std::nullopt;
  return s.max_interarrival / *mean;
}

DistributionTables export_distributions(const CentralityTable& bc, const NodeArrivals& arrivals) {
  std::set<NodeId> nodes;
  for (const auto& [id, v] : bc.values()) nodes.insert(id);
  for (const auto& [id, s] : arrivals.stats()) nodes.insert(id);

  DistributionTables out;
  out.nodes = "node_id,bc,arrival_count\n";
  std::vector<double> traffic_bc, silent_bc;
  std::vector<std::size_t> counts;
  for (NodeId id : nodes) {
    const double b = bc.contains(id) ? bc.at(id) : 0.0;
    const auto s = arrivals.at(id);
    out.nodes += std::to_string(id) + "," + fmt6(b) + "," + std::to_string(s.arrival_count) + "\n";
    (s.arrival_count > 0 ? traffic_bc : silent_bc).push_back(b);
    counts.push_back(s.arrival_count);
  }

  out.bc_cdf = "class,bc,cumulative_fraction\n";
  for (const auto& [v, f] : empirical_cdf(traffic_bc)) out.bc_cdf += "traffic," + fmt6(v) + "," + fmt6(f) + "\n";
  for (const auto& [v, f] : empirical_cdf(silent_bc)) out.bc_cdf += "no_traffic," + fmt6(v) + "," + fmt6(f) + "\n";

  out.arrivals_cdf = "arrival_count,cumulative_fraction\n";
  for (const auto& [v, f] : empirical_cdf(counts)) out.arrivals_cdf += std::to_string(v) + "," + fmt6(f) + "\n";

  out.ratio_histogram = "bin_low,bin_high,count\n";
  if (arrivals.stats().empty()) return out;
  std::int64_t start = std::numeric_limits<std::int64_t>::max();
  std::int64_t end = std::numeric_limits<std::int64_t>::min();
  for (const auto& [id, s] : arrivals.stats()) {
    start = std::min(start, s.first_arrival);
    end = std::max(end, s.last_arrival);
  }
  const double days = std::max(1.0, static_cast<double>(end - start) / 86400.0);
  std::map<std::size_t, std::size_t> bins;
  for (const auto& [id, s] : arrivals.stats()) {
    if (static_cast<double>(s.arrival_count) / days < 2.0) continue;
    if (const auto r = interarrival_ratio(s)) ++bins[static_cast<std::size_t>(std::floor(*r))];
  }
  if (bins.empty()) return out;
  for (std::size_t b = 1; b <= bins.rbegin()->first; ++b) {
    const auto it = bins.find(b);
    out.ratio_histogram += std::to_string(b) + "," + std::to_string(b + 1) + "," +
                           std::to_string(it == bins.end() ? 0 : it->second) + "\n";
  }
  return out;
}

}  // namespace roadfuse
