#include "roadfuse/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "roadfuse/errors.hpp"
#include "roadfuse/random.hpp"

namespace roadfuse {

namespace {

// Independent streams per stage, so that e.g. more trips leave the layout alone.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PlanarPoint truncated_noise(Rng& rng, double sigma) {
  if (sigma <= 0.0) return {0.0, 0.0};
  for (;;) {
    const double dx = sigma * rng.normal();
    const double dy = sigma * rng.normal();
    if (std::hypot(dx, dy) <= 4.0 * sigma) return {dx, dy};
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) throw ParseError("bad number '" + text + "'", where);
  return value;
}

template <typename T>
std::string number(T v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Layout {
  RoadGraph grid;  // base map
  std::map<GridStreet, std::vector<NodeId>> chains;
  NodeId next_id = 0;
};

GridStreet normalized(GridStreet s) {
  if (std::pair(s.row1, s.col1) < std::pair(s.row0, s.col0)) {
    std::swap(s.row0, s.row1);
    std::swap(s.col0, s.col1);
  }
  return s;
}

void add_two_way(RoadGraph& g, NodeId a, NodeId b, Provenance p = Provenance::base) {
  g.add_edge(a, b, p);
  g.add_edge(b, a, p);
}

// Nodes strictly between a and b, spaced at most `node_spacing` apart.
std::vector<NodeId> subdivide(RoadGraph& g, NodeId& next_id, NodeId a, NodeId b, double node_spacing) {
  const auto pa = g.planar(a);
  const auto pb = g.planar(b);
  const double len = planar_distance(pa, pb);
  const std::size_t pieces =
      node_spacing > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / node_spacing - 1e-9))) : 1;
  std::vector<NodeId> chain{a};
  for (std::size_t k = 1; k < pieces; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(pieces);
    const NodeId id = next_id++;
    g.add_node(id, g.frame().unproject({pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y)}));
    chain.push_back(id);
  }
  chain.push_back(b);
  for (std::size_t k = 1; k < chain.size(); ++k) add_two_way(g, chain[k - 1], chain[k]);
  return chain;
}

Layout build_grid(const SynthSpec& spec, const LocalFrame& frame) {
  Rng rng(stream_seed(spec.seed, 0));
  Layout out;
  out.grid = RoadGraph(frame);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const double jx = spec.irregularity > 0.0 ? rng.uniform(-spec.irregularity, spec.irregularity) : 0.0;
      const double jy = spec.irregularity > 0.0 ? rng.uniform(-spec.irregularity, spec.irregularity) : 0.0;
      const PlanarPoint p{static_cast<double>(c) * spec.spacing + jx, static_cast<double>(r) * spec.spacing + jy};
      out.grid.add_node(static_cast<NodeId>(r * spec.cols + c), frame.unproject(p));
    }
  }
  out.next_id = static_cast<NodeId>(spec.rows * spec.cols);
  auto id = [&](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * spec.cols + c); };
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c + 1 < spec.cols; ++c)
      out.chains[{r, c, r, c + 1}] = subdivide(out.grid, out.next_id, id(r, c), id(r, c + 1), spec.node_spacing);
  for (std::size_t r = 0; r + 1 < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c)
      out.chains[{r, c, r + 1, c}] = subdivide(out.grid, out.next_id, id(r, c), id(r + 1, c), spec.node_spacing);
  return out;
}

bool is_intersection(const GridPoint& p, const SynthSpec& spec) {
  const double rc = std::round(p.col), rr = std::round(p.row);
  return std::abs(p.col - rc) < 1e-9 && std::abs(p.row - rr) < 1e-9 && rc >= 0 && rr >= 0 &&
         rc < static_cast<double>(spec.cols) && rr < static_cast<double>(spec.rows);
}

// Samples a route at constant speed; heading from the segment being driven.
Trajectory sample_route(const RoadGraph& g, const NodePath& route, const SynthSpec& spec, std::string vehicle,
                        std::int64_t start, Rng& noise) {
  const auto pts = route.planar(g);
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) cum.push_back(cum.back() + planar_distance(pts[i - 1], pts[i]));
  const double speed = spec.speed_kmph / 3.6;
  const double step = speed * static_cast<double>(spec.sample_interval);
  Trajectory t;
  t.vehicle_id = std::move(vehicle);
  std::size_t seg = 0;
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * step;
    if (s > cum.back() + 1e-9) break;
    while (seg + 2 < pts.size() && s >= cum[seg + 1]) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double f = seg_len > 0.0 ? std::clamp((s - cum[seg]) / seg_len, 0.0, 1.0) : 0.0;
    const PlanarPoint on{pts[seg].x + f * (pts[seg + 1].x - pts[seg].x), pts[seg].y + f * (pts[seg + 1].y - pts[seg].y)};
    const auto n = truncated_noise(noise, spec.gps_noise_sigma);
    GpsRecord r;
    r.vehicle_id = t.vehicle_id;
    r.timestamp = start + static_cast<std::int64_t>(k) * spec.sample_interval;
    r.position = g.frame().unproject({on.x + n.x, on.y + n.y});
    r.speed_kmph = spec.speed_kmph;
    r.heading_deg = bearing(pts[seg], pts[seg + 1]).value_or(0.0);
    t.records.push_back(std::move(r));
  }
  return t;
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& m) { throw InvalidArgument("SynthSpec: " + m); };
  if (rows < 2 || cols < 2) fail("grid must be at least 2x2");
  if (!(spacing > 0.0)) fail("spacing must be positive");
  if (node_spacing < 0.0) fail("node_spacing must be >= 0");
  if (irregularity < 0.0 || irregularity >= spacing / 4.0) fail("irregularity must be in [0, spacing/4)");
  if (sample_interval <= 0) fail("sample_interval must be positive");
  if (gps_noise_sigma < 0.0) fail("gps_noise_sigma must be >= 0");
  if (!(speed_kmph > 5.0)) fail("speed_kmph must exceed 5");
  if (demand_skew < 0.0) fail("demand_skew must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must be in (0, 1)");
  if (n_vehicles < 2) fail("need at least two vehicles");
  if (trips_per_vehicle < 1) fail("need at least one trip per vehicle");
  if (trip_gap <= 0) fail("trip_gap must be positive");
  if (std::abs(origin_lat) >= 80.0) fail("origin_lat out of range");

  std::set<GridStreet> closed;
  for (const auto& s : planted_closures) {
    const auto n = normalized(s);
    const bool adjacent = (n.row0 == n.row1 && n.col1 == n.col0 + 1) || (n.col0 == n.col1 && n.row1 == n.row0 + 1);
    if (!adjacent || n.row1 >= rows || n.col1 >= cols) fail("closure is not a grid street");
    if (!closed.insert(n).second) fail("duplicate closure");
  }
  for (const auto& road : planted_new_roads) {
    if (road.size() < 2) fail("new road needs at least two points");
    for (std::size_t i = 0; i < road.size(); ++i) {
      if (!std::isfinite(road[i].col) || !std::isfinite(road[i].row)) fail("new road point is not finite");
      if (i > 0 && road[i] == road[i - 1]) fail("new road repeats a point");
    }
    for (std::size_t i = 1; i < road.size(); ++i) {
      const auto& a = road[i - 1];
      const auto& b = road[i];
      if (!is_intersection(a, *this) || !is_intersection(b, *this)) continue;
      const GridStreet st = normalized({static_cast<std::size_t>(std::lround(a.row)), static_cast<std::size_t>(std::lround(a.col)),
                                        static_cast<std::size_t>(std::lround(b.row)), static_cast<std::size_t>(std::lround(b.col))});
      if (closed.contains(st)) fail("planted new road overlaps a planted closure");
      const bool adjacent =
          (st.row0 == st.row1 && st.col1 == st.col0 + 1) || (st.col0 == st.col1 && st.row1 == st.row0 + 1);
      if (adjacent) fail("planted new road duplicates an existing grid street");
    }
  }
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", where);
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    auto dbl = [&] { return parse_number<double>(value, where); };
    auto size = [&] { return parse_number<std::size_t>(value, where); };
    auto i64 = [&] { return parse_number<std::int64_t>(value, where); };
    if (key == "rows") spec.rows = size();
    else if (key == "cols") spec.cols = size();
    else if (key == "spacing") spec.spacing = dbl();
    else if (key == "node_spacing") spec.node_spacing = dbl();
    else if (key == "irregularity") spec.irregularity = dbl();
    else if (key == "origin_lat") spec.origin_lat = dbl();
    else if (key == "origin_lon") spec.origin_lon = dbl();
    else if (key == "seed") spec.seed = parse_number<std::uint64_t>(value, where);
    else if (key == "n_vehicles") spec.n_vehicles = size();
    else if (key == "trips_per_vehicle") spec.trips_per_vehicle = size();
    else if (key == "sample_interval") spec.sample_interval = i64();
    else if (key == "gps_noise_sigma") spec.gps_noise_sigma = dbl();
    else if (key == "map_jitter_sigma") spec.map_jitter_sigma = dbl();
    else if (key == "speed_kmph") spec.speed_kmph = dbl();
    else if (key == "demand_skew") spec.demand_skew = dbl();
    else if (key == "train_fraction") spec.train_fraction = dbl();
    else if (key == "start_time") spec.start_time = i64();
    else if (key == "trip_gap") spec.trip_gap = i64();
    else if (key == "new_road") {
      std::vector<GridPoint> road;
      for (const auto& pt : split(value, ';')) {
        const auto xy = split(pt, ',');
        if (xy.size() != 2) throw ParseError("new_road point must be col,row", where);
        road.push_back({parse_number<double>(xy[0], where), parse_number<double>(xy[1], where)});
      }
      spec.planted_new_roads.push_back(std::move(road));
    } else if (key == "closure") {
      const auto f = split(value, ',');
      if (f.size() != 4) throw ParseError("closure must be row0,col0,row1,col1", where);
      spec.planted_closures.push_back({parse_number<std::size_t>(f[0], where), parse_number<std::size_t>(f[1], where),
                                       parse_number<std::size_t>(f[2], where), parse_number<std::size_t>(f[3], where)});
    } else {
      throw ParseError("unknown key '" + key + "'", where);
    }
  }
  return spec;
}

std::string format_synth_spec(const SynthSpec& s) {
  std::string out;
  auto put = [&](const char* key, const std::string& v) { out += std::string(key) + " = " + v + "\n"; };
  put("rows", number(s.rows));
  put("cols", number(s.cols));
  put("spacing", number(s.spacing));
  put("node_spacing", number(s.node_spacing));
  put("irregularity", number(s.irregularity));
  put("origin_lat", number(s.origin_lat));
  put("origin_lon", number(s.origin_lon));
  put("seed", number(s.seed));
  put("n_vehicles", number(s.n_vehicles));
  put("trips_per_vehicle", number(s.trips_per_vehicle));
  put("sample_interval", number(s.sample_interval));
  put("gps_noise_sigma", number(s.gps_noise_sigma));
  put("map_jitter_sigma", number(s.map_jitter_sigma));
  put("speed_kmph", number(s.speed_kmph));
  put("demand_skew", number(s.demand_skew));
  put("train_fraction", number(s.train_fraction));
  put("start_time", number(s.start_time));
  put("trip_gap", number(s.trip_gap));
  for (const auto& road : s.planted_new_roads) {
    std::string v;
    for (std::size_t i = 0; i < road.size(); ++i) v += (i ? "; " : "") + number(road[i].col) + "," + number(road[i].row);
    put("new_road", v);
  }
  for (const auto& c : s.planted_closures)
    put("closure", number(c.row0) + "," + number(c.col0) + "," + number(c.row1) + "," + number(c.col1));
  return out;
}

SynthWorld generate(const SynthSpec& spec) {
  spec.validate();
  const LocalFrame frame(spec.origin_lat, spec.origin_lon);
  Layout layout = build_grid(spec, frame);

  SynthWorld world;
  world.rows = spec.rows;
  world.cols = spec.cols;
  world.base = layout.grid;
  RoadGraph& gt = world.ground_truth;
  gt = layout.grid;

  // Planted new roads: grid points reuse intersections, others get new nodes.
  std::map<std::pair<double, double>, NodeId> road_points;
  for (const auto& road : spec.planted_new_roads) {
    std::vector<NodeId> ids;
    for (const auto& p : road) {
      if (is_intersection(p, spec)) {
        ids.push_back(world.intersection(static_cast<std::size_t>(std::lround(p.row)),
                                         static_cast<std::size_t>(std::lround(p.col))));
        continue;
      }
      auto [it, fresh] = road_points.try_emplace({p.col, p.row}, layout.next_id);
      if (fresh) {
        gt.add_node(layout.next_id, frame.unproject({p.col * spec.spacing, p.row * spec.spacing}));
        world.new_road_nodes.insert(layout.next_id);
        ++layout.next_id;
      }
      ids.push_back(it->second);
    }
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (gt.has_edge(ids[i - 1], ids[i])) continue;
      const NodeId before = layout.next_id;
      subdivide(gt, layout.next_id, ids[i - 1], ids[i], spec.node_spacing);
      for (NodeId n = before; n < layout.next_id; ++n) world.new_road_nodes.insert(n);
    }
  }

  for (const auto& c : spec.planted_closures) {
    const auto& chain = layout.chains.at(normalized(c));
    for (std::size_t k = 1; k < chain.size(); ++k) {
      gt.remove_edge(chain[k - 1], chain[k]);
      gt.remove_edge(chain[k], chain[k - 1]);
    }
    for (std::size_t k = 1; k + 1 < chain.size(); ++k) gt.remove_node(chain[k]);
    world.closed_streets.push_back(chain);
  }
  if (weak_components(gt).size() != 1) throw GenerationError("ground truth map is not connected");

  // Zipf popularity over a seeded ranking of the ground-truth nodes.
  Rng demand(stream_seed(spec.seed, 1));
  Rng noise(stream_seed(spec.seed, 2));
  const auto nodes = gt.node_ids();
  std::vector<std::size_t> rank(nodes.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  demand.shuffle(rank);
  std::vector<double> cdf(nodes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total += 1.0 / std::pow(static_cast<double>(rank[i] + 1), spec.demand_skew);
    cdf[i] = total;
  }
  auto pick = [&] {
    const double u = demand.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return nodes[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), nodes.size() - 1)];
  };

  const CompactGraph routing(gt);
  const double min_route = spec.speed_kmph / 3.6 * static_cast<double>(spec.sample_interval);
  for (std::size_t v = 0; v < spec.n_vehicles; ++v) {
    char name[32];
    std::snprintf(name, sizeof name, "veh%04zu", v);
    std::int64_t clock = spec.start_time + static_cast<std::int64_t>(demand.below(3600));
    for (std::size_t trip = 0; trip < spec.trips_per_vehicle; ++trip) {
      std::optional<NodePath> route;
      for (int attempt = 0; attempt < 1000 && !route; ++attempt) {
        const NodeId s = pick();
        const NodeId t = pick();
        if (s == t) continue;
        route = shortest_path(routing, s, t);
        if (route && route->length < min_route) route.reset();
      }
      if (!route) throw GenerationError("could not draw a route of at least one sample interval");
      auto traj = sample_route(gt, *route, spec, name, clock, noise);
      clock = traj.records.back().timestamp + spec.trip_gap;
      world.trajectories.push_back(std::move(traj));
      world.routes.push_back(std::move(*route));
    }
  }

  std::tie(world.train, world.test) = split_by_driver(world.trajectories, {spec.train_fraction, spec.seed});
  std::set<std::string> train_ids;
  for (const auto& t : world.train) train_ids.insert(t.vehicle_id);

  // Inferred map: what the training fleet drove, with node positions jittered.
  std::set<Edge> driven;
  for (std::size_t i = 0; i < world.routes.size(); ++i) {
    if (!train_ids.contains(world.trajectories[i].vehicle_id)) continue;
    const auto& n = world.routes[i].nodes;
    for (std::size_t k = 1; k < n.size(); ++k) driven.insert({n[k - 1], n[k]});
  }
  std::set<NodeId> driven_nodes;
  for (const auto& e : driven) {
    driven_nodes.insert(e.from);
    driven_nodes.insert(e.to);
  }
  Rng jitter(stream_seed(spec.seed, 3));
  world.inferred = RoadGraph(frame);
  for (NodeId n : driven_nodes) {
    const auto p = gt.planar(n);
    const auto d = truncated_noise(jitter, spec.jitter_sigma());
    world.inferred.add_node(n, frame.unproject({p.x + d.x, p.y + d.y}), Provenance::inferred);
  }
  for (const auto& e : driven) world.inferred.add_edge(e.from, e.to, Provenance::inferred);
  return world;
}

}  // namespace roadfuse
