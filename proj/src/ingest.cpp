#include "roadfuse/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "roadfuse/errors.hpp"
#include "roadfuse/random.hpp"

namespace roadfuse {

namespace {

using json = nlohmann::json;

constexpr std::string_view kTrajectoryHeader = "vehicle_id,timestamp,lat,lon,speed_kmph,heading_deg";

struct QuantKey {
  std::int64_t lat;
  std::int64_t lon;
  friend auto operator<=>(const QuantKey&, const QuantKey&) = default;
};

QuantKey quantize(const GeoPoint& p) {
  return {std::llround(p.lat / kCoordinateQuantum), std::llround(p.lon / kCoordinateQuantum)};
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Shared by both map readers: nodes are created on first use, a node is
// `base` if any incident feature is, otherwise `inferred`.
class MapBuilder {
 public:
  NodeId node_at(const GeoPoint& p) {
    const auto key = quantize(p);
    auto [it, inserted] = by_coord_.try_emplace(key, next_id_);
    if (inserted) {
      graph_.add_node(next_id_, p, Provenance::inferred);
      ++next_id_;
    }
    return it->second;
  }

  void ensure_node(NodeId id, const GeoPoint& p) {
    if (!graph_.has_node(id)) graph_.add_node(id, p, Provenance::inferred);
  }

  void add_edge(NodeId u, NodeId v, Provenance prov) {
    if (u == v) return;
    if (graph_.add_edge(u, v, prov) && prov == Provenance::base) {
      graph_.set_node_provenance(u, Provenance::base);
      graph_.set_node_provenance(v, Provenance::base);
    }
  }

  RoadGraph finish() {
    graph_.fit_frame();
    return std::move(graph_);
  }

 private:
  RoadGraph graph_;
  std::map<QuantKey, NodeId> by_coord_;
  NodeId next_id_ = 0;
};

bool parse_bool_property(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "yes" || s == "true" || s == "1") return true;
    if (s == "no" || s == "false" || s == "0") return false;
  }
  if (v.is_null()) return false;
  throw ParseError("property 'oneway' must be a boolean", where);
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* b = field.data();
  const char* e = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

Polyline Trajectory::polyline() const {
  Polyline out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.position);
  return out;
}

double Trajectory::length(const LocalFrame& frame) const {
  return polyline_length(polyline(), frame);
}

// ---------------------------------------------------------------------------
// GeoJSON

RoadGraph read_map_geojson(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON", line_col(bytes, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
    throw ParseError("top level must be a FeatureCollection", "document");
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array())
    throw ParseError("FeatureCollection without a 'features' array", "document");

  MapBuilder builder;
  for (std::size_t i = 0; i < features->size(); ++i) {
    const auto where = "feature " + std::to_string(i);
    const auto& f = (*features)[i];
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object())
      throw ParseError("feature without geometry", where);
    const auto& geom = f["geometry"];
    if (geom.value("type", "") != "LineString")
      throw ParseError("unsupported geometry type '" + geom.value("type", std::string("?")) +
                           "' (only LineString is accepted)",
                       where);
    const auto coords = geom.find("coordinates");
    if (coords == geom.end() || !coords->is_array() || coords->size() < 2)
      throw ParseError("LineString needs at least two coordinates", where);

    bool oneway = false;
    Provenance prov = Provenance::base;
    if (auto props = f.find("properties"); props != f.end() && props->is_object()) {
      if (auto ow = props->find("oneway"); ow != props->end()) oneway = parse_bool_property(*ow, where);
      if (auto pv = props->find("provenance"); pv != props->end()) {
        const auto parsed = pv->is_string() ? provenance_from_string(pv->get<std::string>()) : std::nullopt;
        if (!parsed) throw ParseError("unknown provenance value", where);
        prov = *parsed;
      }
    }

    std::vector<NodeId> chain;
    for (std::size_t k = 0; k < coords->size(); ++k) {
      const auto& c = (*coords)[k];
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
        throw ParseError("coordinate " + std::to_string(k) + " is not a [lon, lat] pair", where);
      const GeoPoint p{c[1].get<double>(), c[0].get<double>()};
      if (!p.valid()) throw ParseError("coordinate " + std::to_string(k) + " out of range", where);
      chain.push_back(builder.node_at(p));
    }
    for (std::size_t k = 1; k < chain.size(); ++k) {
      builder.add_edge(chain[k - 1], chain[k], prov);
      if (!oneway) builder.add_edge(chain[k], chain[k - 1], prov);
    }
  }
  return builder.finish();
}

std::string write_map_geojson(const RoadGraph& g) {
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  g.for_each_edge([&](NodeId u, NodeId v, Provenance prov) {
    const auto& a = g.position(u);
    const auto& b = g.position(v);
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["properties"] = {{"oneway", true}, {"provenance", std::string(to_string(prov))},
                       {"from", u}, {"to", v}};
    f["geometry"] = {{"type", "LineString"},
                     {"coordinates", {{a.lon, a.lat}, {b.lon, b.lat}}}};
    out += first ? "\n" : ",\n";
    out += f.dump();
    first = false;
  });
  out += first ? "]}\n" : "\n]}\n";
  return out;
}

// ---------------------------------------------------------------------------
// OSM XML

RoadGraph read_map_osm_xml(std::string_view bytes) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(bytes)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.message(), "line " + std::to_string(e.line()));
  }
  const auto osm = tree.get_child_optional("osm");
  if (!osm) throw ParseError("missing <osm> root element", "document");

  std::unordered_map<NodeId, GeoPoint> coords;
  for (const auto& [tag, child] : *osm) {
    if (tag != "node") continue;
    try {
      const auto id = child.get<NodeId>("<xmlattr>.id");
      const GeoPoint p{child.get<double>("<xmlattr>.lat"), child.get<double>("<xmlattr>.lon")};
      if (!p.valid()) throw ParseError("coordinates out of range", "node " + std::to_string(id));
      coords[id] = p;
    } catch (const pt::ptree_error& e) {
      throw ParseError(std::string("bad <node>: ") + e.what(), "node");
    }
  }

  MapBuilder builder;
  for (const auto& [tag, child] : *osm) {
    if (tag != "way") continue;
    const auto way_id = child.get<std::string>("<xmlattr>.id", "?");
    const auto where = "way " + way_id;
    std::vector<NodeId> refs;
    bool highway = false;
    std::string oneway;
    for (const auto& [sub, elem] : child) {
      if (sub == "nd") {
        const auto ref = elem.get_optional<NodeId>("<xmlattr>.ref");
        if (!ref) throw ParseError("<nd> without a numeric ref", where);
        refs.push_back(*ref);
      } else if (sub == "tag") {
        const auto k = elem.get<std::string>("<xmlattr>.k", "");
        if (k == "highway") highway = true;
        if (k == "oneway") oneway = elem.get<std::string>("<xmlattr>.v", "");
      }
    }
    if (!highway) continue;
    for (NodeId ref : refs) {
      auto it = coords.find(ref);
      if (it == coords.end())
        throw ParseError("dangling node reference " + std::to_string(ref), where);
      builder.ensure_node(ref, it->second);
    }
    const bool forward_only = oneway == "yes" || oneway == "true" || oneway == "1";
    const bool reverse_only = oneway == "-1";
    for (std::size_t k = 1; k < refs.size(); ++k) {
      if (!reverse_only) builder.add_edge(refs[k - 1], refs[k], Provenance::base);
      if (!forward_only) builder.add_edge(refs[k], refs[k - 1], Provenance::base);
    }
  }
  return builder.finish();
}

RoadGraph read_map_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  const auto ext = path.extension().string();
  if (ext == ".osm" || ext == ".xml") return read_map_osm_xml(text);
  return read_map_geojson(text);
}

// ---------------------------------------------------------------------------
// Trajectory CSV

std::vector<Trajectory> read_trajectories(std::string_view csv, const TrajectoryReadOptions& options,
                                          TrajectoryReadStats* stats) {
  TrajectoryReadStats local;
  std::map<std::string, std::vector<GpsRecord>> by_vehicle;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.remove_prefix(3);
      if (line != kTrajectoryHeader)
        throw ParseError("expected header '" + std::string(kTrajectoryHeader) + "'", "line 1");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    const auto fields = split_csv(line);
    if (fields.size() != 6)
      throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), where);
    GpsRecord r;
    r.vehicle_id = std::string(fields[0]);
    if (r.vehicle_id.empty()) throw ParseError("empty vehicle_id", where);
    if (!parse_number(fields[1], r.timestamp)) throw ParseError("bad timestamp", where);
    if (!parse_number(fields[2], r.position.lat) || !parse_number(fields[3], r.position.lon))
      throw ParseError("bad coordinate", where);
    if (!r.position.valid()) throw ParseError("coordinate out of range", where);
    if (!parse_number(fields[4], r.speed_kmph) || !(r.speed_kmph >= 0.0))
      throw ParseError("bad speed", where);
    if (!parse_number(fields[5], r.heading_deg) || !(r.heading_deg >= 0.0 && r.heading_deg <= 360.0))
      throw ParseError("bad heading", where);
    ++local.rows;
    if (r.speed_kmph <= options.speed_floor_kmph) {
      ++local.dropped_slow;
      continue;
    }
    by_vehicle[r.vehicle_id].push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("missing header", "line 1");

  std::vector<Trajectory> out;
  for (auto& [vehicle, records] : by_vehicle) {
    std::stable_sort(records.begin(), records.end(),
                     [](const GpsRecord& a, const GpsRecord& b) { return a.timestamp < b.timestamp; });
    Trajectory current{vehicle, {}};
    for (auto& r : records) {
      if (!current.records.empty()) {
        const auto gap = r.timestamp - current.records.back().timestamp;
        if (gap == 0) {
          ++local.dropped_duplicate;
          continue;
        }
        if (gap > options.gap_threshold_s) {
          out.push_back(std::move(current));
          current = Trajectory{vehicle, {}};
        }
      }
      current.records.push_back(std::move(r));
    }
    if (!current.records.empty()) out.push_back(std::move(current));
  }
  if (stats) *stats = local;
  return out;
}

std::string write_trajectories_csv(const std::vector<Trajectory>& trajectories) {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& t : trajectories) {
    for (const auto& r : t.records) {
      out += r.vehicle_id;
      out += ',';
      out += std::to_string(r.timestamp);
      out += ',';
      out += fmt_fixed(r.position.lat, 7);
      out += ',';
      out += fmt_fixed(r.position.lon, 7);
      out += ',';
      out += fmt_fixed(r.speed_kmph, 2);
      out += ',';
      out += fmt_fixed(r.heading_deg, 2);
      out += '\n';
    }
  }
  return out;
}

std::pair<std::vector<Trajectory>, std::vector<Trajectory>> split_by_driver(
    const std::vector<Trajectory>& trajectories, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw InvalidArgument("split_by_driver: train_fraction must lie in (0, 1)");
  if (trajectories.empty()) throw InvalidArgument("split_by_driver: no trajectories");
  std::set<std::string> unique;
  for (const auto& t : trajectories) unique.insert(t.vehicle_id);
  if (unique.size() < 2)
    throw InvalidArgument("split_by_driver: need at least two drivers to split");
  std::vector<std::string> drivers(unique.begin(), unique.end());
  Rng rng(spec.rng_seed);
  rng.shuffle(drivers);
  const auto d = drivers.size();
  auto n_train = static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(d)));
  n_train = std::clamp<std::size_t>(n_train, 1, d - 1);
  const std::set<std::string> train_drivers(drivers.begin(), drivers.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::pair<std::vector<Trajectory>, std::vector<Trajectory>> out;
  for (const auto& t : trajectories) {
    (train_drivers.contains(t.vehicle_id) ? out.first : out.second).push_back(t);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace roadfuse
