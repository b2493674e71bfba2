#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roadfuse/closure.hpp"
#include "roadfuse/errors.hpp"
#include "roadfuse/eval.hpp"
#include "roadfuse/fusion.hpp"
#include "roadfuse/geometry.hpp"
#include "roadfuse/graph.hpp"
#include "roadfuse/ingest.hpp"
#include "roadfuse/manifest.hpp"
#include "roadfuse/synth.hpp"

namespace py = pybind11;
using namespace roadfuse;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Road-map fusion and closure detection";
  m.attr("__version__") = std::string(version());

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_RuntimeError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<NotFound>(m, "NotFound", PyExc_LookupError);

  py::class_<GeoPoint>(m, "GeoPoint")
      .def(py::init<double, double>(), py::arg("lat"), py::arg("lon"))
      .def_readwrite("lat", &GeoPoint::lat)
      .def_readwrite("lon", &GeoPoint::lon)
      .def("__repr__", [](const GeoPoint& p) {
        return "GeoPoint(" + std::to_string(p.lat) + ", " + std::to_string(p.lon) + ")";
      });

  m.def(
      "path_distance",
      [](const Polyline& a, const Polyline& b) { return path_distance(a, b, LocalFrame::fit(a)); },
      py::arg("p0"), py::arg("p1"), "Path distance in meters between two polylines");

  py::enum_<Provenance>(m, "Provenance")
      .value("base", Provenance::base)
      .value("inferred", Provenance::inferred)
      .value("merged", Provenance::merged);

  py::class_<RoadGraph>(m, "RoadGraph")
      .def(py::init<>())
      .def("add_node", &RoadGraph::add_node, py::arg("id"), py::arg("pos"), py::arg("prov") = Provenance::base)
      .def("add_edge", &RoadGraph::add_edge, py::arg("src"), py::arg("dst"), py::arg("prov") = Provenance::base)
      .def("fit_frame", &RoadGraph::fit_frame)
      .def("has_node", &RoadGraph::has_node)
      .def("has_edge", &RoadGraph::has_edge)
      .def("position", &RoadGraph::position)
      .def("node_ids", &RoadGraph::node_ids)
      .def("edges", [](const RoadGraph& g) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const auto& e : g.edges()) out.emplace_back(e.from, e.to);
        return out;
      })
      .def("node_provenance", &RoadGraph::node_provenance)
      .def("edge_provenance", &RoadGraph::edge_provenance)
      .def("edge_length", &RoadGraph::edge_length)
      .def("total_edge_length", &RoadGraph::total_edge_length)
      .def("total_road_length", &RoadGraph::total_road_length)
      .def_property_readonly("node_count", &RoadGraph::node_count)
      .def_property_readonly("edge_count", &RoadGraph::edge_count);

  m.def("read_map_geojson", &read_map_geojson, py::arg("text"));
  m.def("read_map_osm_xml", &read_map_osm_xml, py::arg("text"));
  m.def("read_map_file", [](const std::string& p) { return read_map_file(p); }, py::arg("path"));
  m.def("write_map_geojson", &write_map_geojson, py::arg("graph"));

  m.def(
      "betweenness",
      [](const RoadGraph& g, bool undirected) { return betweenness(g, {.undirected = undirected}).values(); },
      py::arg("graph"), py::arg("undirected") = false, "Normalized length-weighted node betweenness");
  m.def(
      "shortest_path",
      [](const RoadGraph& g, NodeId s, NodeId t) -> std::optional<std::pair<std::vector<NodeId>, double>> {
        auto p = shortest_path(g, s, t);
        if (!p) return std::nullopt;
        return std::pair(p->nodes, p->length);
      },
      py::arg("graph"), py::arg("source"), py::arg("target"));

  py::class_<GpsRecord>(m, "GpsRecord")
      .def_readonly("vehicle_id", &GpsRecord::vehicle_id)
      .def_readonly("timestamp", &GpsRecord::timestamp)
      .def_readonly("position", &GpsRecord::position)
      .def_readonly("speed_kmph", &GpsRecord::speed_kmph)
      .def_readonly("heading_deg", &GpsRecord::heading_deg);
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("vehicle_id", &Trajectory::vehicle_id)
      .def_readonly("records", &Trajectory::records)
      .def("__len__", [](const Trajectory& t) { return t.records.size(); });
  m.def(
      "read_trajectories", [](const std::string& csv) { return read_trajectories(csv); }, py::arg("csv"));
  m.def("write_trajectories_csv", &write_trajectories_csv, py::arg("trajectories"));
  m.def(
      "split_by_driver",
      [](const std::vector<Trajectory>& t, double fraction, std::uint64_t seed) {
        return split_by_driver(t, {fraction, seed});
      },
      py::arg("trajectories"), py::arg("train_fraction") = 0.75, py::arg("seed") = 0);

  py::enum_<BfsDomain>(m, "BfsDomain")
      .value("inferred_map", BfsDomain::inferred_map)
      .value("outlier_subgraph", BfsDomain::outlier_subgraph);
  py::class_<FusionResult>(m, "FusionResult")
      .def_readonly("fused", &FusionResult::fused)
      .def_readonly("added_nodes", &FusionResult::added_nodes)
      .def_readonly("merges", &FusionResult::merges)
      .def_readonly("id_map", &FusionResult::id_map)
      .def_readonly("outliers", &FusionResult::outliers)
      .def_property_readonly("added_edges", [](const FusionResult& r) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const auto& e : r.added_edges) out.emplace_back(e.from, e.to);
        return out;
      });
  m.def(
      "fuse",
      [](const RoadGraph& base, const RoadGraph& inferred, double theta, double radius, BfsDomain domain) {
        return fuse(base, inferred, {theta, radius, domain});
      },
      py::arg("base"), py::arg("inferred"), py::arg("theta") = 20.0, py::arg("radius") = 2.0,
      py::arg("bfs_domain") = BfsDomain::inferred_map);
  m.def(
      "find_outliers", &find_outliers, py::arg("base"), py::arg("inferred"), py::arg("theta") = 20.0);

  m.def(
      "verify_connectivity_property",
      [](const RoadGraph& g1, const RoadGraph& g2, const RoadGraph& gf, double theta, bool strict,
         std::size_t max_nodes) {
        VerifyOptions o;
        o.search = strict ? WitnessSearch::shortest_paths : WitnessSearch::any_path;
        o.max_nodes = max_nodes;
        const auto r = verify_connectivity_property(g1, g2, gf, theta, o);
        py::dict d;
        d["paths_checked"] = r.paths_checked;
        d["matched_by_shortest_path"] = r.matched_by_shortest_path;
        d["matched_by_corridor"] = r.matched_by_corridor;
        py::list v;
        for (const auto& x : r.violations) v.append(py::make_tuple(x.source, x.path.nodes, x.best_distance));
        d["violations"] = v;
        return d;
      },
      py::arg("g1"), py::arg("g2"), py::arg("gf"), py::arg("theta") = 20.0, py::arg("strict") = false,
      py::arg("max_nodes") = 300);

  m.def(
      "delta", [](const Trajectory& t, const RoadGraph& g) { return delta(t, g); }, py::arg("trajectory"),
      py::arg("graph"), "Max distance in meters from the trajectory's points to the map");
  m.def(
      "summarize",
      [](const std::vector<Trajectory>& trajs, const std::map<std::string, const RoadGraph*>& maps) {
        std::vector<NamedMap> named;
        for (const auto& [k, g] : maps) named.push_back({k, g});
        py::dict out;
        for (const auto& s : summarize(trajs, named))
          out[py::str(s.map)] = py::dict(py::arg("mean") = s.mean, py::arg("median") = s.median,
                                         py::arg("p99") = s.p99, py::arg("count") = s.count);
        return out;
      },
      py::arg("trajectories"), py::arg("maps"));
  m.def(
      "coverage_curve",
      [](const RoadGraph& g, const std::vector<Trajectory>& t, double radius) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : coverage_curve(g, t, {radius, 45.0})) out.emplace_back(p.relative_length, p.covered_fraction);
        return out;
      },
      py::arg("graph"), py::arg("trajectories"), py::arg("match_radius") = 20.0);

  m.def(
      "coldstart_closures",
      [](const RoadGraph& g, const std::vector<Trajectory>& t, double gamma, double min_length, double radius) {
        ClosureParams p;
        p.gamma = gamma;
        p.min_run_length = min_length;
        const auto report = coldstart_closures(g, betweenness(g), match_arrivals(g, t, {radius, 45.0}), p);
        std::vector<std::pair<std::vector<NodeId>, double>> out;
        for (const auto& r : report.runs) out.emplace_back(r.nodes, r.length_m);
        return out;
      },
      py::arg("graph"), py::arg("trajectories"), py::arg("gamma") = 0.01, py::arg("min_length") = 100.0,
      py::arg("match_radius") = 20.0, "Cold-start closure runs as (nodes, length_m)");

  py::class_<SynthWorld>(m, "SynthWorld")
      .def_readonly("base", &SynthWorld::base)
      .def_readonly("ground_truth", &SynthWorld::ground_truth)
      .def_readonly("inferred", &SynthWorld::inferred)
      .def_readonly("trajectories", &SynthWorld::trajectories)
      .def_readonly("train", &SynthWorld::train)
      .def_readonly("test", &SynthWorld::test)
      .def_readonly("new_road_nodes", &SynthWorld::new_road_nodes)
      .def_readonly("closed_streets", &SynthWorld::closed_streets);
  m.def(
      "synth_generate", [](const std::string& spec_text) { return generate(parse_synth_spec(spec_text)); },
      py::arg("spec_text") = "", "Generate a synthetic world from key = value spec text");
}
