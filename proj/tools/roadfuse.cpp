// roadfuse: command-line front end.
//
// Exit codes: 0 ok, 1 check failed (verify found violations) or internal
// error, 2 parse error, 3 validation error, 4 size guard.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadfuse/closure.hpp"
#include "roadfuse/errors.hpp"
#include "roadfuse/eval.hpp"
#include "roadfuse/fusion.hpp"
#include "roadfuse/ingest.hpp"
#include "roadfuse/manifest.hpp"
#include "roadfuse/synth.hpp"

namespace fs = std::filesystem;
using namespace roadfuse;

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kParse = 2, kValidation = 3, kSizeGuard = 4 };

// Collects outputs and writes them, plus the manifest, into the out dir.
class Outputs {
 public:
  Outputs(fs::path dir, RunManifest manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

  void input(const std::string& path) { manifest_.inputs.emplace_back(path, file_digest(path)); }
  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void write() {
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      write_text_file(dir_ / name, content);
      manifest_.outputs.emplace_back(name, sha256_hex(content));
    }
    write_text_file(dir_ / "manifest.txt", manifest_.to_text());
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  return read_trajectories(read_text_file(path));
}

RunManifest manifest_for(const CLI::App& sub, const std::vector<std::string>& argv, std::uint64_t seed = 0) {
  RunManifest m;
  m.command = sub.get_name();
  if (const auto* parent = sub.get_parent(); parent && parent->get_parent()) m.command = parent->get_name() + " " + m.command;
  m.tool_version = std::string(version());
  m.seed = seed;
  for (const auto* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0 && opt->get_default_str().empty()) continue;
    std::string value;
    const auto results = opt->count() ? opt->results() : std::vector<std::string>{opt->get_default_str()};
    for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    m.parameters.emplace_back(name, value);
  }
  m.argv = argv;
  return m;
}

int run(const std::vector<std::string>& argv);

struct Cli {
  CLI::App app{"Fuse inferred road maps into base maps and detect road closures from GPS trajectories", "roadfuse"};
  std::vector<std::string> argv;
  std::function<int()> action;

  // fuse
  std::string base, inferred;
  double theta = 20.0, radius = 2.0;
  std::string bfs_domain = "inferred";
  // closures
  std::string map, traj;
  double gamma = 0.01, alpha = 40.0, min_length = 100.0, match_radius = 20.0, heading_tolerance = 45.0;
  std::size_t min_arrivals = 10;
  std::int64_t at = 0;
  bool undirected_bc = false;
  // eval
  std::vector<std::string> maps;
  std::uint64_t split_seed = 0;
  double train_frac = 0.75;
  // synth
  std::string spec_path;
  std::uint64_t seed = 0;
  // verify
  std::string g1, g2, gf;
  bool strict = false;
  std::size_t max_nodes = 300;
  // replay
  std::string manifest_path;

  std::string out_dir = ".";

  explicit Cli(std::vector<std::string> args) : argv(std::move(args)) {
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with option values");
    app.set_version_flag("--version", std::string(version()));
    add_fuse();
    add_closures();
    add_eval();
    add_distributions();
    add_synth();
    add_coverage();
    add_verify();
    add_replay();
  }

  void add_out(CLI::App* sub) { sub->add_option("-o,--out-dir", out_dir, "Directory for the output files")->capture_default_str(); }

  void add_fuse() {
    auto* sub = app.add_subcommand("fuse", "Fuse an inferred map into a base map (writes fused.geojson)");
    sub->add_option("--base", base, "Base map (GeoJSON or OSM XML)")->required();
    sub->add_option("--inferred", inferred, "Inferred map (GeoJSON or OSM XML)")->required();
    sub->add_option("--theta", theta, "Outlier threshold, meters")->capture_default_str();
    sub->add_option("--radius", radius, "Collision radius, meters")->capture_default_str();
    sub->add_option("--bfs-domain", bfs_domain, "BFS graph: inferred (whole map) or outliers (outlier subgraph)")
        ->check(CLI::IsMember({"inferred", "outliers"}))
        ->capture_default_str();
    add_out(sub);
    sub->callback([this, sub] { action = [this, sub] { return cmd_fuse(*sub); }; });
  }

  void add_closure_common(CLI::App* sub) {
    sub->add_option("--map", map, "Road map (GeoJSON or OSM XML)")->required();
    sub->add_option("--traj", traj, "Trajectory CSV")->required();
    sub->add_option("--match-radius", match_radius, "Node matching radius, meters")->capture_default_str();
    add_out(sub);
  }

  void add_closures() {
    auto* top = app.add_subcommand("closures", "Road-closure detection (writes closures.geojson, closures.csv)");
    top->require_subcommand(1);

    auto* cold = top->add_subcommand("cold-start", "Untraversed roads with high betweenness");
    add_closure_common(cold);
    cold->add_option("--gamma", gamma, "Betweenness threshold")->capture_default_str();
    cold->add_option("--min-length", min_length, "Minimum run length, meters")->capture_default_str();
    cold->add_flag("--undirected-bc", undirected_bc, "Compute betweenness treating every edge as two-way");
    cold->callback([this, cold] { action = [this, cold] { return cmd_coldstart(*cold); }; });

    auto* monitor = top->add_subcommand("monitor", "Nodes whose silence exceeds alpha times their mean gap");
    add_closure_common(monitor);
    monitor->add_option("--at", at, "Evaluation time, epoch seconds")->required();
    monitor->add_option("--alpha", alpha, "Gap multiplier")->capture_default_str();
    monitor->add_option("--min-arrivals", min_arrivals, "Arrivals needed before a node is judged")->capture_default_str();
    monitor->callback([this, monitor] { action = [this, monitor] { return cmd_monitor(*monitor); }; });

    auto* oneway = top->add_subcommand("oneway", "Two-way streets driven in one direction only");
    add_closure_common(oneway);
    oneway->add_option("--gamma", gamma, "Betweenness threshold")->capture_default_str();
    oneway->add_option("--min-length", min_length, "Minimum run length, meters")->capture_default_str();
    oneway->add_option("--min-arrivals", min_arrivals, "Arrivals needed in the driven direction")->capture_default_str();
    oneway->add_option("--heading-tolerance", heading_tolerance, "Heading tolerance, degrees")->capture_default_str();
    oneway->add_flag("--undirected-bc", undirected_bc, "Compute betweenness treating every edge as two-way");
    oneway->callback([this, oneway] { action = [this, oneway] { return cmd_oneway(*oneway); }; });
  }

  void add_eval() {
    auto* sub = app.add_subcommand("eval", "Trajectory matching distance per map (writes summary.csv, deltas.csv)");
    sub->add_option("--traj", traj, "Trajectory CSV")->required();
    sub->add_option("--maps", maps, "NAME=PATH, one per map")->required()->expected(1, -1);
    auto* seed_opt = sub->add_option("--split-seed", split_seed, "Evaluate on the test drivers of a seeded split");
    sub->add_option("--train-frac", train_frac, "Training fraction of the split")->capture_default_str()->needs(seed_opt);
    add_out(sub);
    sub->callback([this, sub, seed_opt] {
      action = [this, sub, seed_opt] { return cmd_eval(*sub, seed_opt->count() > 0); };
    });
  }

  void add_distributions() {
    auto* sub = app.add_subcommand("distributions", "Betweenness and arrival statistics tables");
    add_closure_common(sub);
    sub->callback([this, sub] { action = [this, sub] { return cmd_distributions(*sub); }; });
  }

  void add_synth() {
    auto* sub = app.add_subcommand("synth", "Generate a synthetic city, fleet and inferred map");
    sub->add_option("--spec", spec_path, "key = value spec file (defaults apply when omitted)");
    sub->add_option("--seed", seed, "Override the spec seed");
    add_out(sub);
    sub->callback([this, sub] { action = [this, sub] { return cmd_synth(*sub); }; });
  }

  void add_coverage() {
    auto* sub = app.add_subcommand("coverage", "Node coverage versus relative trajectory length (writes coverage.csv)");
    add_closure_common(sub);
    sub->callback([this, sub] { action = [this, sub] { return cmd_coverage(*sub); }; });
  }

  void add_verify() {
    auto* sub = app.add_subcommand("verify", "Check the connectivity property of a fused map");
    sub->add_option("--g1", g1, "First source map")->required();
    sub->add_option("--g2", g2, "Second source map")->required();
    sub->add_option("--gf", gf, "Fused map")->required();
    sub->add_option("--theta", theta, "Matching threshold, meters")->capture_default_str();
    sub->add_flag("--strict", strict, "Only accept shortest paths of the fused map as witnesses");
    sub->add_option("--max-nodes", max_nodes, "Size guard per source map")->capture_default_str();
    add_out(sub);
    sub->callback([this, sub] { action = [this, sub] { return cmd_verify(*sub); }; });
  }

  void add_replay() {
    auto* sub = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    sub->add_option("manifest", manifest_path, "manifest.txt")->required();
    sub->callback([this] { action = [this] { return cmd_replay(); }; });
  }

  // -------------------------------------------------------------------------

  int cmd_fuse(const CLI::App& sub) {
    FusionParams params;
    params.theta = theta;
    params.collision_radius = radius;
    params.bfs_domain = bfs_domain == "outliers" ? BfsDomain::outlier_subgraph : BfsDomain::inferred_map;
    params.validate();
    const RoadGraph b = read_map_file(base);
    const RoadGraph i = read_map_file(inferred);
    const auto result = fuse(b, i, params);
    Outputs out(out_dir, manifest_for(sub, argv));
    out.input(base);
    out.input(inferred);
    out.add("fused.geojson", write_map_geojson(result.fused));
    out.write();
    std::printf("outliers %zu, added nodes %zu, added edges %zu, merges %zu\n", result.outliers.size(),
                result.added_nodes.size(), result.added_edges.size(), result.merges.size());
    return kOk;
  }

  ClosureParams closure_params() const {
    ClosureParams p;
    p.gamma = gamma;
    p.alpha = alpha;
    p.min_run_length = min_length;
    p.min_arrivals = min_arrivals;
    p.validate();
    return p;
  }

  MatchParams match_params() const {
    MatchParams p;
    p.match_radius = match_radius;
    p.heading_tolerance = heading_tolerance;
    p.validate();
    return p;
  }

  int write_report(const CLI::App& sub, const RoadGraph& g, const ClosureReport& report) {
    Outputs out(out_dir, manifest_for(sub, argv));
    out.input(map);
    out.input(traj);
    out.add("closures.geojson", closure_report_geojson(g, report));
    out.add("closures.csv", closure_report_csv(report));
    out.write();
    std::printf("%zu closure run(s)\n", report.runs.size());
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const auto& r = report.runs[i];
      std::printf("  run %zu: %s, %zu nodes, %.1f m\n", i, std::string(to_string(r.kind)).c_str(), r.nodes.size(),
                  r.length_m);
    }
    return kOk;
  }

  int cmd_coldstart(const CLI::App& sub) {
    const auto params = closure_params();
    const auto mp = match_params();
    const RoadGraph g = read_map_file(map);
    const auto trajs = load_trajectories(traj);
    if (trajs.empty())
      throw InvalidArgument("cold-start needs trajectories: with none, every central node would be a candidate");
    const auto bc = betweenness(g, {.undirected = undirected_bc});
    const auto arrivals = match_arrivals(g, trajs, mp);
    return write_report(sub, g, coldstart_closures(g, bc, arrivals, params));
  }

  int cmd_monitor(const CLI::App& sub) {
    const auto params = closure_params();
    const auto mp = match_params();
    const RoadGraph g = read_map_file(map);
    const auto arrivals = match_arrivals(g, load_trajectories(traj), mp);
    return write_report(sub, g, anomaly_closures(g, arrivals, at, params));
  }

  int cmd_oneway(const CLI::App& sub) {
    const auto params = closure_params();
    const auto mp = match_params();
    const RoadGraph g = read_map_file(map);
    const auto bc = betweenness(g, {.undirected = undirected_bc});
    const auto arrivals = match_edge_arrivals(g, load_trajectories(traj), mp);
    return write_report(sub, g, oneway_inconsistencies(g, bc, arrivals, params));
  }

  int cmd_eval(const CLI::App& sub, bool split) {
    auto trajs = load_trajectories(traj);
    if (split) trajs = split_by_driver(trajs, {train_frac, split_seed}).second;
    std::vector<std::pair<std::string, RoadGraph>> loaded;
    for (const auto& m : maps) {
      const auto eq = m.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == m.size())
        throw InvalidArgument("--maps expects NAME=PATH, got '" + m + "'");
      loaded.emplace_back(m.substr(0, eq), read_map_file(m.substr(eq + 1)));
    }
    std::vector<MatchSummary> rows;
    std::string per_traj = "trajectory,vehicle_id";
    std::vector<std::vector<double>> columns;
    for (const auto& [name, g] : loaded) {
      columns.push_back(deltas(trajs, g));
      rows.push_back(summarize_values(name, columns.back()));
      per_traj += "," + name;
    }
    per_traj += "\n";
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      per_traj += std::to_string(i) + "," + trajs[i].vehicle_id;
      for (const auto& c : columns) per_traj += "," + fmt("%.6f", c[i]);
      per_traj += "\n";
    }
    Outputs out(out_dir, manifest_for(sub, argv, split ? split_seed : 0));
    out.input(traj);
    for (const auto& m : maps) out.input(m.substr(m.find('=') + 1));
    out.add("summary.csv", summary_csv(rows));
    out.add("deltas.csv", per_traj);
    out.write();
    std::printf("%-16s %8s %10s %10s %10s\n", "map", "count", "mean", "median", "p99");
    for (const auto& r : rows)
      std::printf("%-16s %8zu %10.3f %10.3f %10.3f\n", r.map.c_str(), r.count, r.mean, r.median, r.p99);
    return kOk;
  }

  int cmd_distributions(const CLI::App& sub) {
    const auto mp = match_params();
    const RoadGraph g = read_map_file(map);
    const auto bc = betweenness(g);
    const auto tables = export_distributions(bc, match_arrivals(g, load_trajectories(traj), mp));
    Outputs out(out_dir, manifest_for(sub, argv));
    out.input(map);
    out.input(traj);
    out.add("nodes.csv", tables.nodes);
    out.add("bc_cdf.csv", tables.bc_cdf);
    out.add("arrivals_cdf.csv", tables.arrivals_cdf);
    out.add("ratio_histogram.csv", tables.ratio_histogram);
    out.write();
    return kOk;
  }

  int cmd_synth(const CLI::App& sub) {
    SynthSpec spec = spec_path.empty() ? SynthSpec{} : parse_synth_spec(read_text_file(spec_path));
    if (sub.count("--seed")) spec.seed = seed;
    const auto world = generate(spec);
    Outputs out(out_dir, manifest_for(sub, argv, spec.seed));
    if (!spec_path.empty()) out.input(spec_path);
    out.add("spec.txt", format_synth_spec(spec));
    out.add("base.geojson", write_map_geojson(world.base));
    out.add("ground_truth.geojson", write_map_geojson(world.ground_truth));
    out.add("inferred.geojson", write_map_geojson(world.inferred));
    out.add("trajectories.csv", write_trajectories_csv(world.trajectories));
    out.add("train.csv", write_trajectories_csv(world.train));
    out.add("test.csv", write_trajectories_csv(world.test));
    out.write();
    std::printf("base %zu nodes, ground truth %zu nodes, inferred %zu nodes, %zu trajectories\n",
                world.base.node_count(), world.ground_truth.node_count(), world.inferred.node_count(),
                world.trajectories.size());
    return kOk;
  }

  int cmd_coverage(const CLI::App& sub) {
    const auto mp = match_params();
    const RoadGraph g = read_map_file(map);
    const auto curve = coverage_curve(g, load_trajectories(traj), mp);
    Outputs out(out_dir, manifest_for(sub, argv));
    out.input(map);
    out.input(traj);
    out.add("coverage.csv", coverage_csv(curve));
    out.write();
    std::printf("final: relative length %.3f, covered fraction %.4f\n", curve.back().relative_length,
                curve.back().covered_fraction);
    return kOk;
  }

  int cmd_verify(const CLI::App& sub) {
    const RoadGraph a = read_map_file(g1);
    const RoadGraph b = read_map_file(g2);
    const RoadGraph f = read_map_file(gf);
    VerifyOptions opts;
    opts.search = strict ? WitnessSearch::shortest_paths : WitnessSearch::any_path;
    opts.max_nodes = max_nodes;
    const auto report = verify_connectivity_property(a, b, f, theta, opts);
    std::string csv = "source,from,to,length,best_distance\n";
    for (const auto& v : report.violations)
      csv += std::to_string(v.source) + "," + std::to_string(v.path.nodes.front()) + "," +
             std::to_string(v.path.nodes.back()) + "," + fmt("%.6f", v.path.length) + "," +
             fmt("%.6f", v.best_distance) + "\n";
    Outputs out(out_dir, manifest_for(sub, argv));
    out.input(g1);
    out.input(g2);
    out.input(gf);
    out.add("violations.csv", csv);
    out.write();
    std::printf("paths checked %zu, matched by shortest path %zu, by corridor %zu, violations %zu\n",
                report.paths_checked, report.matched_by_shortest_path, report.matched_by_corridor,
                report.violations.size());
    return report.ok() ? kOk : kCheckFailed;
  }

  int cmd_replay() {
    const auto m = RunManifest::parse(read_text_file(manifest_path));
    if (m.argv.empty() || m.argv.front() == "replay") throw InvalidArgument("manifest has no replayable argv");
    return run(m.argv);
  }
};

int run(const std::vector<std::string>& argv) {
  Cli cli(argv);
  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    cli.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.app.exit(e);
    return kValidation;
  }
  try {
    return cli.action();
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kParse;
  } catch (const SizeGuardError& e) {
    std::fprintf(stderr, "size guard: %s\n", e.what());
    return kSizeGuard;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return kValidation;
  } catch (const GenerationError& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
