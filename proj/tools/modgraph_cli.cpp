// Command-line pipeline driver: simulate -> build -> evaluate -> plan, plus a
// line-protocol prediction service over a saved model snapshot. Every stage
// reads and writes plain-text artifacts so stages can be rerun independently.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "modgraph/errors.hpp"
#include "modgraph/evaluation.hpp"
#include "modgraph/io.hpp"
#include "modgraph/nav_graph.hpp"
#include "modgraph/pipeline.hpp"
#include "modgraph/planner.hpp"
#include "modgraph/service.hpp"
#include "modgraph/simulator.hpp"

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  return is;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return os;
}

std::string scene_path(const std::string& dir, int k, const char* suffix) {
  return dir + "/scene_" + std::to_string(k) + suffix;
}

struct SimulateArgs {
  std::string out_dir;
  int scenes = 1;
  std::uint64_t seed = 1;
  double duration = 0.0;  // 0: keep the default scene's value
  double dt = 0.0;
};

void run_simulate(const SimulateArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  modgraph::SceneConfig base = modgraph::default_scene_config();
  if (args.duration > 0.0) {
    base.duration = args.duration;
  }
  if (args.dt > 0.0) {
    base.dt = args.dt;
  }
  const auto configs = modgraph::generate_dataset(args.scenes, base, args.seed);
  for (int k = 0; k < args.scenes; ++k) {
    const auto stream = modgraph::generate_scene(configs[k]);
    {
      auto os = open_output(scene_path(args.out_dir, k, ".config"));
      modgraph::write_scene_config(os, configs[k]);
    }
    {
      auto os = open_output(scene_path(args.out_dir, k, ".stream"));
      modgraph::write_stream(os, stream);
    }
    std::cout << "scene " << k << ": " << stream.size() << " observations -> "
              << scene_path(args.out_dir, k, ".stream") << '\n';
  }
}

struct BuildArgs {
  std::string config_path;
  std::string stream_path;
  std::string out_path;
  std::string graph_path;       // load instead of sampling
  std::string save_graph_path;  // optionally persist the sampled graph
  std::string events_path;
  double event_density = 0.0;  // > 0: synthesize a disturbance schedule
  std::uint64_t graph_seed = 0;
  bool graph_seed_set = false;
  modgraph::ModelParams params;
};

void run_build(const BuildArgs& args) {
  auto cfg_is = open_input(args.config_path);
  const modgraph::SceneConfig cfg = modgraph::read_scene_config(cfg_is);

  modgraph::NavGraph graph;
  if (!args.graph_path.empty()) {
    auto is = open_input(args.graph_path);
    graph = modgraph::read_graph(is);
  } else {
    const std::uint64_t seed = args.graph_seed_set ? args.graph_seed : cfg.seed + 1;
    graph = modgraph::build_nav_graph(modgraph::route_bounding_box(cfg.routes),
                                      cfg.walls, seed);
  }
  if (!args.save_graph_path.empty()) {
    auto os = open_output(args.save_graph_path);
    modgraph::write_graph(os, graph);
  }

  auto stream_is = open_input(args.stream_path);
  const modgraph::ObservationStream stream = modgraph::read_stream(stream_is);

  std::vector<modgraph::TopologyEvent> events;
  if (!args.events_path.empty()) {
    auto is = open_input(args.events_path);
    events = modgraph::read_events(is);
  } else if (args.event_density > 0.0) {
    events = modgraph::inject_topology_events(cfg.seed + 2, graph,
                                              args.event_density, cfg.duration);
  }

  const modgraph::ModelParams params =
      modgraph::resolve_params(args.params, cfg.duration);
  modgraph::BuiltModel model = modgraph::build_model(stream, events, params,
                                                     std::move(graph), cfg.duration);
  {
    auto os = open_output(args.out_path);
    modgraph::write_model_snapshot(os, model);
  }
  std::cout << "built " << args.out_path << ": " << model.graph.nodes().size()
            << " nodes, " << model.map.occupied_count() << " unbound cells, "
            << model.temporal.channels().size() << " temporal channels\n";
}

struct EvaluateArgs {
  std::string dir;
  int scenes = 1;
  double t_eval = -1.0;  // < 0: three quarters through each scene
  double resolution = modgraph::kDefaultGridResolution;
  std::string csv_path;
  std::string fields_dir;
  modgraph::ModelParams params;
};

void run_evaluate(const EvaluateArgs& args) {
  namespace fs = std::filesystem;
  std::vector<modgraph::SceneReport> reports;
  for (int k = 0; k < args.scenes; ++k) {
    auto cfg_is = open_input(scene_path(args.dir, k, ".config"));
    const modgraph::SceneConfig cfg = modgraph::read_scene_config(cfg_is);
    auto stream_is = open_input(scene_path(args.dir, k, ".stream"));
    const modgraph::ObservationStream stream = modgraph::read_stream(stream_is);

    const modgraph::ModelParams params =
        modgraph::resolve_params(args.params, cfg.duration);
    modgraph::NavGraph graph = modgraph::build_nav_graph(
        modgraph::route_bounding_box(cfg.routes), cfg.walls, cfg.seed + 1);
    const modgraph::BuiltModel model =
        modgraph::build_model(stream, {}, params, std::move(graph), cfg.duration);
    const modgraph::GridSpec spec =
        modgraph::grid_spec_for_scene(cfg, args.resolution);
    const modgraph::GridModel grid =
        modgraph::build_grid_model(stream, spec, params, cfg.duration);

    const double t_eval = args.t_eval >= 0.0 ? args.t_eval : 0.75 * cfg.duration;
    reports.push_back(modgraph::evaluate_scene(model.graph, model.map,
                                               model.temporal, grid, k, t_eval));
    if (!args.fields_dir.empty()) {
      fs::create_directories(args.fields_dir);
      const std::pair<modgraph::FieldMode, const char*> modes[] = {
          {modgraph::FieldMode::historical, "_grid_historical.field"},
          {modgraph::FieldMode::predicted, "_grid_predicted.field"}};
      for (const auto& [mode, suffix] : modes) {
        auto os = open_output(args.fields_dir + "/scene_" + std::to_string(k) +
                              suffix);
        modgraph::write_field(os, modgraph::grid_descriptor_field(grid, mode, t_eval));
      }
    }
  }
  const modgraph::AggregateReport report = modgraph::aggregate(reports);
  std::cout << modgraph::render_table(report);
  if (!args.csv_path.empty()) {
    auto os = open_output(args.csv_path);
    modgraph::write_scene_reports_csv(os, reports);
    std::cout << "per-scene metrics -> " << args.csv_path << '\n';
  }
}

struct PlanArgs {
  std::string snapshot_path;
  modgraph::NodeId from = 0;
  modgraph::NodeId to = 0;
  std::string mode = "historical";
  double t = 0.0;
  modgraph::PlannerWeights weights;
  std::string out_path;
};

void run_plan(const PlanArgs& args) {
  auto is = open_input(args.snapshot_path);
  const modgraph::BuiltModel model = modgraph::read_model_snapshot(is);
  const modgraph::NodeDynamics dynamics =
      args.mode == "predicted"
          ? modgraph::node_dynamics_predicted(model.graph, model.temporal, args.t)
          : modgraph::node_dynamics_historical(model.graph);
  const modgraph::PlanResult result =
      modgraph::plan(model.graph, args.from, args.to, args.weights, dynamics);
  if (args.out_path.empty()) {
    modgraph::write_plan(std::cout, result);
  } else {
    auto os = open_output(args.out_path);
    modgraph::write_plan(os, result);
    std::cout << "plan with " << result.steps.size() << " steps, total cost "
              << modgraph::format_double(result.total_cost) << " -> "
              << args.out_path << '\n';
  }
}

struct ServeArgs {
  std::string snapshot_path;
  std::uint16_t port = 0;
  bool stdio = false;
};

void run_serve(const ServeArgs& args) {
  auto is = open_input(args.snapshot_path);
  const modgraph::BuiltModel model = modgraph::read_model_snapshot(is);
  if (args.stdio) {
    modgraph::serve_stdio(model, std::cin, std::cout);
    return;
  }
  modgraph::LineProtocolServer server(model);
  const std::uint16_t port = server.start(args.port);
  std::cout << "listening on 127.0.0.1:" << port << std::endl;
  while (server.running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
}

void add_model_param_options(CLI::App* cmd, modgraph::ModelParams& params) {
  cmd->add_option("--delta", params.delta, "hash cell size, meters");
  cmd->add_option("--bins", params.bins, "directional histogram bins");
  cmd->add_option("--dmax", params.d_max, "position-to-node association radius");
  cmd->add_option("--tau", params.tau, "stability window before binding, seconds");
  cmd->add_option("--bind-radius", params.bind_radius,
                  "max cell-to-node binding distance, meters");
  cmd->add_option("--order", params.order, "spectral components kept per channel");
  cmd->add_option("--window", params.update_interval,
                  "temporal update window, seconds");
  cmd->add_option("--periods", params.candidate_periods,
                  "candidate periods, seconds (default: duration halving ladder)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph map-of-dynamics toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "generate scene configs and detection streams");
  sim_cmd->add_option("--out", sim.out_dir, "output directory")->required();
  sim_cmd->add_option("--scenes", sim.scenes, "number of scenes")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--duration", sim.duration, "scene length, seconds");
  sim_cmd->add_option("--dt", sim.dt, "detection interval, seconds");
  sim_cmd->callback([&sim] { run_simulate(sim); });

  BuildArgs build;
  CLI::App* build_cmd =
      app.add_subcommand("build", "replay a stream into a model snapshot");
  build_cmd->add_option("--config", build.config_path, "scene config file")
      ->required();
  build_cmd->add_option("--stream", build.stream_path, "observation stream file")
      ->required();
  build_cmd->add_option("--out", build.out_path, "snapshot output file")->required();
  build_cmd->add_option("--graph", build.graph_path,
                        "load this graph instead of sampling one");
  build_cmd->add_option("--save-graph", build.save_graph_path,
                        "write the graph used for the build");
  build_cmd->add_option("--events", build.events_path, "topology event file");
  build_cmd->add_option("--event-density", build.event_density,
                        "synthesize events touching this fraction of nodes");
  build_cmd
      ->add_option("--graph-seed", build.graph_seed,
                   "node placement seed (default: scene seed + 1)")
      ->each([&build](const std::string&) { build.graph_seed_set = true; });
  add_model_param_options(build_cmd, build.params);
  build_cmd->callback([&build] { run_build(build); });

  EvaluateArgs eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "compare graph models against the dense grid baseline");
  eval_cmd->add_option("--dir", eval.dir, "directory produced by simulate")
      ->required();
  eval_cmd->add_option("--scenes", eval.scenes, "number of scenes to evaluate")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--t-eval", eval.t_eval,
                       "prediction time (default: 0.75 x duration)");
  eval_cmd->add_option("--resolution", eval.resolution, "grid cell size, meters");
  eval_cmd->add_option("--csv", eval.csv_path, "write per-scene metrics CSV");
  eval_cmd->add_option("--fields-dir", eval.fields_dir,
                       "dump grid descriptor fields here");
  add_model_param_options(eval_cmd, eval.params);
  eval_cmd->callback([&eval] { run_evaluate(eval); });

  PlanArgs plan;
  CLI::App* plan_cmd =
      app.add_subcommand("plan", "flow-aware A* between two graph nodes");
  plan_cmd->add_option("--snapshot", plan.snapshot_path, "model snapshot file")
      ->required();
  plan_cmd->add_option("--from", plan.from, "start node id")->required();
  plan_cmd->add_option("--to", plan.to, "goal node id")->required();
  plan_cmd->add_option("--mode", plan.mode, "historical or predicted dynamics")
      ->check(CLI::IsMember({"historical", "predicted"}));
  plan_cmd->add_option("--t", plan.t, "prediction time for --mode predicted");
  plan_cmd->add_option("--w-entropy", plan.weights.w_entropy, "entropy weight");
  plan_cmd->add_option("--w-flow", plan.weights.w_flow, "flow weight");
  plan_cmd->add_option("--w-direction", plan.weights.w_direction,
                       "counter-flow weight");
  plan_cmd->add_option("--out", plan.out_path, "plan output file (default stdout)");
  plan_cmd->callback([&plan] { run_plan(plan); });

  ServeArgs serve;
  CLI::App* serve_cmd =
      app.add_subcommand("serve", "answer line-protocol prediction requests");
  serve_cmd->add_option("--snapshot", serve.snapshot_path, "model snapshot file")
      ->required();
  CLI::Option* port_opt =
      serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)");
  serve_cmd->add_flag("--stdio", serve.stdio, "serve over stdin/stdout")
      ->excludes(port_opt);
  serve_cmd->callback([&serve] { run_serve(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const modgraph::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
