// Command-line front end: studies, single partitions, campaign plans, the
// campaign service and network generation.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "leakloc/error.hpp"
#include "leakloc/generators.hpp"
#include "leakloc/ilp_partitioner.hpp"
#include "leakloc/network_io.hpp"
#include "leakloc/protocol_json.hpp"
#include "leakloc/service.hpp"
#include "leakloc/spectral.hpp"
#include "leakloc/study.hpp"

using namespace leakloc;

namespace {

struct NetworkArgs {
  std::string path;
  std::string format = "json";
  std::string graph;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--network", path, "Network file");
    app->add_option("--format", format, "Network file format")->check(CLI::IsMember({"json", "inp"}));
    app->add_option("--graph", graph, "Generated network: path:N, cycle:N, grid:RxC, random-connected:N:P, lollipop:K:T");
    app->add_option("--seed", seed, "Seed for random generators");
  }

  Network load(std::string* name = nullptr) const {
    if (path.empty() == graph.empty()) throw Error("give exactly one of --network or --graph");
    if (!graph.empty()) {
      if (name) *name = graph;
      return generate_graph(graph, seed);
    }
    if (name) *name = path;
    std::vector<std::string> warnings;
    Network net = load_network_file(path, network_format_from_string(format), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return net;
  }
};

struct ConfigArgs {
  std::string method = "ilp-gp";
  double gamma = 0.1;
  std::size_t delta = 1;
  std::string leak_mode = "node";
  std::string pipe_strategy = "center-split";
  bool multi_leak = false;
  bool no_sensors = false;
  bool disruptive = false;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "Partitioner")->check(CLI::IsMember({"ilp-gp", "ilp-lex", "spectral"}));
    app->add_option("--gamma", gamma, "Balance slack of the size window in [0, 0.5)")
        ->check(CLI::Range(0.0, 0.5) & CLI::Validator(
                                          [](std::string& text) {
                                            return std::stod(text) < 0.5 ? std::string() : "must be below 0.5";
                                          },
                                          ""));
    app->add_option("--delta", delta, "Stop once a region has at most this many candidates")->check(CLI::PositiveNumber);
    app->add_option("--leak-mode", leak_mode, "Leak candidates")->check(CLI::IsMember({"node", "pipe"}));
    app->add_option("--pipe-strategy", pipe_strategy, "Pipe-mode measurement scheme")
        ->check(CLI::IsMember({"center-split", "double-ended"}));
    app->add_flag("--multi-leak", multi_leak, "Follow every leaky side");
    app->add_flag("--ignore-sensors", no_sensors, "Partition on raw query costs");
    app->add_flag("--disruptive-valves", disruptive, "Shut valves give known zero flows");
  }

  CampaignConfig config() const {
    CampaignConfig c;
    c.method = partition_method_from_string(method);
    c.gamma = gamma;
    c.delta = delta;
    c.mode = leak_mode_from_string(leak_mode);
    c.pipe_strategy = pipe_strategy_from_string(pipe_strategy);
    c.multi_leak = multi_leak;
    c.sensor_integration = !no_sensors;
    c.disruptive_valves = disruptive;
    return c;
  }
};

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot write '" + path + "'");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leak localization in water networks by staged flow measurements"};
  app.require_subcommand(1);

  NetworkArgs study_net;
  ConfigArgs study_cfg;
  int threads = 0;
  std::string out_path, emit = "table", name;
  double fraction = 0.5;
  bool serial = false;
  auto* study = app.add_subcommand("study", "Enumerate a leak at every node or pipe");
  study_net.attach(study);
  study_cfg.attach(study);
  study->add_option("--threads", threads, "Worker threads (0: OpenMP default)");
  study->add_option("--out", out_path, "Per-scenario CSV file");
  study->add_option("--emit", emit, "Summary format")->check(CLI::IsMember({"csv", "json", "table"}));
  study->add_option("--name", name, "Row label in the summary");
  study->add_option("--pipe-fraction", fraction, "Pipe-mode leak position")->check(CLI::Range(0.0, 1.0));
  study->add_flag("--serial", serial, "Use the single-threaded reference");

  NetworkArgs part_net;
  ConfigArgs part_cfg;
  auto* partition = app.add_subcommand("partition", "Bisect a network once");
  part_net.attach(partition);
  part_cfg.attach(partition);

  NetworkArgs plan_net;
  ConfigArgs plan_cfg;
  bool force = false;
  auto* plan = app.add_subcommand("plan", "Start a campaign and print its first plan");
  plan_net.attach(plan);
  plan_cfg.attach(plan);
  plan->add_flag("--force", force, "Plan even if the network balances");

  std::string addr = "127.0.0.1", data_dir = "campaigns";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the campaign HTTP service");
  serve_cmd->add_option("--addr", addr, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--data-dir", data_dir, "Directory for campaign documents");

  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Write a synthetic network as JSON");
  gen->add_option("spec", gen_spec, "path:N, cycle:N, grid:RxC, random-connected:N:P, lollipop:K:T")->required();
  gen->add_option("--seed", gen_seed, "Seed for random generators");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (study->parsed()) {
      std::string label;
      const Network net = study_net.load(&label);
      StudyOptions opts;
      opts.config = study_cfg.config();
      opts.threads = threads;
      opts.pipe_fraction = fraction;
      if (!name.empty()) label = name;
      const StudyResult result =
          serial ? enumerative_study_serial(net, opts, label) : enumerative_study(net, opts, label);
      if (!out_path.empty()) {
        std::ofstream file;
        write_scenarios_csv(output(out_path, file), result);
      }
      if (emit == "json") write_study_json(std::cout, result);
      else if (emit == "csv") write_summary_csv(std::cout, std::span<const StudyResult>(&result, 1));
      else write_summary_table(std::cout, std::span<const StudyResult>(&result, 1));
      std::cerr << result.per_scenario.size() << " scenarios in " << result.seconds << " s\n";
    } else if (partition->parsed()) {
      const Network net = part_net.load();
      const CampaignConfig cfg = part_cfg.config();
      const BisectionMode mode = cfg.method == PartitionMethod::IlpLexicographic ? BisectionMode::Lexicographic
                                                                                 : BisectionMode::GoalProgramming;
      BisectionProblem problem(net, mode, cfg.gamma);
      nlohmann::json out;
      if (cfg.method == PartitionMethod::Spectral) {
        const SpectralSolution sol = spectral_bisect(problem);
        out = to_json(sol.partition);
        out["lambda2"] = sol.lambda2;
        out["rounding"] = to_string(sol.rounding);
      } else {
        const IlpSolution sol = solve_bisection_detailed(problem);
        out = to_json(sol.partition);
        out["proven_optimal"] = sol.proven_optimal;
        out["nodes_explored"] = sol.nodes_explored;
      }
      std::cout << out.dump(2) << '\n';
    } else if (plan->parsed()) {
      const Network net = plan_net.load();
      const CampaignState state = start_campaign(net, plan_cfg.config(), force);
      nlohmann::json out = {{"initial_imbalance", net.net_boundary_flow()}};
      if (state.complete()) {
        out["status"] = "complete";
        out["leaky_set"] = nlohmann::json::array();
        for (const Finding& f : state.leaky_set) out["leaky_set"].push_back(to_json(f));
      } else {
        out["status"] = "active";
        out["plan"] = to_json(plan_stage(state));
      }
      std::cout << out.dump(2) << '\n';
    } else if (serve_cmd->parsed()) {
      std::cerr << "serving campaigns from " << data_dir << " on " << addr << ':' << port << '\n';
      serve(addr, port, data_dir);
    } else if (gen->parsed()) {
      const Network net = generate_graph(gen_spec, gen_seed);
      std::ofstream file;
      output(gen_out, file) << network_to_json(net).dump(2) << '\n';
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
