#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vvc/baselines.hpp"
#include "vvc/error.hpp"
#include "vvc/powerflow.hpp"
#include "vvc/protocol.hpp"
#include "vvc/registry.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vvc::Error(vvc::ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw vvc::Error(vvc::ErrorCode::IoError, "write failed for '" + path + "'");
}

struct RunArgs {
  std::string env;
  std::optional<int> worker_idx;
  std::string policy = "random";
  int episodes = 1;
  std::uint64_t seed = 0;
  std::string split = "test";
  double gamma = 1.0;
  std::string out;
  std::string csv;
};

int cmd_run(const RunArgs& a) {
  const auto registry = vvc::Registry::with_defaults();
  vvc::Env env = registry.make_env(a.env, a.worker_idx);
  auto policy = vvc::make_policy(a.policy, a.seed);
  vvc::EvaluationConfig cfg;
  cfg.episodes = a.episodes;
  cfg.seed = a.seed;
  cfg.gamma = a.gamma;
  cfg.profiles = a.split == "train" ? vvc::ProfileSelection::Train : vvc::ProfileSelection::Test;
  const vvc::EvalReport report = vvc::evaluate(*policy, env, cfg);
  write_file(a.out, vvc::report_to_json(report, a.env, a.policy));
  if (!a.csv.empty()) write_file(a.csv, vvc::steps_to_csv(report));
  std::cout << "mean return " << report.mean << " (std " << report.stddev << ") over " << report.episodes
            << " episodes\n";
  return kExitOk;
}

struct SolveArgs {
  std::string circuit;
  double tol = 1e-8;
  int max_iter = 100;
  double load_scale = 1.0;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  const vvc::Circuit circuit = vvc::load_circuit_file(a.circuit);
  const vvc::DeviceState state = vvc::initial_device_state(circuit);
  const std::vector<double> mult(circuit.loads.size(), a.load_scale);
  const vvc::InjectionSet inj = vvc::build_injections(circuit, state, mult);
  const vvc::Network network(circuit);
  const vvc::PowerFlowSolution sol = vvc::solve_status(network, state, inj, {a.tol, a.max_iter});
  const double res = vvc::residual(circuit, state, inj, sol);

  nlohmann::json j;
  j["status"] = sol.status == vvc::SolveStatus::Converged      ? "converged"
                : sol.status == vvc::SolveStatus::NotConverged ? "not_converged"
                                                               : "collapsed";
  j["iterations"] = sol.iterations;
  j["max_residual"] = res;
  j["total_loss_pu"] = sol.total_loss_pu;
  j["substation_p_pu"] = sol.substation_p_pu;
  nlohmann::json volts = nlohmann::json::object();
  for (std::size_t b = 0; b < circuit.buses.size(); ++b) {
    nlohmann::json per_phase = nlohmann::json::object();
    for (vvc::Phase p : circuit.buses[b].phases) per_phase[std::to_string(p)] = sol.voltage(b, p);
    volts[circuit.buses[b].id] = per_phase;
  }
  j["voltages"] = volts;
  write_file(a.out, j.dump(2) + "\n");
  std::cout << "max residual " << res << "\n";
  if (sol.status == vvc::SolveStatus::Collapsed) {
    std::cerr << "error: voltage collapse\n";
    return kExitFailure;
  }
  if (!sol.converged) {
    std::cerr << "error: power flow did not converge in " << a.max_iter << " iterations\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct GraphArgs {
  std::string env;
  vvc::GraphOptions options;
  std::string out;
  std::string pos;
};

int cmd_plot(const GraphArgs& a) {
  const auto registry = vvc::Registry::with_defaults();
  const vvc::Env env = registry.make_env(a.env);
  const vvc::GraphDocument doc = vvc::emit_graph(env, a.options);
  write_file(a.out, doc.dot);
  if (!a.pos.empty()) write_file(a.pos, doc.positions_csv());
  return kExitOk;
}

int cmd_list() {
  const auto registry = vvc::Registry::with_defaults();
  for (const auto& name : registry.names()) std::cout << name << '\n';
  return kExitOk;
}

int cmd_serve() {
  std::ios::sync_with_stdio(false);
  vvc::StdioSession session(vvc::Registry::with_defaults());
  session.serve(std::cin, std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volt-Var control environments: evaluation, power flow and stdio serving"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a baseline policy");
  run_cmd->add_option("--env", run.env, "Environment name")->required();
  run_cmd->add_option("--worker-idx", run.worker_idx, "Worker index")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--policy", run.policy)->check(CLI::IsMember({"random", "greedy"}));
  run_cmd->add_option("--episodes", run.episodes)->required()->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed)->required();
  run_cmd->add_option("--split", run.split)->check(CLI::IsMember({"train", "test"}));
  run_cmd->add_option("--gamma", run.gamma)->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--out", run.out, "report.json path")->required();
  run_cmd->add_option("--csv", run.csv, "steps.csv path");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the power flow of a circuit file");
  solve_cmd->add_option("--circuit", solve.circuit)->required();
  solve_cmd->add_option("--tol", solve.tol)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", solve.max_iter)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--load-scale", solve.load_scale)->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--out", solve.out)->required();

  GraphArgs graph;
  auto* plot_cmd = app.add_subcommand("plot-graph", "Emit the feeder as a DOT graph");
  plot_cmd->add_option("--env", graph.env)->required();
  plot_cmd->add_flag("--show-voltages", graph.options.show_voltages);
  plot_cmd->add_flag("--show-controllers", graph.options.show_controllers);
  plot_cmd->add_flag("--show-actions", graph.options.show_actions);
  plot_cmd->add_option("--out", graph.out)->required();
  plot_cmd->add_option("--pos", graph.pos, "positions.csv path");

  auto* serve_cmd = app.add_subcommand("serve-stdio", "Speak the vvc/1 protocol on stdin/stdout");
  auto* list_cmd = app.add_subcommand("list-envs", "List registered environments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*solve_cmd) return cmd_solve(solve);
    if (*plot_cmd) return cmd_plot(graph);
    if (*serve_cmd) return cmd_serve();
    if (*list_cmd) return cmd_list();
  } catch (const vvc::Error& e) {
    std::cerr << "error [" << vvc::code_name(e.code()) << "]: " << e.what() << '\n';
    return e.code() == vvc::ErrorCode::UnknownSystem || e.code() == vvc::ErrorCode::MalformedScale ||
                   e.code() == vvc::ErrorCode::InvalidParameter
               ? kExitUsage
               : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
