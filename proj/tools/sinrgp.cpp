// sinrgp: weighted-sum-rate power control experiments.
//
// Exit status: 0 on success, 2 when the problem is infeasible, 1 on any other error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sinrgp/experiments.hpp"
#include "sinrgp/oracle.hpp"
#include "sinrgp/problem_io.hpp"
#include "sinrgp/scenario.hpp"

namespace fs = std::filesystem;
using namespace sinrgp;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitError = 1;

struct Common {
  std::uint64_t seed = 0;
  double eps = ScaOptions{}.eps;
  int workers = 1;
  fs::path out = "out";
};

ScaOptions sca_options(const Common& c) {
  ScaOptions o;
  o.eps = c.eps;
  return o;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", v(i));
    s += buf;
  }
  return s + "]";
}

NetworkConfig network_from(const std::string& path) {
  return path.empty() ? NetworkConfig{} : load_config(path);
}

int cmd_solve(const std::string& problem, const Common& c) {
  SolveFileOptions opts;
  opts.sca = sca_options(c);
  opts.out_dir = c.out;
  fs::create_directories(c.out);
  const ScaReport rep = solve_file(problem, opts);
  const auto& last = rep.trajectory.back();
  std::cout << "converged: " << (rep.converged ? "yes" : "no") << " after " << rep.iterations
            << " iterations\n"
            << "weighted sum rate: " << last.weighted_sum_rate << " bit/s/Hz\n"
            << "p* (W): " << vec(rep.p_star) << "\n"
            << "wrote " << (c.out / "trajectory.csv").string() << ", " << (c.out / "allocation.csv").string()
            << "\n";
  return 0;
}

int cmd_case1(const std::string& problem, int inits, int grid, const Common& c) {
  Case1Options opts;
  opts.inits = inits;
  opts.seed = c.seed;
  opts.grid_points = grid;
  opts.workers = c.workers;
  opts.sca = sca_options(c);
  const Case1Summary s = run_case1(load_problem(problem), opts);
  const fs::path csv = c.out / "case1_runs.csv";
  write_case1_csv(s, csv);
  std::cout << "oracle (" << grid << " points/link): " << s.oracle.objective << " at " << vec(s.oracle.p_best)
            << "\n"
            << "best converged objective: " << s.best_objective << "\n"
            << "success fraction: " << s.success_fraction << " (" << s.runs.size() << " inits, seed " << c.seed
            << ")\n"
            << "max iterations: " << s.max_iterations << "\n"
            << "wrote " << csv.string() << "\n";
  return 0;
}

int cmd_case2(int realizations, const std::vector<std::string>& modes, const std::string& config,
              const Common& c) {
  Case2Options opts;
  opts.realizations = realizations;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.sca = sca_options(c);
  opts.network = network_from(config);
  if (!modes.empty()) {
    opts.modes.clear();
    for (const auto& m : modes) opts.modes.push_back(parse_case2_mode(m));
  }
  const Case2Summary s = run_case2(opts);
  write_case2_csv(s, c.out / "case2_realizations.csv", c.out / "case2_rates.csv", c.out / "case2_rate_cdf.csv");
  for (Case2Mode m : opts.modes) {
    double total = 0.0;
    int count = 0;
    for (const auto& r : s.realizations) {
      if (const auto* o = r.find(m)) {
        total += o->average_rate;
        ++count;
      }
    }
    if (count > 0) std::cout << to_string(m) << ": mean average rate " << total / count << " bit/s/Hz\n";
  }
  std::cout << "realizations: " << s.realizations.size() << ", skipped: " << s.skipped << "\n"
            << "wrote " << c.out.string() << "/case2_{realizations,rates,rate_cdf}.csv\n";
  return 0;
}

int cmd_oracle(const std::string& problem, int grid, bool vertex, const Common& c) {
  const PowerControlProblem prob = load_problem(problem);
  const OracleResult r = vertex ? vertex_enumeration(prob) : grid_search(prob, grid, c.workers);
  std::cout << (vertex ? "vertex enumeration" : "grid search") << ": " << r.objective << " bit/s/Hz at "
            << vec(r.p_best) << " (" << r.evaluations << " evaluations)\n";
  return 0;
}

int cmd_scenario_export(const std::string& config, const fs::path& file, const Common& c) {
  const Scenario sc = build_hex_network(network_from(config));
  const PowerControlProblem prob = gain_matrix(sc, draw_realization(sc, c.seed));
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  save_problem(prob, file);
  std::cout << "wrote " << prob.size() << "-link problem for seed " << c.seed << " to " << file.string() << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Common& c, bool solver, bool workers) {
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  if (solver) cmd->add_option("--eps", c.eps, "stop when ||p_new - p_old|| < eps (W)")->capture_default_str();
  if (workers) cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-sum-rate power control by successive geometric programming"};
  app.require_subcommand(1);
  Common c;

  std::string problem;
  auto* solve = app.add_subcommand("solve", "solve a problem file and write trajectory/allocation CSVs");
  solve->add_option("problem", problem, "problem JSON")->required();
  add_common(solve, c, true, false);

  std::string case1_problem = "data/example1.json";
  int inits = 1000;
  int grid = 64;
  auto* case1 = app.add_subcommand("case1", "random restarts against the grid oracle");
  case1->add_option("--problem", case1_problem, "problem JSON")->capture_default_str();
  case1->add_option("--inits", inits, "random initializations")->check(CLI::PositiveNumber)->capture_default_str();
  case1->add_option("--grid", grid, "oracle points per link")->check(CLI::Range(2, 4096))->capture_default_str();
  case1->add_option("--seed", c.seed, "random seed")->capture_default_str();
  add_common(case1, c, true, true);

  int realizations = 100;
  std::vector<std::string> modes;
  std::string config;
  auto* case2 = app.add_subcommand("case2", "sectorized UAV network, OLPC baselines");
  case2->add_option("--realizations", realizations, "network drops")->check(CLI::PositiveNumber)->capture_default_str();
  case2->add_option("--mode", modes, "no-qos, olpc-qos, olpc-only (repeatable; default all)");
  case2->add_option("--config", config, "scenario config JSON");
  case2->add_option("--seed", c.seed, "seed of the first realization")->capture_default_str();
  add_common(case2, c, true, true);

  bool vertex = false;
  auto* oracle = app.add_subcommand("oracle", "exhaustive reference optimum for small problems");
  oracle->add_option("problem", problem, "problem JSON")->required();
  oracle->add_option("--grid", grid, "points per link")->check(CLI::Range(2, 4096))->capture_default_str();
  oracle->add_flag("--vertex", vertex, "enumerate {p_min, p_max}^N instead");
  oracle->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* scenario = app.add_subcommand("scenario", "scenario utilities");
  scenario->require_subcommand(1);
  fs::path export_file = "case2_seed0.json";
  auto* exp = scenario->add_subcommand("export", "write one realization as a problem file");
  exp->add_option("--config", config, "scenario config JSON");
  exp->add_option("--seed", c.seed, "realization seed")->capture_default_str();
  exp->add_option("--out", export_file, "output problem file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(problem, c);
    if (*case1) return cmd_case1(case1_problem, inits, grid, c);
    if (*case2) return cmd_case2(realizations, modes, config, c);
    if (*oracle) return cmd_oracle(problem, grid, vertex, c);
    if (*exp) return cmd_scenario_export(config, export_file, c);
  } catch (const InfeasibleProblem& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleInitial& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
