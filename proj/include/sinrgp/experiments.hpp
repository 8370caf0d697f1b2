#pragma once

// Batch experiments and report files.
//
// Every CSV starts with a "# schema: <name> v<version>" line followed by a
// header row. Rows are ordered by index, never by completion time.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sinrgp/oracle.hpp"
#include "sinrgp/power_control.hpp"
#include "sinrgp/scenario.hpp"

namespace sinrgp {

/// Calls job(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any job is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

// Case 1: random restarts on a small problem, scored against the grid oracle.

struct Case1Options {
  int inits = 1000;
  std::uint64_t seed = 0;
  int grid_points = 64;
  double success_tol = 1e-3;  // relative objective gap to the oracle
  int workers = 1;
  ScaOptions sca;
  /// Replaces the random draws when set (one run per entry).
  std::vector<Eigen::VectorXd> initial_points;
};

struct Case1Run {
  Eigen::VectorXd p_init;
  Eigen::VectorXd p_star;
  double objective = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  bool success = false;
};

struct Case1Summary {
  OracleResult oracle;
  std::vector<Case1Run> runs;
  double success_fraction = 0.0;
  double best_objective = 0.0;
  int max_iterations = 0;
};

/// Uniform per-coordinate draws in [p_min, p_max] from one seeded stream.
std::vector<Eigen::VectorXd> random_initial_points(const PowerControlProblem& prob, int count,
                                                   std::uint64_t seed);

Case1Summary run_case1(const PowerControlProblem& prob, const Case1Options& opts = {});

// Case 2: sectorized network, three power-control schemes per realization.

enum class Case2Mode { NoQos, OlpcQos, OlpcOnly };

std::string_view to_string(Case2Mode mode);
/// Accepts "no_qos" / "no-qos" style names.
Case2Mode parse_case2_mode(std::string_view name);

struct Case2Options {
  int realizations = 100;
  std::uint64_t seed = 0;  // realization r uses seed + r
  std::vector<Case2Mode> modes{Case2Mode::NoQos, Case2Mode::OlpcQos, Case2Mode::OlpcOnly};
  int workers = 1;
  ScaOptions sca;
  NetworkConfig network;
};

struct Case2Outcome {
  Case2Mode mode = Case2Mode::NoQos;
  Eigen::VectorXd p;
  Eigen::VectorXd rates;
  double average_rate = 0.0;
  int iterations = 0;
  bool converged = true;
  int muted = 0;
};

struct Case2Realization {
  int index = 0;
  std::uint64_t seed = 0;
  bool infeasible = false;
  std::string error;
  std::vector<Case2Outcome> outcomes;  // in Case2Options::modes order

  const Case2Outcome* find(Case2Mode mode) const;
};

struct Case2Summary {
  std::vector<Case2Realization> realizations;
  int skipped = 0;
};

/// One realization: OLPC allocation, then the requested modes. The OLPC-QoS
/// mode sets each floor to the SINR that OLPC achieves and starts from the
/// OLPC allocation; the no-QoS mode starts from full power.
Case2Realization run_case2_realization(const Scenario& scenario, std::uint64_t seed,
                                       const std::vector<Case2Mode>& modes, const ScaOptions& sca);

Case2Summary run_case2(const Case2Options& opts = {});

// Report files.

void write_case1_csv(const Case1Summary& summary, const std::filesystem::path& path);
void write_case2_csv(const Case2Summary& summary, const std::filesystem::path& realizations_path,
                     const std::filesystem::path& rates_path, const std::filesystem::path& cdf_path);
void write_trajectory_csv(const ScaReport& report, const std::filesystem::path& path);
void write_allocation_csv(const PowerControlProblem& prob, const Eigen::VectorXd& p,
                          const std::filesystem::path& path);

struct SolveFileOptions {
  ScaOptions sca;
  std::filesystem::path out_dir = ".";
  std::optional<Eigen::VectorXd> p_init;
};

/// Loads a problem file, solves it from a feasible start and writes
/// trajectory.csv and allocation.csv into out_dir.
ScaReport solve_file(const std::filesystem::path& path, const SolveFileOptions& opts = {});

/// Data rows of a report CSV; the schema line is skipped and the header row
/// is returned through `header` when given.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>* header = nullptr);

}  // namespace sinrgp
