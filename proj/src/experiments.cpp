#include "sinrgp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sinrgp/problem_io.hpp"
#include "sinrgp/rng.hpp"

namespace sinrgp {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, std::string_view schema) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# schema: " << schema << '\n';
  return out;
}

int count_muted(const PowerControlProblem& prob, const VectorXd& p) {
  const auto muted = muted_links(prob, p);
  return static_cast<int>(std::count(muted.begin(), muted.end(), true));
}

}  // namespace

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<VectorXd> random_initial_points(const PowerControlProblem& prob, int count,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<VectorXd> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    VectorXd p(prob.size());
    for (Index i = 0; i < prob.size(); ++i) {
      p(i) = prob.p_min(i) + uniform01(rng) * (prob.p_max(i) - prob.p_min(i));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Case1Summary run_case1(const PowerControlProblem& prob, const Case1Options& opts) {
  prob.validate();
  if (opts.initial_points.empty() && opts.inits < 1) throw std::invalid_argument("inits must be >= 1");
  Case1Summary summary;
  summary.oracle = grid_search(prob, opts.grid_points, opts.workers);
  const std::vector<VectorXd> starts = opts.initial_points.empty()
                                           ? random_initial_points(prob, opts.inits, opts.seed)
                                           : opts.initial_points;
  summary.runs.resize(starts.size());
  parallel_for(starts.size(), opts.workers, [&](std::size_t k) {
    const ScaReport rep = sca_solve(prob, starts[k], opts.sca);
    Case1Run& run = summary.runs[k];
    run.p_init = starts[k];
    run.p_star = rep.p_star;
    run.objective = rep.trajectory.back().weighted_sum_rate;
    run.iterations = rep.iterations;
    run.converged = rep.converged;
    run.relative_gap = (summary.oracle.objective - run.objective) / summary.oracle.objective;
    run.success = run.relative_gap <= opts.success_tol;
  });
  int successes = 0;
  summary.best_objective = -std::numeric_limits<double>::infinity();
  for (const auto& run : summary.runs) {
    successes += run.success ? 1 : 0;
    summary.best_objective = std::max(summary.best_objective, run.objective);
    summary.max_iterations = std::max(summary.max_iterations, run.iterations);
  }
  summary.success_fraction = static_cast<double>(successes) / static_cast<double>(summary.runs.size());
  return summary;
}

std::string_view to_string(Case2Mode mode) {
  switch (mode) {
    case Case2Mode::NoQos: return "no_qos";
    case Case2Mode::OlpcQos: return "olpc_qos";
    case Case2Mode::OlpcOnly: return "olpc_only";
  }
  return "unknown";
}

Case2Mode parse_case2_mode(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (Case2Mode m : {Case2Mode::NoQos, Case2Mode::OlpcQos, Case2Mode::OlpcOnly}) {
    if (key == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected no-qos, olpc-qos or olpc-only)");
}

const Case2Outcome* Case2Realization::find(Case2Mode mode) const {
  for (const auto& o : outcomes) {
    if (o.mode == mode) return &o;
  }
  return nullptr;
}

Case2Realization run_case2_realization(const Scenario& scenario, std::uint64_t seed,
                                       const std::vector<Case2Mode>& modes, const ScaOptions& sca) {
  Case2Realization out;
  out.seed = seed;
  const PowerControlProblem prob = gain_matrix(scenario, draw_realization(scenario, seed));
  const VectorXd p_olpc = olpc_allocation(scenario.config, prob);

  for (Case2Mode mode : modes) {
    Case2Outcome o;
    o.mode = mode;
    switch (mode) {
      case Case2Mode::OlpcOnly:
        o.p = p_olpc;
        break;
      case Case2Mode::NoQos: {
        const ScaReport rep = sca_solve(prob, feasible_init(prob, sca.gp), sca);
        o.p = rep.p_star;
        o.iterations = rep.iterations;
        o.converged = rep.converged;
        break;
      }
      case Case2Mode::OlpcQos: {
        PowerControlProblem qos = prob;
        qos.gamma_min = sinr(prob, p_olpc);
        const ScaReport rep = sca_solve(qos, feasible_init(qos, sca.gp, p_olpc), sca);
        o.p = rep.p_star;
        o.iterations = rep.iterations;
        o.converged = rep.converged;
        break;
      }
    }
    o.rates = rates(prob, o.p);
    o.average_rate = o.rates.mean();
    o.muted = count_muted(prob, o.p);
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

Case2Summary run_case2(const Case2Options& opts) {
  if (opts.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (opts.modes.empty()) throw std::invalid_argument("at least one mode is required");
  const Scenario scenario = build_hex_network(opts.network);
  Case2Summary summary;
  summary.realizations.resize(static_cast<std::size_t>(opts.realizations));
  parallel_for(summary.realizations.size(), opts.workers, [&](std::size_t r) {
    const std::uint64_t seed = opts.seed + r;
    Case2Realization& slot = summary.realizations[r];
    try {
      slot = run_case2_realization(scenario, seed, opts.modes, opts.sca);
    } catch (const InfeasibleProblem& e) {
      slot = {};
      slot.seed = seed;
      slot.infeasible = true;
      slot.error = e.what();
    } catch (const SolverFailure& e) {
      slot = {};
      slot.seed = seed;
      slot.error = e.what();
    }
    slot.index = static_cast<int>(r);
  });
  for (const auto& r : summary.realizations) {
    if (!r.error.empty()) ++summary.skipped;
  }
  return summary;
}

void write_case1_csv(const Case1Summary& summary, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path, "case1_runs v1");
  const Index n = summary.runs.empty() ? 0 : summary.runs.front().p_init.size();
  out << "init,converged,iterations,objective_bps_hz,oracle_bps_hz,relative_gap,success";
  for (Index i = 0; i < n; ++i) out << ",p" << i << "_init_w";
  for (Index i = 0; i < n; ++i) out << ",p" << i << "_w";
  out << '\n';
  for (std::size_t k = 0; k < summary.runs.size(); ++k) {
    const auto& r = summary.runs[k];
    out << k << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << fmt(r.objective) << ','
        << fmt(summary.oracle.objective) << ',' << fmt(r.relative_gap) << ',' << (r.success ? 1 : 0);
    for (Index i = 0; i < n; ++i) out << ',' << fmt(r.p_init(i));
    for (Index i = 0; i < n; ++i) out << ',' << fmt(r.p_star(i));
    out << '\n';
  }
}

void write_case2_csv(const Case2Summary& summary, const std::filesystem::path& realizations_path,
                     const std::filesystem::path& rates_path, const std::filesystem::path& cdf_path) {
  {
    std::ofstream out = open_csv(realizations_path, "case2_realizations v1");
    out << "realization,seed,mode,status,avg_rate_bps_hz,iterations,converged,muted\n";
    for (const auto& r : summary.realizations) {
      if (!r.error.empty()) {
        out << r.index << ',' << r.seed << ",all," << (r.infeasible ? "infeasible" : "solver_failure")
            << ",,,,\n";
        continue;
      }
      for (const auto& o : r.outcomes) {
        out << r.index << ',' << r.seed << ',' << to_string(o.mode) << ",ok," << fmt(o.average_rate) << ','
            << o.iterations << ',' << (o.converged ? 1 : 0) << ',' << o.muted << '\n';
      }
    }
  }
  std::map<Case2Mode, std::vector<double>> pooled;
  {
    std::ofstream out = open_csv(rates_path, "case2_rates v1");
    out << "realization,mode,uav,p_w,p_dbm,rate_bps_hz\n";
    for (const auto& r : summary.realizations) {
      for (const auto& o : r.outcomes) {
        for (Index i = 0; i < o.p.size(); ++i) {
          out << r.index << ',' << to_string(o.mode) << ',' << i << ',' << fmt(o.p(i)) << ','
              << fmt(watts_to_dbm(o.p(i))) << ',' << fmt(o.rates(i)) << '\n';
          pooled[o.mode].push_back(o.rates(i));
        }
      }
    }
  }
  std::ofstream out = open_csv(cdf_path, "case2_rate_cdf v1");
  out << "mode,rate_bps_hz,cdf\n";
  for (auto& [mode, values] : pooled) {
    std::sort(values.begin(), values.end());
    for (std::size_t k = 0; k < values.size(); ++k) {
      out << to_string(mode) << ',' << fmt(values[k]) << ','
          << fmt(static_cast<double>(k + 1) / static_cast<double>(values.size())) << '\n';
    }
  }
}

void write_trajectory_csv(const ScaReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path, "sca_trajectory v1");
  out << "iteration,step_norm_w,weighted_sum_rate_bps_hz\n";
  for (std::size_t k = 0; k < report.trajectory.size(); ++k) {
    out << k << ',' << fmt(report.trajectory[k].step_norm) << ','
        << fmt(report.trajectory[k].weighted_sum_rate) << '\n';
  }
}

void write_allocation_csv(const PowerControlProblem& prob, const VectorXd& p,
                          const std::filesystem::path& path) {
  std::ofstream out = open_csv(path, "allocation v1");
  out << "link,p_w,p_dbm,sinr,sinr_db,rate_bps_hz,muted\n";
  const VectorXd g = sinr(prob, p);
  const VectorXd r = rates(prob, p);
  const auto muted = muted_links(prob, p);
  for (Index i = 0; i < p.size(); ++i) {
    out << i << ',' << fmt(p(i)) << ',' << fmt(watts_to_dbm(p(i))) << ',' << fmt(g(i)) << ','
        << fmt(10.0 * std::log10(g(i))) << ',' << fmt(r(i)) << ','
        << (muted[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
}

ScaReport solve_file(const std::filesystem::path& path, const SolveFileOptions& opts) {
  const PowerControlProblem prob = load_problem(path);
  const VectorXd start = feasible_init(prob, opts.sca.gp, opts.p_init);
  const ScaReport rep = sca_solve(prob, start, opts.sca);
  write_trajectory_csv(rep, opts.out_dir / "trajectory.csv");
  write_allocation_csv(prob, rep.p_star, opts.out_dir / "allocation.csv");
  return rep;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      seen_header = true;
      if (header) *header = split(line);
      continue;
    }
    rows.push_back(split(line));
  }
  return rows;
}

}  // namespace sinrgp
