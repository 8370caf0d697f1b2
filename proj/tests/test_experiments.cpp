#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pc_testing.hpp"
#include "sinrgp/experiments.hpp"

using namespace sinrgp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sinrgp_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("random initial points are seeded and in the box") {
  const auto prob = testing::example1();
  const auto a = random_initial_points(prob, 50, 4);
  const auto b = random_initial_points(prob, 50, 4);
  const auto c = random_initial_points(prob, 50, 5);
  CHECK(a.size() == 50);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] == b[k]);
    CHECK((a[k].array() >= prob.p_min.array()).all());
    CHECK((a[k].array() <= prob.p_max.array()).all());
  }
  CHECK(a[0] != c[0]);
}

TEST_CASE("case 1") {
  const auto prob = testing::example1();
  SUBCASE("starting at the oracle optimum always succeeds") {
    Case1Options opts;
    opts.grid_points = 16;
    const OracleResult oracle = grid_search(prob, 16);
    opts.initial_points = {oracle.p_best, oracle.p_best};
    const Case1Summary s = run_case1(prob, opts);
    CHECK(s.runs.size() == 2);
    CHECK(s.success_fraction == 1.0);
    CHECK(s.best_objective >= oracle.objective * (1.0 - 1e-3));
  }
  SUBCASE("worker count does not change results") {
    Case1Options opts;
    opts.inits = 12;
    opts.grid_points = 16;
    const Case1Summary one = run_case1(prob, opts);
    opts.workers = 4;
    const Case1Summary four = run_case1(prob, opts);
    REQUIRE(one.runs.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) {
      CHECK(one.runs[k].p_star == four.runs[k].p_star);
      CHECK(one.runs[k].success == four.runs[k].success);
    }
    CHECK(one.success_fraction == four.success_fraction);
    CHECK(one.oracle.objective == doctest::Approx(testing::kExample1Grid16).epsilon(1e-12));
    for (const auto& r : one.runs) {
      CHECK(r.objective <= testing::kExample1Grid64 * (1.0 + 1e-3));
      CHECK(r.success == (r.relative_gap <= 1e-3));
    }
  }
}

TEST_CASE("case 1 csv") {
  const auto prob = testing::example1();
  Case1Options opts;
  opts.inits = 5;
  opts.grid_points = 8;
  const Case1Summary s = run_case1(prob, opts);
  const fs::path file = scratch("case1") / "runs.csv";
  write_case1_csv(s, file);
  CHECK(slurp(file).rfind("# schema: ", 0) == 0);
  std::vector<std::string> header;
  const auto rows = read_csv(file, &header);
  CHECK(rows.size() == 5);
  CHECK(header.front() == "init");
  const auto col = std::find(header.begin(), header.end(), "objective_bps_hz") - header.begin();
  REQUIRE(col < static_cast<long>(header.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(std::stod(rows[k][static_cast<std::size_t>(col)]) == s.runs[k].objective);
  }
}

TEST_CASE("solve_file writes a non-decreasing trajectory") {
  const fs::path dir = scratch("solve");
  SolveFileOptions opts;
  opts.out_dir = dir;
  const ScaReport rep = solve_file("data/example1.json", opts);
  CHECK(rep.converged);
  std::vector<std::string> header;
  const auto traj = read_csv(dir / "trajectory.csv", &header);
  CHECK(header == std::vector<std::string>{"iteration", "step_norm_w", "weighted_sum_rate_bps_hz"});
  REQUIRE(traj.size() == rep.trajectory.size());
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(std::stod(traj[k][2]) >= std::stod(traj[k - 1][2]));
  const auto alloc = read_csv(dir / "allocation.csv", &header);
  CHECK(alloc.size() == 4);
  CHECK(header.front() == "link");
  CHECK(std::stod(alloc[0][1]) == rep.p_star(0));
}

TEST_CASE("case 2 mode names") {
  CHECK(parse_case2_mode("no_qos") == Case2Mode::NoQos);
  CHECK(parse_case2_mode("olpc-qos") == Case2Mode::OlpcQos);
  CHECK(parse_case2_mode("olpc-only") == Case2Mode::OlpcOnly);
  for (Case2Mode m : {Case2Mode::NoQos, Case2Mode::OlpcQos, Case2Mode::OlpcOnly}) {
    CHECK(parse_case2_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_case2_mode("max"), std::invalid_argument);
}

TEST_CASE("case 2 on a small network") {
  Case2Options opts;
  opts.realizations = 2;
  opts.network.site_rows = opts.network.site_cols = 2;
  opts.sca.max_iterations = 15;
  const Case2Summary s = run_case2(opts);
  REQUIRE(s.realizations.size() == 2);
  CHECK(s.skipped == 0);
  for (const auto& r : s.realizations) {
    const auto* none = r.find(Case2Mode::NoQos);
    const auto* qos = r.find(Case2Mode::OlpcQos);
    const auto* olpc = r.find(Case2Mode::OlpcOnly);
    REQUIRE(none);
    REQUIRE(qos);
    REQUIRE(olpc);
    CHECK(qos->rates.size() == 12);
    CHECK(qos->average_rate >= olpc->average_rate);
    CHECK((qos->rates.array() >= olpc->rates.array() * (1.0 - 1e-6)).all());
  }
  CHECK(s.realizations[1].seed == 1);

  const fs::path a = scratch("case2a"), b = scratch("case2b");
  write_case2_csv(s, a / "r.csv", a / "rates.csv", a / "cdf.csv");
  write_case2_csv(run_case2(opts), b / "r.csv", b / "rates.csv", b / "cdf.csv");
  for (const char* f : {"r.csv", "rates.csv", "cdf.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(read_csv(a / "rates.csv").size() == 2 * 3 * 12);
}
