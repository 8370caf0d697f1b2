#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pc_testing.hpp"
#include "sinrgp/oracle.hpp"
#include "sinrgp/power_control.hpp"

using namespace sinrgp;
using Eigen::VectorXd;

namespace {

PowerControlProblem single_link(double gain = 1.0) {
  PowerControlProblem prob;
  prob.gain = Eigen::MatrixXd::Constant(1, 1, gain);
  prob.noise = VectorXd::Constant(1, 1e-7);
  prob.weights = VectorXd::Ones(1);
  prob.p_min = VectorXd::Constant(1, 1e-6);
  prob.p_max = VectorXd::Constant(1, 1e-3);
  prob.gamma_min = VectorXd::Zero(1);
  return prob;
}

PowerControlProblem symmetric_pair() {
  PowerControlProblem prob;
  prob.gain = Eigen::MatrixXd::Ones(2, 2);
  prob.noise = VectorXd::Constant(2, 1e-7);
  prob.weights = VectorXd::Ones(2);
  prob.p_min = VectorXd::Constant(2, kDefaultMinPower);
  prob.p_max = VectorXd::Constant(2, 1e-3);
  prob.gamma_min = VectorXd::Zero(2);
  return prob;
}

double g_of(const VectorXd& s, const VectorXd& w) { return rate_product(s, w); }

}  // namespace

TEST_CASE("sinr") {
  SUBCASE("single link") {
    PowerControlProblem prob = single_link(0.5);
    CHECK(sinr(prob, VectorXd::Constant(1, 1e-3))(0) == doctest::Approx(5000.0));
  }
  SUBCASE("two links") {
    PowerControlProblem prob = symmetric_pair();
    prob.gain << 0.4, 0.1, 0.2, 0.3;
    const VectorXd g = sinr(prob, VectorXd::Constant(2, 1e-3));
    CHECK(g(0) == doctest::Approx(4e-4 / (1e-7 + 2e-4)));
    CHECK(g(0) == doctest::Approx(1.99900).epsilon(1e-5));
    CHECK(g(1) == doctest::Approx(3e-4 / (1e-7 + 1e-4)));
  }
  SUBCASE("example 1 at full power") {
    const auto prob = testing::example1();
    const VectorXd g = sinr(prob, prob.p_max);
    CHECK(g(0) == doctest::Approx(23.261372397841175).epsilon(1e-13));
    CHECK(g(1) == doctest::Approx(63.70448548812666).epsilon(1e-13));
    CHECK(g(2) == doctest::Approx(1.9894295041193844).epsilon(1e-13));
    CHECK(g(3) == doctest::Approx(0.6483943546737575).epsilon(1e-13));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(sinr(testing::example1(), VectorXd::Ones(3)), std::invalid_argument);
  }
}

TEST_CASE("rates") {
  PowerControlProblem prob = single_link();
  // gamma = 1 at p = n / G
  CHECK(rates(prob, VectorXd::Constant(1, 1e-7))(0) == doctest::Approx(1.0));
  prob.rate_a = 0.75;
  prob.rate_b = 0.9;
  prob.gain(0, 0) = 1e-30;
  CHECK(rates(prob, VectorXd::Constant(1, 1e-12))(0) == doctest::Approx(0.0));
  CHECK(sinr_for_rate(1.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(sinr_for_rate(0.75 * std::log2(1.0 + 0.9 * 7.0), 0.75, 0.9) == doctest::Approx(7.0));

  const auto ex1 = testing::example1();
  CHECK(weighted_sum_rate(ex1, ex1.p_max) == doctest::Approx(2.5363743858049896).epsilon(1e-13));
}

TEST_CASE("problem validation names the field") {
  auto prob = testing::example1();
  prob.gain(1, 2) = -0.1;
  CHECK_THROWS_WITH_AS(prob.validate(), doctest::Contains("G"), std::invalid_argument);
  prob = testing::example1();
  prob.p_max(0) = 1e-13;
  CHECK_THROWS_WITH_AS(prob.validate(), doctest::Contains("p_max_watts"), std::invalid_argument);
  prob = testing::example1();
  prob.weights.setZero();
  CHECK_THROWS_WITH_AS(prob.validate(), doctest::Contains("w"), std::invalid_argument);
  prob = testing::example1();
  prob.rate_b = 1.5;
  CHECK_THROWS_AS(prob.validate(), std::invalid_argument);
}

TEST_CASE("condense_proposed closed forms") {
  SUBCASE("s0 = 1") {
    const auto c = condense_proposed(VectorXd::Ones(1), VectorXd::Ones(1));
    CHECK(c.exponents(0) == doctest::Approx(0.5));
    CHECK(c.coefficient == doctest::Approx(2.0));
    CHECK(c.eval(VectorXd::Constant(1, 9.0)) == doctest::Approx(6.0));
  }
  SUBCASE("s0 = 3") {
    const auto c = condense_proposed(VectorXd::Constant(1, 3.0), VectorXd::Ones(1));
    CHECK(c.exponents(0) == doctest::Approx(0.75));
    CHECK(c.coefficient == doctest::Approx(4.0 * std::pow(3.0, -0.75)));
  }
  SUBCASE("tangent point value") {
    const auto c = condense_proposed(VectorXd::Ones(2), VectorXd::Constant(2, 0.5));
    CHECK(c.eval(VectorXd::Ones(2)) == doctest::Approx(2.0));
    CHECK(c.stored_quantities() == 3);
  }
  SUBCASE("non-positive expansion point") {
    CHECK_THROWS_AS(condense_proposed(VectorXd::Zero(1), VectorXd::Ones(1)), DomainError);
  }
}

TEST_CASE("condense_agm") {
  const VarId s{0};
  const Posynomial one_plus_s{Monomial{}, Monomial::variable(s)};
  SUBCASE("two-term AGM at s0 = 1") {
    const Monomial m = condense_agm(one_plus_s, std::vector{1.0});
    CHECK(m.coefficient() == doctest::Approx(2.0));
    CHECK(m.exponent_of(s) == doctest::Approx(0.5));
  }
  SUBCASE("matches the per-factor closed form at s0 = 3") {
    const Monomial agm = condense_agm(one_plus_s, std::vector{3.0});
    const auto proposed = condense_proposed(VectorXd::Constant(1, 3.0), VectorXd::Ones(1));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e3));
    for (int k = 0; k < 100; ++k) {
      const double v = std::exp(logu(rng));
      const double a = agm.eval(std::vector{v});
      const double b = proposed.eval(VectorXd::Constant(1, v));
      CHECK(std::abs(a - b) <= 1e-12 * b);
    }
  }
  SUBCASE("expanded two-link product is dominated") {
    const Posynomial g = posy_mul(one_plus_s, Posynomial{Monomial{}, Monomial::variable(VarId{1})});
    const Monomial m = condense_agm(g, std::vector{1.0, 1.0});
    CHECK(m.eval(std::vector{1.0, 1.0}) == doctest::Approx(4.0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e3));
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
      const std::vector<double> pt{std::exp(logu(rng)), std::exp(logu(rng))};
      if (m.eval(pt) > g.eval(pt) * (1.0 + 1e-12)) ++violations;
    }
    CHECK(violations == 0);
  }
  SUBCASE("zero-weight terms are dropped") {
    const Posynomial g{Monomial{}, Monomial::variable(s, 1.0, 1e-300)};
    const Monomial m = condense_agm(g, std::vector{1e-300});
    CHECK(m.eval(std::vector{5.0}) == doctest::Approx(1.0));
  }
}

TEST_CASE("property: condensation conditions") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e3));
  std::uniform_real_distribution<double> wu(0.0, 1.0);
  int failures = 0;
  for (int draw = 0; draw < 500; ++draw) {
    const Eigen::Index n = 1 + draw % 8;
    VectorXd s0(n), s(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s0(i) = std::exp(logu(rng));
      s(i) = std::exp(logu(rng));
      w(i) = wu(rng);
    }
    const auto c = condense_proposed(s0, w);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(c.exponents(i) >= 0.0 && c.exponents(i) < w(i) + 1e-300)) ++failures;
    }
    if (c.eval(s) > g_of(s, w) * (1.0 + 1e-12)) ++failures;                               // (a)
    if (std::abs(c.eval(s0) - g_of(s0, w)) > 1e-12 * g_of(s0, w)) ++failures;             // (b)
    const VectorXd grad = c.gradient(s0);
    for (Eigen::Index i = 0; i < n; ++i) {                                                  // (c)
      const double fd = testing::rate_product_central_difference(s0, w, i);
      if (std::abs(grad(i) - fd) > 1e-6 * std::max(std::abs(fd), 1e-300)) ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("standard form layout") {
  SUBCASE("single link without QoS") {
    const auto prob = single_link();
    const auto c = condense_proposed(VectorXd::Ones(1), prob.weights);
    const GpProblem gp = build_standard_form(prob, c);
    CHECK(gp.var_count == 3);
    CHECK(gp.inequalities.size() == 4);
  }
  SUBCASE("example 1 without QoS") {
    const auto prob = testing::example1();
    const auto c = condense_proposed(sinr(prob, prob.p_max), prob.weights);
    const GpProblem gp = build_standard_form(prob, c);
    CHECK(gp.var_count == 9);
    CHECK(gp.inequalities.size() == 13);
    CHECK(gp.equalities.empty());
  }
  SUBCASE("QoS rows only for positive floors") {
    auto prob = testing::example1();
    prob.gamma_min << 0.0, 0.5, 0.0, 0.1;
    const auto c = condense_proposed(sinr(prob, prob.p_max), prob.weights);
    CHECK(build_standard_form(prob, c).inequalities.size() == 15);
  }
  SUBCASE("SINR constraint is tight at s = b * sinr(p)") {
    auto prob = testing::example1();
    prob.rate_b = 0.8;
    std::mt19937_64 rng(4);
    const VectorXd p = testing::uniform_power(rng, prob);
    const VectorXd s = prob.rate_b * sinr(prob, p);
    const auto c = condense_proposed(s, prob.weights);
    const GpProblem gp = build_standard_form(prob, c);
    const StandardFormLayout layout{4};
    std::vector<double> x(layout.var_count(), 1.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
      x[layout.power(i).index] = p(i);
      x[layout.aux(i).index] = s(i);
    }
    for (Eigen::Index i = 0; i < 4; ++i) {
      CHECK(gp.inequalities[1 + static_cast<std::size_t>(i)].eval(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("sca: single link goes to full power") {
  const auto prob = single_link();
  const ScaReport rep = sca_solve(prob, VectorXd::Constant(1, 2e-6));
  CHECK(rep.converged);
  CHECK(rep.p_star(0) == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("sca: symmetric high-interference pair ends at a binary allocation") {
  const auto prob = symmetric_pair();
  const OracleResult vertex = vertex_enumeration(prob);
  const ScaReport rep = sca_solve(prob, Eigen::Vector2d(0.9e-3, 0.4e-3));
  CHECK(rep.converged);
  CHECK(rep.p_star(0) == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(rep.p_star(1) <= 1e-9);
  // Either vertex is optimal; compare against the one the run selected.
  const VectorXd mirrored = vertex.p_best.reverse();
  const double distance = std::min((rep.p_star - vertex.p_best).norm(), (rep.p_star - mirrored).norm());
  CHECK(distance < ScaOptions{}.eps);
  CHECK(rep.trajectory.back().weighted_sum_rate <= vertex.objective + 1e-12);
  const auto muted = muted_links(prob, rep.p_star);
  CHECK_FALSE(muted[0]);
}

TEST_CASE("sca: infeasible initialization is rejected") {
  auto prob = testing::example1();
  CHECK_THROWS_AS(sca_solve(prob, prob.p_max * 1.1), InfeasibleInitial);
  prob.gamma_min = VectorXd::Constant(4, 100.0);
  CHECK_THROWS_AS(sca_solve(prob, prob.p_max), InfeasibleInitial);
}

TEST_CASE("property: sca trajectories are monotone and feasible") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 4 : 8);
    const auto prob = testing::random_problem(rng, n);
    const VectorXd p0 = testing::uniform_power(rng, prob);
    const ScaReport rep = sca_solve(prob, p0);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 50);
    CHECK(rep.trajectory.front().weighted_sum_rate == doctest::Approx(weighted_sum_rate(prob, p0)));
    for (std::size_t k = 1; k < rep.trajectory.size(); ++k) {
      CHECK(rep.trajectory[k].weighted_sum_rate >= rep.trajectory[k - 1].weighted_sum_rate - 1e-9);
      CHECK(is_feasible(prob, rep.trajectory[k].p, 1e-8));
    }
  }
}

TEST_CASE("sca: converged point is a fixed point of the condensed GP") {
  const auto prob = testing::example1();
  std::mt19937_64 rng(8);
  const ScaOptions opts;
  for (int trial = 0; trial < 5; ++trial) {
    const ScaReport rep = sca_solve(prob, testing::uniform_power(rng, prob), opts);
    REQUIRE(rep.converged);
    const VectorXd s0 = sinr(prob, rep.p_star).cwiseMax(kSinrFloor);
    const GpProblem gp = build_standard_form(prob, condense_proposed(s0, prob.weights));
    const GpSolution sol = solve(gp, opts.gp);
    REQUIRE(sol.status == GpStatus::Optimal);
    CHECK(sol.kkt_residual <= opts.gp.kkt_tol);
    VectorXd moved(4);
    for (int i = 0; i < 4; ++i) moved(i) = sol.x[static_cast<std::size_t>(i)];
    CHECK((moved - rep.p_star).norm() < opts.eps);
  }
}

TEST_CASE("sca: converged SINRs are invariant to units") {
  const auto prob = testing::example1();
  const VectorXd p0(Eigen::Vector4d(0.3e-3, 0.5e-3, 0.2e-3, 0.6e-3));
  const ScaReport base = sca_solve(prob, p0);
  const VectorXd ref = sinr(prob, base.p_star);

  SUBCASE("gains and noise scaled together") {
    auto scaled = prob;
    scaled.gain *= 1e3;
    scaled.noise *= 1e3;
    const ScaReport rep = sca_solve(scaled, p0);
    const VectorXd g = sinr(scaled, rep.p_star);
    CHECK(((g - ref).array().abs() <= 1e-6 * ref.array().abs()).all());
  }
  SUBCASE("power in milliwatts") {
    auto scaled = prob;
    scaled.noise *= 1e3;
    scaled.p_min *= 1e3;
    scaled.p_max *= 1e3;
    ScaOptions opts;
    opts.eps *= 1e3;
    const ScaReport rep = sca_solve(scaled, p0 * 1e3, opts);
    const VectorXd g = sinr(scaled, rep.p_star);
    CHECK(((g - ref).array().abs() <= 1e-6 * ref.array().abs()).all());
  }
}

TEST_CASE("sca honours QoS floors") {
  auto prob = testing::example1();
  const VectorXd reference(Eigen::Vector4d(0.35e-3, 0.4e-3, 0.45e-3, 0.5e-3));
  prob.gamma_min = sinr(prob, reference);
  const ScaReport rep = sca_solve(prob, reference);
  const VectorXd floor_rates = rates(prob, reference);
  const VectorXd final_rates = rates(prob, rep.p_star);
  CHECK(((final_rates - floor_rates).array() >= -1e-9).all());
  CHECK(rep.trajectory.back().weighted_sum_rate >= weighted_sum_rate(prob, reference));
}

TEST_CASE("feasible_init") {
  SUBCASE("no QoS gives full power") {
    const auto prob = testing::example1();
    CHECK(feasible_init(prob) == prob.p_max);
  }
  SUBCASE("a self-consistent candidate is returned unchanged") {
    auto prob = testing::example1();
    const VectorXd alloc(Eigen::Vector4d(0.1e-3, 0.2e-3, 0.3e-3, 0.4e-3));
    prob.gamma_min = sinr(prob, alloc);
    CHECK(feasible_init(prob, {}, alloc) == alloc);
  }
  SUBCASE("floors met by the auxiliary problem") {
    auto prob = testing::example1();
    prob.gamma_min << 1.0, 1.0, 1.0, 0.2;
    const VectorXd p = feasible_init(prob);
    CHECK(is_feasible(prob, p, 0.0));
  }
  SUBCASE("contradictory floors") {
    auto prob = symmetric_pair();
    prob.gamma_min = VectorXd::Constant(2, 10.0);
    CHECK_THROWS_AS(grid_search(prob, 64), std::runtime_error);
    try {
      (void)feasible_init(prob);
      FAIL("expected InfeasibleProblem");
    } catch (const InfeasibleProblem& e) {
      CHECK(e.slack() > 1.0);
    }
  }
}
