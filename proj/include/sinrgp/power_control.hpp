#pragma once

// Weighted-sum-rate power control in interference-limited networks.
//
// Rates follow R_i = a * log2(1 + b * sinr_i). Maximizing sum_i w_i R_i is
// recast with auxiliary variables s (per-link effective SINR) and r:
//
//   minimize    1/r
//   subject to  r / prod_i (1 + s_i)^{w_i} <= 1
//               s_i (n_i + sum_{j != i} p_j G_ji) / (b G_ii p_i) <= 1
//               b gamma_min_i / s_i <= 1            (links with a QoS floor)
//               p_min_i / p_i <= 1,   p_i / p_max_i <= 1
//
// The first constraint is not a posynomial. Each successive step replaces
// prod (1 + s_i)^{w_i} by a monomial that under-estimates it, touches it at
// the current SINRs and matches its gradient there, then solves the GP.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sinrgp/gp_solver.hpp"
#include "sinrgp/posynomial.hpp"

namespace sinrgp {

/// Floor applied to expansion-point SINRs before condensation.
inline constexpr double kSinrFloor = 1e-12;
/// Floor applied to zero cross gains so every SINR constraint stays a posynomial.
inline constexpr double kGainFloor = 1e-30;
/// Default lower power bound in watts (GP variables must stay positive).
inline constexpr double kDefaultMinPower = 1e-12;

struct PowerControlProblem {
  /// gain(i, j): linear gain from transmitter i to receiver j.
  Eigen::MatrixXd gain;
  Eigen::VectorXd noise;      // W
  Eigen::VectorXd weights;
  Eigen::VectorXd p_min;      // W
  Eigen::VectorXd p_max;      // W
  Eigen::VectorXd gamma_min;  // linear SINR floors, 0 for none
  double rate_a = 1.0;
  double rate_b = 1.0;

  Eigen::Index size() const noexcept { return gain.rows(); }
  bool has_qos() const noexcept { return (gamma_min.array() > 0.0).any(); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// gamma_i = p_i G_ii / (n_i + sum_{j != i} p_j G_ji)
Eigen::VectorXd sinr(const PowerControlProblem& prob, const Eigen::VectorXd& p);
/// bit/s/Hz per link.
Eigen::VectorXd rates(const PowerControlProblem& prob, const Eigen::VectorXd& p);
double weighted_sum_rate(const PowerControlProblem& prob, const Eigen::VectorXd& p);

/// SINR needed for `rate` under R = a log2(1 + b gamma).
double sinr_for_rate(double rate, double rate_a, double rate_b);

/// prod_i (1 + s_i)^{w_i}
double rate_product(const Eigen::VectorXd& s, const Eigen::VectorXd& w);

/// Monomial c * prod_i s_i^{exponents_i} tangent to prod_i (1 + s_i)^{w_i}.
struct CondensedMonomial {
  double coefficient = 1.0;
  Eigen::VectorXd exponents;

  /// Number of values computed to build the approximation (N exponents + c).
  std::size_t stored_quantities() const noexcept {
    return static_cast<std::size_t>(exponents.size()) + 1;
  }
  double eval(const Eigen::VectorXd& s) const;
  /// Gradient with respect to s.
  Eigen::VectorXd gradient(const Eigen::VectorXd& s) const;
  /// Same function as a Monomial over variables first, first+1, ...
  Monomial as_monomial(VarId first) const;
};

/// Per-factor condensation: 1 + s_i ~ c_i s_i^{d_i} with d_i = s0_i / (1 + s0_i)
/// and c_i = (1 + s0_i) s0_i^{-d_i}; the product is c = prod c_i^{w_i} with
/// exponents w_i d_i. Throws DomainError for a non-positive s0 entry.
CondensedMonomial condense_proposed(const Eigen::VectorXd& s0, const Eigen::VectorXd& w);

/// Arithmetic-geometric mean condensation of a posynomial at x0:
/// prod_k (u_k(x) / alpha_k)^{alpha_k} with alpha_k = u_k(x0) / g(x0).
/// Terms whose weight underflows to zero are dropped.
Monomial condense_agm(const Posynomial& g, std::span<const double> x0);

/// Variable numbering of the standard-form GP: p_0..p_{N-1}, s_0..s_{N-1}, r.
struct StandardFormLayout {
  std::uint32_t links = 0;

  VarId power(Eigen::Index i) const { return VarId{static_cast<std::uint32_t>(i)}; }
  VarId aux(Eigen::Index i) const { return VarId{links + static_cast<std::uint32_t>(i)}; }
  VarId rate() const { return VarId{2 * links}; }
  std::uint32_t var_count() const { return 2 * links + 1; }
};

/// Constraint order: condensed rate constraint, N SINR constraints, QoS rows
/// for links with gamma_min > 0, N lower bounds, N upper bounds.
GpProblem build_standard_form(const PowerControlProblem& prob, const CondensedMonomial& condensed);

struct ScaOptions {
  double eps = 1e-6;  // W, Euclidean norm of the power update
  int max_iterations = 50;
  SolverOptions gp;
};

struct ScaStep {
  Eigen::VectorXd p;
  double weighted_sum_rate = 0.0;
  double step_norm = 0.0;  // ||p - p_previous||, 0 for the initial point
};

struct ScaReport {
  Eigen::VectorXd p_star;
  /// trajectory[0] is the initial allocation.
  std::vector<ScaStep> trajectory;
  bool converged = false;
  int iterations = 0;
};

class InfeasibleInitial : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleProblem : public std::runtime_error {
 public:
  InfeasibleProblem(const std::string& what, double slack)
      : std::runtime_error(what), slack_(slack) {}
  /// Smallest achievable common QoS scaling t (feasible iff t <= 1).
  double slack() const noexcept { return slack_; }

 private:
  double slack_;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, GpStatus status, ScaReport partial)
      : std::runtime_error(what), status_(status), partial_(std::move(partial)) {}
  GpStatus status() const noexcept { return status_; }
  const ScaReport& partial() const noexcept { return partial_; }

 private:
  GpStatus status_;
  ScaReport partial_;
};

/// Successive condensation: s0 <- b * sinr(p), condense, solve the GP,
/// update p, until ||p_new - p_old|| < eps or the iteration cap.
ScaReport sca_solve(const PowerControlProblem& prob, const Eigen::VectorXd& p_init,
                    const ScaOptions& opts = {});

/// True when p meets the power bounds and QoS floors within `tol` (relative).
bool is_feasible(const PowerControlProblem& prob, const Eigen::VectorXd& p, double tol);

/// A feasible starting allocation. Returns `candidate` unchanged when it is
/// feasible, p_max when there are no QoS floors, and otherwise the solution of
/// min t s.t. sinr_i >= gamma_min_i / t. Throws InfeasibleProblem when t* > 1.
Eigen::VectorXd feasible_init(const PowerControlProblem& prob, const SolverOptions& opts = {},
                              const std::optional<Eigen::VectorXd>& candidate = std::nullopt);

/// Links transmitting at no more than twice their lower bound.
std::vector<bool> muted_links(const PowerControlProblem& prob, const Eigen::VectorXd& p);

}  // namespace sinrgp
