#pragma once

// Standard-form geometric programs and a primal barrier solver.
//
//   minimize    f0(x)                      f0 posynomial
//   subject to  fi(x) <= 1,  i = 1..m      fi posynomial
//               hj(x)  = 1,  j = 1..k      hj monomial
//
// Under y = log x each posynomial becomes log-sum-exp of affine functions of
// y and each monomial equality becomes a linear equality, so the problem is
// convex. The solver eliminates the equalities, finds a strictly feasible
// point with a slack-minimizing phase 1, then follows the central path.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sinrgp/posynomial.hpp"

namespace sinrgp {

struct GpProblem {
  Posynomial objective;
  std::vector<Posynomial> inequalities;  // each <= 1
  std::vector<Monomial> equalities;      // each == 1
  std::uint32_t var_count = 0;

  /// Throws std::invalid_argument if var_count is zero or any expression
  /// references a variable id >= var_count.
  void validate() const;
};

/// log(sum_k exp(a_k . y + b_k)) over the variables the posynomial touches.
class LogSumExp {
 public:
  explicit LogSumExp(const Posynomial& p);

  /// Global indices of the variables this block depends on, ascending.
  std::span<const Eigen::Index> vars() const noexcept { return vars_; }
  /// One row per term, one column per entry of vars().
  const Eigen::MatrixXd& exponents() const noexcept { return exponents_; }
  const Eigen::VectorXd& log_coefficients() const noexcept { return log_coefficients_; }

  double value(const Eigen::VectorXd& y) const;
  /// Full-length gradient.
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
  /// Full-size Hessian.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& y, Eigen::Index var_count) const;

  /// Value, local gradient and (optionally) local Hessian in vars() coordinates.
  double evaluate_local(const Eigen::VectorXd& y, Eigen::VectorXd& grad,
                        Eigen::MatrixXd* hess) const;

 private:
  std::vector<Eigen::Index> vars_;
  Eigen::MatrixXd exponents_;
  Eigen::VectorXd log_coefficients_;
  // Row-compressed copy of exponents_, used when it is mostly zeros.
  bool sparse_ = false;
  std::vector<Eigen::Index> row_start_;
  std::vector<Eigen::Index> entry_col_;
  std::vector<double> entry_val_;
};

struct ConvexForm {
  Eigen::Index var_count = 0;
  LogSumExp objective;
  std::vector<LogSumExp> inequalities;  // each <= 0
  Eigen::MatrixXd eq_matrix;            // eq_matrix * y + eq_offset = 0
  Eigen::VectorXd eq_offset;
};

ConvexForm to_convex(const GpProblem& gp);

enum class GpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

std::string_view to_string(GpStatus status);

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double kkt_tol = 1e-8;
  /// Cap on Newton steps across both phases.
  int max_iterations = 200;
  double initial_t = 1.0;
  double mu = 20.0;

  void validate() const;
};

struct GpSolution {
  std::vector<double> x;
  double objective_value = 0.0;
  GpStatus status = GpStatus::NumericalFailure;
  double kkt_residual = 0.0;
  int iterations = 0;
  /// Inequality multipliers, one per constraint.
  std::vector<double> multipliers;
  /// Smallest achieved max_i log fi(x) found by phase 1. Positive means the
  /// constraints could not be met; zero when phase 1 was not needed.
  double phase1_slack = 0.0;
};

/// `initial_x`, when non-empty, replaces the default start x = 1 (it need
/// not be feasible).
GpSolution solve(const GpProblem& gp, const SolverOptions& opts = {},
                 std::span<const double> initial_x = {});

/// Max-norm of the log-domain KKT violations at x: stationarity (projected
/// onto the equality null space), complementarity, primal feasibility of
/// inequalities and equalities, and dual feasibility (multipliers >= 0).
double kkt_residual(const GpProblem& gp, std::span<const double> x,
                    std::span<const double> multipliers);

}  // namespace sinrgp
