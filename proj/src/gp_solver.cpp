#include "sinrgp/gp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sinrgp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(const VectorXd& v) { return v.allFinite(); }

void check_vars(const Monomial& m, std::uint32_t var_count, const char* where) {
  for (const auto& e : m.exponents()) {
    if (e.first.index >= var_count) {
      throw std::invalid_argument(std::string(where) + " references x" +
                                  std::to_string(e.first.index) + " but var_count is " +
                                  std::to_string(var_count));
    }
  }
}

// y = base + basis * v, with basis an orthonormal basis of the null space of
// the equality matrix. Without equalities the map is the identity.
struct Reduction {
  bool identity = true;
  VectorXd base;
  MatrixXd basis;
  bool consistent = true;

  Index dim(Index n) const { return identity ? n : basis.cols(); }

  VectorXd to_y(const VectorXd& v) const { return identity ? v : VectorXd(base + basis * v); }
  VectorXd from_y(const VectorXd& y) const {
    return identity ? y : VectorXd(basis.transpose() * (y - base));
  }
};

Reduction make_reduction(const ConvexForm& cf) {
  Reduction red;
  if (cf.eq_matrix.rows() == 0) return red;
  red.identity = false;
  Eigen::JacobiSVD<MatrixXd> svd(cf.eq_matrix, Eigen::ComputeThinU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Index rank = svd.rank();
  red.base = svd.solve(-cf.eq_offset);
  const double scale = 1.0 + cf.eq_offset.lpNorm<Eigen::Infinity>();
  red.consistent = (cf.eq_matrix * red.base + cf.eq_offset).lpNorm<Eigen::Infinity>() <= 1e-9 * scale;
  red.basis = svd.matrixV().rightCols(cf.var_count - rank);
  return red;
}

// Log-barrier function over reduced coordinates, optionally with a trailing
// phase-1 slack variable s:
//   phase 2:  t * F0(y) - sum log(relax - Fi(y))
//   phase 1:  t * s     - sum log(s - Fi(y))
class Barrier {
 public:
  Barrier(const ConvexForm& cf, const Reduction& red, bool with_slack, double relax)
      : cf_(cf), red_(red), with_slack_(with_slack), relax_(relax) {}

  /// Confines y to a ball around `center`; keeps the slack problem bounded
  /// when some constraint can be driven to -inf.
  void set_ball(VectorXd center, double radius) {
    ball_center_ = std::move(center);
    ball_r2_ = radius * radius;
  }

  Index dim() const { return red_.dim(cf_.var_count) + (with_slack_ ? 1 : 0); }

  VectorXd y_of(const VectorXd& u) const {
    return red_.to_y(with_slack_ ? VectorXd(u.head(u.size() - 1)) : u);
  }

  /// Returns +inf outside the domain.
  double value(const VectorXd& u, double t) const {
    const VectorXd y = y_of(u);
    const double offset = with_slack_ ? u(u.size() - 1) : relax_;
    double total = with_slack_ ? t * offset : t * cf_.objective.value(y);
    if (ball_r2_ > 0.0) {
      const double room = ball_r2_ - (y - ball_center_).squaredNorm();
      if (!(room > 0.0)) return kInf;
      total -= std::log(room);
    }
    for (const auto& c : cf_.inequalities) {
      const double gap = offset - c.value(y);
      if (!(gap > 0.0)) return kInf;
      total -= std::log(gap);
    }
    return std::isfinite(total) ? total : kInf;
  }

  /// Value, gradient and Hessian; false outside the domain or on non-finite data.
  bool evaluate(const VectorXd& u, double t, double& f, VectorXd& grad, MatrixXd& hess) const {
    const Index n = cf_.var_count;
    const Index full = n + (with_slack_ ? 1 : 0);
    const VectorXd y = y_of(u);
    const double offset = with_slack_ ? u(u.size() - 1) : relax_;

    VectorXd g = VectorXd::Zero(full);
    MatrixXd h = MatrixXd::Zero(full, full);
    VectorXd lg;
    MatrixXd lh;

    if (with_slack_) {
      f = t * offset;
      g(n) = t;
    } else {
      f = t * cf_.objective.evaluate_local(y, lg, &lh);
      scatter(cf_.objective.vars(), lg, lh, t, 0.0, g, h);
    }
    for (const auto& c : cf_.inequalities) {
      const double gap = offset - c.evaluate_local(y, lg, &lh);
      if (!(gap > 0.0)) return false;
      f -= std::log(gap);
      scatter(c.vars(), lg, lh, 1.0 / gap, 1.0 / (gap * gap), g, h);
      if (with_slack_) {
        const auto vars = c.vars();
        const double inv2 = 1.0 / (gap * gap);
        g(n) -= 1.0 / gap;
        h(n, n) += inv2;
        for (std::size_t a = 0; a < vars.size(); ++a) {
          h(vars[a], n) -= lg(static_cast<Index>(a)) * inv2;
          h(n, vars[a]) -= lg(static_cast<Index>(a)) * inv2;
        }
      }
    }
    if (ball_r2_ > 0.0) {
      const VectorXd dy = y - ball_center_;
      const double room = ball_r2_ - dy.squaredNorm();
      if (!(room > 0.0)) return false;
      f -= std::log(room);
      g.head(n) += (2.0 / room) * dy;
      h.topLeftCorner(n, n) += (4.0 / (room * room)) * dy * dy.transpose();
      h.topLeftCorner(n, n).diagonal().array() += 2.0 / room;
    }
    if (!std::isfinite(f) || !all_finite(g) || !h.allFinite()) return false;

    if (red_.identity) {
      grad = std::move(g);
      hess = std::move(h);
    } else {
      const Index k = red_.basis.cols();
      MatrixXd basis = MatrixXd::Zero(full, k + (with_slack_ ? 1 : 0));
      basis.topLeftCorner(n, k) = red_.basis;
      if (with_slack_) basis(n, k) = 1.0;
      grad = basis.transpose() * g;
      hess = basis.transpose() * h * basis;
    }
    return true;
  }

  /// max_i Fi(y)
  double max_constraint(const VectorXd& u) const {
    const VectorXd y = y_of(u);
    double worst = -kInf;
    for (const auto& c : cf_.inequalities) worst = std::max(worst, c.value(y));
    return worst;
  }

 private:
  // g += scale_g * lg;  h += scale_h * lh + scale_gg * lg lg^T  (phase-2 objective passes scale_gg = 0)
  static void scatter(std::span<const Index> vars, const VectorXd& lg, const MatrixXd& lh,
                      double scale, double scale_gg, VectorXd& g, MatrixXd& h) {
    const Index k = static_cast<Index>(vars.size());
    for (Index a = 0; a < k; ++a) {
      g(vars[a]) += scale * lg(a);
      const double ga = scale_gg * lg(a);
      double* col = h.col(vars[a]).data();
      const double* lcol = lh.col(a).data();
      for (Index b = 0; b < k; ++b) col[vars[b]] += scale * lcol[b] + ga * lg(b);
    }
  }

  const ConvexForm& cf_;
  const Reduction& red_;
  bool with_slack_;
  double relax_;
  VectorXd ball_center_;
  double ball_r2_ = 0.0;
};

enum class CenterResult { Centered, EarlyExit, IterationCap, Numerical };

constexpr double kCenteringTol = 1e-10;
// Per-coordinate RMS radius (log units) of the phase-1 search ball.
constexpr double kPhase1Radius = 30.0;
constexpr double kPolishTol = 1e-26;

// Damped Newton minimization of the barrier at fixed t. `early_exit` is
// consulted after every accepted step.
template <typename EarlyExit>
CenterResult center(const Barrier& barrier, double t, VectorXd& u, int& iterations,
                    int max_iterations, double decrement_tol, EarlyExit&& early_exit) {
  constexpr double kArmijo = 0.01;
  constexpr double kBacktrack = 0.5;
  double f = 0.0;
  double last_decrement2 = kInf;
  VectorXd grad;
  MatrixXd hess;
  for (;;) {
    if (!barrier.evaluate(u, t, f, grad, hess)) return CenterResult::Numerical;
    if (grad.size() == 0) return CenterResult::Centered;

    VectorXd step;
    double decrement2 = -1.0;
    const double diag_scale = 1.0 + hess.diagonal().cwiseAbs().maxCoeff();
    for (double reg = 0.0; reg < 1e6 * diag_scale; reg = (reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0)) {
      MatrixXd regularized = hess;
      regularized.diagonal().array() += reg;
      Eigen::LDLT<MatrixXd> ldlt(regularized);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
      step = ldlt.solve(-grad);
      if (!all_finite(step)) continue;
      decrement2 = -grad.dot(step);
      if (decrement2 >= 0.0) break;
    }
    if (!(decrement2 >= 0.0)) return CenterResult::Numerical;
    if (decrement2 / 2.0 <= decrement_tol) return CenterResult::Centered;

    double alpha = 1.0;
    bool moved = false;
    if (decrement2 < 0.01) {
      // Quadratic region: take the full step unless it leaves the domain, and
      // stop once Newton no longer contracts (rounding floor).
      if (decrement2 > 0.25 * last_decrement2) return CenterResult::Centered;
      const VectorXd trial = u + step;
      if (std::isfinite(barrier.value(trial, t))) {
        u = trial;
        moved = true;
      }
    }
    last_decrement2 = decrement2 < 0.01 ? decrement2 : kInf;
    while (!moved) {
      const VectorXd trial = u + alpha * step;
      const double ft = barrier.value(trial, t);
      if (std::isfinite(ft) && ft <= f - kArmijo * alpha * decrement2) {
        u = trial;
        moved = true;
        break;
      }
      alpha *= kBacktrack;
      if (alpha < 1e-20) break;
    }
    if (!moved) return CenterResult::Centered;  // no representable descent left
    if (++iterations >= max_iterations) return CenterResult::IterationCap;
    if (early_exit(u)) return CenterResult::EarlyExit;
  }
}

struct Residual {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double max() const { return std::max({stationarity, complementarity, primal, dual}); }
};

Residual residual(const ConvexForm& cf, const Reduction& red, const VectorXd& y,
                  std::span<const double> lambda, double relax) {
  Residual r;
  VectorXd g = cf.objective.gradient(y);
  for (std::size_t i = 0; i < cf.inequalities.size(); ++i) {
    const auto& c = cf.inequalities[i];
    const double fi = c.value(y) - relax;
    g += lambda[i] * c.gradient(y);
    r.complementarity = std::max(r.complementarity, std::abs(lambda[i] * fi));
    r.primal = std::max(r.primal, fi);
    r.dual = std::max(r.dual, -lambda[i]);
  }
  if (cf.eq_matrix.rows() > 0) {
    r.primal = std::max(r.primal, (cf.eq_matrix * y + cf.eq_offset).lpNorm<Eigen::Infinity>());
  }
  const VectorXd projected = red.identity ? g : VectorXd(red.basis.transpose() * g);
  r.stationarity = projected.size() ? projected.lpNorm<Eigen::Infinity>() : 0.0;
  return r;
}

// Re-estimates the multipliers of near-active constraints by least squares on
// the stationarity condition. Barrier estimates 1/(t * gap) lose digits as the
// gap approaches rounding level; this recovery does not.
std::vector<double> recover_multipliers(const ConvexForm& cf, const Reduction& red,
                                        const VectorXd& y, std::vector<double> lambda,
                                        double relax) {
  constexpr double kActiveGap = 1e-6;
  std::vector<std::size_t> active;
  VectorXd rhs = -cf.objective.gradient(y);
  for (std::size_t i = 0; i < cf.inequalities.size(); ++i) {
    const double gap = relax - cf.inequalities[i].value(y);
    if (gap <= kActiveGap) {
      active.push_back(i);
    } else {
      rhs -= lambda[i] * cf.inequalities[i].gradient(y);
    }
  }
  if (active.empty()) return lambda;
  MatrixXd jac(cf.var_count, static_cast<Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    jac.col(static_cast<Index>(k)) = cf.inequalities[active[k]].gradient(y);
  }
  if (!red.identity) {
    jac = red.basis.transpose() * jac;
    rhs = red.basis.transpose() * rhs;
  }
  const VectorXd fit = jac.colPivHouseholderQr().solve(rhs);
  if (!all_finite(fit) || (fit.array() < 0.0).any()) return lambda;
  for (std::size_t k = 0; k < active.size(); ++k) lambda[active[k]] = fit(static_cast<Index>(k));
  return lambda;
}

std::vector<double> to_x(const VectorXd& y) {
  std::vector<double> x(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) x[static_cast<std::size_t>(i)] = std::exp(y(i));
  return x;
}

}  // namespace

void GpProblem::validate() const {
  if (var_count == 0) throw std::invalid_argument("GP needs at least one variable");
  for (const auto& t : objective.terms()) check_vars(t, var_count, "objective");
  for (const auto& p : inequalities)
    for (const auto& t : p.terms()) check_vars(t, var_count, "inequality");
  for (const auto& m : equalities) check_vars(m, var_count, "equality");
}

LogSumExp::LogSumExp(const Posynomial& p) {
  for (const auto& term : p.terms())
    for (const auto& e : term.exponents()) vars_.push_back(static_cast<Index>(e.first.index));
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());

  const Index rows = static_cast<Index>(p.size());
  exponents_ = MatrixXd::Zero(rows, static_cast<Index>(vars_.size()));
  log_coefficients_.resize(rows);
  for (Index r = 0; r < rows; ++r) {
    const auto& term = p.terms()[static_cast<std::size_t>(r)];
    log_coefficients_(r) = std::log(term.coefficient());
    for (const auto& [var, power] : term.exponents()) {
      const auto it = std::lower_bound(vars_.begin(), vars_.end(), static_cast<Index>(var.index));
      exponents_(r, it - vars_.begin()) = power;
    }
  }
  const Index cols = exponents_.cols();
  row_start_.push_back(0);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (exponents_(r, c) != 0.0) {
        entry_col_.push_back(c);
        entry_val_.push_back(exponents_(r, c));
      }
    }
    row_start_.push_back(static_cast<Index>(entry_col_.size()));
  }
  sparse_ = 4 * static_cast<Index>(entry_col_.size()) <= rows * cols;
}

double LogSumExp::evaluate_local(const VectorXd& y, VectorXd& grad, MatrixXd* hess) const {
  VectorXd local(static_cast<Index>(vars_.size()));
  for (std::size_t k = 0; k < vars_.size(); ++k) local(static_cast<Index>(k)) = y(vars_[k]);
  VectorXd z = log_coefficients_;
  if (local.size() > 0) z.noalias() += exponents_ * local;
  const double peak = z.maxCoeff();
  VectorXd weights = (z.array() - peak).exp();
  const double total = weights.sum();
  weights /= total;
  if (!sparse_) {
    grad = exponents_.transpose() * weights;
    if (hess) {
      const MatrixXd scaled = exponents_.array().colwise() * weights.array().sqrt();
      *hess = scaled.transpose() * scaled;
      hess->noalias() -= grad * grad.transpose();
    }
    return peak + std::log(total);
  }
  const Index cols = exponents_.cols();
  grad = VectorXd::Zero(cols);
  if (hess) *hess = MatrixXd::Zero(cols, cols);
  for (Index r = 0; r < exponents_.rows(); ++r) {
    const double pi = weights(r);
    const auto begin = static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r)]);
    const auto end = static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r) + 1]);
    for (std::size_t a = begin; a < end; ++a) {
      const double va = pi * entry_val_[a];
      grad(entry_col_[a]) += va;
      if (!hess) continue;
      for (std::size_t b = begin; b < end; ++b) (*hess)(entry_col_[b], entry_col_[a]) += va * entry_val_[b];
    }
  }
  if (hess) hess->noalias() -= grad * grad.transpose();
  return peak + std::log(total);
}

double LogSumExp::value(const VectorXd& y) const {
  VectorXd z = log_coefficients_;
  for (std::size_t k = 0; k < vars_.size(); ++k) z += exponents_.col(static_cast<Index>(k)) * y(vars_[k]);
  const double peak = z.maxCoeff();
  return peak + std::log((z.array() - peak).exp().sum());
}

VectorXd LogSumExp::gradient(const VectorXd& y) const {
  VectorXd local;
  evaluate_local(y, local, nullptr);
  VectorXd g = VectorXd::Zero(y.size());
  for (std::size_t k = 0; k < vars_.size(); ++k) g(vars_[k]) = local(static_cast<Index>(k));
  return g;
}

MatrixXd LogSumExp::hessian(const VectorXd& y, Index var_count) const {
  VectorXd lg;
  MatrixXd lh;
  evaluate_local(y, lg, &lh);
  MatrixXd h = MatrixXd::Zero(var_count, var_count);
  for (std::size_t a = 0; a < vars_.size(); ++a)
    for (std::size_t b = 0; b < vars_.size(); ++b)
      h(vars_[a], vars_[b]) = lh(static_cast<Index>(a), static_cast<Index>(b));
  return h;
}

ConvexForm to_convex(const GpProblem& gp) {
  gp.validate();
  const Index n = gp.var_count;
  std::vector<LogSumExp> inequalities;
  inequalities.reserve(gp.inequalities.size());
  for (const auto& p : gp.inequalities) inequalities.emplace_back(p);
  MatrixXd eq = MatrixXd::Zero(static_cast<Index>(gp.equalities.size()), n);
  VectorXd offset(static_cast<Index>(gp.equalities.size()));
  for (std::size_t j = 0; j < gp.equalities.size(); ++j) {
    const auto& m = gp.equalities[j];
    offset(static_cast<Index>(j)) = std::log(m.coefficient());
    for (const auto& [var, power] : m.exponents()) eq(static_cast<Index>(j), var.index) = power;
  }
  return ConvexForm{n, LogSumExp(gp.objective), std::move(inequalities), std::move(eq),
                    std::move(offset)};
}

std::string_view to_string(GpStatus status) {
  switch (status) {
    case GpStatus::Optimal: return "optimal";
    case GpStatus::Infeasible: return "infeasible";
    case GpStatus::MaxIterations: return "max_iterations";
    case GpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  if (!(feasibility_tol > 0.0) || !(kkt_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(mu > 1.0)) throw std::invalid_argument("barrier growth factor must exceed 1");
  if (!(initial_t > 0.0)) throw std::invalid_argument("initial barrier weight must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
}

GpSolution solve(const GpProblem& gp, const SolverOptions& opts, std::span<const double> initial_x) {
  opts.validate();
  const ConvexForm cf = to_convex(gp);
  const Reduction red = make_reduction(cf);
  const Index n = cf.var_count;
  const std::size_t m = cf.inequalities.size();
  const double feas_log = std::log1p(opts.feasibility_tol);

  GpSolution sol;
  auto finish = [&](const VectorXd& y, GpStatus status) {
    sol.x = to_x(y);
    sol.status = status;
    sol.objective_value = all_finite(y) ? std::exp(cf.objective.value(y)) : kInf;
    return sol;
  };

  VectorXd y0 = VectorXd::Zero(n);
  if (!initial_x.empty()) {
    if (initial_x.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("initial point has wrong dimension");
    }
    for (Index i = 0; i < n; ++i) {
      const double xi = initial_x[static_cast<std::size_t>(i)];
      if (!(xi > 0.0)) throw DomainError("initial point must be strictly positive");
      y0(i) = std::log(xi);
    }
  }
  if (!red.consistent) {
    sol.phase1_slack = kInf;
    return finish(red.to_y(VectorXd::Zero(red.dim(n))), GpStatus::Infeasible);
  }

  VectorXd v = red.from_y(y0);
  double relax = 0.0;

  // Phase 1: minimize the common slack s subject to Fi(y) <= s.
  {
    const Barrier plain(cf, red, false, 0.0);
    double worst = m ? plain.max_constraint(v) : -kInf;
    if (worst >= 0.0) {
      Barrier slack(cf, red, true, 0.0);
      slack.set_ball(red.to_y(v), kPhase1Radius * std::sqrt(static_cast<double>(n)));
      VectorXd u(v.size() + 1);
      u << v, worst + 1.0;
      auto interior = [&](const VectorXd& cand) {
        return slack.max_constraint(cand) <= -1e-6;
      };
      double t = opts.initial_t;
      for (;;) {
        const auto res = center(slack, t, u, sol.iterations, opts.max_iterations, kCenteringTol, interior);
        const VectorXd cand = u.head(u.size() - 1);
        worst = slack.max_constraint(u);
        sol.phase1_slack = worst;
        if (res == CenterResult::EarlyExit || (res == CenterResult::Centered && worst < 0.0)) {
          v = cand;
          sol.phase1_slack = 0.0;
          break;
        }
        if (res == CenterResult::IterationCap) return finish(red.to_y(cand), GpStatus::MaxIterations);
        if (res == CenterResult::Numerical) return finish(red.to_y(cand), GpStatus::NumericalFailure);
        const double gap = static_cast<double>(m) / t;
        if (worst - gap > feas_log || (t > 1e16 && worst > 0.0 && worst >= feas_log)) {
          return finish(red.to_y(cand), GpStatus::Infeasible);
        }
        if (worst < feas_log && gap <= 0.1 * opts.feasibility_tol) {
          // No strict interior; continue within the feasibility tolerance.
          relax = feas_log;
          v = cand;
          break;
        }
        t *= opts.mu;
      }
    }
  }

  // Phase 2: central path.
  const Barrier barrier(cf, red, false, relax);
  std::vector<double> lambda(m, 0.0);
  double t = opts.initial_t;
  auto never = [](const VectorXd&) { return false; };
  bool polish = false;
  for (int outer = 0;; ++outer) {
    const auto res = center(barrier, t, v, sol.iterations, opts.max_iterations,
                            polish ? kPolishTol : kCenteringTol, never);
    const VectorXd y = red.to_y(v);
    for (std::size_t i = 0; i < m; ++i) {
      lambda[i] = 1.0 / (t * (relax - cf.inequalities[i].value(y)));
    }
    sol.multipliers = lambda;
    sol.kkt_residual = residual(cf, red, y, lambda, relax).max();
    if (m > 0 && sol.kkt_residual > opts.kkt_tol) {
      auto refined = recover_multipliers(cf, red, y, lambda, relax);
      const double refined_residual = residual(cf, red, y, refined, relax).max();
      if (refined_residual < sol.kkt_residual) {
        sol.multipliers = std::move(refined);
        sol.kkt_residual = refined_residual;
      }
    }
    if (res == CenterResult::Numerical) return finish(y, GpStatus::NumericalFailure);
    if (sol.kkt_residual <= opts.kkt_tol && res == CenterResult::Centered) {
      return finish(y, GpStatus::Optimal);
    }
    if (res == CenterResult::IterationCap || outer > 200) return finish(y, GpStatus::MaxIterations);
    if (t > 1e18) return finish(y, GpStatus::NumericalFailure);
    // Once complementarity (1/t per constraint) is within tolerance, tighten
    // centering at the same t before moving further along the path.
    if (!polish && (m == 0 || 1.0 / t <= 0.5 * opts.kkt_tol)) {
      polish = true;
      continue;
    }
    polish = false;
    if (m > 0) t *= opts.mu;
  }
}

double kkt_residual(const GpProblem& gp, std::span<const double> x,
                    std::span<const double> multipliers) {
  const ConvexForm cf = to_convex(gp);
  if (x.size() != static_cast<std::size_t>(cf.var_count)) {
    throw std::invalid_argument("point has wrong dimension");
  }
  if (multipliers.size() != cf.inequalities.size()) {
    throw std::invalid_argument("need one multiplier per inequality");
  }
  VectorXd y(cf.var_count);
  for (Index i = 0; i < cf.var_count; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (!(xi > 0.0)) throw DomainError("KKT point must be strictly positive");
    y(i) = std::log(xi);
  }
  const Reduction red = make_reduction(cf);
  return residual(cf, red, y, multipliers, 0.0).max();
}

}  // namespace sinrgp
