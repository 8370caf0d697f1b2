#include "sinrgp/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sinrgp {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_dimension(const PowerControlProblem& prob, const VectorXd& p) {
  require(p.size() == prob.size(), "power vector has " + std::to_string(p.size()) +
                                       " entries, problem has " + std::to_string(prob.size()) +
                                       " links");
}

double cross_gain(const PowerControlProblem& prob, Index from, Index to) {
  return std::max(prob.gain(from, to), kGainFloor);
}

// Strictly interior starting point for the standard-form GP near p.
std::vector<double> interior_start(const PowerControlProblem& prob, const VectorXd& p,
                                   const CondensedMonomial& condensed) {
  constexpr double kShrink = 1e-6;
  const Index n = prob.size();
  const StandardFormLayout layout{static_cast<std::uint32_t>(n)};
  VectorXd q(n);
  for (Index i = 0; i < n; ++i) {
    const double lo = prob.p_min(i), hi = prob.p_max(i);
    q(i) = lo == hi ? lo : std::clamp(p(i), lo + kShrink * (hi - lo), hi - kShrink * (hi - lo));
  }
  const VectorXd s = (prob.rate_b * sinr(prob, q)).cwiseMax(kSinrFloor) * (1.0 - kShrink);
  std::vector<double> x(layout.var_count());
  for (Index i = 0; i < n; ++i) {
    x[layout.power(i).index] = q(i);
    x[layout.aux(i).index] = s(i);
  }
  x[layout.rate().index] = condensed.eval(s) * (1.0 - kShrink);
  return x;
}

}  // namespace

void PowerControlProblem::validate() const {
  const Index n = gain.rows();
  require(n >= 1, "G: need at least one link");
  require(gain.cols() == n, "G: matrix must be square");
  require(noise.size() == n, "n_watts: expected " + std::to_string(n) + " entries");
  require(weights.size() == n, "w: expected " + std::to_string(n) + " entries");
  require(p_min.size() == n, "p_min_watts: expected " + std::to_string(n) + " entries");
  require(p_max.size() == n, "p_max_watts: expected " + std::to_string(n) + " entries");
  require(gamma_min.size() == n, "gamma_min: expected " + std::to_string(n) + " entries");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      require(std::isfinite(gain(i, j)) && gain(i, j) >= 0.0,
              "G: entry (" + std::to_string(i) + "," + std::to_string(j) + ") must be >= 0");
    }
    const std::string at = "[" + std::to_string(i) + "]";
    require(gain(i, i) > 0.0, "G: diagonal entry " + at + " must be positive");
    require(std::isfinite(noise(i)) && noise(i) > 0.0, "n_watts" + at + " must be positive");
    require(std::isfinite(weights(i)) && weights(i) >= 0.0, "w" + at + " must be >= 0");
    require(std::isfinite(p_min(i)) && p_min(i) > 0.0, "p_min_watts" + at + " must be positive");
    require(std::isfinite(p_max(i)) && p_max(i) >= p_min(i),
            "p_max_watts" + at + " must be >= p_min_watts");
    require(std::isfinite(gamma_min(i)) && gamma_min(i) >= 0.0, "gamma_min" + at + " must be >= 0");
  }
  require((weights.array() > 0.0).any(), "w: at least one weight must be positive");
  require(rate_a > 0.0 && rate_a <= 1.0, "rate_a must lie in (0, 1]");
  require(rate_b > 0.0 && rate_b <= 1.0, "rate_b must lie in (0, 1]");
}

VectorXd sinr(const PowerControlProblem& prob, const VectorXd& p) {
  check_dimension(prob, p);
  const VectorXd signal = prob.gain.diagonal().cwiseProduct(p);
  const VectorXd interference = prob.gain.transpose() * p - signal;
  return signal.cwiseQuotient(prob.noise + interference);
}

VectorXd rates(const PowerControlProblem& prob, const VectorXd& p) {
  const VectorXd g = sinr(prob, p);
  return g.unaryExpr([&](double v) { return prob.rate_a * std::log2(1.0 + prob.rate_b * v); });
}

double weighted_sum_rate(const PowerControlProblem& prob, const VectorXd& p) {
  return prob.weights.dot(rates(prob, p));
}

double sinr_for_rate(double rate, double rate_a, double rate_b) {
  return std::exp2(rate / rate_a) / rate_b - 1.0 / rate_b;
}

double rate_product(const VectorXd& s, const VectorXd& w) {
  double log_total = 0.0;
  for (Index i = 0; i < s.size(); ++i) log_total += w(i) * std::log1p(s(i));
  return std::exp(log_total);
}

double CondensedMonomial::eval(const VectorXd& s) const {
  double log_total = std::log(coefficient);
  for (Index i = 0; i < s.size(); ++i) log_total += exponents(i) * std::log(s(i));
  return std::exp(log_total);
}

VectorXd CondensedMonomial::gradient(const VectorXd& s) const {
  return eval(s) * exponents.cwiseQuotient(s);
}

Monomial CondensedMonomial::as_monomial(VarId first) const {
  std::vector<Monomial::Exponent> exps;
  exps.reserve(static_cast<std::size_t>(exponents.size()));
  for (Index i = 0; i < exponents.size(); ++i) {
    exps.emplace_back(VarId{first.index + static_cast<std::uint32_t>(i)}, exponents(i));
  }
  return Monomial(coefficient, std::move(exps));
}

CondensedMonomial condense_proposed(const VectorXd& s0, const VectorXd& w) {
  if (s0.size() != w.size()) throw std::invalid_argument("s0 and w differ in length");
  CondensedMonomial out;
  out.exponents.resize(s0.size());
  double log_c = 0.0;
  for (Index i = 0; i < s0.size(); ++i) {
    if (!(s0(i) > 0.0)) throw DomainError("expansion point must be strictly positive");
    const double d = s0(i) / (1.0 + s0(i));
    // log c_i = log(1 + s0) - d log s0
    log_c += w(i) * (std::log1p(s0(i)) - d * std::log(s0(i)));
    out.exponents(i) = w(i) * d;
  }
  out.coefficient = std::exp(log_c);
  return out;
}

Monomial condense_agm(const Posynomial& g, std::span<const double> x0) {
  std::vector<double> values;
  values.reserve(g.size());
  for (const auto& u : g.terms()) values.push_back(u.eval(x0));
  double total = 0.0;
  for (double v : values) total += v;

  Monomial out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double alpha = values[k] / total;
    if (alpha == 0.0) continue;
    out = out * g.terms()[k].scaled(1.0 / alpha).pow(alpha);
  }
  return out;
}

GpProblem build_standard_form(const PowerControlProblem& prob, const CondensedMonomial& condensed) {
  const Index n = prob.size();
  if (condensed.exponents.size() != n) {
    throw std::invalid_argument("condensation size does not match the problem");
  }
  const StandardFormLayout layout{static_cast<std::uint32_t>(n)};
  const Monomial r = Monomial::variable(layout.rate());

  std::vector<Posynomial> ineq;
  ineq.reserve(static_cast<std::size_t>(4 * n + 1));
  ineq.emplace_back(r / condensed.as_monomial(layout.aux(0)));

  for (Index i = 0; i < n; ++i) {
    // s_i p_i^{-1} (n_i + sum_j p_j G_ji) / (b G_ii)
    const Monomial base(1.0 / (prob.rate_b * prob.gain(i, i)),
                        {{layout.aux(i), 1.0}, {layout.power(i), -1.0}});
    std::vector<Monomial> terms;
    terms.reserve(static_cast<std::size_t>(n));
    terms.push_back(base.scaled(prob.noise(i)));
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      terms.push_back(base * Monomial::variable(layout.power(j), 1.0, cross_gain(prob, j, i)));
    }
    ineq.emplace_back(std::move(terms));
  }
  for (Index i = 0; i < n; ++i) {
    if (prob.gamma_min(i) > 0.0) {
      ineq.emplace_back(Monomial::variable(layout.aux(i), -1.0, prob.rate_b * prob.gamma_min(i)));
    }
  }
  for (Index i = 0; i < n; ++i) {
    ineq.emplace_back(Monomial::variable(layout.power(i), -1.0, prob.p_min(i)));
  }
  for (Index i = 0; i < n; ++i) {
    ineq.emplace_back(Monomial::variable(layout.power(i), 1.0, 1.0 / prob.p_max(i)));
  }
  return GpProblem{Posynomial(r.pow(-1.0)), std::move(ineq), {}, layout.var_count()};
}

bool is_feasible(const PowerControlProblem& prob, const VectorXd& p, double tol) {
  check_dimension(prob, p);
  if ((p.array() < prob.p_min.array() * (1.0 - tol)).any()) return false;
  if ((p.array() > prob.p_max.array() * (1.0 + tol)).any()) return false;
  if (!prob.has_qos()) return true;
  const VectorXd g = sinr(prob, p);
  return (g.array() >= prob.gamma_min.array() * (1.0 - tol)).all();
}

ScaReport sca_solve(const PowerControlProblem& prob, const VectorXd& p_init, const ScaOptions& opts) {
  prob.validate();
  check_dimension(prob, p_init);
  if (!(opts.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!is_feasible(prob, p_init, opts.gp.feasibility_tol)) {
    throw InfeasibleInitial("initial allocation violates power bounds or QoS floors");
  }
  const Index n = prob.size();
  const StandardFormLayout layout{static_cast<std::uint32_t>(n)};

  ScaReport report;
  VectorXd p = p_init;
  double current = weighted_sum_rate(prob, p);
  report.trajectory.push_back({p, current, 0.0});

  while (report.iterations < opts.max_iterations) {
    const VectorXd s0 = (prob.rate_b * sinr(prob, p)).cwiseMax(kSinrFloor);
    const CondensedMonomial condensed = condense_proposed(s0, prob.weights);
    const GpProblem gp = build_standard_form(prob, condensed);
    const std::vector<double> start = interior_start(prob, p, condensed);
    const GpSolution sol = solve(gp, opts.gp, start);
    ++report.iterations;
    if (sol.status != GpStatus::Optimal) {
      report.p_star = p;
      throw SolverFailure("GP solve failed at iteration " + std::to_string(report.iterations) +
                              ": " + std::string(to_string(sol.status)),
                          sol.status, std::move(report));
    }
    VectorXd next(n);
    for (Index i = 0; i < n; ++i) {
      next(i) = std::clamp(sol.x[layout.power(i).index], prob.p_min(i), prob.p_max(i));
    }
    const double value = weighted_sum_rate(prob, next);
    if (value < current) {
      // The GP optimum cannot be worse than the current point in exact
      // arithmetic; a decrease is solver round-off at a fixed point.
      report.converged = true;
      break;
    }
    const double step = (next - p).norm();
    report.trajectory.push_back({next, value, step});
    p = next;
    current = value;
    if (step < opts.eps) {
      report.converged = true;
      break;
    }
  }
  report.p_star = p;
  return report;
}

VectorXd feasible_init(const PowerControlProblem& prob, const SolverOptions& opts,
                       const std::optional<VectorXd>& candidate) {
  prob.validate();
  if (candidate && is_feasible(prob, *candidate, opts.feasibility_tol)) return *candidate;
  if (!prob.has_qos()) return prob.p_max;

  // Variables p_0..p_{N-1}, t.
  const Index n = prob.size();
  const VarId t{static_cast<std::uint32_t>(n)};
  auto power = [](Index i) { return VarId{static_cast<std::uint32_t>(i)}; };
  std::vector<Posynomial> ineq;
  for (Index i = 0; i < n; ++i) {
    if (!(prob.gamma_min(i) > 0.0)) continue;
    const Monomial base(prob.gamma_min(i) / prob.gain(i, i), {{power(i), -1.0}, {t, -1.0}});
    std::vector<Monomial> terms{base.scaled(prob.noise(i))};
    for (Index j = 0; j < n; ++j) {
      if (j != i) terms.push_back(base * Monomial::variable(power(j), 1.0, cross_gain(prob, j, i)));
    }
    ineq.emplace_back(std::move(terms));
  }
  for (Index i = 0; i < n; ++i) {
    ineq.emplace_back(Monomial::variable(power(i), -1.0, prob.p_min(i)));
    ineq.emplace_back(Monomial::variable(power(i), 1.0, 1.0 / prob.p_max(i)));
  }
  const GpProblem gp{Posynomial(Monomial::variable(t)), std::move(ineq), {},
                     static_cast<std::uint32_t>(n + 1)};
  std::vector<double> start(static_cast<std::size_t>(n + 1));
  for (Index i = 0; i < n; ++i) start[static_cast<std::size_t>(i)] = std::sqrt(prob.p_min(i) * prob.p_max(i));
  start.back() = 1.0;
  const GpSolution sol = solve(gp, opts, start);
  if (sol.status != GpStatus::Optimal) {
    throw InfeasibleProblem("QoS feasibility problem did not solve: " +
                                std::string(to_string(sol.status)),
                            sol.objective_value);
  }
  const double t_star = sol.x[t.index];
  if (t_star > 1.0 + opts.feasibility_tol) {
    throw InfeasibleProblem("QoS floors cannot be met jointly (required scaling t* = " +
                                std::to_string(t_star) + ")",
                            t_star);
  }
  VectorXd p(n);
  for (Index i = 0; i < n; ++i) p(i) = std::clamp(sol.x[static_cast<std::size_t>(i)], prob.p_min(i), prob.p_max(i));
  return p;
}

std::vector<bool> muted_links(const PowerControlProblem& prob, const VectorXd& p) {
  check_dimension(prob, p);
  std::vector<bool> muted(static_cast<std::size_t>(p.size()));
  for (Index i = 0; i < p.size(); ++i) muted[static_cast<std::size_t>(i)] = p(i) <= 2.0 * prob.p_min(i);
  return muted;
}

}  // namespace sinrgp
