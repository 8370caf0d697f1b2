#include "sinrgp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sinrgp {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

// Flat row-major copy of the problem for the inner loops.
struct Evaluator {
  Index n;
  std::vector<double> gain;  // gain[j * n + i] = G_ji
  std::vector<double> noise, weights, gamma_min;
  double a, b;
  bool qos;

  explicit Evaluator(const PowerControlProblem& prob)
      : n(prob.size()), gain(static_cast<std::size_t>(n * n)), noise(prob.noise.data(), prob.noise.data() + n),
        weights(prob.weights.data(), prob.weights.data() + n),
        gamma_min(prob.gamma_min.data(), prob.gamma_min.data() + n),
        a(prob.rate_a), b(prob.rate_b), qos(prob.has_qos()) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) gain[static_cast<std::size_t>(j * n + i)] = prob.gain(j, i);
  }

  /// -inf when a QoS floor is violated.
  double operator()(const double* p) const {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      double interference = noise[static_cast<std::size_t>(i)];
      for (Index j = 0; j < n; ++j) {
        if (j != i) interference += p[j] * gain[static_cast<std::size_t>(j * n + i)];
      }
      const double g = p[i] * gain[static_cast<std::size_t>(i * n + i)] / interference;
      if (qos && g < gamma_min[static_cast<std::size_t>(i)]) {
        return -std::numeric_limits<double>::infinity();
      }
      total += weights[static_cast<std::size_t>(i)] * a * std::log2(1.0 + b * g);
    }
    return total;
  }
};

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
};

// Enumerates the product grid levels[0] x ... x levels[n-1] in lexicographic
// order for flat indices [begin, end).
Best scan(const Evaluator& eval, const std::vector<std::vector<double>>& levels, std::size_t begin,
          std::size_t end) {
  const std::size_t n = levels.size();
  std::vector<std::size_t> digit(n);
  std::vector<double> p(n);
  std::size_t rest = begin;
  for (std::size_t k = n; k-- > 0;) {
    digit[k] = rest % levels[k].size();
    rest /= levels[k].size();
    p[k] = levels[k][digit[k]];
  }
  Best best;
  for (std::size_t idx = begin; idx < end; ++idx) {
    const double v = eval(p.data());
    if (v > best.value) {
      best.value = v;
      best.index = idx;
    }
    for (std::size_t k = n; k-- > 0;) {
      if (++digit[k] < levels[k].size()) {
        p[k] = levels[k][digit[k]];
        break;
      }
      digit[k] = 0;
      p[k] = levels[k][0];
    }
  }
  return best;
}

OracleResult search(const PowerControlProblem& prob, const std::vector<std::vector<double>>& levels,
                    int workers) {
  const Evaluator eval(prob);
  std::size_t total = 1;
  for (const auto& l : levels) total *= l.size();

  const std::size_t chunks = static_cast<std::size_t>(std::max(1, workers));
  std::vector<Best> partial(chunks);
  std::vector<std::thread> threads;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = total * c / chunks, end = total * (c + 1) / chunks;
    if (chunks == 1) {
      partial[c] = scan(eval, levels, begin, end);
    } else {
      threads.emplace_back([&, c, begin, end] { partial[c] = scan(eval, levels, begin, end); });
    }
  }
  for (auto& t : threads) t.join();

  Best best;
  for (const auto& b : partial) {
    if (b.value > best.value || (b.value == best.value && b.index < best.index)) best = b;
  }
  if (best.index == std::numeric_limits<std::size_t>::max()) {
    throw std::runtime_error("no grid point satisfies the QoS floors");
  }
  OracleResult out;
  out.p_best.resize(prob.size());
  std::size_t rest = best.index;
  for (std::size_t k = levels.size(); k-- > 0;) {
    out.p_best(static_cast<Index>(k)) = levels[k][rest % levels[k].size()];
    rest /= levels[k].size();
  }
  out.objective = weighted_sum_rate(prob, out.p_best);
  out.evaluations = total;
  out.points_per_dim = static_cast<int>(levels.front().size());
  return out;
}

}  // namespace

OracleResult grid_search(const PowerControlProblem& prob, int points_per_dim, int workers) {
  prob.validate();
  if (prob.size() > kGridSearchMaxLinks) {
    throw std::invalid_argument("grid search supports at most " + std::to_string(kGridSearchMaxLinks) +
                                " links, problem has " + std::to_string(prob.size()));
  }
  if (points_per_dim < 2) throw std::invalid_argument("grid search needs at least 2 points per link");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(prob.size()));
  for (Index i = 0; i < prob.size(); ++i) {
    auto& l = levels[static_cast<std::size_t>(i)];
    const double lo = prob.p_min(i), hi = prob.p_max(i);
    for (int k = 0; k < points_per_dim; ++k) {
      l.push_back(k == points_per_dim - 1 ? hi : lo + (hi - lo) * k / (points_per_dim - 1));
    }
  }
  return search(prob, levels, workers);
}

OracleResult vertex_enumeration(const PowerControlProblem& prob) {
  prob.validate();
  if (prob.size() > kVertexMaxLinks) {
    throw std::invalid_argument("vertex enumeration supports at most " +
                                std::to_string(kVertexMaxLinks) + " links");
  }
  std::vector<std::vector<double>> levels;
  for (Index i = 0; i < prob.size(); ++i) levels.push_back({prob.p_min(i), prob.p_max(i)});
  return search(prob, levels, 1);
}

}  // namespace sinrgp
