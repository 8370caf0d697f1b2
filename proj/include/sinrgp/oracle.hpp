#pragma once

// Exhaustive global-optimum references for small instances.

#include <cstddef>

#include <Eigen/Dense>

#include "sinrgp/power_control.hpp"

namespace sinrgp {

inline constexpr Eigen::Index kGridSearchMaxLinks = 6;
inline constexpr Eigen::Index kVertexMaxLinks = 20;

struct OracleResult {
  Eigen::VectorXd p_best;
  double objective = 0.0;
  std::size_t evaluations = 0;
  int points_per_dim = 0;  // 2 for vertex enumeration
};

/// Best weighted sum rate over the linear grid with `points_per_dim` points
/// per link, both bounds included. QoS floors, when present, exclude grid
/// points that violate them. Ties resolve to the lowest grid index, so the
/// result does not depend on `workers`.
OracleResult grid_search(const PowerControlProblem& prob, int points_per_dim, int workers = 1);

/// Best allocation over {p_min, p_max}^N.
OracleResult vertex_enumeration(const PowerControlProblem& prob);

}  // namespace sinrgp
