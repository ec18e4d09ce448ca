#pragma once

#include <Eigen/Dense>

#include "ctmboost/errors.hpp"

namespace ctm {

enum class GridKind { equidistant, observed_support };

/// Evaluation grid over the response axis. Equidistant grids start strictly
/// below the smallest training response (enforced by a positive margin) and
/// end at the largest; observed-support grids are the sorted unique
/// responses, for responses living on a discrete support.
struct Grid {
  Eigen::VectorXd points;
  GridKind kind = GridKind::equidistant;

  Eigen::Index size() const { return points.size(); }
  double lo() const { return points[0]; }
  double hi() const { return points[points.size() - 1]; }
};

/// Equidistant grid of n points from min(y) - margin * range(y) to max(y).
/// margin must be positive so the first point lies strictly below every
/// observed response.
Grid make_grid(const Eigen::VectorXd& y, Eigen::Index n, double margin);

/// Sorted unique observed responses (counting-measure support).
Grid make_support_grid(const Eigen::VectorXd& y);

}  // namespace ctm
