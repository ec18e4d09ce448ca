#include "ctmboost/grid.hpp"

#include <algorithm>
#include <vector>

namespace ctm {

Grid make_grid(const Eigen::VectorXd& y, Eigen::Index n, double margin) {
  if (y.size() == 0) fail(ErrorKind::data, "empty response");
  if (n < 2) fail(ErrorKind::config, "grid needs at least 2 points");
  const double lo = y.minCoeff(), hi = y.maxCoeff();
  if (!(hi > lo))
    fail(ErrorKind::degenerate, "constant response admits no evaluation grid");
  if (!(margin > 0.0))
    fail(ErrorKind::margin,
         "grid margin must be positive: the first grid point has to lie "
         "strictly below the smallest response");
  Grid grid;
  grid.kind = GridKind::equidistant;
  grid.points =
      Eigen::VectorXd::LinSpaced(n, lo - margin * (hi - lo), hi);
  return grid;
}

Grid make_support_grid(const Eigen::VectorXd& y) {
  if (y.size() == 0) fail(ErrorKind::data, "empty response");
  std::vector<double> vals(y.data(), y.data() + y.size());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  if (vals.size() < 2)
    fail(ErrorKind::degenerate, "constant response admits no evaluation grid");
  Grid grid;
  grid.kind = GridKind::observed_support;
  grid.points = Eigen::Map<const Eigen::VectorXd>(
      vals.data(), static_cast<Eigen::Index>(vals.size()));
  return grid;
}

}  // namespace ctm
