#include "ctmboost/basis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ctmboost/util.hpp"

namespace ctm {

namespace {

std::string kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::intercept: return "intercept";
    case BasisKind::linear: return "linear";
    case BasisKind::bspline: return "bspline";
    case BasisKind::cyclic_bspline: return "cyclic_bspline";
    case BasisKind::dummy: return "dummy";
  }
  return "?";
}

/// Triangular recurrence for the degree+1 B-splines that are nonzero on the
/// knot interval [knots[span], knots[span+1]) containing x. out[k] is the
/// value of the spline whose first knot is knots[span - degree + k].
void bspline_weights(const std::vector<double>& knots, int span, int degree,
                     double x, double* out) {
  out[0] = 1.0;
  std::vector<double> left(degree + 1), right(degree + 1);
  for (int r = 1; r <= degree; ++r) {
    left[r] = x - knots[span + 1 - r];
    right[r] = knots[span + r] - x;
    double saved = 0.0;
    for (int k = 0; k < r; ++k) {
      const double temp = out[k] / (right[k + 1] + left[r - k]);
      out[k] = saved + right[k + 1] * temp;
      saved = left[r - k] * temp;
    }
    out[r] = saved;
  }
}

void check_domain(const BasisSpec& spec, const Eigen::VectorXd& points) {
  std::ostringstream bad;
  int bad_count = 0;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double x = points[i];
    if (std::isfinite(x) && x >= spec.lo && x <= spec.hi) continue;
    if (bad_count < 5) {
      if (bad_count) bad << ", ";
      bad << "point " << i << " = " << format_double(x);
    }
    ++bad_count;
  }
  if (bad_count) {
    std::ostringstream msg;
    msg << kind_name(spec.kind) << " basis on [" << format_double(spec.lo)
        << ", " << format_double(spec.hi) << "]: " << bad_count
        << " evaluation point(s) outside the declared domain (" << bad.str()
        << "); widen the domain instead of expecting extrapolation";
    fail(ErrorKind::domain, msg.str());
  }
}

Eigen::MatrixXd clamped_bspline_design(const BasisSpec& spec,
                                       const Eigen::VectorXd& points) {
  const int d = spec.degree;
  const int q = spec.interior_knots;
  const int dim = q + d + 1;
  // Open knot vector: lo repeated d+1 times, q equidistant interior knots,
  // hi repeated d+1 times.
  std::vector<double> knots(dim + d + 1);
  const double step = (spec.hi - spec.lo) / (q + 1);
  for (int i = 0; i <= d; ++i) knots[i] = spec.lo;
  for (int i = 0; i < q; ++i) knots[d + 1 + i] = spec.lo + (i + 1) * step;
  for (int i = 0; i <= d; ++i) knots[dim + i] = spec.hi;

  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(points.size(), dim);
  std::vector<double> weights(d + 1);
  for (Eigen::Index r = 0; r < points.size(); ++r) {
    const double x = points[r];
    // Rightmost span whose left knot is <= x; x == hi lands in the last
    // nondegenerate interval so the basis is closed on the right.
    int span = d + static_cast<int>(std::floor((x - spec.lo) / step));
    span = std::clamp(span, d, dim - 1);
    while (span > d && knots[span] > x) --span;
    while (span < dim - 1 && knots[span + 1] <= x) ++span;
    bspline_weights(knots, span, d, x, weights.data());
    for (int k = 0; k <= d; ++k) design(r, span - d + k) = weights[k];
  }
  return design;
}

Eigen::MatrixXd cyclic_bspline_design(const BasisSpec& spec,
                                      const Eigen::VectorXd& points) {
  const int d = spec.degree;
  const int dim = spec.interior_knots;
  // Uniform unclamped knots extended d cells beyond each side; the ordinary
  // dim + d columns fold onto dim cyclic columns modulo dim.
  const double step = (spec.hi - spec.lo) / dim;
  std::vector<double> knots(dim + 2 * d + 1);
  for (int i = 0; i < static_cast<int>(knots.size()); ++i)
    knots[i] = spec.lo + (i - d) * step;

  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(points.size(), dim);
  std::vector<double> weights(d + 1);
  for (Eigen::Index r = 0; r < points.size(); ++r) {
    const double x = points[r];
    int cell = static_cast<int>(std::floor((x - spec.lo) / step));
    cell = std::clamp(cell, 0, dim - 1);
    while (cell > 0 && knots[d + cell] > x) --cell;
    while (cell < dim - 1 && knots[d + cell + 1] <= x) ++cell;
    bspline_weights(knots, d + cell, d, x, weights.data());
    for (int k = 0; k <= d; ++k) design(r, (cell + k) % dim) += weights[k];
  }
  return design;
}

}  // namespace

int basis_dim(const BasisSpec& spec) {
  switch (spec.kind) {
    case BasisKind::intercept: return 1;
    case BasisKind::linear: return 2;
    case BasisKind::bspline: return spec.interior_knots + spec.degree + 1;
    case BasisKind::cyclic_bspline: return spec.interior_knots;
    case BasisKind::dummy: return static_cast<int>(spec.levels.size());
  }
  fail(ErrorKind::config, "unknown basis kind");
}

void validate_basis(const BasisSpec& spec) {
  switch (spec.kind) {
    case BasisKind::intercept:
      return;
    case BasisKind::linear:
      break;
    case BasisKind::bspline:
      if (spec.degree < 1 || spec.degree > 10)
        fail(ErrorKind::config, "bspline degree must be between 1 and 10");
      if (spec.interior_knots < 1)
        fail(ErrorKind::config, "bspline needs at least one interior knot");
      break;
    case BasisKind::cyclic_bspline:
      if (spec.degree < 1 || spec.degree > 10)
        fail(ErrorKind::config, "cyclic_bspline degree must be between 1 and 10");
      if (spec.interior_knots < 2)
        fail(ErrorKind::config, "cyclic_bspline needs dimension at least 2");
      break;
    case BasisKind::dummy: {
      if (spec.levels.empty())
        fail(ErrorKind::config, "dummy basis needs at least one level");
      std::set<std::string> seen(spec.levels.begin(), spec.levels.end());
      if (seen.size() != spec.levels.size())
        fail(ErrorKind::config, "dummy basis levels must be unique");
      return;
    }
  }
  if (!(std::isfinite(spec.lo) && std::isfinite(spec.hi) && spec.lo < spec.hi))
    fail(ErrorKind::config, "basis domain must satisfy lo < hi (finite)");
}

EvaluatedBasis evaluate_basis(const BasisSpec& spec, const Eigen::VectorXd& points) {
  validate_basis(spec);
  EvaluatedBasis out;
  switch (spec.kind) {
    case BasisKind::intercept:
      out.values = Eigen::MatrixXd::Ones(points.size(), 1);
      for (Eigen::Index i = 0; i < points.size(); ++i)
        if (!std::isfinite(points[i]))
          fail(ErrorKind::domain, "non-finite evaluation point for intercept basis");
      return out;
    case BasisKind::linear:
      check_domain(spec, points);
      out.values.resize(points.size(), 2);
      out.values.col(0).setOnes();
      out.values.col(1) = points;
      return out;
    case BasisKind::bspline:
      check_domain(spec, points);
      out.values = clamped_bspline_design(spec, points);
      return out;
    case BasisKind::cyclic_bspline:
      check_domain(spec, points);
      out.values = cyclic_bspline_design(spec, points);
      return out;
    case BasisKind::dummy:
      fail(ErrorKind::config, "dummy basis evaluates categorical values, not numbers");
  }
  fail(ErrorKind::config, "unknown basis kind");
}

EvaluatedBasis evaluate_basis(const BasisSpec& spec, const std::vector<std::string>& points) {
  validate_basis(spec);
  if (spec.kind != BasisKind::dummy)
    fail(ErrorKind::config,
         kind_name(spec.kind) + std::string(" basis evaluates numbers, not categorical values"));
  std::unordered_map<std::string, int> index;
  for (int k = 0; k < static_cast<int>(spec.levels.size()); ++k)
    index.emplace(spec.levels[k], k);
  EvaluatedBasis out;
  out.values = Eigen::MatrixXd::Zero(points.size(), spec.levels.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = index.find(points[i]);
    if (it == index.end())
      fail(ErrorKind::level, "unknown level '" + points[i] + "' at row " +
                                 std::to_string(i) + " (declared levels: " +
                                 std::to_string(spec.levels.size()) + ")");
    out.values(i, it->second) = 1.0;
  }
  return out;
}

Eigen::MatrixXd difference_matrix(int dim, int order) {
  if (order < 1) fail(ErrorKind::dimension, "difference order must be positive");
  if (dim <= order)
    fail(ErrorKind::dimension, "difference matrix needs dimension " +
                                   std::to_string(dim) + " > order " +
                                   std::to_string(order));
  // Alternating binomial stencil, e.g. order 2: (1, -2, 1).
  std::vector<double> stencil(order + 1);
  double c = 1.0;
  for (int j = 0; j <= order; ++j) {
    stencil[j] = ((order - j) % 2 ? -c : c);
    c = c * (order - j) / (j + 1);
  }
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(dim - order, dim);
  for (int r = 0; r < dim - order; ++r)
    for (int j = 0; j <= order; ++j) diff(r, r + j) = stencil[j];
  return diff;
}

Eigen::MatrixXd cyclic_difference_matrix(int dim, int order) {
  if (order < 1) fail(ErrorKind::dimension, "difference order must be positive");
  if (dim <= order)
    fail(ErrorKind::dimension, "cyclic difference matrix needs dimension " +
                                   std::to_string(dim) + " > order " +
                                   std::to_string(order));
  std::vector<double> stencil(order + 1);
  double c = 1.0;
  for (int j = 0; j <= order; ++j) {
    stencil[j] = ((order - j) % 2 ? -c : c);
    c = c * (order - j) / (j + 1);
  }
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int j = 0; j <= order; ++j) diff(r, (r + j) % dim) += stencil[j];
  return diff;
}

void validate_penalty(const PenaltySpec& spec, const BasisSpec& basis) {
  const int dim = basis_dim(basis);
  switch (spec.kind) {
    case PenaltyKind::none:
      return;
    case PenaltyKind::difference:
      if (basis.kind == BasisKind::dummy)
        fail(ErrorKind::config,
             "difference penalties assume ordered coefficients; dummy bases "
             "take none or adjacency");
      if (spec.order != 1 && spec.order != 2)
        fail(ErrorKind::config, "difference penalty order must be 1 or 2");
      if (dim <= spec.order)
        fail(ErrorKind::dimension, "difference penalty needs more coefficients than its order");
      return;
    case PenaltyKind::adjacency:
      if (basis.kind != BasisKind::dummy)
        fail(ErrorKind::config, "adjacency penalties apply to dummy bases only");
      if (spec.neighbors.empty())
        fail(ErrorKind::config, "adjacency penalty needs at least one neighbor pair");
      for (const auto& [a, b] : spec.neighbors) {
        if (a < 0 || b < 0 || a >= dim || b >= dim)
          fail(ErrorKind::config, "adjacency pair (" + std::to_string(a) + ", " +
                                      std::to_string(b) + ") outside level range");
        if (a == b)
          fail(ErrorKind::config, "adjacency pair must join two distinct levels");
      }
      return;
  }
  fail(ErrorKind::config, "unknown penalty kind");
}

Eigen::MatrixXd penalty_matrix(const PenaltySpec& spec, int dim, bool cyclic) {
  switch (spec.kind) {
    case PenaltyKind::none:
      return Eigen::MatrixXd::Zero(dim, dim);
    case PenaltyKind::difference: {
      const Eigen::MatrixXd diff = cyclic ? cyclic_difference_matrix(dim, spec.order)
                                          : difference_matrix(dim, spec.order);
      return diff.transpose() * diff;
    }
    case PenaltyKind::adjacency: {
      Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(dim, dim);
      for (const auto& [a, b] : spec.neighbors) {
        if (a < 0 || b < 0 || a >= dim || b >= dim || a == b)
          fail(ErrorKind::config, "adjacency pair outside level range");
        lap(a, a) += 1.0;
        lap(b, b) += 1.0;
        lap(a, b) -= 1.0;
        lap(b, a) -= 1.0;
      }
      return lap;
    }
  }
  fail(ErrorKind::config, "unknown penalty kind");
}

}  // namespace ctm
