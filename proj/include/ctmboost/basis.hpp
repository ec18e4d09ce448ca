#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "ctmboost/errors.hpp"

namespace ctm {

enum class BasisKind { intercept, linear, bspline, cyclic_bspline, dummy };

/// Marginal basis description. Numeric kinds carry an explicit domain
/// [lo, hi]; evaluation outside it is an error, never extrapolation, so
/// prediction ranges have to be declared up front.
struct BasisSpec {
  BasisKind kind = BasisKind::intercept;
  int degree = 3;          // bspline / cyclic_bspline
  int interior_knots = 20; // bspline: equidistant knots strictly inside (lo, hi)
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::string> levels;  // dummy: one column per level, in this order

  bool numeric() const { return kind != BasisKind::dummy; }
};

/// Number of columns the spec produces:
/// intercept 1, linear 2, bspline interior_knots + degree + 1,
/// cyclic_bspline interior_knots, dummy levels.size().
int basis_dim(const BasisSpec& spec);

/// Design matrix rows aligned with the evaluation points.
struct EvaluatedBasis {
  Eigen::MatrixXd values;  // points x basis_dim, finite entries only
};

/// Evaluates a numeric basis at the given points.
///
/// B-spline bases use an open knot vector (boundary knots repeated
/// degree-many extra times) with equidistant interior knots, so rows sum to
/// one over [lo, hi] and carry at most degree + 1 nonzero entries. The
/// cyclic variant folds a uniform unclamped design modulo its dimension,
/// which makes rows at lo and hi coincide.
EvaluatedBasis evaluate_basis(const BasisSpec& spec, const Eigen::VectorXd& points);

/// Dummy-coding for categorical values; a value outside spec.levels is a
/// level error.
EvaluatedBasis evaluate_basis(const BasisSpec& spec, const std::vector<std::string>& points);

enum class PenaltyKind { none, difference, adjacency };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::none;
  int order = 2;                                 // difference: 1 or 2
  std::vector<std::pair<int, int>> neighbors;    // adjacency: edges on level indices
};

/// Finite-difference operator of the given order, (dim - order) x dim.
/// Row r applies the alternating binomial stencil starting at column r,
/// e.g. order 2: (1, -2, 1). Requires dim > order.
Eigen::MatrixXd difference_matrix(int dim, int order);

/// Cyclic variant, dim x dim: the stencil wraps column indices modulo dim.
Eigen::MatrixXd cyclic_difference_matrix(int dim, int order);

/// Penalty matrix for one margin: zero for none, D'D for difference
/// penalties (cyclic = true wraps the stencil), graph Laplacian for
/// adjacency. Always dim x dim, symmetric positive semidefinite with zero
/// row sums for the non-trivial kinds.
Eigen::MatrixXd penalty_matrix(const PenaltySpec& spec, int dim, bool cyclic = false);

/// Validation shared by fitting and deserialization; throws on
/// inconsistent specs (bad degree, empty levels, lo >= hi, ...).
void validate_basis(const BasisSpec& spec);
void validate_penalty(const PenaltySpec& spec, const BasisSpec& basis);

}  // namespace ctm
