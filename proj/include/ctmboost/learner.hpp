#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <string>

#include "ctmboost/basis.hpp"
#include "ctmboost/dataset.hpp"

namespace ctm {

/// One base-learner: a tensor product of a covariate margin (or a pure
/// intercept when column is empty) with a grid margin. Its ridge penalty is
/// the Kronecker sum lambda * (Px (x) I + I (x) P0), so the x-margin penalty
/// acts across grid blocks and the grid penalty within them; a single lambda
/// is calibrated against df_target. Coefficients are ordered x-major: entry
/// (kx, k0) sits at position kx * K0 + k0.
struct TensorLearner {
  std::string label;
  std::string column;  // empty: intercept margin
  BasisSpec x_basis;
  PenaltySpec x_penalty;
  BasisSpec y_basis;
  PenaltySpec y_penalty;
  double df_target = 4.0;  // meaningful only when some penalty is present
};

/// Precomputed fitting state. Design matrices, the grid Gram matrix, and
/// the unit-lambda penalty depend only on data and specs; the weighted
/// covariate Gram matrix, the calibrated lambda, and the factorization are
/// rebuilt whenever the weight vector changes and are then reused across
/// boosting iterations.
struct LearnerWork {
  int Kx = 0;
  int K0 = 0;
  Eigen::MatrixXd Bx;       // N x Kx
  Eigen::MatrixXd B0;       // n x K0
  Eigen::MatrixXd A0;       // B0' B0
  Eigen::MatrixXd penalty;  // Kx*K0 square, unit lambda
  bool penalized = false;

  Eigen::VectorXd weights;  // fitting weights currently in effect
  Eigen::MatrixXd Ax;       // Bx' diag(w) Bx
  Eigen::MatrixXd gram;     // kron(Ax, A0)
  double lambda = 0.0;
  double df = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> solver;  // of gram + lambda * penalty
  bool factored = false;
};

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Builds the weight-independent parts; validates specs against the data
/// column (numeric vs categorical) and the grid against the y-basis domain.
LearnerWork precompute(const TensorLearner& learner, const Dataset& data,
                       const Eigen::VectorXd& grid_points);

/// Installs a fitting weight vector: recomputes the weighted Gram matrix,
/// then expects calibrate_lambda / factorize before the first solve.
void set_weights(LearnerWork& work, const Eigen::VectorXd& weights);

/// Finds lambda such that trace[(gram + lambda * penalty)^{-1} gram] hits
/// df_target within 1e-6, by bisection on log10(lambda) over [-20, 20].
/// The trace is evaluated through the eigenvalues of the pencil
/// (gram, gram + penalty), so each bisection step costs O(K). Unattainable
/// targets raise a calibration error that reports the attainable range.
double calibrate_lambda(LearnerWork& work, double df_target);

/// Calibration policy used by the fitting loop: penalized learners are
/// tuned to df_target exactly; unpenalized learners have no tunable lambda,
/// so their degrees of freedom are simply recorded as the weighted-design
/// rank and df_target is ignored.
void calibrate_auto(LearnerWork& work, double df_target);

/// Factorizes gram + lambda * penalty for repeated solves.
void factorize(LearnerWork& work, double lambda);

/// Penalized least-squares coefficients for the gradient lattice U (grid
/// rows x observation columns) under the installed weights, via the
/// Kronecker normal equations
///   (Ax (x) A0 + lambda * penalty) beta = vec(B0' U diag(w) Bx),
/// never materializing the row-expanded design. Solutions failing the
/// normal-equation residual check by more than 1e-8 * (1 + |rhs|_inf) after
/// refinement raise a solve error.
Eigen::VectorXd ridge_fit(const LearnerWork& work, const Eigen::MatrixXd& U);

/// B0 * mat(beta) * Bx', the learner's fit over the whole lattice.
Eigen::MatrixXd fitted_lattice(const LearnerWork& work, const Eigen::VectorXd& beta);

/// Weighted lattice residual sum of squares (no penalty term): selection
/// compares raw fit quality.
double learner_rss(const LearnerWork& work, const Eigen::MatrixXd& U,
                   const Eigen::MatrixXd& lattice);
double learner_rss_beta(const LearnerWork& work, const Eigen::MatrixXd& U,
                        const Eigen::VectorXd& beta);

/// Single-point evaluation of the learner's contribution; x is ignored for
/// intercept margins.
double predict_increment(const TensorLearner& learner, const Eigen::VectorXd& beta,
                         double x, double v);
double predict_increment(const TensorLearner& learner, const Eigen::VectorXd& beta,
                         const std::string& x, double v);

}  // namespace ctm
