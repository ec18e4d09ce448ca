#include "ctmboost/learner.hpp"

#include <cmath>
#include <sstream>

namespace ctm {

namespace {

constexpr double kLogLambdaLo = -20.0;
constexpr double kLogLambdaHi = 20.0;
constexpr double kDfTolerance = 1e-6;

Eigen::VectorXd single(double v) {
  Eigen::VectorXd out(1);
  out[0] = v;
  return out;
}

Eigen::MatrixXd x_design(const TensorLearner& learner, const Dataset& data) {
  if (learner.column.empty()) {
    if (learner.x_basis.kind != BasisKind::intercept)
      fail(ErrorKind::config,
           "learner '" + learner.label + "' has no column; its x-margin must be an intercept");
    return Eigen::MatrixXd::Ones(data.n(), 1);
  }
  if (learner.x_basis.kind == BasisKind::intercept)
    fail(ErrorKind::config,
         "learner '" + learner.label + "' names a column; an intercept margin takes none");
  const Column& col = data.column(learner.column);
  if (col.categorical != (learner.x_basis.kind == BasisKind::dummy))
    fail(ErrorKind::config, "column '" + col.name + "' is " +
                                (col.categorical ? "categorical" : "numeric") +
                                ", which does not fit the learner's x-basis kind");
  if (col.categorical) return evaluate_basis(learner.x_basis, col.labels).values;
  return evaluate_basis(learner.x_basis, col.numeric).values;
}

/// Eigenvalues theta of the pencil (gram, gram + penalty), clamped to
/// [0, 1]. The effective degrees of freedom of the ridge fit are then
/// sum_k theta_k / (theta_k + lambda * (1 - theta_k)).
Eigen::VectorXd pencil_spectrum(const LearnerWork& work) {
  Eigen::LLT<Eigen::MatrixXd> llt(work.gram + work.penalty);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::calibration,
         "penalized system is singular for every lambda: the weighted design "
         "and the penalty share a null direction");
  const auto L = llt.matrixL();
  Eigen::MatrixXd tmp = L.solve(work.gram);
  Eigen::MatrixXd g = L.solve(tmp.transpose());
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::numeric, "eigendecomposition for lambda calibration failed");
  return es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
}

double df_at(const Eigen::VectorXd& theta, double lambda) {
  double df = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k)
    df += theta[k] / (theta[k] + lambda * (1.0 - theta[k]));
  return df;
}

}  // namespace

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

LearnerWork precompute(const TensorLearner& learner, const Dataset& data,
                       const Eigen::VectorXd& grid_points) {
  validate_basis(learner.y_basis);
  if (!learner.column.empty()) validate_basis(learner.x_basis);
  validate_penalty(learner.y_penalty, learner.y_basis);

  LearnerWork work;
  work.Bx = x_design(learner, data);
  work.Kx = static_cast<int>(work.Bx.cols());
  if (!learner.column.empty()) validate_penalty(learner.x_penalty, learner.x_basis);
  else if (learner.x_penalty.kind != PenaltyKind::none)
    fail(ErrorKind::config, "intercept margins cannot carry a penalty");

  if (learner.y_basis.kind == BasisKind::dummy)
    fail(ErrorKind::config, "the grid margin must be a numeric basis");
  work.B0 = evaluate_basis(learner.y_basis, grid_points).values;
  work.K0 = static_cast<int>(work.B0.cols());
  work.A0 = work.B0.transpose() * work.B0;

  const Eigen::MatrixXd px =
      penalty_matrix(learner.x_penalty, work.Kx,
                     learner.x_basis.kind == BasisKind::cyclic_bspline);
  const Eigen::MatrixXd p0 =
      penalty_matrix(learner.y_penalty, work.K0,
                     learner.y_basis.kind == BasisKind::cyclic_bspline);
  work.penalty = kronecker(px, Eigen::MatrixXd::Identity(work.K0, work.K0)) +
                 kronecker(Eigen::MatrixXd::Identity(work.Kx, work.Kx), p0);
  work.penalized = work.penalty.cwiseAbs().maxCoeff() > 0.0;
  return work;
}

void set_weights(LearnerWork& work, const Eigen::VectorXd& weights) {
  if (weights.size() != work.Bx.rows())
    fail(ErrorKind::dimension, "one fitting weight per observation required");
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (!(std::isfinite(weights[i]) && weights[i] >= 0.0))
      fail(ErrorKind::data, "fitting weights must be finite and nonnegative");
  if (weights.sum() <= 0.0)
    fail(ErrorKind::data, "all fitting weights are zero; nothing to fit");
  work.weights = weights;
  work.Ax = work.Bx.transpose() * weights.asDiagonal() * work.Bx;
  work.gram = kronecker(work.Ax, work.A0);
  work.factored = false;
}

namespace {

int weighted_design_rank(const LearnerWork& work) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(work.gram);
  const double cutoff = 1e-9 * std::max(1.0, es.eigenvalues().maxCoeff());
  int rank = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()[k] > cutoff) ++rank;
  return rank;
}

}  // namespace

double calibrate_lambda(LearnerWork& work, double df_target) {
  const int K = work.Kx * work.K0;
  if (!work.penalized) {
    // Degrees of freedom do not depend on lambda; only the full-rank trace
    // K is attainable, with lambda pinned at zero.
    const int rank = weighted_design_rank(work);
    if (std::abs(df_target - rank) > kDfTolerance) {
      std::ostringstream msg;
      msg << "unpenalized learner has fixed degrees of freedom " << rank
          << "; target " << df_target << " is unattainable";
      fail(ErrorKind::calibration, msg.str());
    }
    work.lambda = 0.0;
    work.df = rank;
    work.factored = false;
    return 0.0;
  }

  const Eigen::VectorXd theta = pencil_spectrum(work);
  int null_dim = 0;
  for (Eigen::Index k = 0; k < theta.size(); ++k)
    if (theta[k] >= 1.0 - 1e-9) ++null_dim;
  const double df_hi = df_at(theta, std::pow(10.0, kLogLambdaLo));
  if (df_target <= null_dim + 1e-7 || df_target > df_hi + kDfTolerance) {
    std::ostringstream msg;
    msg << "degrees-of-freedom target " << df_target
        << " is unattainable: it must lie strictly above the penalty null "
           "space dimension "
        << null_dim << " and at most near the weighted-design rank (attainable "
        << "range (" << null_dim << ", " << df_hi << "), coefficient count " << K << ")";
    fail(ErrorKind::calibration, msg.str());
  }

  double lo = kLogLambdaLo, hi = kLogLambdaHi;
  double mid = 0.0, df_mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    df_mid = df_at(theta, std::pow(10.0, mid));
    if (std::abs(df_mid - df_target) <= 1e-9) break;
    if (df_mid > df_target)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(df_mid - df_target) > kDfTolerance)
    fail(ErrorKind::calibration, "lambda bisection did not reach the requested "
                                 "degrees of freedom within tolerance");
  work.lambda = std::pow(10.0, mid);
  work.df = df_mid;
  work.factored = false;
  return work.lambda;
}

void calibrate_auto(LearnerWork& work, double df_target) {
  if (work.penalized) {
    calibrate_lambda(work, df_target);
  } else {
    work.lambda = 0.0;
    work.df = weighted_design_rank(work);
    work.factored = false;
  }
}

void factorize(LearnerWork& work, double lambda) {
  work.lambda = lambda;
  work.solver.compute(lambda == 0.0 ? work.gram
                                    : (work.gram + lambda * work.penalty).eval());
  if (work.solver.info() != Eigen::Success) {
    std::string hint = lambda == 0.0
                           ? "; the design is rank deficient, supply a "
                             "penalty so lambda can be positive"
                           : "";
    fail(ErrorKind::solve, "normal equations could not be factorized" + hint);
  }
  work.factored = true;
}

Eigen::VectorXd ridge_fit(const LearnerWork& work, const Eigen::MatrixXd& U) {
  if (!work.factored)
    fail(ErrorKind::solve, "ridge fit requested before weights were installed");
  if (U.rows() != work.B0.rows() || U.cols() != work.Bx.rows())
    fail(ErrorKind::dimension, "gradient lattice must be grid-size x observation-count");

  const Eigen::MatrixXd rhs_mat =
      work.B0.transpose() * (U * work.weights.asDiagonal() * work.Bx);
  const Eigen::Map<const Eigen::VectorXd> rhs(rhs_mat.data(), rhs_mat.size());

  Eigen::VectorXd beta = work.solver.solve(rhs);
  auto residual = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    Eigen::VectorXd r = work.gram * b - rhs;
    if (work.lambda != 0.0) r += work.lambda * (work.penalty * b);
    return r;
  };
  const double tol = 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd res = residual(beta);
  if (res.lpNorm<Eigen::Infinity>() > tol) {
    beta -= work.solver.solve(res);
    res = residual(beta);
    if (res.lpNorm<Eigen::Infinity>() > tol) {
      std::string hint = work.lambda == 0.0
                             ? "; the design is rank deficient, supply a "
                               "penalty so lambda can be positive"
                             : "";
      fail(ErrorKind::solve,
           "normal equations solved too inaccurately (residual " +
               std::to_string(res.lpNorm<Eigen::Infinity>()) + ")" + hint);
    }
  }
  return beta;
}

Eigen::MatrixXd fitted_lattice(const LearnerWork& work, const Eigen::VectorXd& beta) {
  if (beta.size() != work.Kx * work.K0)
    fail(ErrorKind::dimension, "coefficient length must equal Kx * K0");
  const Eigen::Map<const Eigen::MatrixXd> mat(beta.data(), work.K0, work.Kx);
  return work.B0 * mat * work.Bx.transpose();
}

double learner_rss(const LearnerWork& work, const Eigen::MatrixXd& U,
                   const Eigen::MatrixXd& lattice) {
  const Eigen::VectorXd col_sq =
      (U - lattice).colwise().squaredNorm().transpose();
  return col_sq.dot(work.weights);
}

double learner_rss_beta(const LearnerWork& work, const Eigen::MatrixXd& U,
                        const Eigen::VectorXd& beta) {
  return learner_rss(work, U, fitted_lattice(work, beta));
}

namespace {

double increment_from(const TensorLearner& learner, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& bx, double v) {
  const int Kx = static_cast<int>(bx.size());
  const Eigen::VectorXd b0 =
      evaluate_basis(learner.y_basis, single(v)).values.row(0).transpose();
  const int K0 = static_cast<int>(b0.size());
  if (beta.size() != Kx * K0)
    fail(ErrorKind::dimension, "coefficient length must equal Kx * K0");
  const Eigen::Map<const Eigen::MatrixXd> mat(beta.data(), K0, Kx);
  return b0.dot(mat * bx);
}

}  // namespace

double predict_increment(const TensorLearner& learner, const Eigen::VectorXd& beta,
                         double x, double v) {
  Eigen::VectorXd bx;
  if (learner.column.empty()) {
    bx = Eigen::VectorXd::Ones(1);
  } else {
    bx = evaluate_basis(learner.x_basis, single(x)).values.row(0).transpose();
  }
  return increment_from(learner, beta, bx, v);
}

double predict_increment(const TensorLearner& learner, const Eigen::VectorXd& beta,
                         const std::string& x, double v) {
  const Eigen::VectorXd bx =
      evaluate_basis(learner.x_basis, std::vector<std::string>{x}).values.row(0).transpose();
  return increment_from(learner, beta, bx, v);
}

}  // namespace ctm
