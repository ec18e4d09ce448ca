#pragma once

#include <Eigen/Dense>

#include "ctmboost/errors.hpp"

namespace ctm {

/// Standard normal distribution function, density, and quantile. The
/// quantile uses a rational initial guess refined by one Halley step and
/// satisfies normal_cdf(normal_quantile(u)) = u to well below 1e-10 on
/// (0.001, 0.999).
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double u);

enum class LinkKind { probit, logit, identity };

/// Inverse-link F turning a transformation value into a probability,
/// with density f = F' and quantile F^{-1}.
///
/// The identity link treats the transformation value itself as the
/// probability: cdf() clamps to [0, 1] for model evaluation, while the loss
/// functions below operate on the raw value (density is 1 everywhere), so
/// squared error under the identity link stays convex and smooth.
struct Link {
  LinkKind kind = LinkKind::probit;

  double cdf(double h) const;
  double density(double h) const;
  double quantile(double u) const;  // requires u in (0, 1); identity: u
};

enum class LossKind { bin, sqe, abe };

/// Pointwise loss rho(indicator, h) for the binary event Y <= v:
///   bin: negative binary log-likelihood of F(h),
///   sqe: squared error |indicator - F(h)|^2 / 2,
///   abe: absolute error |indicator - F(h)|.
/// The binary log-likelihood clamps F(h) to [1e-10, 1 - 1e-10]. abe is kept
/// for risk reporting; its population minimizer degenerates, so fitting
/// with it triggers a warning upstream.
double loss_value(LossKind loss, LinkKind link, double indicator, double h);

/// -d rho / d h at the current transformation value:
///   bin: [I / F(h) - (1 - I) / (1 - F(h))] * f(h)
///   sqe: (I - F(h)) * f(h)
///   abe: (2 I - 1) * f(h)
double negative_gradient(LossKind loss, LinkKind link, double indicator, double h);

/// Weighted empirical risk of a prediction lattice:
///   (1/n) * sum_i sum_l w_i * rho(1{y_i <= v_l}, predictions(l, i)),
/// with grid points indexing rows and observations indexing columns.
/// Weights are used as given; nothing is renormalized.
double empirical_risk(const Eigen::MatrixXd& predictions,
                      const Eigen::VectorXd& response,
                      const Eigen::VectorXd& weights,
                      const Eigen::VectorXd& grid_points,
                      LossKind loss, LinkKind link);

/// Per-observation column risks (1/n) * sum_l rho(...), so callers can dot
/// them with different weight vectors (fitting weights, holdout indicators)
/// in one pass over the lattice.
Eigen::VectorXd column_risks(const Eigen::MatrixXd& predictions,
                             const Eigen::VectorXd& response,
                             const Eigen::VectorXd& grid_points,
                             LossKind loss, LinkKind link);

}  // namespace ctm
