#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmboost/dataset.hpp"
#include "ctmboost/grid.hpp"
#include "ctmboost/learner.hpp"
#include "ctmboost/loss.hpp"

namespace ctm {

/// One additive component of the fitted transformation function: the
/// learner specification plus its accumulated coefficients and the
/// smoothing state it was fitted with.
struct FittedLearner {
  TensorLearner spec;
  Eigen::VectorXd gamma;  // Kx * K0, x-major
  double lambda = 0.0;
  double df = 0.0;
};

/// A fitted conditional distribution model: P(Y <= v | x) is link.cdf of
/// the sum of the component transformations. Immutable after fitting; all
/// evaluation entry points are const and safe to call concurrently.
struct CtmModel {
  Link link;
  LossKind loss = LossKind::bin;
  Grid grid;
  std::vector<FittedLearner> components;
  Eigen::Index n_train = 0;
  int m_stop = 0;
  double step_size = 0.1;
  std::uint64_t seed = 0;
};

/// Per-observation evaluation cache: collapsing each component's
/// coefficient matrix against the covariate basis once makes repeated
/// evaluation over response values a single small dot product.
struct Profile {
  const CtmModel* model = nullptr;
  std::vector<Eigen::VectorXd> coef;  // per component, length K0_j

  double transformation(double v) const;
  double cdf(double v) const { return model->link.cdf(transformation(v)); }
};

Profile make_profile(const CtmModel& model, const Dataset& data,
                     Eigen::Index row);

/// Transformation value h(v | x_row) and distribution function
/// P(Y <= v | x_row) for one data row.
double transformation(const CtmModel& model, const Dataset& data,
                      Eigen::Index row, double v);
double cdf(const CtmModel& model, const Dataset& data, Eigen::Index row,
           double v);

/// Smallest v on a 512-point refinement of the training grid (plus one
/// bisection refinement to 1e-8 of the grid range) with cdf(v) >= tau.
/// Requires the profile to be monotone over the refinement (else a
/// monotonicity error) and tau within the attained cdf range (else a tail
/// error naming that range).
double quantile(const CtmModel& model, const Dataset& data, Eigen::Index row,
                double tau);
double quantile(const CtmModel& model, const Profile& profile, double tau);

/// An adjacent grid pair where the transformation decreases by more than
/// 1e-10 for some covariate row: evidence the fit is not a valid
/// distribution function there. Reported, never repaired.
struct Violation {
  Eigen::Index row = 0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  double drop = 0.0;  // h(v_lo) - h(v_hi) > 1e-10
};

std::vector<Violation> monotonicity_check(const CtmModel& model,
                                          const Dataset& data,
                                          const std::vector<Eigen::Index>& rows);

/// Residual diagnostics: transformation values at the observed responses
/// should follow the link distribution when the model is right, and their
/// ranks should not track the response ranks too closely (a high rank
/// correlation flags underfitting toward the raw response ordering).
struct DiagnosticsReport {
  Eigen::VectorXd residuals;      // h(Y_i | X_i)
  double ks = 0.0;                // two-sided KS statistic vs the link F
  double rank_correlation = 0.0;  // Spearman, residual ranks vs response ranks
  std::vector<Violation> violations;
};

DiagnosticsReport diagnostics(const CtmModel& model, const Dataset& data);

/// Synthetic responses drawn from the fitted model at the given covariate
/// rows: Y~_i = quantile(model, X_i, U_i) with U_i uniform. Tail and
/// monotonicity errors propagate.
Eigen::VectorXd model_bootstrap(const CtmModel& model, const Dataset& data,
                                std::uint64_t seed);

/// Versioned document round trip. Serialization preserves every
/// coefficient bit-exactly; deserialization rejects unknown versions and
/// malformed documents.
std::string serialize(const CtmModel& model);
CtmModel deserialize(const std::string& text);

}  // namespace ctm
