#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctmboost/boost.hpp"
#include "ctmboost/dataset.hpp"
#include "ctmboost/model.hpp"

namespace ctm {

/// Heteroscedastic varying-coefficient sample:
///   X1 ~ U[0,1], X2 ~ U[-2,2],
///   Y = X2 / (X1 + 0.5) + Z / (X1 + 0.5),  Z standard normal,
/// plus `noise_vars` additional U[0,1] columns ("noise1", ...) independent
/// of the response. Per observation the draws are consumed in the fixed
/// order x1, x2, noise..., z, so samples are reproducible from the seed.
Dataset simulate_hvc(Eigen::Index n, int noise_vars, std::uint64_t seed);

/// Responses from the same generator at one fixed covariate point.
Eigen::VectorXd simulate_hvc_at(double x1, double x2, Eigen::Index n,
                                std::uint64_t seed);

/// True conditional distribution function of the generator:
///   P(Y <= v | x1, x2) = Phi(v * (x1 + 0.5) - x2).
double true_cdf_hvc(double x1, double x2, double v);

/// True conditional quantile: v with true_cdf_hvc(x1, x2, v) = tau.
double true_quantile_hvc(double x1, double x2, double tau);

/// A conditional distribution function of (x1, x2, v), the common shape of
/// the fitted model and the generator truth.
using CdfSurface = std::function<double(double x1, double x2, double v)>;

/// Adapt a fitted model to a CdfSurface. Covariate columns named "x1" and
/// "x2" receive the evaluation point; every other numeric column the model
/// was trained on is held at `fill` (0.5 for the uniform noise columns).
/// The returned callable caches the profile of the last (x1, x2) point, so
/// sweeping v is cheap; it is not safe to share across threads.
CdfSurface model_surface(const CtmModel& model,
                         const std::vector<std::string>& other_columns,
                         double fill = 0.5);

/// Mean absolute deviation between two conditional distribution functions,
/// averaged over the response grid, at every point of the cartesian
/// (x1, x2) evaluation grid.
struct MadSurface {
  Eigen::VectorXd x1;   // flattened grid, x2 varying fastest
  Eigen::VectorXd x2;
  Eigen::VectorXd mad;  // mean_v |truth - estimate| per grid point
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

MadSurface mad_surface(const CdfSurface& estimate, const CdfSurface& truth,
                       const Eigen::VectorXd& x1_grid,
                       const Eigen::VectorXd& x2_grid,
                       const Eigen::VectorXd& v_grid);

/// The declared evaluation grids: 10 equidistant points over each covariate
/// domain.
Eigen::VectorXd default_x1_grid();
Eigen::VectorXd default_x2_grid();

/// One tensor-spline learner per numeric covariate of the generator sample
/// (cubic B-splines, second-order difference penalties on both margins, six
/// degrees of freedom), the model structure used throughout the study.
std::vector<TensorLearner> hvc_learners(const Dataset& data, const Grid& grid);

/// Replication study configuration. Defaults reproduce the desk-scale
/// experiment: 10 replications of N = 200 with bootstrap-selected stopping.
struct SimStudyConfig {
  Eigen::Index sample_size = 200;
  int replications = 10;
  int noise_vars = 0;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  int oob_replications = 25;
  double step_size = 0.1;
  Eigen::Index grid_size = 0;  // boosting default: min(N, 100)
  int threads = 0;
};

void validate_study_config(const SimStudyConfig& config);

/// Per-replication outcome. On failure `failure` carries the error text and
/// the numeric fields are NaN (m_stop -1); the study always continues.
struct StudyRow {
  int replication = 0;
  int noise_vars = 0;
  double min_mad = 0.0;
  double median_mad = 0.0;
  double max_mad = 0.0;
  int m_stop = 0;
  std::string failure;
};

/// True versus model quantile at one evaluation point, computed on the
/// first replication's fit.
struct QuantileRow {
  double x1 = 0.0;
  double x2 = 0.0;
  double tau = 0.0;
  double true_quantile = 0.0;
  double model_quantile = 0.0;  // NaN when `failure` is set
  std::string failure;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<QuantileRow> quantiles;  // tau in {0.5, 0.75, 0.9}
};

/// Run the replication study: per replication, draw a fresh sample (seeds
/// derived from the master seed), fit the tensor-spline model with
/// bootstrap-selected stopping, and summarize the MAD surface against the
/// generator truth. Replications run serially; each fit parallelizes its
/// bootstrap internally across `threads`.
StudyResult replicate_study(const SimStudyConfig& config);

/// Machine-readable tables (CSV with a header row; RFC-style quoting for
/// failure messages).
std::string study_table_csv(const StudyResult& result);
std::string quantile_table_csv(const StudyResult& result);

}  // namespace ctm
