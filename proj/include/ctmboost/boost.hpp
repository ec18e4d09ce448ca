#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmboost/dataset.hpp"
#include "ctmboost/grid.hpp"
#include "ctmboost/learner.hpp"
#include "ctmboost/loss.hpp"
#include "ctmboost/model.hpp"

namespace ctm {

enum class Resampling { none, bootstrap, kfold };

struct BoostConfig {
  int max_iterations = 500;
  double step_size = 0.1;
  LossKind loss = LossKind::bin;
  Link link{LinkKind::probit};
  Eigen::Index grid_size = 0;  // 0: min(N, 100)
  double grid_margin = 0.05;
  bool grid_observed_support = false;
  Resampling resampling = Resampling::none;
  int replications = 25;  // bootstrap count B or fold count k
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

void validate_config(const BoostConfig& config);

/// Fitting record: which learner won each iteration, the in-sample risk
/// before the first and after every update, and (when resampling was
/// configured) the full out-of-sample risk curves that chose m_stop.
struct FitTrace {
  std::vector<int> selected;      // winning learner index per iteration
  Eigen::VectorXd insample_risk;  // length selected.size() + 1; entry 0 at h = 0
  Eigen::MatrixXd oob_risks;      // replications x (max_iterations + 1); 0x0 if none
  std::vector<std::string> warnings;
  int m_stop = 0;
};

struct FitOutput {
  CtmModel model;
  FitTrace trace;
};

/// Grid for this response under the config (equidistant with margin, or the
/// observed support).
Grid build_grid(const Eigen::VectorXd& y, const BoostConfig& config);

/// Component-wise boosting: from zero coefficients, repeatedly fit every
/// learner to the negative-gradient lattice of the integrated loss, move
/// the single best one (lowest weighted lattice RSS, ties to the lowest
/// index) by step_size times its ridge solution. With resampling, the
/// stopping iteration is chosen on out-of-sample risk first and the final
/// model is refitted to that iteration on the full weights.
FitOutput fit(Dataset data, const std::vector<TensorLearner>& learners,
              const BoostConfig& config);

/// Out-of-sample risk curves, one row per usable replication, columns
/// m = 0..max_iterations. Bootstrap rows fit on multinomial count weights
/// and score observations drawn zero times; k-fold rows fit on all-but-fold
/// and score the fold. Replications whose holdout is empty are skipped with
/// a warning. Scoring uses the fitting loss.
Eigen::MatrixXd oob_risk_curves(Dataset data,
                                const std::vector<TensorLearner>& learners,
                                const BoostConfig& config,
                                std::vector<std::string>* warnings);

/// Iteration minimizing the replication-mean of the risk curves; ties break
/// toward the smallest iteration.
int select_mstop(const Eigen::MatrixXd& curves);

}  // namespace ctm
