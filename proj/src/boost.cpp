#include "ctmboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "ctmboost/util.hpp"

namespace ctm {

void validate_config(const BoostConfig& config) {
  if (config.max_iterations < 0)
    fail(ErrorKind::config, "max_iterations must be nonnegative");
  if (!(config.step_size > 0.0 && config.step_size < 1.0))
    fail(ErrorKind::config, "step size must lie strictly inside (0, 1)");
  if (config.grid_size != 0 && config.grid_size < 2)
    fail(ErrorKind::config, "grid size must be at least 2 (or 0 for automatic)");
  if (config.resampling != Resampling::none && config.replications < 2)
    fail(ErrorKind::config, "resampling needs at least 2 replications");
}

Grid build_grid(const Eigen::VectorXd& y, const BoostConfig& config) {
  if (config.grid_observed_support) return make_support_grid(y);
  const Eigen::Index n = config.grid_size > 0
                             ? config.grid_size
                             : std::min<Eigen::Index>(y.size(), 100);
  return make_grid(y, n, config.grid_margin);
}

namespace {

struct EngineOutput {
  std::vector<Eigen::VectorXd> gamma;
  std::vector<int> selected;
  Eigen::VectorXd fit_risk;   // iterations + 1 entries
  Eigen::VectorXd eval_risk;  // same, or empty when no eval weights
  std::vector<double> lambdas;
  std::vector<double> dfs;
};

/// One full boosting run for a fixed weight vector: calibrate and factorize
/// every learner once, then iterate gradient fitting and selection. The
/// transformation lattice is maintained incrementally and cross-checked
/// against a recomputation from the coefficients every 50 iterations.
EngineOutput run_engine(const std::vector<LearnerWork>& templates,
                        const std::vector<TensorLearner>& learners,
                        const Eigen::VectorXd& y, const Grid& grid,
                        const BoostConfig& config, int iterations,
                        const Eigen::VectorXd& fit_w,
                        const Eigen::VectorXd* eval_w) {
  const Eigen::Index n = grid.size();
  const Eigen::Index N = y.size();
  const std::size_t J = templates.size();
  const LinkKind link = config.link.kind;

  std::vector<LearnerWork> works = templates;
  EngineOutput out;
  out.gamma.resize(J);
  out.lambdas.resize(J);
  out.dfs.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    set_weights(works[j], fit_w);
    calibrate_auto(works[j], learners[j].df_target);
    factorize(works[j], works[j].lambda);
    out.gamma[j] = Eigen::VectorXd::Zero(works[j].Kx * works[j].K0);
    out.lambdas[j] = works[j].lambda;
    out.dfs[j] = works[j].df;
  }

  Eigen::MatrixXd indicator(n, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index l = 0; l < n; ++l)
      indicator(l, i) = y[i] <= grid.points[l] ? 1.0 : 0.0;

  Eigen::MatrixXd hhat = Eigen::MatrixXd::Zero(n, N);
  out.fit_risk.resize(iterations + 1);
  if (eval_w) out.eval_risk.resize(iterations + 1);
  const auto record = [&](int m) {
    const Eigen::VectorXd cr =
        column_risks(hhat, y, grid.points, config.loss, link);
    out.fit_risk[m] = cr.dot(fit_w);
    if (eval_w) out.eval_risk[m] = cr.dot(*eval_w);
  };
  record(0);

  Eigen::MatrixXd U(n, N);
  out.selected.reserve(iterations);
  for (int m = 1; m <= iterations; ++m) {
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index l = 0; l < n; ++l) {
        const double g =
            negative_gradient(config.loss, link, indicator(l, i), hhat(l, i));
        if (!std::isfinite(g))
          fail(ErrorKind::numeric, "non-finite gradient lattice at iteration " +
                                       std::to_string(m));
        U(l, i) = g;
      }

    int best = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_beta;
    Eigen::MatrixXd best_lattice;
    for (std::size_t j = 0; j < J; ++j) {
      Eigen::VectorXd beta = ridge_fit(works[j], U);
      Eigen::MatrixXd lattice = fitted_lattice(works[j], beta);
      const double rss = learner_rss(works[j], U, lattice);
      if (rss < best_rss) {
        best = static_cast<int>(j);
        best_rss = rss;
        best_beta = std::move(beta);
        best_lattice = std::move(lattice);
      }
    }

    out.gamma[best] += config.step_size * best_beta;
    hhat += config.step_size * best_lattice;
    out.selected.push_back(best);
    record(m);

    if (m % 50 == 0 || m == iterations) {
      Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, N);
      for (std::size_t j = 0; j < J; ++j)
        full += fitted_lattice(works[j], out.gamma[j]);
      if ((full - hhat).cwiseAbs().maxCoeff() > 1e-10)
        fail(ErrorKind::numeric,
             "incrementally maintained transformation lattice drifted from "
             "the coefficients at iteration " +
                 std::to_string(m));
    }
  }
  return out;
}

struct Replication {
  bool usable = false;
  Eigen::VectorXd curve;
  std::string warning;
};

Eigen::MatrixXd oob_curves_impl(const std::vector<LearnerWork>& templates,
                                const std::vector<TensorLearner>& learners,
                                const Eigen::VectorXd& y, const Grid& grid,
                                const BoostConfig& config,
                                const Eigen::VectorXd& user_w,
                                std::vector<std::string>* warnings) {
  const Eigen::Index N = y.size();
  const int R = config.replications;

  std::vector<Eigen::Index> fold(N, 0);
  if (config.resampling == Resampling::kfold) {
    if (static_cast<Eigen::Index>(R) > N)
      fail(ErrorKind::config, "more folds than observations");
    std::vector<Eigen::Index> perm(N);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 rng(mix_seed(config.seed, 0));
    for (Eigen::Index i = N - 1; i > 0; --i)
      std::swap(perm[i], perm[below(rng, static_cast<std::uint64_t>(i) + 1)]);
    for (Eigen::Index p = 0; p < N; ++p) fold[perm[p]] = p % R;
  }

  std::vector<Replication> reps(R);
  parallel_for(static_cast<std::size_t>(R), config.threads, [&](std::size_t b) {
    Eigen::VectorXd fit_w(N), eval_w(N);
    if (config.resampling == Resampling::bootstrap) {
      std::mt19937_64 rng(mix_seed(config.seed, b + 1));
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(N);
      for (Eigen::Index k = 0; k < N; ++k)
        counts[below(rng, static_cast<std::uint64_t>(N))] += 1.0;
      fit_w = counts.cwiseProduct(user_w);
      for (Eigen::Index i = 0; i < N; ++i)
        eval_w[i] = counts[i] == 0.0 ? user_w[i] : 0.0;
    } else {
      for (Eigen::Index i = 0; i < N; ++i) {
        const bool held_out = fold[i] == static_cast<Eigen::Index>(b);
        fit_w[i] = held_out ? 0.0 : user_w[i];
        eval_w[i] = held_out ? user_w[i] : 0.0;
      }
    }
    if (eval_w.sum() <= 0.0) {
      reps[b].warning = "replication " + std::to_string(b) +
                        " holds out no observations; skipped";
      return;
    }
    EngineOutput eo = run_engine(templates, learners, y, grid, config,
                                 config.max_iterations, fit_w, &eval_w);
    reps[b].usable = true;
    reps[b].curve = std::move(eo.eval_risk);
  });

  Eigen::Index rows = 0;
  for (const auto& rep : reps)
    if (rep.usable) ++rows;
  Eigen::MatrixXd curves(rows, config.max_iterations + 1);
  Eigen::Index r = 0;
  for (const auto& rep : reps) {
    if (rep.usable)
      curves.row(r++) = rep.curve.transpose();
    else if (warnings)
      warnings->push_back(rep.warning);
  }
  return curves;
}

std::vector<LearnerWork> precompute_all(
    const std::vector<TensorLearner>& learners, const Dataset& data,
    const Grid& grid) {
  if (learners.empty())
    fail(ErrorKind::config, "at least one learner is required");
  std::vector<LearnerWork> templates;
  templates.reserve(learners.size());
  for (const auto& learner : learners)
    templates.push_back(precompute(learner, data, grid.points));
  return templates;
}

}  // namespace

int select_mstop(const Eigen::MatrixXd& curves) {
  if (curves.rows() == 0 || curves.cols() == 0)
    fail(ErrorKind::data, "no risk curves to select a stopping iteration from");
  const Eigen::VectorXd mean = curves.colwise().mean();
  int best = 0;
  for (int m = 1; m < mean.size(); ++m)
    if (mean[m] < mean[best]) best = m;
  return best;
}

Eigen::MatrixXd oob_risk_curves(Dataset data,
                                const std::vector<TensorLearner>& learners,
                                const BoostConfig& config,
                                std::vector<std::string>* warnings) {
  validate_config(config);
  if (config.resampling == Resampling::none)
    fail(ErrorKind::config, "out-of-sample risk curves require resampling");
  data.validate();
  require_fittable(data);
  const Grid grid = build_grid(data.response, config);
  const auto templates = precompute_all(learners, data, grid);
  return oob_curves_impl(templates, learners, data.response, grid, config,
                         data.weights, warnings);
}

FitOutput fit(Dataset data, const std::vector<TensorLearner>& learners,
              const BoostConfig& config) {
  validate_config(config);
  data.validate();
  require_fittable(data);
  const Grid grid = build_grid(data.response, config);
  const auto templates = precompute_all(learners, data, grid);

  FitTrace trace;
  if (config.loss == LossKind::abe)
    trace.warnings.push_back(
        "absolute-error loss selected for fitting: its population minimizer "
        "is degenerate, treat this fit as diagnostic only");

  int m_stop = config.max_iterations;
  if (config.resampling != Resampling::none) {
    trace.oob_risks = oob_curves_impl(templates, learners, data.response, grid,
                                      config, data.weights, &trace.warnings);
    if (trace.oob_risks.rows() == 0)
      fail(ErrorKind::degenerate,
           "no usable resampling replication: every holdout was empty");
    m_stop = select_mstop(trace.oob_risks);
  }

  EngineOutput out = run_engine(templates, learners, data.response, grid,
                                config, m_stop, data.weights, nullptr);
  trace.selected = std::move(out.selected);
  trace.insample_risk = std::move(out.fit_risk);
  trace.m_stop = m_stop;

  CtmModel model;
  model.link = config.link;
  model.loss = config.loss;
  model.grid = grid;
  model.n_train = data.n();
  model.m_stop = m_stop;
  model.step_size = config.step_size;
  model.seed = config.seed;
  model.components.reserve(learners.size());
  for (std::size_t j = 0; j < learners.size(); ++j)
    model.components.push_back(
        {learners[j], std::move(out.gamma[j]), out.lambdas[j], out.dfs[j]});
  return {std::move(model), std::move(trace)};
}

}  // namespace ctm
