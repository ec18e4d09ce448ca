#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ctmboost/boost.hpp"
#include "ctmboost/util.hpp"

using namespace ctm;

namespace {

Dataset toy_data(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(N), y(N);
  for (int i = 0; i < N; ++i) {
    x[i] = unit_uniform(rng);
    y[i] = (2.0 * unit_uniform(rng) - 1.0) +
           normal_quantile(0.001 + 0.998 * unit_uniform(rng)) / (x[i] + 0.5);
  }
  Dataset data;
  data.columns = {Column{"x", false, x, {}}};
  data.response = y;
  data.validate();
  return data;
}

TensorLearner intercept_learner(double g_lo, double g_hi, double df = 4.0) {
  TensorLearner learner;
  learner.label = "intercept";
  learner.x_basis.kind = BasisKind::intercept;
  learner.y_basis.kind = BasisKind::bspline;
  learner.y_basis.degree = 3;
  learner.y_basis.interior_knots = 8;
  learner.y_basis.lo = g_lo;
  learner.y_basis.hi = g_hi;
  learner.y_penalty.kind = PenaltyKind::difference;
  learner.y_penalty.order = 2;
  learner.df_target = df;
  return learner;
}

TensorLearner spline_learner(const std::string& column, double g_lo,
                             double g_hi, double df = 6.0) {
  TensorLearner learner;
  learner.label = column;
  learner.column = column;
  learner.x_basis.kind = BasisKind::bspline;
  learner.x_basis.degree = 3;
  learner.x_basis.interior_knots = 4;
  learner.x_basis.lo = 0.0;
  learner.x_basis.hi = 1.0;
  learner.x_penalty.kind = PenaltyKind::difference;
  learner.x_penalty.order = 2;
  learner.y_basis.kind = BasisKind::bspline;
  learner.y_basis.degree = 3;
  learner.y_basis.interior_knots = 4;
  learner.y_basis.lo = g_lo;
  learner.y_basis.hi = g_hi;
  learner.y_penalty.kind = PenaltyKind::difference;
  learner.y_penalty.order = 2;
  learner.df_target = df;
  return learner;
}

}  // namespace

TEST_CASE("equidistant grid construction follows the margin rule") {
  Eigen::VectorXd y(4);
  y << 0.0, 4.0, 6.0, 10.0;

  // A zero margin would place the first point on the smallest response.
  try {
    make_grid(y, 5, 0.0);
    FAIL("zero margin must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::margin);
  }

  const Grid grid = make_grid(y, 5, 0.05);
  CHECK(grid.kind == GridKind::equidistant);
  REQUIRE(grid.size() == 5);
  CHECK(grid.points[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(grid.points[4] == 10.0);
  CHECK(grid.points[0] < y.minCoeff());
  // Uniform spacing.
  const double step = grid.points[1] - grid.points[0];
  for (int l = 2; l < 5; ++l)
    CHECK(std::abs(grid.points[l] - grid.points[l - 1] - step) <
          1e-12 * std::abs(step));

  CHECK_THROWS_AS(make_grid(y, 1, 0.05), Error);
  CHECK_THROWS_AS(make_grid(Eigen::VectorXd::Constant(4, 3.0), 5, 0.05), Error);
}

TEST_CASE("observed-support grid is the sorted unique responses") {
  Eigen::VectorXd y(4);
  y << 1.0, 2.0, 2.0, 5.0;
  const Grid grid = make_support_grid(y);
  CHECK(grid.kind == GridKind::observed_support);
  REQUIRE(grid.size() == 3);
  CHECK(grid.points[0] == 1.0);
  CHECK(grid.points[1] == 2.0);
  CHECK(grid.points[2] == 5.0);
  CHECK_THROWS_AS(make_support_grid(Eigen::VectorXd::Constant(3, 1.0)), Error);
}

TEST_CASE("automatic grid size caps at 100 points") {
  BoostConfig config;
  CHECK(build_grid(toy_data(30, 1).response, config).size() == 30);
  CHECK(build_grid(toy_data(150, 1).response, config).size() == 100);
  config.grid_size = 17;
  CHECK(build_grid(toy_data(150, 1).response, config).size() == 17);
}

TEST_CASE("config validation") {
  BoostConfig config;
  config.step_size = 0.0;
  CHECK_THROWS_AS(validate_config(config), Error);
  config.step_size = 1.0;
  CHECK_THROWS_AS(validate_config(config), Error);
  config = BoostConfig{};
  config.max_iterations = -1;
  CHECK_THROWS_AS(validate_config(config), Error);
  config = BoostConfig{};
  config.resampling = Resampling::bootstrap;
  config.replications = 1;
  CHECK_THROWS_AS(validate_config(config), Error);
  config = BoostConfig{};
  config.grid_size = 1;
  CHECK_THROWS_AS(validate_config(config), Error);
}

TEST_CASE("zero iterations give the constant reference model") {
  Dataset data = toy_data(40, 7);
  BoostConfig config;
  config.max_iterations = 0;
  const Grid grid = build_grid(data.response, config);
  const FitOutput out =
      fit(data, {intercept_learner(grid.lo(), grid.hi())}, config);
  CHECK(out.trace.selected.empty());
  REQUIRE(out.trace.insample_risk.size() == 1);
  for (int i = 0; i < 5; ++i)
    CHECK(cdf(out.model, data, i, data.response[i]) == 0.5);
  // Initial risk equals the risk of the all-zero lattice.
  const Eigen::MatrixXd zeros =
      Eigen::MatrixXd::Zero(grid.size(), data.n());
  CHECK(out.trace.insample_risk[0] ==
        doctest::Approx(empirical_risk(zeros, data.response, data.weights,
                                       grid.points, config.loss,
                                       config.link.kind))
            .epsilon(1e-14));
}

TEST_CASE("intercept model recovers the empirical distribution function") {
  const int N = 300;
  Dataset data = toy_data(N, 11);
  BoostConfig config;
  config.loss = LossKind::sqe;
  config.link.kind = LinkKind::identity;
  config.max_iterations = 600;
  config.step_size = 0.1;
  const Grid grid = build_grid(data.response, config);
  // A generously sized response basis, so the boosting limit can track the
  // empirical distribution function closely.
  TensorLearner learner = intercept_learner(grid.lo(), grid.hi(), 8.0);
  learner.y_basis.interior_knots = 20;
  const FitOutput out = fit(data, {learner}, config);

  double sup = 0.0;
  for (Eigen::Index l = 0; l < grid.size(); ++l) {
    double ecdf = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      if (data.response[i] <= grid.points[l]) ecdf += 1.0;
    ecdf /= static_cast<double>(data.n());
    sup = std::max(sup,
                   std::abs(cdf(out.model, data, 0, grid.points[l]) - ecdf));
  }
  CHECK(sup <= 0.025);
}

TEST_CASE("one iteration moves exactly one coefficient block by the stepped ridge fit") {
  Dataset data = toy_data(30, 13);
  BoostConfig config;
  config.max_iterations = 2;
  const Grid grid = build_grid(data.response, config);
  std::vector<TensorLearner> learners = {
      intercept_learner(grid.lo(), grid.hi()),
      spline_learner("x", grid.lo(), grid.hi())};

  const FitOutput at2 = fit(data, learners, config);
  config.max_iterations = 3;
  const FitOutput at3 = fit(data, learners, config);

  // Independent single-step oracle: rebuild the iteration-3 update from the
  // iteration-2 state with direct calls into the learner layer.
  std::vector<LearnerWork> works;
  for (const auto& learner : learners)
    works.push_back(precompute(learner, data, grid.points));
  Eigen::MatrixXd hhat = Eigen::MatrixXd::Zero(grid.size(), data.n());
  for (std::size_t j = 0; j < works.size(); ++j) {
    set_weights(works[j], data.weights);
    calibrate_auto(works[j], learners[j].df_target);
    factorize(works[j], works[j].lambda);
    hhat += fitted_lattice(works[j], at2.model.components[j].gamma);
  }
  Eigen::MatrixXd U(grid.size(), data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    for (Eigen::Index l = 0; l < grid.size(); ++l)
      U(l, i) = negative_gradient(config.loss, config.link.kind,
                                  data.response[i] <= grid.points[l] ? 1.0 : 0.0,
                                  hhat(l, i));
  int best = -1;
  double best_rss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_beta;
  for (std::size_t j = 0; j < works.size(); ++j) {
    const Eigen::VectorXd beta = ridge_fit(works[j], U);
    const double rss = learner_rss_beta(works[j], U, beta);
    if (rss < best_rss) {
      best = static_cast<int>(j);
      best_rss = rss;
      best_beta = beta;
    }
  }

  REQUIRE(at3.trace.selected.size() == 3);
  CHECK(at3.trace.selected[2] == best);
  for (std::size_t j = 0; j < learners.size(); ++j) {
    const Eigen::VectorXd diff =
        at3.model.components[j].gamma - at2.model.components[j].gamma;
    if (static_cast<int>(j) == best) {
      CHECK((diff - config.step_size * best_beta).lpNorm<Eigen::Infinity>() <
            1e-12);
    } else {
      CHECK(diff.lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
}

TEST_CASE("in-sample risk is non-increasing for the smooth losses") {
  Dataset data = toy_data(60, 17);
  for (const LossKind loss : {LossKind::sqe, LossKind::bin}) {
    BoostConfig config;
    config.loss = loss;
    config.link.kind = loss == LossKind::sqe ? LinkKind::identity
                                             : LinkKind::probit;
    config.max_iterations = 60;
    const Grid grid = build_grid(data.response, config);
    const FitOutput out = fit(
        data,
        {intercept_learner(grid.lo(), grid.hi()),
         spline_learner("x", grid.lo(), grid.hi())},
        config);
    for (int m = 1; m < out.trace.insample_risk.size(); ++m)
      CHECK(out.trace.insample_risk[m] <=
            out.trace.insample_risk[m - 1] + 1e-10);
  }
}

TEST_CASE("final trace risk matches a recomputation from the coefficients") {
  Dataset data = toy_data(40, 19);
  BoostConfig config;
  config.max_iterations = 25;
  const Grid grid = build_grid(data.response, config);
  const FitOutput out = fit(
      data,
      {intercept_learner(grid.lo(), grid.hi()),
       spline_learner("x", grid.lo(), grid.hi())},
      config);
  Eigen::MatrixXd hhat(grid.size(), data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Profile profile = make_profile(out.model, data, i);
    for (Eigen::Index l = 0; l < grid.size(); ++l)
      hhat(l, i) = profile.transformation(grid.points[l]);
  }
  const double recomputed =
      empirical_risk(hhat, data.response, data.weights, grid.points,
                     config.loss, config.link.kind);
  CHECK(out.trace.insample_risk[25] ==
        doctest::Approx(recomputed).epsilon(1e-12));
}

TEST_CASE("stopping iteration selection follows the mean-curve argmin with ties down") {
  Eigen::MatrixXd single(1, 4);
  single << 3, 2, 1, 2;
  CHECK(select_mstop(single) == 2);

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(2, 5, 1.0);
  CHECK(select_mstop(flat) == 0);

  Eigen::MatrixXd two(2, 3);
  two << 4, 2, 3, 2, 2, 1;  // means (3, 2, 2): tie between m=1 and m=2
  CHECK(select_mstop(two) == 1);

  CHECK_THROWS_AS(select_mstop(Eigen::MatrixXd()), Error);
}

TEST_CASE("bootstrap risk curves have one finite row per replication") {
  Dataset data = toy_data(60, 23);
  BoostConfig config;
  config.max_iterations = 20;
  config.resampling = Resampling::bootstrap;
  config.replications = 4;
  config.seed = 99;
  std::vector<std::string> warnings;
  const Grid grid = build_grid(data.response, config);
  const Eigen::MatrixXd curves = oob_risk_curves(
      data,
      {intercept_learner(grid.lo(), grid.hi()),
       spline_learner("x", grid.lo(), grid.hi())},
      config, &warnings);
  CHECK(warnings.empty());
  REQUIRE(curves.rows() == 4);
  REQUIRE(curves.cols() == 21);
  CHECK(curves.allFinite());
  CHECK((curves.array() > 0.0).all());
  // Distinct replications hold out different observations.
  CHECK((curves.row(0) - curves.row(1)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("cross-validation risk curves produce one row per fold") {
  Dataset data = toy_data(55, 29);
  BoostConfig config;
  config.max_iterations = 15;
  config.resampling = Resampling::kfold;
  config.replications = 5;
  const Grid grid = build_grid(data.response, config);
  std::vector<std::string> warnings;
  const Eigen::MatrixXd curves = oob_risk_curves(
      data, {intercept_learner(grid.lo(), grid.hi())}, config, &warnings);
  CHECK(warnings.empty());
  REQUIRE(curves.rows() == 5);
  REQUIRE(curves.cols() == 16);
  CHECK(curves.allFinite());

  config.replications = 56;
  CHECK_THROWS_AS(
      oob_risk_curves(data, {intercept_learner(grid.lo(), grid.hi())}, config,
                      nullptr),
      Error);
}

TEST_CASE("resampled fits stop at the out-of-sample argmin and refit to it") {
  Dataset data = toy_data(60, 31);
  BoostConfig config;
  config.max_iterations = 40;
  config.resampling = Resampling::bootstrap;
  config.replications = 3;
  config.seed = 5;
  config.threads = 2;
  const Grid grid = build_grid(data.response, config);
  const FitOutput out = fit(
      data,
      {intercept_learner(grid.lo(), grid.hi()),
       spline_learner("x", grid.lo(), grid.hi())},
      config);
  CHECK(out.trace.oob_risks.rows() == 3);
  CHECK(out.trace.m_stop == select_mstop(out.trace.oob_risks));
  CHECK(static_cast<int>(out.trace.selected.size()) == out.trace.m_stop);
  CHECK(out.model.m_stop == out.trace.m_stop);
}

TEST_CASE("seeded runs are identical, including under parallel resampling") {
  Dataset data = toy_data(50, 37);
  BoostConfig config;
  config.max_iterations = 25;
  config.resampling = Resampling::bootstrap;
  config.replications = 4;
  config.seed = 1234;
  const Grid grid = build_grid(data.response, config);

  config.threads = 1;
  const FitOutput a = fit(
      data,
      {intercept_learner(grid.lo(), grid.hi()),
       spline_learner("x", grid.lo(), grid.hi())},
      config);
  config.threads = 4;
  const FitOutput b = fit(
      data,
      {intercept_learner(grid.lo(), grid.hi()),
       spline_learner("x", grid.lo(), grid.hi())},
      config);

  CHECK(a.trace.m_stop == b.trace.m_stop);
  CHECK((a.trace.oob_risks - b.trace.oob_risks).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t j = 0; j < a.model.components.size(); ++j)
    CHECK((a.model.components[j].gamma - b.model.components[j].gamma)
              .lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(serialize(a.model) == serialize(b.model));
}

TEST_CASE("fitting with the absolute loss warns about the degenerate minimizer") {
  Dataset data = toy_data(30, 41);
  BoostConfig config;
  config.loss = LossKind::abe;
  config.max_iterations = 3;
  const Grid grid = build_grid(data.response, config);
  const FitOutput out =
      fit(data, {intercept_learner(grid.lo(), grid.hi())}, config);
  REQUIRE(!out.trace.warnings.empty());
  CHECK(out.trace.warnings[0].find("degenerate") != std::string::npos);
}

TEST_CASE("fit rejects empty learner lists and degenerate data") {
  Dataset data = toy_data(30, 43);
  BoostConfig config;
  CHECK_THROWS_AS(fit(data, {}, config), Error);

  Dataset constant;
  constant.columns = {Column{"x", false, Eigen::VectorXd::Zero(5), {}}};
  constant.response = Eigen::VectorXd::Constant(5, 2.0);
  CHECK_THROWS_AS(fit(constant, {intercept_learner(-1, 1)}, config), Error);
}

TEST_CASE("a too-small degrees-of-freedom target surfaces as a calibration error") {
  Dataset data = toy_data(30, 47);
  BoostConfig config;
  config.max_iterations = 2;
  const Grid grid = build_grid(data.response, config);
  // bspline x bspline with second-order penalties on both margins has a
  // four-dimensional penalty null space, so a target of 4 is unattainable.
  auto learner = spline_learner("x", grid.lo(), grid.hi(), 4.0);
  try {
    fit(data, {learner}, config);
    FAIL("expected a calibration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::calibration);
  }
}
