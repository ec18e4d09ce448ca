#include "ctmboost/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "ctmboost/util.hpp"

namespace ctm {

namespace {

double uniform_nonzero(std::mt19937_64& rng) {
  double u = unit_uniform(rng);
  while (u == 0.0) u = unit_uniform(rng);
  return u;
}

std::string noise_name(int j) { return "noise" + std::to_string(j + 1); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

Dataset simulate_hvc(Eigen::Index n, int noise_vars, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::config, "sample size must be at least 1");
  if (noise_vars < 0) fail(ErrorKind::config, "noise variable count must be nonnegative");
  std::mt19937_64 rng(seed);

  Eigen::VectorXd x1(n), x2(n), y(n);
  std::vector<Eigen::VectorXd> noise(noise_vars, Eigen::VectorXd(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    x1[i] = unit_uniform(rng);
    x2[i] = -2.0 + 4.0 * unit_uniform(rng);
    for (int j = 0; j < noise_vars; ++j) noise[j][i] = unit_uniform(rng);
    const double z = normal_quantile(uniform_nonzero(rng));
    y[i] = (x2[i] + z) / (x1[i] + 0.5);
  }

  Dataset data;
  data.columns = {Column{"x1", false, x1, {}}, Column{"x2", false, x2, {}}};
  for (int j = 0; j < noise_vars; ++j)
    data.columns.push_back(Column{noise_name(j), false, noise[j], {}});
  data.response = y;
  data.validate();
  return data;
}

Eigen::VectorXd simulate_hvc_at(double x1, double x2, Eigen::Index n,
                                std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::config, "sample size must be at least 1");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = (x2 + normal_quantile(uniform_nonzero(rng))) / (x1 + 0.5);
  return y;
}

double true_cdf_hvc(double x1, double x2, double v) {
  return normal_cdf(v * (x1 + 0.5) - x2);
}

double true_quantile_hvc(double x1, double x2, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    fail(ErrorKind::level, "quantile level must lie strictly inside (0, 1)");
  return (normal_quantile(tau) + x2) / (x1 + 0.5);
}

CdfSurface model_surface(const CtmModel& model,
                         const std::vector<std::string>& other_columns,
                         double fill) {
  struct State {
    const CtmModel* model;
    Dataset point;
    bool cached = false;
    double x1 = 0.0;
    double x2 = 0.0;
    Profile profile;
  };
  auto state = std::make_shared<State>();
  state->model = &model;
  state->point.columns = {Column{"x1", false, Eigen::VectorXd::Zero(1), {}},
                          Column{"x2", false, Eigen::VectorXd::Zero(1), {}}};
  for (const std::string& name : other_columns)
    state->point.columns.push_back(
        Column{name, false, Eigen::VectorXd::Constant(1, fill), {}});
  state->point.response = Eigen::VectorXd::Zero(1);
  state->point.validate();

  return [state](double x1, double x2, double v) {
    if (!state->cached || state->x1 != x1 || state->x2 != x2) {
      state->point.columns[0].numeric[0] = x1;
      state->point.columns[1].numeric[0] = x2;
      state->profile = make_profile(*state->model, state->point, 0);
      state->x1 = x1;
      state->x2 = x2;
      state->cached = true;
    }
    return state->profile.cdf(v);
  };
}

MadSurface mad_surface(const CdfSurface& estimate, const CdfSurface& truth,
                       const Eigen::VectorXd& x1_grid,
                       const Eigen::VectorXd& x2_grid,
                       const Eigen::VectorXd& v_grid) {
  if (x1_grid.size() == 0 || x2_grid.size() == 0 || v_grid.size() == 0)
    fail(ErrorKind::config, "evaluation grids must be nonempty");

  const Eigen::Index n1 = x1_grid.size();
  const Eigen::Index n2 = x2_grid.size();
  MadSurface surface;
  surface.x1.resize(n1 * n2);
  surface.x2.resize(n1 * n2);
  surface.mad.resize(n1 * n2);

  for (Eigen::Index i1 = 0; i1 < n1; ++i1) {
    for (Eigen::Index i2 = 0; i2 < n2; ++i2) {
      const Eigen::Index g = i1 * n2 + i2;
      const double a = x1_grid[i1];
      const double b = x2_grid[i2];
      double sum = 0.0;
      for (Eigen::Index l = 0; l < v_grid.size(); ++l)
        sum += std::abs(truth(a, b, v_grid[l]) - estimate(a, b, v_grid[l]));
      surface.x1[g] = a;
      surface.x2[g] = b;
      surface.mad[g] = sum / static_cast<double>(v_grid.size());
    }
  }

  surface.min = surface.mad.minCoeff();
  surface.max = surface.mad.maxCoeff();
  std::vector<double> sorted(surface.mad.data(),
                             surface.mad.data() + surface.mad.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = sorted.size() / 2;
  surface.median = sorted.size() % 2 == 1
                       ? sorted[half]
                       : 0.5 * (sorted[half - 1] + sorted[half]);
  return surface;
}

Eigen::VectorXd default_x1_grid() {
  return Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
}

Eigen::VectorXd default_x2_grid() {
  return Eigen::VectorXd::LinSpaced(10, -2.0, 2.0);
}

std::vector<TensorLearner> hvc_learners(const Dataset& data,
                                        const Grid& grid) {
  std::vector<TensorLearner> learners;
  for (const Column& column : data.columns) {
    if (column.categorical) continue;
    TensorLearner learner;
    learner.label = column.name;
    learner.column = column.name;
    learner.x_basis.kind = BasisKind::bspline;
    learner.x_basis.degree = 3;
    learner.x_basis.interior_knots = 10;
    // The generator's covariate domains are fixed: x2 on [-2, 2], x1 and
    // the noise columns on [0, 1]. Evaluation sweeps the full domains, so
    // the bases must span them regardless of the realized sample range.
    learner.x_basis.lo = column.name == "x2" ? -2.0 : 0.0;
    learner.x_basis.hi = column.name == "x2" ? 2.0 : 1.0;
    learner.x_penalty.kind = PenaltyKind::difference;
    learner.x_penalty.order = 2;
    learner.y_basis.kind = BasisKind::bspline;
    learner.y_basis.degree = 3;
    learner.y_basis.interior_knots = 10;
    learner.y_basis.lo = grid.lo();
    learner.y_basis.hi = grid.hi();
    learner.y_penalty.kind = PenaltyKind::difference;
    learner.y_penalty.order = 2;
    // Second-order penalties on both margins leave a four-dimensional
    // penalty null space; six degrees of freedom keeps each step gentle
    // while staying attainable.
    learner.df_target = 6.0;
    learners.push_back(std::move(learner));
  }
  return learners;
}

void validate_study_config(const SimStudyConfig& config) {
  if (config.sample_size < 2)
    fail(ErrorKind::config, "study sample size must be at least 2");
  if (config.replications < 1)
    fail(ErrorKind::config, "study needs at least one replication");
  if (config.noise_vars < 0)
    fail(ErrorKind::config, "noise variable count must be nonnegative");
  if (config.max_iterations < 1)
    fail(ErrorKind::config, "study fits need at least one iteration");
  if (config.oob_replications < 2)
    fail(ErrorKind::config, "bootstrap stopping needs at least two replications");
  if (!(config.step_size > 0.0 && config.step_size < 1.0))
    fail(ErrorKind::config, "step size must lie strictly inside (0, 1)");
  if (config.grid_size != 0 && config.grid_size < 2)
    fail(ErrorKind::config, "grid size must be 0 (automatic) or at least 2");
}

StudyResult replicate_study(const SimStudyConfig& config) {
  validate_study_config(config);

  const Eigen::VectorXd x1_grid = default_x1_grid();
  const Eigen::VectorXd x2_grid = default_x2_grid();
  const double quantile_levels[] = {0.5, 0.75, 0.9};

  std::vector<std::string> noise_columns;
  for (int j = 0; j < config.noise_vars; ++j)
    noise_columns.push_back(noise_name(j));

  StudyResult result;
  for (int r = 0; r < config.replications; ++r) {
    StudyRow row;
    row.replication = r;
    row.noise_vars = config.noise_vars;
    try {
      const std::uint64_t sim_seed =
          mix_seed(config.seed, 2 * static_cast<std::uint64_t>(r));
      const std::uint64_t fit_seed =
          mix_seed(config.seed, 2 * static_cast<std::uint64_t>(r) + 1);
      const Dataset data =
          simulate_hvc(config.sample_size, config.noise_vars, sim_seed);

      BoostConfig boost_config;
      boost_config.max_iterations = config.max_iterations;
      boost_config.step_size = config.step_size;
      boost_config.loss = LossKind::bin;
      boost_config.link.kind = LinkKind::probit;
      boost_config.grid_size = config.grid_size;
      boost_config.resampling = Resampling::bootstrap;
      boost_config.replications = config.oob_replications;
      boost_config.seed = fit_seed;
      boost_config.threads = config.threads;

      const Grid grid = build_grid(data.response, boost_config);
      const FitOutput out = fit(data, hvc_learners(data, grid), boost_config);

      const CdfSurface estimate = model_surface(out.model, noise_columns);
      const MadSurface surface = mad_surface(
          estimate, true_cdf_hvc, x1_grid, x2_grid, out.model.grid.points);
      row.min_mad = surface.min;
      row.median_mad = surface.median;
      row.max_mad = surface.max;
      row.m_stop = out.trace.m_stop;

      if (r == 0) {
        Dataset point;
        point.columns = {
            Column{"x1", false, Eigen::VectorXd::Zero(1), {}},
            Column{"x2", false, Eigen::VectorXd::Zero(1), {}}};
        for (const std::string& name : noise_columns)
          point.columns.push_back(
              Column{name, false, Eigen::VectorXd::Constant(1, 0.5), {}});
        point.response = Eigen::VectorXd::Zero(1);
        point.validate();
        for (Eigen::Index i1 = 0; i1 < x1_grid.size(); ++i1) {
          for (Eigen::Index i2 = 0; i2 < x2_grid.size(); ++i2) {
            point.columns[0].numeric[0] = x1_grid[i1];
            point.columns[1].numeric[0] = x2_grid[i2];
            const Profile profile = make_profile(out.model, point, 0);
            for (double tau : quantile_levels) {
              QuantileRow q;
              q.x1 = x1_grid[i1];
              q.x2 = x2_grid[i2];
              q.tau = tau;
              q.true_quantile = true_quantile_hvc(q.x1, q.x2, tau);
              try {
                q.model_quantile = quantile(out.model, profile, tau);
              } catch (const Error& e) {
                q.model_quantile = std::numeric_limits<double>::quiet_NaN();
                q.failure = e.what();
              }
              result.quantiles.push_back(std::move(q));
            }
          }
        }
      }
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.min_mad = nan;
      row.median_mad = nan;
      row.max_mad = nan;
      row.m_stop = -1;
      row.failure = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string study_table_csv(const StudyResult& result) {
  std::string text = "replication,noise_vars,min_mad,median_mad,max_mad,m_stop,failure\n";
  for (const StudyRow& row : result.rows) {
    text += std::to_string(row.replication);
    text += ',';
    text += std::to_string(row.noise_vars);
    text += ',';
    text += format_double(row.min_mad);
    text += ',';
    text += format_double(row.median_mad);
    text += ',';
    text += format_double(row.max_mad);
    text += ',';
    text += std::to_string(row.m_stop);
    text += ',';
    text += csv_field(row.failure);
    text += '\n';
  }
  return text;
}

std::string quantile_table_csv(const StudyResult& result) {
  std::string text = "x1,x2,tau,true_quantile,model_quantile,failure\n";
  for (const QuantileRow& row : result.quantiles) {
    text += format_double(row.x1);
    text += ',';
    text += format_double(row.x2);
    text += ',';
    text += format_double(row.tau);
    text += ',';
    text += format_double(row.true_quantile);
    text += ',';
    text += format_double(row.model_quantile);
    text += ',';
    text += csv_field(row.failure);
    text += '\n';
  }
  return text;
}

}  // namespace ctm
