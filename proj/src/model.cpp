#include "ctmboost/model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <utility>

#include "ctmboost/names.hpp"
#include "ctmboost/util.hpp"

namespace ctm {

namespace {

Eigen::VectorXd single(double v) {
  Eigen::VectorXd out(1);
  out[0] = v;
  return out;
}

Eigen::VectorXd covariate_basis_row(const TensorLearner& spec,
                                    const Dataset& data, Eigen::Index row) {
  if (spec.column.empty()) return Eigen::VectorXd::Ones(1);
  const Column& col = data.column(spec.column);
  if (col.categorical != (spec.x_basis.kind == BasisKind::dummy))
    fail(ErrorKind::config,
         "column '" + col.name + "' does not match the model's basis kind for "
                                 "learner '" +
             spec.label + "'");
  if (col.categorical) {
    const std::vector<std::string> one{col.labels[row]};
    return evaluate_basis(spec.x_basis, one).values.row(0).transpose();
  }
  return evaluate_basis(spec.x_basis, single(col.numeric[row]))
      .values.row(0)
      .transpose();
}

}  // namespace

Profile make_profile(const CtmModel& model, const Dataset& data,
                     Eigen::Index row) {
  if (row < 0 || row >= data.n())
    fail(ErrorKind::dimension, "row index out of range");
  Profile profile;
  profile.model = &model;
  profile.coef.reserve(model.components.size());
  for (const auto& comp : model.components) {
    const int K0 = basis_dim(comp.spec.y_basis);
    const Eigen::VectorXd bx = covariate_basis_row(comp.spec, data, row);
    const Eigen::Index Kx = bx.size();
    if (comp.gamma.size() != Kx * K0)
      fail(ErrorKind::dimension, "coefficient length of learner '" +
                                     comp.spec.label +
                                     "' does not match its basis dimensions");
    const Eigen::Map<const Eigen::MatrixXd> mat(comp.gamma.data(), K0, Kx);
    profile.coef.push_back(mat * bx);
  }
  return profile;
}

double Profile::transformation(double v) const {
  double h = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) {
    const Eigen::VectorXd b0 =
        evaluate_basis(model->components[j].spec.y_basis, single(v))
            .values.row(0)
            .transpose();
    h += b0.dot(coef[j]);
  }
  return h;
}

double transformation(const CtmModel& model, const Dataset& data,
                      Eigen::Index row, double v) {
  return make_profile(model, data, row).transformation(v);
}

double cdf(const CtmModel& model, const Dataset& data, Eigen::Index row,
           double v) {
  return model.link.cdf(transformation(model, data, row, v));
}

double quantile(const CtmModel& model, const Profile& profile, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    fail(ErrorKind::level, "quantile level must lie strictly inside (0, 1)");
  const double lo = model.grid.lo();
  const double hi = model.grid.hi();
  constexpr int kScan = 512;

  Eigen::VectorXd h(kScan);
  const Eigen::VectorXd scan = Eigen::VectorXd::LinSpaced(kScan, lo, hi);
  for (int k = 0; k < kScan; ++k) {
    h[k] = profile.transformation(scan[k]);
    if (k > 0 && h[k] < h[k - 1] - 1e-10)
      fail(ErrorKind::monotonicity,
           "transformation decreases between v = " + format_double(scan[k - 1]) +
               " and v = " + format_double(scan[k]) +
               "; quantiles are undefined for this covariate row");
  }
  const double c_lo = model.link.cdf(h[0]);
  const double c_hi = model.link.cdf(h[kScan - 1]);
  if (tau < c_lo || tau > c_hi)
    fail(ErrorKind::tail, "quantile level " + format_double(tau) +
                              " lies outside the attained range [" +
                              format_double(c_lo) + ", " + format_double(c_hi) +
                              "] on the model grid");

  int first = kScan - 1;
  for (int k = 0; k < kScan; ++k)
    if (model.link.cdf(h[k]) >= tau) {
      first = k;
      break;
    }
  if (first == 0) return lo;

  double a = scan[first - 1];
  double b = scan[first];
  const double tol = 1e-8 * (hi - lo);
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (profile.cdf(mid) >= tau)
      b = mid;
    else
      a = mid;
  }
  return b;
}

double quantile(const CtmModel& model, const Dataset& data, Eigen::Index row,
                double tau) {
  return quantile(model, make_profile(model, data, row), tau);
}

std::vector<Violation> monotonicity_check(
    const CtmModel& model, const Dataset& data,
    const std::vector<Eigen::Index>& rows) {
  std::vector<Violation> violations;
  for (const Eigen::Index row : rows) {
    const Profile profile = make_profile(model, data, row);
    double prev = profile.transformation(model.grid.points[0]);
    for (Eigen::Index l = 1; l < model.grid.size(); ++l) {
      const double cur = profile.transformation(model.grid.points[l]);
      if (cur < prev - 1e-10)
        violations.push_back(
            {row, model.grid.points[l - 1], model.grid.points[l], prev - cur});
      prev = cur;
    }
  }
  return violations;
}

DiagnosticsReport diagnostics(const CtmModel& model, const Dataset& data) {
  const Eigen::Index N = data.n();
  if (N < 2) fail(ErrorKind::data, "diagnostics need at least 2 observations");
  DiagnosticsReport report;
  report.residuals.resize(N);
  for (Eigen::Index i = 0; i < N; ++i)
    report.residuals[i] =
        make_profile(model, data, i).transformation(data.response[i]);

  // Two-sided KS distance between the residuals and the link distribution.
  std::vector<double> u(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i)
    u[static_cast<std::size_t>(i)] = model.link.cdf(report.residuals[i]);
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double step_hi = static_cast<double>(i + 1) / static_cast<double>(N);
    const double step_lo = static_cast<double>(i) / static_cast<double>(N);
    ks = std::max(ks, std::max(step_hi - u[i], u[i] - step_lo));
  }
  report.ks = ks;

  // Spearman correlation between residual ranks and response ranks. Values
  // near one mean the transformation has only reordered the responses —
  // the §-style overfitting-to-ordering warning sign.
  const std::vector<double> res_vec(report.residuals.data(),
                                    report.residuals.data() + N);
  const std::vector<double> y_vec(data.response.data(),
                                  data.response.data() + N);
  const std::vector<double> r1 = average_ranks(res_vec);
  const std::vector<double> r2 = average_ranks(y_vec);
  double m1 = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    m1 += r1[i];
    m2 += r2[i];
  }
  m1 /= static_cast<double>(N);
  m2 /= static_cast<double>(N);
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    cov += (r1[i] - m1) * (r2[i] - m2);
    v1 += (r1[i] - m1) * (r1[i] - m1);
    v2 += (r2[i] - m2) * (r2[i] - m2);
  }
  report.rank_correlation =
      v1 > 0.0 && v2 > 0.0 ? cov / std::sqrt(v1 * v2) : 0.0;

  std::vector<Eigen::Index> all(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i) all[static_cast<std::size_t>(i)] = i;
  report.violations = monotonicity_check(model, data, all);
  return report;
}

Eigen::VectorXd model_bootstrap(const CtmModel& model, const Dataset& data,
                                std::uint64_t seed) {
  const Eigen::Index N = data.n();
  Eigen::VectorXd draws(N);
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Profile profile = make_profile(model, data, i);
    double u = unit_uniform(rng);
    while (u == 0.0) u = unit_uniform(rng);
    draws[i] = quantile(model, profile, u);
  }
  return draws;
}

// --- serialization ----------------------------------------------------

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "ctmboost-model";

json basis_to_json(const BasisSpec& spec) {
  return json{{"kind", basis_kind_name(spec.kind)},
              {"degree", spec.degree},
              {"interior_knots", spec.interior_knots},
              {"lo", spec.lo},
              {"hi", spec.hi},
              {"levels", spec.levels}};
}

BasisSpec basis_from_json(const json& j) {
  BasisSpec spec;
  spec.kind = basis_kind_from_name(j.at("kind").get<std::string>());
  spec.degree = j.at("degree").get<int>();
  spec.interior_knots = j.at("interior_knots").get<int>();
  spec.lo = j.at("lo").get<double>();
  spec.hi = j.at("hi").get<double>();
  spec.levels = j.at("levels").get<std::vector<std::string>>();
  return spec;
}

json penalty_to_json(const PenaltySpec& spec) {
  json edges = json::array();
  for (const auto& [a, b] : spec.neighbors) edges.push_back(json::array({a, b}));
  return json{{"kind", penalty_kind_name(spec.kind)}, {"order", spec.order},
              {"neighbors", edges}};
}

PenaltySpec penalty_from_json(const json& j) {
  PenaltySpec spec;
  spec.kind = penalty_kind_from_name(j.at("kind").get<std::string>());
  spec.order = j.at("order").get<int>();
  for (const auto& edge : j.at("neighbors"))
    spec.neighbors.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
  return spec;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string serialize(const CtmModel& model) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["link"] = link_kind_name(model.link.kind);
  doc["loss"] = loss_kind_name(model.loss);
  doc["step_size"] = model.step_size;
  doc["m_stop"] = model.m_stop;
  doc["n_train"] = static_cast<std::int64_t>(model.n_train);
  doc["seed"] = model.seed;
  doc["grid"] = json{{"kind", model.grid.kind == GridKind::equidistant
                                  ? "equidistant"
                                  : "observed_support"},
                     {"points", to_vector(model.grid.points)}};
  json comps = json::array();
  for (const auto& comp : model.components) {
    comps.push_back(json{{"label", comp.spec.label},
                         {"column", comp.spec.column},
                         {"x_basis", basis_to_json(comp.spec.x_basis)},
                         {"x_penalty", penalty_to_json(comp.spec.x_penalty)},
                         {"y_basis", basis_to_json(comp.spec.y_basis)},
                         {"y_penalty", penalty_to_json(comp.spec.y_penalty)},
                         {"df_target", comp.spec.df_target},
                         {"lambda", comp.lambda},
                         {"df", comp.df},
                         {"gamma", to_vector(comp.gamma)}});
  }
  doc["components"] = std::move(comps);
  return doc.dump(2) + "\n";
}

CtmModel deserialize(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object() || !doc.contains("format") ||
        doc.at("format").get<std::string>() != kFormatName)
      fail(ErrorKind::parse, "not a model document");
    const int version = doc.at("version").get<int>();
    if (version != kFormatVersion)
      fail(ErrorKind::version,
           "unsupported model document version " + std::to_string(version) +
               " (this build reads version " +
               std::to_string(kFormatVersion) + ")");

    CtmModel model;
    model.link.kind = link_kind_from_name(doc.at("link").get<std::string>());
    model.loss = loss_kind_from_name(doc.at("loss").get<std::string>());
    model.step_size = doc.at("step_size").get<double>();
    model.m_stop = doc.at("m_stop").get<int>();
    model.n_train = doc.at("n_train").get<std::int64_t>();
    model.seed = doc.at("seed").get<std::uint64_t>();

    const json& grid = doc.at("grid");
    const std::string grid_kind = grid.at("kind").get<std::string>();
    if (grid_kind == "equidistant")
      model.grid.kind = GridKind::equidistant;
    else if (grid_kind == "observed_support")
      model.grid.kind = GridKind::observed_support;
    else
      fail(ErrorKind::parse, "unknown grid kind '" + grid_kind + "'");
    model.grid.points =
        from_vector(grid.at("points").get<std::vector<double>>());
    if (model.grid.size() < 2)
      fail(ErrorKind::parse, "model grid needs at least 2 points");
    for (Eigen::Index l = 1; l < model.grid.size(); ++l)
      if (!(model.grid.points[l] > model.grid.points[l - 1]))
        fail(ErrorKind::parse, "model grid is not strictly increasing");

    for (const json& cj : doc.at("components")) {
      FittedLearner comp;
      comp.spec.label = cj.at("label").get<std::string>();
      comp.spec.column = cj.at("column").get<std::string>();
      comp.spec.x_basis = basis_from_json(cj.at("x_basis"));
      comp.spec.x_penalty = penalty_from_json(cj.at("x_penalty"));
      comp.spec.y_basis = basis_from_json(cj.at("y_basis"));
      comp.spec.y_penalty = penalty_from_json(cj.at("y_penalty"));
      comp.spec.df_target = cj.at("df_target").get<double>();
      comp.lambda = cj.at("lambda").get<double>();
      comp.df = cj.at("df").get<double>();
      comp.gamma = from_vector(cj.at("gamma").get<std::vector<double>>());

      validate_basis(comp.spec.y_basis);
      if (!comp.spec.column.empty())
        validate_basis(comp.spec.x_basis);
      else if (comp.spec.x_basis.kind != BasisKind::intercept)
        fail(ErrorKind::parse,
             "component '" + comp.spec.label +
                 "' names no column, so its x-basis must be an intercept");
      const Eigen::Index want =
          static_cast<Eigen::Index>(basis_dim(comp.spec.x_basis)) *
          basis_dim(comp.spec.y_basis);
      if (comp.gamma.size() != want)
        fail(ErrorKind::parse, "component '" + comp.spec.label +
                                   "' carries " +
                                   std::to_string(comp.gamma.size()) +
                                   " coefficients, expected " +
                                   std::to_string(want));
      model.components.push_back(std::move(comp));
    }
    if (model.components.empty())
      fail(ErrorKind::parse, "model document lists no components");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace ctm
