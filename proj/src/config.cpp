#include "ctmboost/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <json.hpp>
#include <limits>

#include "ctmboost/names.hpp"
#include "ctmboost/util.hpp"

namespace ctm {

namespace {

using nlohmann::json;

constexpr int kConfigVersion = 1;
constexpr const char* kConfigFormat = "ctmboost-config";
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

void check_keys(const json& object, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : object.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* key) {
          return item.key() == key;
        }) == allowed.end())
      fail(ErrorKind::config, std::string("unknown key '") + item.key() +
                                  "' in " + where);
  }
}

BasisSpec unset_basis() {
  BasisSpec spec;
  spec.degree = -1;
  spec.interior_knots = -1;
  spec.lo = kUnset;
  spec.hi = kUnset;
  return spec;
}

BasisSpec parse_basis(const json& j, const char* where, bool* kind_set) {
  check_keys(j, where, {"kind", "degree", "interior_knots", "lo", "hi", "levels"});
  BasisSpec spec;
  *kind_set = j.contains("kind");
  if (*kind_set) spec.kind = basis_kind_from_name(j.at("kind").get<std::string>());
  spec.degree = j.value("degree", -1);
  spec.interior_knots = j.value("interior_knots", -1);
  spec.lo = j.value("lo", kUnset);
  spec.hi = j.value("hi", kUnset);
  spec.levels = j.value("levels", std::vector<std::string>{});
  return spec;
}

PenaltySpec parse_penalty(const json& j, const char* where) {
  check_keys(j, where, {"kind", "order", "neighbors"});
  PenaltySpec spec;
  spec.kind = penalty_kind_from_name(j.value("kind", "none"));
  spec.order = j.value("order", -1);
  if (j.contains("neighbors"))
    for (const auto& edge : j.at("neighbors"))
      spec.neighbors.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
  return spec;
}

json basis_to_config_json(const BasisSpec& spec, bool kind_set) {
  json j = json::object();
  if (kind_set) j["kind"] = basis_kind_name(spec.kind);
  if (spec.degree >= 0) j["degree"] = spec.degree;
  if (spec.interior_knots >= 0) j["interior_knots"] = spec.interior_knots;
  if (std::isfinite(spec.lo)) j["lo"] = spec.lo;
  if (std::isfinite(spec.hi)) j["hi"] = spec.hi;
  if (!spec.levels.empty()) j["levels"] = spec.levels;
  return j;
}

json penalty_to_config_json(const PenaltySpec& spec) {
  json j = json::object();
  j["kind"] = penalty_kind_name(spec.kind);
  if (spec.order >= 0) j["order"] = spec.order;
  if (!spec.neighbors.empty()) {
    json edges = json::array();
    for (const auto& [a, b] : spec.neighbors) edges.push_back(json::array({a, b}));
    j["neighbors"] = edges;
  }
  return j;
}

bool is_intercept(const std::string& column) {
  return column.empty() || column == "intercept";
}

bool spline_kind(BasisKind kind) {
  return kind == BasisKind::bspline || kind == BasisKind::cyclic_bspline;
}

}  // namespace

FileConfig parse_config(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (!doc.is_object() || !doc.contains("format") ||
        doc.at("format").get<std::string>() != kConfigFormat)
      fail(ErrorKind::parse, "not a configuration document");
    const int version = doc.at("version").get<int>();
    if (version != kConfigVersion)
      fail(ErrorKind::version,
           "unsupported configuration version " + std::to_string(version) +
               " (this build reads version " + std::to_string(kConfigVersion) +
               ")");
    check_keys(doc, "the configuration",
               {"format", "version", "response", "weight", "categorical",
                "link", "loss", "grid", "iterations", "step_size", "seed",
                "threads", "resampling", "learners"});

    FileConfig config;
    config.response = doc.value("response", "y");
    if (config.response.empty())
      fail(ErrorKind::config, "the response column name must not be empty");
    config.weight = doc.value("weight", "");
    config.categorical =
        doc.value("categorical", std::vector<std::string>{});

    config.boost.link.kind = link_kind_from_name(doc.value("link", "probit"));
    config.boost.loss = loss_kind_from_name(doc.value("loss", "bin"));
    config.boost.max_iterations = doc.value("iterations", 500);
    config.boost.step_size = doc.value("step_size", 0.1);
    config.boost.seed = doc.value("seed", std::uint64_t{1});
    config.boost.threads = doc.value("threads", 0);

    if (doc.contains("grid")) {
      const json& grid = doc.at("grid");
      check_keys(grid, "'grid'", {"size", "margin", "observed_support"});
      config.boost.grid_size = grid.value("size", std::int64_t{0});
      config.boost.grid_margin = grid.value("margin", 0.05);
      config.boost.grid_observed_support = grid.value("observed_support", false);
    }

    if (doc.contains("resampling")) {
      const json& resampling = doc.at("resampling");
      check_keys(resampling, "'resampling'", {"kind", "replications"});
      config.boost.resampling =
          resampling_from_name(resampling.value("kind", "none"));
      config.boost.replications = resampling.value("replications", 25);
    }

    if (!doc.contains("learners"))
      fail(ErrorKind::config, "the configuration must list learners");
    for (const json& lj : doc.at("learners")) {
      check_keys(lj, "a learner entry",
                 {"label", "column", "x_basis", "x_penalty", "y_basis",
                  "y_penalty", "df"});
      LearnerConfig learner;
      learner.label = lj.value("label", "");
      learner.column = lj.value("column", "");
      learner.x_basis =
          lj.contains("x_basis")
              ? parse_basis(lj.at("x_basis"), "'x_basis'", &learner.x_kind_set)
              : unset_basis();
      learner.y_basis =
          lj.contains("y_basis")
              ? parse_basis(lj.at("y_basis"), "'y_basis'", &learner.y_kind_set)
              : unset_basis();
      learner.x_penalty_set = lj.contains("x_penalty");
      if (learner.x_penalty_set)
        learner.x_penalty = parse_penalty(lj.at("x_penalty"), "'x_penalty'");
      learner.y_penalty_set = lj.contains("y_penalty");
      if (learner.y_penalty_set)
        learner.y_penalty = parse_penalty(lj.at("y_penalty"), "'y_penalty'");
      learner.df = lj.value("df", 4.0);
      if (!(std::isfinite(learner.df) && learner.df > 0.0))
        fail(ErrorKind::config,
             "degrees of freedom must be a positive number");
      config.learners.push_back(std::move(learner));
    }
    if (config.learners.empty())
      fail(ErrorKind::config, "the configuration must list learners");

    validate_config(config.boost);
    return config;
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed configuration: ") + e.what());
  }
}

std::string config_to_json(const FileConfig& config) {
  json doc;
  doc["format"] = kConfigFormat;
  doc["version"] = kConfigVersion;
  doc["response"] = config.response;
  if (!config.weight.empty()) doc["weight"] = config.weight;
  if (!config.categorical.empty()) doc["categorical"] = config.categorical;
  doc["link"] = link_kind_name(config.boost.link.kind);
  doc["loss"] = loss_kind_name(config.boost.loss);
  doc["grid"] = json{{"size", static_cast<std::int64_t>(config.boost.grid_size)},
                     {"margin", config.boost.grid_margin},
                     {"observed_support", config.boost.grid_observed_support}};
  doc["iterations"] = config.boost.max_iterations;
  doc["step_size"] = config.boost.step_size;
  doc["seed"] = config.boost.seed;
  doc["threads"] = config.boost.threads;
  if (config.boost.resampling != Resampling::none)
    doc["resampling"] = json{{"kind", resampling_name(config.boost.resampling)},
                             {"replications", config.boost.replications}};
  json learners = json::array();
  for (const LearnerConfig& learner : config.learners) {
    json lj = json::object();
    if (!learner.label.empty()) lj["label"] = learner.label;
    if (!learner.column.empty()) lj["column"] = learner.column;
    const json xb = basis_to_config_json(learner.x_basis, learner.x_kind_set);
    if (!xb.empty()) lj["x_basis"] = xb;
    if (learner.x_penalty_set)
      lj["x_penalty"] = penalty_to_config_json(learner.x_penalty);
    const json yb = basis_to_config_json(learner.y_basis, learner.y_kind_set);
    if (!yb.empty()) lj["y_basis"] = yb;
    if (learner.y_penalty_set)
      lj["y_penalty"] = penalty_to_config_json(learner.y_penalty);
    lj["df"] = learner.df;
    learners.push_back(std::move(lj));
  }
  doc["learners"] = std::move(learners);
  return doc.dump(2) + "\n";
}

std::vector<ColumnRequest> config_covariates(const FileConfig& config) {
  std::vector<ColumnRequest> requests;
  for (const LearnerConfig& learner : config.learners) {
    if (is_intercept(learner.column)) continue;
    if (learner.column == config.response)
      fail(ErrorKind::config, "learner references the response column '" +
                                  learner.column + "' as a covariate");
    const bool seen =
        std::any_of(requests.begin(), requests.end(),
                    [&](const ColumnRequest& r) { return r.name == learner.column; });
    if (seen) continue;
    ColumnRequest request;
    request.name = learner.column;
    request.categorical =
        std::find(config.categorical.begin(), config.categorical.end(),
                  learner.column) != config.categorical.end();
    requests.push_back(std::move(request));
  }
  return requests;
}

namespace {

void check_numeric_domain(const std::string& column, double declared_lo,
                          double declared_hi, double observed_lo,
                          double observed_hi, double* lo, double* hi) {
  *lo = std::isfinite(declared_lo) ? declared_lo : observed_lo;
  *hi = std::isfinite(declared_hi) ? declared_hi : observed_hi;
  if (*lo > observed_lo || *hi < observed_hi)
    fail(ErrorKind::config,
         "declared domain [" + format_double(*lo) + ", " + format_double(*hi) +
             "] of column '" + column + "' does not cover the observed range [" +
             format_double(observed_lo) + ", " + format_double(observed_hi) + "]");
}

}  // namespace

std::vector<TensorLearner> assemble_learners(const FileConfig& config,
                                             const Dataset& data,
                                             const Grid& grid) {
  if (config.learners.empty())
    fail(ErrorKind::config, "the configuration lists no learners");

  std::vector<TensorLearner> learners;
  for (const LearnerConfig& lc : config.learners) {
    TensorLearner out;
    out.label = !lc.label.empty()
                    ? lc.label
                    : (is_intercept(lc.column) ? "intercept" : lc.column);
    for (const TensorLearner& prior : learners)
      if (prior.label == out.label)
        fail(ErrorKind::config,
             "two learners share the label '" + out.label + "'");
    out.df_target = lc.df;

    // Covariate side.
    if (is_intercept(lc.column)) {
      if (lc.x_kind_set && lc.x_basis.kind != BasisKind::intercept)
        fail(ErrorKind::config,
             "learner '" + out.label +
                 "' names no column, so its x-basis must be an intercept");
      out.x_basis.kind = BasisKind::intercept;
      out.x_penalty = lc.x_penalty_set ? lc.x_penalty : PenaltySpec{};
    } else {
      if (!data.has_column(lc.column))
        fail(ErrorKind::config, "learner '" + out.label +
                                    "' references column '" + lc.column +
                                    "' which is absent from the data");
      const Column& column = data.column(lc.column);
      out.column = lc.column;
      out.x_basis = lc.x_basis;
      if (column.categorical) {
        if (lc.x_kind_set && lc.x_basis.kind != BasisKind::dummy)
          fail(ErrorKind::config, "column '" + lc.column +
                                      "' is categorical and needs a dummy basis");
        out.x_basis.kind = BasisKind::dummy;
        const std::vector<std::string> observed = sorted_levels(column.labels);
        if (out.x_basis.levels.empty()) {
          out.x_basis.levels = observed;
        } else {
          for (const std::string& level : observed)
            if (std::find(out.x_basis.levels.begin(), out.x_basis.levels.end(),
                          level) == out.x_basis.levels.end())
              fail(ErrorKind::config, "declared levels of column '" +
                                          lc.column +
                                          "' do not cover observed level '" +
                                          level + "'");
        }
        out.x_basis.lo = 0.0;
        out.x_basis.hi = 1.0;
        out.x_basis.degree = 3;
        out.x_basis.interior_knots = 20;
        out.x_penalty = lc.x_penalty_set ? lc.x_penalty : PenaltySpec{};
      } else {
        if (!lc.x_kind_set) out.x_basis.kind = BasisKind::bspline;
        if (out.x_basis.kind == BasisKind::dummy ||
            out.x_basis.kind == BasisKind::intercept)
          fail(ErrorKind::config,
               "column '" + lc.column + "' is numeric; basis kind '" +
                   basis_kind_name(out.x_basis.kind) + "' does not apply");
        if (!out.x_basis.levels.empty())
          fail(ErrorKind::config, "levels are only meaningful for dummy bases "
                                  "(column '" + lc.column + "')");
        if (out.x_basis.degree < 0) out.x_basis.degree = 3;
        if (out.x_basis.interior_knots < 0) out.x_basis.interior_knots = 20;
        check_numeric_domain(lc.column, lc.x_basis.lo, lc.x_basis.hi,
                             column.numeric.minCoeff(), column.numeric.maxCoeff(),
                             &out.x_basis.lo, &out.x_basis.hi);
        if (lc.x_penalty_set) {
          out.x_penalty = lc.x_penalty;
        } else if (spline_kind(out.x_basis.kind)) {
          out.x_penalty.kind = PenaltyKind::difference;
          out.x_penalty.order = 2;
        }
      }
    }
    if (out.x_penalty.order < 0) out.x_penalty.order = 2;

    // Response side.
    out.y_basis = lc.y_basis;
    if (!lc.y_kind_set) out.y_basis.kind = BasisKind::bspline;
    if (out.y_basis.kind == BasisKind::dummy ||
        out.y_basis.kind == BasisKind::intercept)
      fail(ErrorKind::config, "learner '" + out.label +
                                  "': the response basis must be numeric");
    if (!out.y_basis.levels.empty())
      fail(ErrorKind::config, "learner '" + out.label +
                                  "': the response basis takes no levels");
    if (out.y_basis.degree < 0) out.y_basis.degree = 3;
    if (out.y_basis.interior_knots < 0) out.y_basis.interior_knots = 20;
    out.y_basis.lo = std::isfinite(lc.y_basis.lo) ? lc.y_basis.lo : grid.lo();
    out.y_basis.hi = std::isfinite(lc.y_basis.hi) ? lc.y_basis.hi : grid.hi();
    if (out.y_basis.lo > grid.lo() || out.y_basis.hi < grid.hi())
      fail(ErrorKind::config,
           "learner '" + out.label + "': declared response domain [" +
               format_double(out.y_basis.lo) + ", " +
               format_double(out.y_basis.hi) +
               "] does not cover the evaluation grid [" +
               format_double(grid.lo()) + ", " + format_double(grid.hi()) + "]");
    if (lc.y_penalty_set) {
      out.y_penalty = lc.y_penalty;
    } else if (spline_kind(out.y_basis.kind)) {
      out.y_penalty.kind = PenaltyKind::difference;
      out.y_penalty.order = 2;
    }
    if (out.y_penalty.order < 0) out.y_penalty.order = 2;

    learners.push_back(std::move(out));
  }
  return learners;
}

}  // namespace ctm
