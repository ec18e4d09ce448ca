#pragma once

#include <string>
#include <vector>

#include "ctmboost/boost.hpp"
#include "ctmboost/csv.hpp"

namespace ctm {

/// One learner entry of a configuration document. Structure left unset is
/// resolved against the data and the response grid by assemble_learners:
/// basis domains default to the observed covariate range (the response
/// grid's range on the y side), the x-basis kind defaults to bspline for
/// numeric and dummy for categorical columns, and penalties default to
/// second-order differences on spline bases and none elsewhere. Unset
/// degree / interior_knots are stored as -1, unset domains as NaN.
struct LearnerConfig {
  std::string label;   // empty: named after the column (or "intercept")
  std::string column;  // empty or "intercept": constant covariate basis
  bool x_kind_set = false;
  bool y_kind_set = false;
  bool x_penalty_set = false;
  bool y_penalty_set = false;
  BasisSpec x_basis;
  PenaltySpec x_penalty;
  BasisSpec y_basis;
  PenaltySpec y_penalty;
  double df = 4.0;
};

/// A fitting configuration document: data roles plus boosting controls
/// plus the learner list. Versioned and round-trippable.
struct FileConfig {
  std::string response = "y";
  std::string weight;  // optional weight column
  std::vector<std::string> categorical;
  BoostConfig boost;
  std::vector<LearnerConfig> learners;
};

/// Parse / emit the JSON configuration dialect. Parsing rejects unknown
/// keys (typo safety), unknown enum names, and unsupported versions;
/// emitting writes only what was declared, so documents round-trip.
FileConfig parse_config(const std::string& text);
std::string config_to_json(const FileConfig& config);

/// The covariate columns the learner list references, in first-use order,
/// flagged categorical per the declaration list.
std::vector<ColumnRequest> config_covariates(const FileConfig& config);

/// Resolve the learner list against concrete data and a response grid:
/// fill defaulted kinds, domains, and penalties, and validate that every
/// declared domain covers the observed data (the grid on the y side).
std::vector<TensorLearner> assemble_learners(const FileConfig& config,
                                             const Dataset& data,
                                             const Grid& grid);

}  // namespace ctm
