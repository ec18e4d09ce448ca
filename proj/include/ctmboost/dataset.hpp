#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctmboost/errors.hpp"

namespace ctm {

/// One covariate column: numeric values or categorical labels.
struct Column {
  std::string name;
  bool categorical = false;
  Eigen::VectorXd numeric;
  std::vector<std::string> labels;

  Eigen::Index size() const {
    return categorical ? static_cast<Eigen::Index>(labels.size()) : numeric.size();
  }
};

/// In-memory sample: covariate columns, a numeric response, and
/// nonnegative case weights (uniform 1/N unless supplied).
struct Dataset {
  std::vector<Column> columns;
  std::string response_name = "y";
  Eigen::VectorXd response;
  Eigen::VectorXd weights;

  Eigen::Index n() const { return response.size(); }

  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;

  /// Structural checks: consistent lengths, finite response, unique column
  /// names, finite nonnegative weights. Fills uniform weights if empty.
  void validate();
};

/// Fitting additionally needs a response that actually varies.
void require_fittable(const Dataset& data);

/// Distinct values of a numeric column, sorted ascending.
std::vector<double> sorted_unique(const Eigen::VectorXd& values);

/// Distinct labels of a categorical column, sorted lexicographically.
std::vector<std::string> sorted_levels(const std::vector<std::string>& labels);

}  // namespace ctm
