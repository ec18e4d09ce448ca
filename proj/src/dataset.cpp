#include "ctmboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctm {

bool Dataset::has_column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return true;
  return false;
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  fail(ErrorKind::data, "no column named '" + name + "'");
}

void Dataset::validate() {
  const Eigen::Index N = response.size();
  if (N == 0) fail(ErrorKind::data, "empty data: no observations");
  for (Eigen::Index i = 0; i < N; ++i)
    if (!std::isfinite(response[i]))
      fail(ErrorKind::data, "non-finite response at row " + std::to_string(i));

  std::set<std::string> names{response_name};
  for (const auto& c : columns) {
    if (!names.insert(c.name).second)
      fail(ErrorKind::data, "duplicate column name '" + c.name + "'");
    if (c.size() != N)
      fail(ErrorKind::data, "column '" + c.name + "' has " +
                                std::to_string(c.size()) + " rows, expected " +
                                std::to_string(N));
    if (!c.categorical)
      for (Eigen::Index i = 0; i < N; ++i)
        if (!std::isfinite(c.numeric[i]))
          fail(ErrorKind::data, "non-finite value in column '" + c.name +
                                    "' at row " + std::to_string(i));
  }

  if (weights.size() == 0)
    weights = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));
  if (weights.size() != N)
    fail(ErrorKind::data, "weight vector length does not match the sample size");
  for (Eigen::Index i = 0; i < N; ++i)
    if (!(std::isfinite(weights[i]) && weights[i] >= 0.0))
      fail(ErrorKind::data, "weights must be finite and nonnegative (row " +
                                std::to_string(i) + ")");
}

void require_fittable(const Dataset& data) {
  if (data.n() < 2)
    fail(ErrorKind::degenerate, "need at least two observations to estimate a distribution");
  const double first = data.response[0];
  for (Eigen::Index i = 1; i < data.n(); ++i)
    if (data.response[i] != first) return;
  fail(ErrorKind::degenerate,
       "response is constant; a conditional distribution cannot be estimated");
}

std::vector<double> sorted_unique(const Eigen::VectorXd& values) {
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> sorted_levels(const std::vector<std::string>& labels) {
  std::set<std::string> seen(labels.begin(), labels.end());
  return std::vector<std::string>(seen.begin(), seen.end());
}

}  // namespace ctm
