#include "ctmboost/loss.hpp"

#include <cmath>
#include <string>

namespace ctm {

namespace {

constexpr double kProbClamp = 1e-10;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

double clamp_prob(double p) {
  if (p < kProbClamp) return kProbClamp;
  if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return p;
}

/// Rational approximation for the standard normal quantile (relative error
/// ~1e-9), then one Halley step against erfc-based normal_cdf.
double normal_quantile_guess(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    fail(ErrorKind::domain, "normal quantile needs a probability strictly inside (0, 1)");
  double x = normal_quantile_guess(u);
  const double err = normal_cdf(x) - u;
  const double step = err * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= step / (1.0 + 0.5 * x * step);
  return x;
}

double Link::cdf(double h) const {
  switch (kind) {
    case LinkKind::probit:
      return normal_cdf(h);
    case LinkKind::logit:
      if (h >= 0.0) return 1.0 / (1.0 + std::exp(-h));
      return std::exp(h) / (1.0 + std::exp(h));
    case LinkKind::identity:
      return h < 0.0 ? 0.0 : (h > 1.0 ? 1.0 : h);
  }
  fail(ErrorKind::config, "unknown link kind");
}

double Link::density(double h) const {
  switch (kind) {
    case LinkKind::probit:
      return normal_pdf(h);
    case LinkKind::logit: {
      const double t = std::exp(-std::abs(h));
      return t / ((1.0 + t) * (1.0 + t));
    }
    case LinkKind::identity:
      return 1.0;
  }
  fail(ErrorKind::config, "unknown link kind");
}

double Link::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    fail(ErrorKind::domain, "link quantile needs a probability strictly inside (0, 1)");
  switch (kind) {
    case LinkKind::probit:
      return normal_quantile(u);
    case LinkKind::logit:
      return std::log(u / (1.0 - u));
    case LinkKind::identity:
      return u;
  }
  fail(ErrorKind::config, "unknown link kind");
}

namespace {

/// Probability the loss formulas see. The identity link hands through the
/// raw transformation value; clamping to [0, 1] is model-evaluation
/// behavior, not loss behavior.
double loss_prob(LinkKind link, double h) {
  return link == LinkKind::identity ? h : Link{link}.cdf(h);
}

}  // namespace

double loss_value(LossKind loss, LinkKind link, double indicator, double h) {
  const double p = loss_prob(link, h);
  switch (loss) {
    case LossKind::bin: {
      const double q = clamp_prob(p);
      return -(indicator * std::log(q) + (1.0 - indicator) * std::log(1.0 - q));
    }
    case LossKind::sqe: {
      const double r = indicator - p;
      return 0.5 * r * r;
    }
    case LossKind::abe:
      return std::abs(indicator - p);
  }
  fail(ErrorKind::config, "unknown loss kind");
}

double negative_gradient(LossKind loss, LinkKind link, double indicator, double h) {
  const double f = Link{link}.density(h);
  const double p = loss_prob(link, h);
  switch (loss) {
    case LossKind::bin: {
      const double q = clamp_prob(p);
      return (indicator / q - (1.0 - indicator) / (1.0 - q)) * f;
    }
    case LossKind::sqe:
      return (indicator - p) * f;
    case LossKind::abe:
      return (2.0 * indicator - 1.0) * f;
  }
  fail(ErrorKind::config, "unknown loss kind");
}

Eigen::VectorXd column_risks(const Eigen::MatrixXd& predictions,
                             const Eigen::VectorXd& response,
                             const Eigen::VectorXd& grid_points,
                             LossKind loss, LinkKind link) {
  const Eigen::Index n = grid_points.size();
  const Eigen::Index N = response.size();
  if (predictions.rows() != n || predictions.cols() != N)
    fail(ErrorKind::dimension,
         "prediction lattice must be grid-size x observation-count (" +
             std::to_string(n) + " x " + std::to_string(N) + "), got " +
             std::to_string(predictions.rows()) + " x " +
             std::to_string(predictions.cols()));
  Eigen::VectorXd risks(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    double acc = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      const double indicator = response[i] <= grid_points[l] ? 1.0 : 0.0;
      acc += loss_value(loss, link, indicator, predictions(l, i));
    }
    risks[i] = acc / static_cast<double>(n);
  }
  return risks;
}

double empirical_risk(const Eigen::MatrixXd& predictions,
                      const Eigen::VectorXd& response,
                      const Eigen::VectorXd& weights,
                      const Eigen::VectorXd& grid_points,
                      LossKind loss, LinkKind link) {
  if (weights.size() != response.size())
    fail(ErrorKind::dimension, "one weight per observation required");
  return column_risks(predictions, response, grid_points, loss, link).dot(weights);
}

}  // namespace ctm
