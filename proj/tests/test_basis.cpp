#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ctmboost/basis.hpp"
#include "ctmboost/util.hpp"

using namespace ctm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

BasisSpec cubic(double lo, double hi, int interior) {
  BasisSpec s;
  s.kind = BasisKind::bspline;
  s.degree = 3;
  s.interior_knots = interior;
  s.lo = lo;
  s.hi = hi;
  return s;
}

}  // namespace

TEST_CASE("difference matrix pinned stencils") {
  const Eigen::MatrixXd d2 = difference_matrix(4, 2);
  REQUIRE(d2.rows() == 2);
  REQUIRE(d2.cols() == 4);
  Eigen::MatrixXd want(2, 4);
  want << 1, -2, 1, 0,
          0, 1, -2, 1;
  CHECK((d2 - want).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd d1 = difference_matrix(3, 1);
  Eigen::MatrixXd want1(2, 3);
  want1 << -1, 1, 0,
           0, -1, 1;
  CHECK((d1 - want1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference matrix rejects dimension <= order") {
  CHECK_THROWS_AS(difference_matrix(2, 2), Error);
  CHECK_THROWS_AS(difference_matrix(3, 5), Error);
  try {
    difference_matrix(2, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension);
  }
}

TEST_CASE("cyclic difference matrix wraps the stencil") {
  const Eigen::MatrixXd d = cyclic_difference_matrix(4, 1);
  Eigen::MatrixXd want(4, 4);
  want << -1, 1, 0, 0,
          0, -1, 1, 0,
          0, 0, -1, 1,
          1, 0, 0, -1;
  CHECK((d - want).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd d2 = cyclic_difference_matrix(5, 2);
  CHECK(d2(3, 3) == 1.0);
  CHECK(d2(3, 4) == -2.0);
  CHECK(d2(3, 0) == 1.0);
  CHECK(d2(4, 4) == 1.0);
  CHECK(d2(4, 0) == -2.0);
  CHECK(d2(4, 1) == 1.0);
  CHECK(d2.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("difference penalties are PSD with null space dimension = order") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + static_cast<int>(below(rng, 12));
    const int order = 1 + static_cast<int>(below(rng, 2));
    if (dim <= order) continue;
    PenaltySpec spec;
    spec.kind = PenaltyKind::difference;
    spec.order = order;
    const Eigen::MatrixXd p = penalty_matrix(spec, dim);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()[k] < 1e-9) ++null_dim;
    CHECK(null_dim == order);
  }
}

TEST_CASE("cyclic difference penalty is PSD with zero row sums") {
  PenaltySpec spec;
  spec.kind = PenaltyKind::difference;
  spec.order = 2;
  const Eigen::MatrixXd p = penalty_matrix(spec, 7, /*cyclic=*/true);
  CHECK(p.rows() == 7);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  // Wrapping leaves only the constant in the null space.
  int null_dim = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()[k] < 1e-9) ++null_dim;
  CHECK(null_dim == 1);
}

TEST_CASE("adjacency penalty is the graph Laplacian") {
  PenaltySpec spec;
  spec.kind = PenaltyKind::adjacency;
  spec.neighbors = {{0, 1}, {1, 2}};
  const Eigen::MatrixXd p = penalty_matrix(spec, 3);
  Eigen::MatrixXd want(3, 3);
  want << 1, -1, 0,
          -1, 2, -1,
          0, -1, 1;
  CHECK((p - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("penalty validation rejects bad combinations") {
  BasisSpec dummy;
  dummy.kind = BasisKind::dummy;
  dummy.levels = {"a", "b", "c"};

  PenaltySpec diff;
  diff.kind = PenaltyKind::difference;
  diff.order = 2;
  try {
    validate_penalty(diff, dummy);
    FAIL("difference on dummy must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }

  PenaltySpec adj;
  adj.kind = PenaltyKind::adjacency;
  adj.neighbors = {{0, 0}};
  CHECK_THROWS_AS(validate_penalty(adj, dummy), Error);
  adj.neighbors = {{0, 5}};
  CHECK_THROWS_AS(validate_penalty(adj, dummy), Error);
  adj.neighbors = {{0, 1}};
  CHECK_NOTHROW(validate_penalty(adj, dummy));

  BasisSpec spline = cubic(0, 1, 4);
  CHECK_THROWS_AS(validate_penalty(adj, spline), Error);
  diff.order = 3;
  CHECK_THROWS_AS(validate_penalty(diff, spline), Error);
}

TEST_CASE("intercept and linear designs") {
  BasisSpec icpt;
  icpt.kind = BasisKind::intercept;
  CHECK(basis_dim(icpt) == 1);
  const auto ones = evaluate_basis(icpt, vec({-3.0, 0.0, 42.0}));
  CHECK(ones.values.minCoeff() == 1.0);
  CHECK(ones.values.maxCoeff() == 1.0);

  BasisSpec lin;
  lin.kind = BasisKind::linear;
  lin.lo = -1.0;
  lin.hi = 2.0;
  CHECK(basis_dim(lin) == 2);
  const auto e = evaluate_basis(lin, vec({-1.0, 0.5, 2.0}));
  CHECK(e.values(0, 0) == 1.0);
  CHECK(e.values(1, 1) == 0.5);
  CHECK(e.values(2, 1) == 2.0);
  CHECK_THROWS_AS(evaluate_basis(lin, vec({2.5})), Error);
}

TEST_CASE("bspline dimension rule: interior knots + degree + 1") {
  CHECK(basis_dim(cubic(0, 1, 20)) == 24);
  BasisSpec deg1 = cubic(0, 1, 1);
  deg1.degree = 1;
  CHECK(basis_dim(deg1) == 3);
}

TEST_CASE("degree-1 design equals hat functions") {
  BasisSpec s = cubic(0, 1, 1);
  s.degree = 1;  // knots 0, 0.5, 1
  const auto e = evaluate_basis(s, vec({0.0, 0.25, 0.5, 1.0}));
  CHECK(e.values(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.values(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.values(2, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values(3, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cubic design matches reference rows") {
  // Frozen from an independent evaluation of the same open knot vector.
  const auto e = evaluate_basis(cubic(0, 1, 1), vec({0.0, 0.3, 0.5, 1.0}));
  REQUIRE(e.values.cols() == 5);
  const double want1[5] = {1, 0, 0, 0, 0};
  const double want2[5] = {0.064, 0.558, 0.324, 0.054, 0};
  const double want3[5] = {0, 0.25, 0.5, 0.25, 0};
  const double want4[5] = {0, 0, 0, 0, 1};
  for (int k = 0; k < 5; ++k) {
    CHECK(e.values(0, k) == doctest::Approx(want1[k]).epsilon(1e-12));
    CHECK(e.values(1, k) == doctest::Approx(want2[k]).epsilon(1e-12));
    CHECK(e.values(2, k) == doctest::Approx(want3[k]).epsilon(1e-12));
    CHECK(e.values(3, k) == doctest::Approx(want4[k]).epsilon(1e-12));
  }

  const auto wide = evaluate_basis(cubic(0, 1, 20), vec({0.37}));
  REQUIRE(wide.values.cols() == 24);
  CHECK(wide.values(0, 7) == doctest::Approx(0.0020278333333333242).epsilon(1e-10));
  CHECK(wide.values(0, 8) == doctest::Approx(0.30203316666666641).epsilon(1e-12));
  CHECK(wide.values(0, 9) == doctest::Approx(0.6198501666666667).epsilon(1e-12));
  CHECK(wide.values(0, 10) == doctest::Approx(0.076088833333333425).epsilon(1e-12));
}

TEST_CASE("partition of unity, nonnegativity, and sparsity") {
  std::mt19937_64 rng(11);
  for (int degree = 1; degree <= 5; ++degree) {
    for (int interior : {1, 4, 20}) {
      BasisSpec s = cubic(-2.0, 3.0, interior);
      s.degree = degree;
      Eigen::VectorXd pts(200);
      pts[0] = s.lo;
      pts[1] = s.hi;
      for (Eigen::Index i = 2; i < pts.size(); ++i)
        pts[i] = s.lo + (s.hi - s.lo) * unit_uniform(rng);
      const auto e = evaluate_basis(s, pts);
      for (Eigen::Index r = 0; r < pts.size(); ++r) {
        CHECK(std::abs(e.values.row(r).sum() - 1.0) < 1e-12);
        CHECK(e.values.row(r).minCoeff() >= 0.0);
        int nonzero = 0;
        for (Eigen::Index c = 0; c < e.values.cols(); ++c)
          if (e.values(r, c) != 0.0) ++nonzero;
        CHECK(nonzero <= degree + 1);
      }
    }
  }
}

TEST_CASE("each column vanishes outside its knot support") {
  BasisSpec s = cubic(0.0, 1.0, 6);  // knots at i/7
  Eigen::VectorXd pts(141);
  for (Eigen::Index i = 0; i < pts.size(); ++i)
    pts[i] = static_cast<double>(i) / (pts.size() - 1.0);
  const auto e = evaluate_basis(s, pts);
  const double step = 1.0 / 7.0;
  for (int k = 0; k < basis_dim(s); ++k) {
    // Column k is supported on [knot(k), knot(k + degree + 1)] of the open
    // knot vector, clamped to the domain.
    const double lo = std::max(0.0, (k - s.degree) * step);
    const double hi = std::min(1.0, (k + 1) * step);
    for (Eigen::Index r = 0; r < pts.size(); ++r) {
      if (pts[r] < lo - 1e-12 || pts[r] > hi + 1e-12)
        CHECK(e.values(r, k) == 0.0);
    }
  }
}

TEST_CASE("out-of-domain evaluation is an error, not extrapolation") {
  BasisSpec s = cubic(0, 1, 3);
  try {
    evaluate_basis(s, vec({0.2, 1.2}));
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(evaluate_basis(s, vec({-0.01})), Error);
  CHECK_THROWS_AS(evaluate_basis(s, vec({std::nan("")})), Error);
}

TEST_CASE("degenerate domains and specs are rejected") {
  BasisSpec s = cubic(1, 1, 3);
  CHECK_THROWS_AS(evaluate_basis(s, vec({1.0})), Error);
  s = cubic(0, 1, 0);
  CHECK_THROWS_AS(evaluate_basis(s, vec({0.5})), Error);
  BasisSpec lin;
  lin.kind = BasisKind::linear;
  lin.lo = 2;
  lin.hi = -2;
  CHECK_THROWS_AS(evaluate_basis(lin, vec({0.0})), Error);
}

TEST_CASE("cyclic design: dimension, reference row, and seam continuity") {
  BasisSpec s;
  s.kind = BasisKind::cyclic_bspline;
  s.degree = 3;
  s.interior_knots = 6;
  s.lo = 0.0;
  s.hi = 1.0;
  CHECK(basis_dim(s) == 6);

  const auto e = evaluate_basis(s, vec({0.0, 0.17, 0.5, 1.0}));
  // Frozen from folding an independent uniform design modulo the dimension.
  const double at0[6] = {1.0 / 6, 2.0 / 3, 1.0 / 6, 0, 0, 0};
  const double at17[6] = {0, 0.15686533333333325, 0.66627066666666657,
                          0.17686266666666672, 1.333333333333359e-06, 0};
  const double at5[6] = {0, 0, 0, 1.0 / 6, 2.0 / 3, 1.0 / 6};
  for (int k = 0; k < 6; ++k) {
    CHECK(e.values(0, k) == doctest::Approx(at0[k]).epsilon(1e-12));
    CHECK(std::abs(e.values(1, k) - at17[k]) < 1e-12);
    CHECK(e.values(2, k) == doctest::Approx(at5[k]).epsilon(1e-12));
    // Seam: evaluating at hi reproduces the row at lo.
    CHECK(std::abs(e.values(3, k) - e.values(0, k)) < 1e-12);
  }

  std::mt19937_64 rng(3);
  Eigen::VectorXd pts(100);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts[i] = unit_uniform(rng);
  const auto f = evaluate_basis(s, pts);
  for (Eigen::Index r = 0; r < pts.size(); ++r)
    CHECK(std::abs(f.values.row(r).sum() - 1.0) < 1e-12);
}

TEST_CASE("dummy coding and level errors") {
  BasisSpec s;
  s.kind = BasisKind::dummy;
  s.levels = {"low", "mid", "high"};
  CHECK(basis_dim(s) == 3);
  const auto e = evaluate_basis(s, std::vector<std::string>{"mid", "low", "high", "mid"});
  CHECK(e.values(0, 1) == 1.0);
  CHECK(e.values(1, 0) == 1.0);
  CHECK(e.values(2, 2) == 1.0);
  CHECK(e.values(3, 1) == 1.0);
  CHECK(e.values.sum() == 4.0);

  try {
    evaluate_basis(s, std::vector<std::string>{"mid", "unknown"});
    FAIL("expected a level error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::level);
  }

  s.levels = {"a", "a"};
  CHECK_THROWS_AS(evaluate_basis(s, std::vector<std::string>{"a"}), Error);
  s.levels = {"a"};
  CHECK_THROWS_AS(evaluate_basis(s, vec({1.0})), Error);
}
