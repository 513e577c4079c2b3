#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "roax/errors.hpp"
#include "roax/moments.hpp"

using namespace roax;

namespace {

double min_eig(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("box Lebesgue moments") {
  auto ctx = state_context(2);
  std::vector<Interval> box{{-1, 1}, {-1, 1}};
  auto y = lebesgue_moments(ctx, 4, box);
  CHECK(y[{0, 0}] == doctest::Approx(4.0));        // area
  CHECK(y[{1, 0}] == doctest::Approx(0.0));        // odd vanishes
  CHECK(y[{2, 0}] == doctest::Approx(4.0 / 3.0));  // (2/3) * 2
  CHECK(y[{2, 2}] == doctest::Approx(4.0 / 9.0));
  // Asymmetric box on [0,1]: mean of t is 1/2, t(1-t) integrates to 1/6.
  auto tctx = VariableContext({"t"});
  auto yt = lebesgue_moments(tctx, 3, {{0, 1}});
  CHECK(yt[{1}] == doctest::Approx(0.5));
  CHECK(yt[{2}] == doctest::Approx(1.0 / 3.0));
  const double integral_t_1mt = yt[{1}] - yt[{2}];
  CHECK(integral_t_1mt == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("dirac moments are monomial evaluations") {
  auto ctx = state_context(2);
  auto y = dirac_moments(ctx, 3, {0.5, -2.0});
  CHECK(y[{0, 0}] == 1.0);
  CHECK(y[{1, 1}] == doctest::Approx(-1.0));
  CHECK(y[{2, 1}] == doctest::Approx(-0.5));
  CHECK(y[{0, 3}] == doctest::Approx(-8.0));
}

TEST_CASE("riesz functional is linear and degree-checked") {
  auto ctx = state_context(1);
  auto y = lebesgue_moments(ctx, 4, {{-1, 1}});
  CHECK(riesz(y, parse_polynomial("x1^2", ctx)) == doctest::Approx(2.0 / 3.0));
  CHECK(riesz(y, parse_polynomial("1 - x1^2", ctx)) ==
        doctest::Approx(2.0 - 2.0 / 3.0));
  CHECK_THROWS_AS(riesz(y, parse_polynomial("x1^5", ctx)), DegreeTooLow);
  CHECK_THROWS_AS(riesz(y, parse_polynomial("x2", state_context(2))),
                  ContextMismatch);
  // Linearity on random polynomials.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 10; ++i) {
    auto p = Polynomial::monomial(ctx, {2}, d(rng)) +
             Polynomial::monomial(ctx, {1}, d(rng));
    auto q = Polynomial::monomial(ctx, {3}, d(rng)) +
             Polynomial::constant(ctx, d(rng));
    const double lhs = riesz(y, p + q);
    CHECK(lhs == doctest::Approx(riesz(y, p) + riesz(y, q)).epsilon(1e-12));
  }
}

TEST_CASE("moment matrix of Lebesgue on [-1,1]") {
  auto ctx = state_context(1);
  auto y = lebesgue_moments(ctx, 2, {{-1, 1}});
  auto M1 = moment_matrix(ctx, 1);
  auto M = M1.evaluate(y);
  REQUIRE(M.rows() == 2);
  CHECK(M(0, 0) == doctest::Approx(2.0));
  CHECK(M(0, 1) == doctest::Approx(0.0));
  CHECK(M(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(min_eig(M) > 0.0);
}

TEST_CASE("localizing matrix of the unit interval") {
  auto ctx = state_context(1);
  auto g = parse_polynomial("1 - x1^2", ctx);
  auto y = lebesgue_moments(ctx, 2, {{-1, 1}});
  auto L0 = localizing_matrix(g, 0);
  auto L = L0.evaluate(y);
  REQUIRE(L.rows() == 1);
  CHECK(L(0, 0) == doctest::Approx(2.0 - 2.0 / 3.0));  // 4/3

  auto y4 = lebesgue_moments(ctx, 4, {{-1, 1}});
  auto L1 = localizing_matrix(g, 1).evaluate(y4);
  // Entries: [y0-y2, y1-y3; ., y2-y4].
  CHECK(L1(0, 0) == doctest::Approx(4.0 / 3.0));
  CHECK(L1(0, 1) == doctest::Approx(0.0));
  CHECK(L1(1, 1) == doctest::Approx(2.0 / 3.0 - 2.0 / 5.0));
  CHECK(min_eig(L1) > 0.0);
}

TEST_CASE("time localizer t(1-t) on [0,1] Lebesgue") {
  auto tctx = VariableContext({"t"});
  auto g = parse_polynomial("t - t^2", tctx);
  auto y = lebesgue_moments(tctx, 4, {{0, 1}});
  auto L = localizing_matrix(g, 1).evaluate(y);
  CHECK(L(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(min_eig(L) > 0.0);
}

TEST_CASE("degree guards") {
  auto ctx = state_context(2);
  auto y = lebesgue_moments(ctx, 2, {{-1, 1}, {-1, 1}});
  CHECK_THROWS_AS(moment_matrix(ctx, 2).evaluate(y), DegreeTooLow);
  auto g = parse_polynomial("1 - x1^2 - x2^2", ctx);
  CHECK_THROWS_AS(localizing_matrix(g, 1).evaluate(y), DegreeTooLow);
  CHECK_NOTHROW(localizing_matrix(g, 0).evaluate(y));
}

TEST_CASE("property: Dirac mixtures give PSD moment and localizing matrices") {
  std::mt19937_64 rng(20260822);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  std::uniform_int_distribution<int> natoms(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const int k = 1 + trial % 3;
    auto ctx = state_context(n);
    auto g = Polynomial::constant(ctx, static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
      MultiIndex e(n, 0);
      e[i] = 2;
      g = g + Polynomial::monomial(ctx, e, -1.0);
    }
    const int deg = 2 * k + g.degree();
    MomentVector y = MomentVector::zero(ctx, deg);
    const int atoms = natoms(rng);
    for (int a = 0; a < atoms; ++a) {
      std::vector<double> pt(n);
      for (auto& v : pt) v = coord(rng);
      const double w = weight(rng);
      auto d = dirac_moments(ctx, deg, pt);
      for (std::size_t i = 0; i < y.values.size(); ++i)
        y.values[i] += w * d.values[i];
    }
    // All atoms lie inside the ball n - |x|^2 >= 0, so both matrices are PSD.
    CHECK(min_eig(moment_matrix(ctx, k).evaluate(y)) >= -1e-10);
    CHECK(min_eig(localizing_matrix(g, k).evaluate(y)) >= -1e-10);
  }
}

TEST_CASE("property: moment matrices nest as principal submatrices") {
  auto ctx = state_context(2);
  auto y = lebesgue_moments(ctx, 6, {{-1, 1}, {0, 2}});
  auto M2 = moment_matrix(ctx, 2).evaluate(y);
  auto M3 = moment_matrix(ctx, 3).evaluate(y);
  CHECK((M3.topLeftCorner(M2.rows(), M2.cols()) - M2).norm() == 0.0);
}

TEST_CASE("localizing matrix is the Riesz pairing against shifted monomials") {
  // Entry (a,b) of M_k(g y) equals riesz(y, g * z^a * z^b).
  auto ctx = state_context(2);
  auto g = parse_polynomial("2 - x1^2 - x2^2", ctx);
  auto y = lebesgue_moments(ctx, 6, {{-1, 1}, {-1, 1}});
  auto basis = monomial_basis(2, 2);
  auto L = localizing_matrix(g, 2).evaluate(y);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = a; b < basis.size(); ++b) {
      auto mono = Polynomial::monomial(ctx, add_indices(basis[a], basis[b]));
      const double expect = riesz(y, g * mono);
      CHECK(L(a, b) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}
