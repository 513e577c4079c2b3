#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "roax/errors.hpp"
#include "roax/multi_index.hpp"
#include "roax/polynomial.hpp"

using namespace roax;

namespace {

Polynomial random_poly(const VariableContext& ctx, int degree,
                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 2);
  Polynomial p(ctx);
  for (const auto& idx : monomial_basis(ctx.size(), degree)) {
    if (pick(rng) == 0) p = p + Polynomial::monomial(ctx, idx, coef(rng));
  }
  return p;
}

std::vector<double> random_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::vector<double> p(n);
  for (auto& v : p) v = d(rng);
  return p;
}

}  // namespace

TEST_CASE("monomial basis sizes and ordering") {
  CHECK(monomial_basis(1, 4).size() == 5);
  CHECK(basis_size(2, 3) == 10);
  CHECK(basis_size(3, 6) == 84);

  auto b14 = monomial_basis(1, 4);
  REQUIRE(b14.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(b14[i] == MultiIndex{i});

  auto b22 = monomial_basis(2, 2);
  REQUIRE(b22.size() == 6);
  CHECK(b22[0] == MultiIndex{0, 0});
  CHECK(b22[1] == MultiIndex{1, 0});
  CHECK(b22[2] == MultiIndex{0, 1});
  CHECK(b22[3] == MultiIndex{2, 0});
  CHECK(b22[4] == MultiIndex{1, 1});
  CHECK(b22[5] == MultiIndex{0, 2});

  // Strictly increasing under the comparator; ranks agree with positions.
  for (int n : {1, 2, 3, 4}) {
    auto basis = monomial_basis(n, 5);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(grlex_rank(basis[i]) == static_cast<std::int64_t>(i));
      if (i + 1 < basis.size()) CHECK(grlex_less(basis[i], basis[i + 1]));
    }
  }
}

TEST_CASE("degree-zero basis is the constant monomial") {
  auto b = monomial_basis(3, 0);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == MultiIndex{0, 0, 0});
}

TEST_CASE("parser canonicalizes") {
  auto ctx = state_context(1);
  auto p = parse_polynomial("x1^2 - 0.25*x1", ctx);
  CHECK(p.coefficient({2}) == 1.0);
  CHECK(p.coefficient({1}) == -0.25);
  CHECK(p.degree() == 2);

  // Like terms merge; zero coefficients vanish.
  auto q = parse_polynomial("x1 + x1 - 2*x1", ctx);
  CHECK(q.is_zero());
  CHECK(q.to_string() == "0");
  CHECK(parse_polynomial("0", ctx).is_zero());
}

TEST_CASE("parser distributes one level of parentheses") {
  auto ctx = state_context(2);
  auto p = parse_polynomial("10*(x1^2 - 0.21)*x2", ctx);
  CHECK(p.coefficient({2, 1}) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(p.coefficient({0, 1}) == doctest::Approx(-2.1).epsilon(1e-15));

  auto cubic = parse_polynomial("x1*(x1 - 0.5)*(x1 + 0.5)", state_context(1));
  CHECK(cubic.coefficient({3}) == 1.0);
  CHECK(cubic.coefficient({1}) == doctest::Approx(-0.25).epsilon(1e-15));

  CHECK_THROWS_AS(parse_polynomial("(x1*(x1+1))", state_context(1)),
                  SyntaxError);
}

TEST_CASE("parser errors carry position and variable names") {
  auto ctx = state_context(1);
  CHECK_THROWS_AS(parse_polynomial("x2 + 1", ctx), UnknownVariable);
  CHECK_THROWS_AS(parse_polynomial("", ctx), SyntaxError);
  CHECK_THROWS_AS(parse_polynomial("x1*()", ctx), SyntaxError);
  CHECK_THROWS_AS(parse_polynomial("x1 +", ctx), SyntaxError);
  CHECK_THROWS_AS(parse_polynomial("x1^-2", ctx), SyntaxError);
  try {
    parse_polynomial("x1 * ()", ctx);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position == 6);
  }
}

TEST_CASE("evaluation matches hand values") {
  auto ctx = state_context(1);
  auto f = parse_polynomial("x1^3 - 0.25*x1", ctx);
  CHECK(f.evaluate({1.0}) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(f.evaluate({0.5}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f.evaluate({-1.0}) == doctest::Approx(-0.75).epsilon(1e-15));

  auto g = parse_polynomial("1 - x1^2 - x2^2", state_context(2));
  CHECK(g.evaluate({0.6, 0.8}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("product evaluation property") {
  std::mt19937_64 rng(20260822);
  for (int trial = 0; trial < 50; ++trial) {
    auto ctx = state_context(2);
    auto p = random_poly(ctx, 3, rng);
    auto q = random_poly(ctx, 3, rng);
    auto pq = p * q;
    auto pt = random_point(2, rng);
    const double lhs = pq.evaluate(pt);
    const double rhs = p.evaluate(pt) * q.evaluate(pt);
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs)));
  }
}

TEST_CASE("derivative matches central differences") {
  std::mt19937_64 rng(7);
  auto ctx = state_context(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_poly(ctx, 4, rng);
    auto pt = random_point(3, rng);
    for (int v = 0; v < 3; ++v) {
      auto d = p.partial_derivative(v);
      const double h = 1e-5;
      auto hi = pt, lo = pt;
      hi[v] += h;
      lo[v] -= h;
      const double fd = (p.evaluate(hi) - p.evaluate(lo)) / (2 * h);
      const double an = d.evaluate(pt);
      CHECK(std::abs(fd - an) <= 1e-6 * (1.0 + std::abs(an)));
    }
  }
}

TEST_CASE("derivative basics") {
  auto ctx = state_context(2);
  auto p = parse_polynomial("x1^3*x2 + 2*x2", ctx);
  auto dx1 = p.partial_derivative(0);
  CHECK(dx1.coefficient({2, 1}) == 3.0);
  auto dx2 = p.partial_derivative(1);
  CHECK(dx2.coefficient({3, 0}) == 1.0);
  CHECK(dx2.coefficient({0, 0}) == 2.0);
  CHECK(Polynomial::constant(ctx, 5.0).partial_derivative(0).is_zero());
}

TEST_CASE("lie derivative of the uncontrolled cubic") {
  // v = x^2, f = x^3 - 0.25 x  ->  Lv = 2x^4 - 0.5 x^2 (no time term).
  auto txctx = time_state_context(1);
  auto v = parse_polynomial("x1^2", txctx);
  std::vector<Polynomial> f{parse_polynomial("x1^3 - 0.25*x1", txctx)};
  auto lv = lie_derivative(v, f, txctx);
  CHECK(lv.coefficient({0, 4}) == 2.0);
  CHECK(lv.coefficient({0, 2}) == -0.5);
  CHECK(lv.coefficients().size() == 2);
}

TEST_CASE("lie derivative includes the time partial and control terms") {
  auto full = full_context(2, 1);
  auto txctx = time_state_context(2);
  auto v = parse_polynomial("t*x2 + x1", txctx);
  // f = (x2, u1): Lv = x2 + (t)*u1 + x2 ... d/dt v = x2; dv/dx1 * x2 = x2;
  // dv/dx2 * u1 = t*u1.
  std::vector<Polynomial> f{parse_polynomial("x2", full),
                            parse_polynomial("u1", full)};
  auto lv = lie_derivative(v, f, full);
  CHECK(lv.coefficient({0, 0, 1, 0}) == 2.0);
  CHECK(lv.coefficient({1, 0, 0, 1}) == 1.0);

  // Linearity in v, coefficient-exact.
  auto v2 = parse_polynomial("x1^2 - t^2", txctx);
  auto sum = lie_derivative(v + v2, f, full);
  auto parts = lie_derivative(v, f, full) + lie_derivative(v2, f, full);
  CHECK((sum - parts).is_zero());
}

TEST_CASE("lie derivative rejects malformed inputs") {
  auto full = full_context(1, 1);
  auto v = parse_polynomial("x1^2", time_state_context(1));
  std::vector<Polynomial> too_many{parse_polynomial("x1", full),
                                   parse_polynomial("u1", full)};
  CHECK_THROWS_AS(lie_derivative(v, too_many, full), DimensionMismatch);
  std::vector<Polynomial> wrong_ctx{parse_polynomial("x1", state_context(1))};
  CHECK_THROWS_AS(lie_derivative(v, wrong_ctx, full), ContextMismatch);
}

TEST_CASE("context operations") {
  auto a = state_context(2);
  auto b = full_context(2, 0);
  CHECK_THROWS_AS(parse_polynomial("x1", a) + parse_polynomial("x1", b),
                  ContextMismatch);
  auto p = parse_polynomial("x1*x2", a).embedded(b);
  CHECK(p.coefficient({0, 1, 1}) == 1.0);
  CHECK_THROWS_AS(parse_polynomial("x1", b).embedded(a), UnknownVariable);
}

TEST_CASE("affine substitution rescales boxes") {
  auto ctx = state_context(1);
  auto g = parse_polynomial("0.49 - x1^2", ctx);
  // x1 := 0.7 * z maps [-0.7, 0.7] to [-1, 1]: g becomes 0.49*(1 - z^2).
  auto h = g.substitute_affine(0, 0.7, 0.0);
  CHECK(h.coefficient({0}) == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(h.coefficient({2}) == doctest::Approx(-0.49).epsilon(1e-15));
  // Value preservation under the forward map.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double z = d(rng);
    CHECK(h.evaluate({z}) ==
          doctest::Approx(g.evaluate({0.7 * z})).epsilon(1e-12));
  }
}

TEST_CASE("print/parse round-trip is identity") {
  std::mt19937_64 rng(99);
  auto ctx = VariableContext({"t", "x1", "x2"});
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_poly(ctx, 4, rng);
    auto q = parse_polynomial(p.to_string(), ctx);
    CHECK(p.coefficients().size() == q.coefficients().size());
    for (const auto& [idx, c] : p.coefficients()) {
      CHECK(q.coefficient(idx) == c);  // bit-exact round trip
    }
  }
  CHECK(parse_polynomial("1e-3*x1", state_context(1)).coefficient({1}) ==
        1e-3);
}
