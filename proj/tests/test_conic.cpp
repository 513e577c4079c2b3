#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <optional>
#include <random>
#include <vector>

#include "roax/conic.hpp"
#include "roax/errors.hpp"

using namespace roax;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd block_value(const ConicProblem& p, size_t bi,
                     const std::vector<double>& y) {
  const ConicBlock& blk = p.blocks[bi];
  MatrixXd m = MatrixXd::Zero(blk.size, blk.size);
  for (const BlockEntry& e : blk.entries) {
    const double v = e.coord < 0 ? e.coeff : e.coeff * y[(size_t)e.coord];
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
  return m;
}

double min_eig(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ConicProblem arrow_toy() {
  // maximize y subject to [[1, y], [y, 1]] >= 0; optimum y = 1.
  ConicProblem p;
  p.num_vars = 1;
  p.objective = {1.0};
  ConicBlock blk;
  blk.size = 2;
  blk.entries = {{0, 0, -1, 1.0}, {1, 1, -1, 1.0}, {0, 1, 0, 1.0}};
  p.blocks.push_back(blk);
  return p;
}

ConicProblem split_mass_toy() {
  // maximize a subject to a + b = 2, a >= 0, b >= 0.
  ConicProblem p;
  p.num_vars = 2;
  p.objective = {1.0, 0.0};
  p.equalities.push_back({{{0, 1.0}, {1, 1.0}}, 2.0});
  ConicBlock b0;
  b0.size = 1;
  b0.entries = {{0, 0, 0, 1.0}};
  ConicBlock b1;
  b1.size = 1;
  b1.entries = {{0, 0, 1, 1.0}};
  p.blocks.push_back(b0);
  p.blocks.push_back(b1);
  return p;
}

struct RandomLp {
  int n = 0;
  std::vector<VectorXd> rows;   // a_i . y <= b_i
  std::vector<double> rhs;
  std::optional<std::pair<VectorXd, double>> eq;  // g . y = h
  VectorXd c;
  ConicProblem problem;
};

RandomLp make_random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> slack(0.1, 1.1);
  RandomLp lp;
  lp.n = dim(rng);
  VectorXd y0(lp.n);
  for (int j = 0; j < lp.n; ++j) y0[j] = 2.5 * unit(rng);
  std::uniform_int_distribution<int> rows(lp.n + 1, lp.n + 6);
  const int m = rows(rng);
  for (int i = 0; i < m; ++i) {
    VectorXd a(lp.n);
    do {
      for (int j = 0; j < lp.n; ++j) a[j] = unit(rng);
    } while (a.cwiseAbs().maxCoeff() < 0.1);
    lp.rows.push_back(a);
    lp.rhs.push_back(a.dot(y0) + slack(rng));
  }
  // Bounding box keeps the optimum finite.
  for (int j = 0; j < lp.n; ++j) {
    VectorXd a = VectorXd::Zero(lp.n);
    a[j] = 1.0;
    lp.rows.push_back(a);
    lp.rhs.push_back(5.0);
    lp.rows.push_back(-a);
    lp.rhs.push_back(5.0);
  }
  if (std::uniform_int_distribution<int>(0, 1)(rng)) {
    VectorXd g(lp.n);
    do {
      for (int j = 0; j < lp.n; ++j) g[j] = unit(rng);
    } while (g.cwiseAbs().maxCoeff() < 0.1);
    lp.eq = {g, g.dot(y0)};
  }
  lp.c = VectorXd(lp.n);
  for (int j = 0; j < lp.n; ++j) lp.c[j] = unit(rng);

  ConicProblem& p = lp.problem;
  p.num_vars = lp.n;
  p.objective.assign(lp.c.data(), lp.c.data() + lp.n);
  if (lp.eq) {
    EqualityRow row;
    for (int j = 0; j < lp.n; ++j) row.terms.emplace_back(j, lp.eq->first[j]);
    row.rhs = lp.eq->second;
    p.equalities.push_back(row);
  }
  ConicBlock blk;
  blk.size = (int)lp.rows.size();
  blk.diagonal = true;
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    blk.entries.push_back({(int)i, (int)i, -1, lp.rhs[i]});
    for (int j = 0; j < lp.n; ++j)
      if (lp.rows[i][j] != 0.0)
        blk.entries.push_back({(int)i, (int)i, j, -lp.rows[i][j]});
  }
  p.blocks.push_back(blk);
  return lp;
}

// Exact LP optimum by enumerating basic feasible points.
double lp_vertex_optimum(const RandomLp& lp) {
  const int n = lp.n;
  const int m = (int)lp.rows.size();
  const int pick = lp.eq ? n - 1 : n;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(pick);
  auto feasible = [&](const VectorXd& y) {
    for (int i = 0; i < m; ++i)
      if (lp.rows[i].dot(y) > lp.rhs[i] + 1e-7) return false;
    if (lp.eq && std::abs(lp.eq->first.dot(y) - lp.eq->second) > 1e-7)
      return false;
    return true;
  };
  auto visit = [&](const std::vector<int>& active) {
    MatrixXd M(n, n);
    VectorXd r(n);
    int k = 0;
    if (lp.eq) {
      M.row(k) = lp.eq->first.transpose();
      r[k++] = lp.eq->second;
    }
    for (int i : active) {
      M.row(k) = lp.rows[i].transpose();
      r[k++] = lp.rhs[i];
    }
    Eigen::FullPivLU<MatrixXd> lu(M);
    if (!lu.isInvertible()) return;
    VectorXd y = lu.solve(r);
    if ((M * y - r).cwiseAbs().maxCoeff() > 1e-8) return;
    if (feasible(y)) best = std::max(best, lp.c.dot(y));
  };
  // enumerate combinations of `pick` inequality indices out of m
  std::vector<int> comb(pick);
  for (int i = 0; i < pick; ++i) comb[i] = i;
  if (pick == 0) return best;
  while (true) {
    visit(comb);
    int i = pick - 1;
    while (i >= 0 && comb[i] == m - pick + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < pick; ++j) comb[j] = comb[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("arrow toy reaches its optimum with a complementary dual") {
  ConicProblem p = arrow_toy();
  ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.y[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.dual_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.gap <= 1e-7);
  REQUIRE(s.Z.size() == 1);
  CHECK(min_eig(s.Z[0]) >= -1e-9);
  CHECK(s.Z[0](0, 1) == doctest::Approx(-0.5).epsilon(1e-6));
  MatrixXd slack = block_value(p, 0, s.y);
  CHECK(std::abs((s.Z[0].cwiseProduct(slack)).sum()) <= 1e-6);
}

TEST_CASE("mass splitting toy: equality multiplier is recovered") {
  ConicProblem p = split_mass_toy();
  ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(s.y[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(s.y[1] == doctest::Approx(0.0).epsilon(1e-6));
  REQUIRE(s.x.size() == 1);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  // dual slacks: z1 = x - 1 = 0 on the maximized mass, z2 = x = 1 on the rest
  CHECK(s.Z[0](0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(s.Z[1](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible pair of bounds is certified") {
  // y >= 1 and y <= 0 simultaneously
  ConicProblem p;
  p.num_vars = 1;
  p.objective = {1.0};
  ConicBlock lo;
  lo.size = 1;
  lo.entries = {{0, 0, -1, -1.0}, {0, 0, 0, 1.0}};
  ConicBlock hi;
  hi.size = 1;
  hi.entries = {{0, 0, 0, -1.0}};
  p.blocks.push_back(lo);
  p.blocks.push_back(hi);
  ConicSolution s = solve(p);
  CHECK(s.status == SolveStatus::kInfeasible);
}

TEST_CASE("size limits are enforced before any factorization") {
  ConicProblem p;
  p.num_vars = 1;
  p.objective = {1.0};
  ConicBlock blk;
  blk.size = 401;
  blk.entries = {{0, 0, 0, 1.0}};
  p.blocks.push_back(blk);
  CHECK_THROWS_AS(solve(p), LimitExceeded);
}

TEST_CASE("random LP battery matches vertex enumeration") {
  std::mt19937_64 rng(20240817u);
  int eq_cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    CAPTURE(trial);
    RandomLp lp = make_random_lp(rng);
    if (lp.eq) ++eq_cases;
    const double exact = lp_vertex_optimum(lp);
    REQUIRE(std::isfinite(exact));
    ConicSolution s = solve(lp.problem);
    REQUIRE(s.status == SolveStatus::kOptimal);
    CHECK(std::abs(s.primal_objective - exact) <=
          1e-6 * (1.0 + std::abs(exact)));
    CHECK(std::abs(s.primal_objective - s.dual_objective) <=
          1e-6 * (1.0 + std::abs(exact)));
    // primal feasibility and complementarity of the returned pair
    MatrixXd slack = block_value(lp.problem, 0, s.y);
    CHECK(slack.diagonal().minCoeff() >= -1e-7);
    CHECK(min_eig(s.Z[0]) >= -1e-9);
    CHECK(std::abs((s.Z[0].cwiseProduct(slack)).sum()) <= 1e-6 * slack.rows());
    if (lp.eq) {
      double r = 0.0;
      for (const auto& [coord, coeff] : lp.problem.equalities[0].terms)
        r += coeff * s.y[(size_t)coord];
      CHECK(std::abs(r - lp.problem.equalities[0].rhs) <= 1e-7);
    }
  }
  CHECK(eq_cases > 5);  // the generator exercises the equality path
}

TEST_CASE("repeated solves are bitwise identical") {
  std::mt19937_64 rng(7u);
  RandomLp lp = make_random_lp(rng);
  ConicSolution a = solve(lp.problem);
  ConicSolution b = solve(lp.problem);
  REQUIRE(a.y.size() == b.y.size());
  CHECK(std::memcmp(a.y.data(), b.y.data(), a.y.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(&a.primal_objective, &b.primal_objective,
                    sizeof(double)) == 0);
  CHECK(a.iterations == b.iterations);

  ConicProblem arrow = arrow_toy();
  ConicSolution c = solve(arrow);
  ConicSolution d = solve(arrow);
  CHECK(std::memcmp(c.y.data(), d.y.data(), sizeof(double)) == 0);
}

TEST_CASE("random small semidefinite programs solve to tolerance") {
  std::mt19937_64 rng(99u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    CAPTURE(trial);
    const int n = 3, s = 4;
    ConicProblem p;
    p.num_vars = n;
    p.objective.resize(n);
    for (int j = 0; j < n; ++j) p.objective[(size_t)j] = unit(rng);
    ConicBlock blk;
    blk.size = s;
    MatrixXd G(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) G(i, j) = unit(rng);
    MatrixXd E = G * G.transpose() + 0.5 * MatrixXd::Identity(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) blk.entries.push_back({i, j, -1, E(i, j)});
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j)
          blk.entries.push_back({i, j, v, unit(rng)});
    p.blocks.push_back(blk);
    ConicBlock box;
    box.size = 2 * n;
    box.diagonal = true;
    for (int v = 0; v < n; ++v) {
      box.entries.push_back({2 * v, 2 * v, -1, 5.0});
      box.entries.push_back({2 * v, 2 * v, v, 1.0});
      box.entries.push_back({2 * v + 1, 2 * v + 1, -1, 5.0});
      box.entries.push_back({2 * v + 1, 2 * v + 1, v, -1.0});
    }
    p.blocks.push_back(box);
    ConicSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.gap <= 1e-6);
    CHECK(sol.feas_primal <= 1e-7);
    CHECK(sol.feas_dual <= 1e-7);
    MatrixXd val = block_value(p, 0, sol.y);
    CHECK(min_eig(val) >= -1e-7);
    CHECK(min_eig(sol.Z[0]) >= -1e-9);
    CHECK(std::abs((sol.Z[0].cwiseProduct(val)).sum()) <= 1e-5);
  }
}

TEST_CASE("export produces the frozen arrow text and round-trips") {
  ConicProblem p = arrow_toy();
  const std::string golden =
      "*roax-sdpa v1\n"
      "*maximize: the objective row below is negated\n"
      "1\n"
      "1\n"
      "2\n"
      "-1\n"
      "0 1 1 1 -1\n"
      "0 1 2 2 -1\n"
      "1 1 1 2 1\n";
  CHECK(sdpa_text(p) == golden);
  ConicProblem q = sdpa_from_text(golden);
  CHECK(sdpa_text(q) == golden);
  ConicSolution s = solve(q);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("equality rows survive the diagonal-split encoding") {
  ConicProblem p = split_mass_toy();
  const std::string text = sdpa_text(p);
  CHECK(text.find("*eq-rows 1\n") != std::string::npos);
  ConicProblem q = sdpa_from_text(text);
  REQUIRE(q.equalities.size() == 1);
  CHECK(q.equalities[0].rhs == 2.0);
  REQUIRE(q.equalities[0].terms.size() == 2);
  CHECK(q.equalities[0].terms[0] == std::pair<int, double>(0, 1.0));
  CHECK(q.equalities[0].terms[1] == std::pair<int, double>(1, 1.0));
  CHECK(q.blocks.size() == 2);
  CHECK(sdpa_text(q) == text);
  ConicSolution s = solve(q);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("import accepts the relaxed foreign flavor of the format") {
  const std::string text =
      "\" foreign comment line\n"
      "3 = mDIM\n"
      "2 = nBLOCK\n"
      "{4, -3}\n"
      "1.0, 2.0, 3.0\n"
      "0 1 1 1 2.5\n"
      "1 1 1 2 0.5\n"
      "1 1 2 1 0.25\n"
      "2 2 3 3 -1.5\n"
      "3 2 1 1 4\n";
  ConicProblem p = sdpa_from_text(text);
  CHECK(p.num_vars == 3);
  REQUIRE(p.blocks.size() == 2);
  CHECK(p.blocks[0].size == 4);
  CHECK_FALSE(p.blocks[0].diagonal);
  CHECK(p.blocks[1].size == 3);
  CHECK(p.blocks[1].diagonal);
  CHECK(p.objective == std::vector<double>{-1.0, -2.0, -3.0});
  // constant matrices flip sign on import; lower-triangle entries normalize
  bool saw_const = false, saw_lower = false;
  for (const BlockEntry& e : p.blocks[0].entries) {
    if (e.coord == -1) {
      saw_const = true;
      CHECK(e.coeff == -2.5);
    }
    if (e.coord == 0 && e.row == 0 && e.col == 1 && e.coeff == 0.25)
      saw_lower = true;
  }
  CHECK(saw_const);
  CHECK(saw_lower);
}

TEST_CASE("malformed files report the offending line") {
  const std::string bad =
      "1\n"
      "1\n"
      "2\n"
      "xyz\n";
  try {
    sdpa_from_text(bad);
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  const std::string bad_block =
      "1\n1\n2\n-1\n"
      "1 7 1 1 1\n";
  try {
    sdpa_from_text(bad_block);
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    CHECK(std::string(e.what()).find("block number") != std::string::npos);
  }
}
