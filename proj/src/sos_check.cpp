#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "roax/errors.hpp"
#include "roax/relaxation.hpp"

namespace roax {
namespace {

int half_up(int deg) { return (deg + 1) / 2; }

Polynomial time_window(const VariableContext& ctx) {
  Polynomial t = Polynomial::variable(ctx, 0);
  return t - t * t;
}

/// Rewrites p over `target`, which must contain every variable p still
/// depends on (others must only appear with exponent zero).
Polynomial project_onto(const Polynomial& p, const VariableContext& target) {
  const VariableContext& src = p.context();
  std::vector<int> pos(src.size(), -1);
  for (int i = 0; i < src.size(); ++i) {
    auto j = target.index_of(src.name(i));
    if (j) pos[i] = *j;
  }
  Polynomial::CoeffMap out;
  for (const auto& [idx, c] : p.coefficients()) {
    MultiIndex moved(target.size(), 0);
    for (int i = 0; i < src.size(); ++i) {
      if (idx[i] == 0) continue;
      if (pos[i] < 0)
        throw ContextMismatch("projection would drop a live variable");
      moved[pos[i]] = idx[i];
    }
    out[moved] += c;
  }
  return Polynomial(target, std::move(out));
}

/// One weighted square term: weight * (basis' G basis) with G >= 0 over the
/// monomial basis of degree `order`.
struct FitTerm {
  Polynomial weight;
  int order = 0;
};

std::int64_t packed_index(int r, int c, int size) {
  return static_cast<std::int64_t>(r) * size - (static_cast<std::int64_t>(r) * (r - 1)) / 2 + (c - r);
}

/// Decides whether `target` equals a sum of the given weighted squares, by
/// solving the coefficient-matching feasibility program; reconstructs the
/// combination from the returned Grams and reports the mismatch.
SosIdentityReport fit_combination(std::string name, const Polynomial& target,
                                  const std::vector<FitTerm>& terms,
                                  const VariableContext& ctx) {
  SosIdentityReport rep;
  rep.name = std::move(name);

  int budget = target.degree();
  for (const auto& t : terms)
    budget = std::max(budget, 2 * t.order + t.weight.degree());
  const auto gammas = monomial_basis(ctx.size(), budget);

  std::vector<SymmetricMatrixExpr> exprs;
  std::vector<std::int64_t> offset;
  std::int64_t total = 0;
  for (const auto& t : terms) {
    exprs.push_back(localizing_matrix(t.weight, t.order));
    offset.push_back(total);
    const std::int64_t s = exprs.back().size;
    total += s * (s + 1) / 2;
  }

  std::vector<std::vector<std::pair<int, double>>> rows(gammas.size());
  for (std::size_t ti = 0; ti < exprs.size(); ++ti) {
    const auto& e = exprs[ti];
    for (int r = 0; r < e.size; ++r)
      for (int c = r; c < e.size; ++c) {
        const double mult = (r == c) ? 1.0 : 2.0;
        const std::int64_t coord = offset[ti] + packed_index(r, c, e.size);
        for (const auto& [gamma, gc] : e.entry(r, c).terms)
          rows[gamma].emplace_back(static_cast<int>(coord), mult * gc);
      }
  }

  std::vector<double> rhs(gammas.size(), 0.0);
  for (const auto& [idx, c] : target.coefficients())
    rhs[grlex_rank(idx)] = c;

  // Coefficients no square term can reach must already be (numerically)
  // zero; they carry the solve tolerance of the certificate.
  const double drop_tol = 1e-5 * std::max(1.0, target.max_abs_coefficient());
  double unreachable = 0.0;
  ConicProblem problem;
  problem.num_vars = static_cast<int>(total);
  problem.objective.assign(problem.num_vars, 0.0);
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (rows[i].empty()) {
      unreachable = std::max(unreachable, std::abs(rhs[i]));
      continue;
    }
    EqualityRow row;
    row.terms = rows[i];
    row.rhs = rhs[i];
    problem.equalities.push_back(std::move(row));
  }
  if (unreachable > drop_tol) {
    rep.feasible = false;
    rep.residual = unreachable;
    rep.solve_status = SolveStatus::kInfeasible;
    return rep;
  }

  for (std::size_t ti = 0; ti < exprs.size(); ++ti) {
    const auto& e = exprs[ti];
    ConicBlock block;
    block.size = e.size;
    block.diagonal = (e.size == 1);
    for (int r = 0; r < e.size; ++r)
      for (int c = r; c < e.size; ++c)
        block.entries.push_back(
            {r, c, static_cast<int>(offset[ti] + packed_index(r, c, e.size)),
             1.0});
    problem.blocks.push_back(std::move(block));
  }
  problem.check();

  const ConicSolution sol = solve(problem);
  rep.solve_status = sol.status;
  rep.feasible = (sol.status == SolveStatus::kOptimal);

  std::vector<double> recon(gammas.size(), 0.0);
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t ti = 0; ti < exprs.size(); ++ti) {
    const auto& e = exprs[ti];
    Eigen::MatrixXd G(e.size, e.size);
    for (int r = 0; r < e.size; ++r)
      for (int c = r; c < e.size; ++c) {
        double v = sol.y[offset[ti] + packed_index(r, c, e.size)];
        G(r, c) = G(c, r) = v;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    for (int r = 0; r < e.size; ++r)
      for (int c = r; c < e.size; ++c) {
        const double mult = (r == c) ? 1.0 : 2.0;
        const double g = G(r, c);
        for (const auto& [gamma, gc] : e.entry(r, c).terms)
          recon[gamma] += mult * gc * g;
      }
  }
  double residual = unreachable;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    residual = std::max(residual, std::abs(recon[i] - rhs[i]));
  rep.residual = residual;
  rep.min_gram_eigenvalue = min_eig;
  return rep;
}

}  // namespace

SosReport verify_sos(const Certificate& cert, const ProblemSpec& scaled) {
  if (std::abs(scaled.T - 1.0) > 1e-12)
    throw InvalidSpec("verification expects a preprocessed spec (horizon 1)");
  const int k = cert.k, n = scaled.n, m = scaled.m;
  const VariableContext ctx_occ = full_context(n, m);
  const VariableContext ctx_tx = time_state_context(n);
  const VariableContext ctx_x = state_context(n);

  std::vector<Polynomial> dynamics;
  for (const auto& f : scaled.dynamics) dynamics.push_back(f.embedded(ctx_occ));

  const auto set_terms = [&](const SemialgebraicSet& s,
                             const VariableContext& ctx,
                             std::vector<FitTerm>& terms) {
    for (const auto& g : s.inequalities) {
      const Polynomial e = g.embedded(ctx);
      terms.push_back({e, k - half_up(e.degree())});
    }
  };

  SosReport report;

  {
    Polynomial target =
        -lie_derivative(cert.v.embedded(ctx_tx), dynamics, ctx_occ);
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_occ, 1.0), k},
                               {time_window(ctx_occ), k - 1}};
    set_terms(scaled.X, ctx_occ, terms);
    if (m > 0) set_terms(scaled.U, ctx_occ, terms);
    report.identities.push_back(
        fit_combination("transport", target, terms, ctx_occ));
  }

  {
    Polynomial v0 = project_onto(cert.v.substitute_affine(0, 0.0, 0.0), ctx_x);
    Polynomial target = cert.w - v0 - Polynomial::constant(ctx_x, 1.0);
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_x, 1.0), k}};
    set_terms(scaled.X, ctx_x, terms);
    report.identities.push_back(
        fit_combination("initial", target, terms, ctx_x));
  }

  if (scaled.XT.singleton && cert.mode == TimeMode::kFixed) {
    // Point target: positivity of v at the end point is a scalar check.
    std::vector<double> z{1.0};
    z.insert(z.end(), scaled.XT.point.begin(), scaled.XT.point.end());
    const double val = cert.v.evaluate(z);
    const double tol = 1e-6 * std::max(1.0, cert.v.max_abs_coefficient());
    SosIdentityReport rep;
    rep.name = "target";
    rep.feasible = (val >= -tol);
    rep.residual = std::max(0.0, -val);
    rep.min_gram_eigenvalue = val;
    rep.solve_status = SolveStatus::kOptimal;
    report.identities.push_back(rep);
  } else if (scaled.XT.singleton) {
    Polynomial vt = cert.v;
    for (int i = 1; i <= n; ++i)
      vt = vt.substitute_affine(i, 0.0, scaled.XT.point[i - 1]);
    const VariableContext ctx_t({"t"});
    Polynomial target = project_onto(vt, ctx_t);
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_t, 1.0), k},
                               {time_window(ctx_t), k - 1}};
    report.identities.push_back(
        fit_combination("target", target, terms, ctx_t));
  } else if (cert.mode == TimeMode::kFixed) {
    Polynomial vT = project_onto(cert.v.substitute_affine(0, 0.0, 1.0), ctx_x);
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_x, 1.0), k}};
    set_terms(scaled.XT, ctx_x, terms);
    report.identities.push_back(
        fit_combination("target", vT, terms, ctx_x));
  } else {
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_tx, 1.0), k},
                               {time_window(ctx_tx), k - 1}};
    set_terms(scaled.XT, ctx_tx, terms);
    report.identities.push_back(
        fit_combination("target", cert.v, terms, ctx_tx));
  }

  {
    std::vector<FitTerm> terms{{Polynomial::constant(ctx_x, 1.0), k}};
    set_terms(scaled.X, ctx_x, terms);
    report.identities.push_back(
        fit_combination("nonnegativity", cert.w, terms, ctx_x));
  }

  report.all_feasible = true;
  for (const auto& r : report.identities)
    report.all_feasible = report.all_feasible && r.feasible;
  return report;
}

}  // namespace roax
