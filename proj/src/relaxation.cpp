#include "roax/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "roax/errors.hpp"

namespace roax {

std::int64_t RelaxationLayout::occupation_coord(const MultiIndex& idx) const {
  if (total_degree(idx) > y_degree) return -1;
  return grlex_rank(idx);
}

std::string to_string(MeasureTag m) {
  switch (m) {
    case MeasureTag::kOccupation: return "occupation";
    case MeasureTag::kInitial: return "initial";
    case MeasureTag::kFinal: return "final";
    case MeasureTag::kSlack: return "slack";
  }
  return "?";
}

namespace {

int half_up(int deg) { return (deg + 1) / 2; }

int set_order_demand(const SemialgebraicSet& s) {
  int d = 0;
  for (const auto& g : s.inequalities) d = std::max(d, half_up(g.degree()));
  return d;
}

int dynamics_degree(const ProblemSpec& spec) {
  int d = 0;
  for (const auto& f : spec.dynamics) d = std::max(d, f.degree());
  return d;
}

/// Smallest k for which every localizing matrix has nonnegative order and
/// the transport operator's image of a degree-1 test is representable.
int minimal_order(const ProblemSpec& spec) {
  int k = 1;
  k = std::max(k, set_order_demand(spec.X));
  if (spec.m > 0) k = std::max(k, set_order_demand(spec.U));
  if (!spec.XT.singleton) k = std::max(k, set_order_demand(spec.XT));
  k = std::max(k, half_up(dynamics_degree(spec) + 1));
  return k;
}

double point_power(const std::vector<double>& point, const MultiIndex& beta) {
  double v = 1.0;
  for (std::size_t i = 0; i < beta.size(); ++i)
    for (int e = 0; e < beta[i]; ++e) v *= point[i];
  return v;
}

void push_row(ConicProblem& problem, RelaxationLayout& layout,
              const std::map<std::int64_t, double>& row, double rhs) {
  double scale = 0.0;
  for (const auto& [coord, coeff] : row)
    scale = std::max(scale, std::abs(coeff));
  if (scale == 0.0)
    throw DimensionMismatch("assembled an equality row with no coefficients");
  EqualityRow out;
  out.rhs = rhs / scale;
  for (const auto& [coord, coeff] : row) {
    double c = coeff / scale;
    if (std::abs(c) < 1e-15) continue;
    out.terms.emplace_back(static_cast<int>(coord), c);
  }
  problem.equalities.push_back(std::move(out));
  layout.row_scale.push_back(scale);
}

void add_expr_block(ConicProblem& problem, RelaxationLayout& layout,
                    const SymmetricMatrixExpr& expr, std::int64_t offset,
                    BlockDescriptor desc) {
  ConicBlock block;
  block.size = expr.size;
  bool diagonal = true;
  for (int r = 0; r < expr.size; ++r)
    for (int c = r; c < expr.size; ++c) {
      const LinearForm& entry = expr.entry(r, c);
      for (const auto& [coord, coeff] : entry.terms) {
        if (coeff == 0.0) continue;
        block.entries.push_back(
            {r, c, static_cast<int>(offset + coord), coeff});
        if (r != c) diagonal = false;
      }
    }
  block.diagonal = diagonal;
  problem.blocks.push_back(std::move(block));
  layout.blocks.push_back(desc);
}

Polynomial time_window(const VariableContext& ctx) {
  Polynomial t = Polynomial::variable(ctx, 0);
  return t - t * t;  // t (1 - t) >= 0 on the scaled horizon
}

Assembled assemble_impl(const ProblemSpec& spec, int k, TimeMode mode) {
  if (spec.n < 1) throw InvalidSpec("state dimension must be positive");
  if (std::abs(spec.T - 1.0) > 1e-12)
    throw InvalidSpec("relaxation expects a preprocessed spec (horizon 1)");
  const int kmin = minimal_order(spec);
  if (k < kmin)
    throw OrderTooLow("relaxation order " + std::to_string(k) +
                      " too low for this problem; minimal admissible order is " +
                      std::to_string(kmin));

  const int n = spec.n, m = spec.m;
  RelaxationLayout layout;
  layout.k = k;
  layout.mode = mode;
  layout.singleton_target = spec.XT.singleton;
  layout.target_point = spec.XT.point;
  layout.n = n;
  layout.m = m;
  layout.ctx_x = state_context(n);
  layout.ctx_tx = time_state_context(n);
  layout.ctx_occupation = full_context(n, m);
  // The degree-3 drift of a degree-2k test reaches moments beyond 2k; the
  // occupation measure's moment matrix is sized to constrain all of them.
  const int order_y = std::max(k, half_up(2 * k - 1 + dynamics_degree(spec)));
  layout.y_degree = 2 * order_y;

  std::vector<Polynomial> dynamics;
  dynamics.reserve(spec.dynamics.size());
  for (const auto& f : spec.dynamics)
    dynamics.push_back(f.embedded(layout.ctx_occupation));

  layout.tests_liouville = monomial_basis(1 + n, 2 * k);

  layout.off_y = 0;
  layout.len_y = basis_size(1 + n + m, layout.y_degree);
  layout.off_y0 = layout.off_y + layout.len_y;
  layout.len_y0 = basis_size(n, 2 * k);
  layout.off_yT = layout.off_y0 + layout.len_y0;
  if (spec.XT.singleton) {
    if (mode == TimeMode::kFixed) {
      layout.len_yT = 1;  // unknown mass of a point measure at the target
      layout.ctx_target = VariableContext();
    } else {
      layout.len_yT = 2 * k + 1;  // time moments of the hitting distribution
      layout.ctx_target = VariableContext({"t"});
    }
  } else if (mode == TimeMode::kFixed) {
    layout.len_yT = basis_size(n, 2 * k);
    layout.ctx_target = layout.ctx_x;
  } else {
    layout.len_yT = basis_size(1 + n, 2 * k);
    layout.ctx_target = layout.ctx_tx;
  }
  layout.off_s0 = layout.off_yT + layout.len_yT;
  layout.len_s0 = layout.len_y0;

  auto box = bounding_box(spec.X);
  if (!box) throw InvalidSpec("state set has no finite bounding box");
  layout.lebesgue = lebesgue_moments(layout.ctx_x, 2 * k, *box);

  ConicProblem problem;
  problem.num_vars = static_cast<int>(layout.off_s0 + layout.len_s0);
  problem.objective.assign(problem.num_vars, 0.0);
  problem.objective[layout.off_y0] = 1.0;  // initial-measure mass

  // Transport rows: for every test monomial t^a x^b of degree <= 2k,
  //   <final, (t^a at end) x^b> - [a = 0] <initial, x^b> - <occ, L t^a x^b> = 0.
  for (const MultiIndex& ab : layout.tests_liouville) {
    const int alpha = ab[0];
    MultiIndex beta(ab.begin() + 1, ab.end());
    std::map<std::int64_t, double> row;

    if (spec.XT.singleton) {
      double pb = point_power(spec.XT.point, beta);
      if (pb != 0.0) {
        std::int64_t c = (mode == TimeMode::kFixed) ? layout.off_yT
                                                    : layout.off_yT + alpha;
        row[c] += pb;
      }
    } else if (mode == TimeMode::kFixed) {
      row[layout.off_yT + grlex_rank(beta)] += 1.0;  // t = 1 at the end
    } else {
      row[layout.off_yT + grlex_rank(ab)] += 1.0;
    }

    if (alpha == 0) row[layout.off_y0 + grlex_rank(beta)] -= 1.0;

    Polynomial test = Polynomial::monomial(layout.ctx_tx, ab);
    Polynomial image = lie_derivative(test, dynamics, layout.ctx_occupation);
    for (const auto& [idx, coeff] : image.coefficients())
      row[layout.off_y + grlex_rank(idx)] -= coeff;

    push_row(problem, layout, row, 0.0);
  }

  // Domination rows: initial + slack moments = Lebesgue moments of the box.
  layout.tests_domination = monomial_basis(n, 2 * k);
  for (const MultiIndex& beta : layout.tests_domination) {
    std::map<std::int64_t, double> row;
    std::int64_t r = grlex_rank(beta);
    row[layout.off_y0 + r] += 1.0;
    row[layout.off_s0 + r] += 1.0;
    push_row(problem, layout, row, layout.lebesgue.values[r]);
  }

  // Moment and localizing blocks, measure by measure.
  const auto add_set_blocks = [&](const SemialgebraicSet& s,
                                  const VariableContext& ctx,
                                  std::int64_t offset, int base,
                                  MeasureTag tag, LocalizerKind kind) {
    for (std::size_t i = 0; i < s.inequalities.size(); ++i) {
      const Polynomial g = s.inequalities[i].embedded(ctx);
      const int order = base - half_up(g.degree());
      add_expr_block(problem, layout, localizing_matrix(g, order), offset,
                     {tag, kind, static_cast<int>(i), order});
    }
  };

  add_expr_block(problem, layout,
                 moment_matrix(layout.ctx_occupation, order_y), layout.off_y,
                 {MeasureTag::kOccupation, LocalizerKind::kNone, -1, order_y});
  add_expr_block(
      problem, layout,
      localizing_matrix(time_window(layout.ctx_occupation), order_y - 1),
      layout.off_y,
      {MeasureTag::kOccupation, LocalizerKind::kTime, -1, order_y - 1});
  add_set_blocks(spec.X, layout.ctx_occupation, layout.off_y, order_y,
                 MeasureTag::kOccupation, LocalizerKind::kStateSet);
  if (m > 0)
    add_set_blocks(spec.U, layout.ctx_occupation, layout.off_y, order_y,
                   MeasureTag::kOccupation, LocalizerKind::kInputSet);

  add_expr_block(problem, layout, moment_matrix(layout.ctx_x, k),
                 layout.off_y0,
                 {MeasureTag::kInitial, LocalizerKind::kNone, -1, k});
  add_set_blocks(spec.X, layout.ctx_x, layout.off_y0, MeasureTag::kInitial,
                 LocalizerKind::kStateSet);

  if (spec.XT.singleton && mode == TimeMode::kFixed) {
    ConicBlock mass;
    mass.size = 1;
    mass.diagonal = true;
    mass.entries.push_back({0, 0, static_cast<int>(layout.off_yT), 1.0});
    problem.blocks.push_back(std::move(mass));
    layout.blocks.push_back({MeasureTag::kFinal, LocalizerKind::kNone, -1, 0});
  } else if (spec.XT.singleton) {
    add_expr_block(problem, layout, moment_matrix(layout.ctx_target, k),
                   layout.off_yT,
                   {MeasureTag::kFinal, LocalizerKind::kNone, -1, k});
    add_expr_block(problem, layout,
                   localizing_matrix(time_window(layout.ctx_target), k - 1),
                   layout.off_yT,
                   {MeasureTag::kFinal, LocalizerKind::kTime, -1, k - 1});
  } else {
    add_expr_block(problem, layout, moment_matrix(layout.ctx_target, k),
                   layout.off_yT,
                   {MeasureTag::kFinal, LocalizerKind::kNone, -1, k});
    if (mode == TimeMode::kFree)
      add_expr_block(problem, layout,
                     localizing_matrix(time_window(layout.ctx_target), k - 1),
                     layout.off_yT,
                     {MeasureTag::kFinal, LocalizerKind::kTime, -1, k - 1});
    add_set_blocks(spec.XT, layout.ctx_target, layout.off_yT,
                   MeasureTag::kFinal, LocalizerKind::kTargetSet);
  }

  add_expr_block(problem, layout, moment_matrix(layout.ctx_x, k),
                 layout.off_s0,
                 {MeasureTag::kSlack, LocalizerKind::kNone, -1, k});
  add_set_blocks(spec.X, layout.ctx_x, layout.off_s0, MeasureTag::kSlack,
                 LocalizerKind::kStateSet);

  problem.check();
  return {std::move(problem), std::move(layout)};
}

}  // namespace

Assembled assemble(const ProblemSpec& scaled, int k) {
  return assemble_impl(scaled, k, TimeMode::kFixed);
}

Assembled assemble_free_time(const ProblemSpec& scaled, int k) {
  return assemble_impl(scaled, k, TimeMode::kFree);
}

Certificate recover_certificate(const RelaxationLayout& layout,
                                const ConicSolution& solution) {
  if (solution.status != SolveStatus::kOptimal)
    throw NotOptimal("certificate recovery needs an optimal solve, got " +
                     to_string(solution.status) +
                     (solution.message.empty() ? "" : ": " + solution.message));
  if (static_cast<std::int64_t>(solution.x.size()) != layout.num_rows())
    throw DimensionMismatch("multiplier vector does not match the layout");

  Polynomial::CoeffMap vc, wc;
  const std::size_t liou = layout.tests_liouville.size();
  for (std::size_t i = 0; i < liou; ++i) {
    double c = solution.x[i] / layout.row_scale[i];
    if (c != 0.0) vc[layout.tests_liouville[i]] = c;
  }
  for (std::size_t j = 0; j < layout.tests_domination.size(); ++j) {
    double c = solution.x[liou + j] / layout.row_scale[liou + j];
    if (c != 0.0) wc[layout.tests_domination[j]] = c;
  }
  Certificate cert;
  cert.v = Polynomial(layout.ctx_tx, std::move(vc));
  cert.w = Polynomial(layout.ctx_x, std::move(wc));
  cert.k = layout.k;
  cert.mode = layout.mode;
  return cert;
}

}  // namespace roax
