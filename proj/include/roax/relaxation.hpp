#pragma once

#include <string>
#include <vector>

#include "roax/conic.hpp"
#include "roax/moments.hpp"
#include "roax/polynomial.hpp"
#include "roax/semialg.hpp"

namespace roax {

/// Which measure's moment segment a PSD block reads.
enum class MeasureTag { kOccupation, kInitial, kFinal, kSlack };

std::string to_string(MeasureTag m);

/// What multiplies the moment matrix inside a PSD block.
enum class LocalizerKind {
  kNone,      // plain moment matrix
  kTime,      // t * (1 - t)
  kStateSet,  // state constraint inequality [index]
  kInputSet,  // input constraint inequality [index]
  kTargetSet  // target set inequality [index]
};

struct BlockDescriptor {
  MeasureTag measure = MeasureTag::kOccupation;
  LocalizerKind localizer = LocalizerKind::kNone;
  int index = -1;  // inequality index for the set localizers
  int order = 0;   // rows/columns span the degree-`order` monomial basis
};

/// Book-keeping for one assembled relaxation: where each measure's moment
/// segment lives in the conic decision vector, which test monomial each
/// equality row came from, the scale divisor applied per row, and what each
/// PSD block is. Everything downstream (multiplier recovery, feasibility
/// substitution, reporting) works off this.
struct RelaxationLayout {
  int k = 0;
  TimeMode mode = TimeMode::kFixed;
  bool singleton_target = false;
  std::vector<double> target_point;  // scaled coordinates when singleton
  int n = 0, m = 0;

  VariableContext ctx_occupation;  // (t, x...) or (t, x..., u...)
  VariableContext ctx_tx;          // (t, x...)
  VariableContext ctx_x;           // (x...)
  VariableContext ctx_target;      // context of the final-measure segment

  /// Degree budget of the occupation segment, max(2k, 2k-1+deg f): high
  /// enough that no degree-2k test function's image is truncated. The
  /// segment holds the full basis up to 2k followed by `y_tail`, the
  /// higher-degree monomials some transport image actually reaches.
  int y_degree = 0;
  std::vector<MultiIndex> y_tail;  // graded-lex, degrees in (2k, y_degree]

  std::int64_t off_y = 0, len_y = 0;    // occupation measure
  std::int64_t off_y0 = 0, len_y0 = 0;  // initial measure
  std::int64_t off_yT = 0, len_yT = 0;  // final measure (1 = point mass)
  std::int64_t off_s0 = 0, len_s0 = 0;  // initial-measure slack

  /// Transport rows come first, one per test monomial t^a x^b of total
  /// degree <= 2k; domination rows follow, one per state monomial x^b of
  /// degree <= 2k with Lebesgue box moments on the right-hand side.
  std::vector<MultiIndex> tests_liouville;   // over (t, x...)
  std::vector<MultiIndex> tests_domination;  // over (x...)
  std::vector<double> row_scale;             // divisor applied to each row

  std::vector<BlockDescriptor> blocks;

  /// Lebesgue moments of the scaled state box, degree 2k (the domination
  /// right-hand sides; also the integration weights for the dual objective).
  MomentVector lebesgue;

  std::int64_t num_rows() const {
    return static_cast<std::int64_t>(tests_liouville.size() +
                                     tests_domination.size());
  }
  std::int64_t num_vars() const { return off_s0 + len_s0; }

  /// Decision coordinate of an occupation moment (-1 if it is not kept).
  std::int64_t occupation_coord(const MultiIndex& idx) const;
};

struct Assembled {
  ConicProblem problem;
  RelaxationLayout layout;
};

/// Builds the order-k moment relaxation of the region-of-attraction problem
/// for a scaled, fixed-horizon spec: decision vector = truncated moments of
/// (occupation, initial, final, initial-slack) measures; equalities =
/// transport identities for all test monomials of degree <= 2k plus
/// domination of the initial measure by the Lebesgue measure; PSD blocks =
/// moment and localizing matrices of every measure on its support.
/// The objective maximizes the initial measure's mass. Rows are scaled to
/// unit infinity norm (divisors recorded in the layout).
/// Throws OrderTooLow when k is below the minimal admissible order
/// (every localizing order nonnegative and the transport images
/// representable), InvalidSpec when the state set has no bounding box.
Assembled assemble(const ProblemSpec& scaled, int k);

/// Same relaxation with the terminal time free in [0, T]: the final
/// measure gains a time dimension, a time localizer, and time-dependent
/// transport coefficients. Everything else is identical.
Assembled assemble_free_time(const ProblemSpec& scaled, int k);

/// Polynomial certificate extracted from the equality multipliers of a
/// solved relaxation: v over (t, x...) collects the transport-row
/// multipliers, w over (x...) the domination-row multipliers. At the dual
/// optimum, w >= 1 + v(0, .) on the state set, v decreases along admissible
/// trajectories, v(T, .) >= 0 on the target, and w >= 0 on the state set;
/// {x : v(0, x) >= 0} is the outer approximation of the region of
/// attraction and integrating w over the state box gives the dual value.
struct Certificate {
  Polynomial v;  // over (t, x...)
  Polynomial w;  // over (x...)
  int k = 0;
  TimeMode mode = TimeMode::kFixed;
};

/// Unscales the equality multipliers of an optimal solution into (v, w).
/// Throws NotOptimal unless the solution status is optimal.
Certificate recover_certificate(const RelaxationLayout& layout,
                                const ConicSolution& solution);

struct SosIdentityReport {
  std::string name;     // transport / initial / target / nonnegativity
  bool feasible = false;
  /// Infinity norm of (reconstructed combination - target polynomial).
  double residual = 0.0;
  /// Smallest eigenvalue over the identity's Gram matrices.
  double min_gram_eigenvalue = 0.0;
  SolveStatus solve_status = SolveStatus::kNumericalFailure;
};

struct SosReport {
  std::vector<SosIdentityReport> identities;
  bool all_feasible = false;
};

/// A-posteriori positivity check of a recovered certificate: solves, with
/// (v, w) fixed, the four weighted-sums-of-squares feasibility programs
///   -Lv   = s + s_t t(1-t) + sum s_i gX_i + sum r_j gU_j   on [0,1] x X x U
///   w - v(0,.) - 1 = s + sum s_i gX_i                      on X
///   v(T,.)         = s + sum s_i gXT_i                     on XT
///   w              = s + sum s_i gX_i                      on X
/// (all s, r sums of squares; the target identity degenerates to a scalar
/// sign check when XT is a point, and gains a time localizer in free-time
/// mode). Reports per-identity feasibility, the coefficient-mismatch
/// residual of the reconstructed combination, and the smallest Gram
/// eigenvalue. Never throws on a failed identity: failure is data.
SosReport verify_sos(const Certificate& cert, const ProblemSpec& scaled);

}  // namespace roax
