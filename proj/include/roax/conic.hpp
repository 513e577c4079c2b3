#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace roax {

/// One linear equality sum_j terms[j].second * y[terms[j].first] = rhs.
struct EqualityRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

/// One coefficient of a symmetric affine block: position (row, col) with
/// row <= col, writing both mirror positions. coord == -1 addresses the
/// constant offset, otherwise the decision coordinate y[coord].
struct BlockEntry {
  int row = 0;
  int col = 0;
  int coord = -1;
  double coeff = 0.0;
};

/// Affine positive-semidefinite constraint  E + sum_j y_j D_j  >= 0.
/// `diagonal` marks blocks whose entries all sit on the diagonal; they are
/// exported in the compact diagonal form.
struct ConicBlock {
  int size = 0;
  bool diagonal = false;
  std::vector<BlockEntry> entries;
};

/// Linear conic problem over a free decision vector y:
///   maximize objective . y
///   s.t.     every equality row holds, every block is PSD.
struct ConicProblem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<EqualityRow> equalities;
  std::vector<ConicBlock> blocks;

  /// Structural checks: index ranges, no all-zero equality rows, no empty
  /// blocks, every coordinate touched by some block or equality.
  /// Throws DimensionMismatch on violation.
  void check() const;
};

enum class SolveStatus { kOptimal, kMaxIter, kNumericalFailure, kInfeasible };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 500;
  /// Fraction of the step to the cone boundary taken each iteration.
  double step_fraction = 0.99;
  /// In-process size limits; beyond them solve() throws LimitExceeded and
  /// the problem should be exported instead.
  int max_block_size = 400;
  std::int64_t max_vars = 20000;
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::vector<double> y;                // decision vector
  std::vector<double> x;                // equality multipliers
  std::vector<Eigen::MatrixXd> Z;       // dual matrix per block
  double primal_objective = 0.0;        // objective . y (maximized)
  double dual_objective = 0.0;          // b . x + sum_i <E_i, Z_i>
  double gap = 0.0;                     // relative duality gap
  double feas_primal = 0.0;
  double feas_dual = 0.0;
  int iterations = 0;
  std::string message;
};

/// Reference primal-dual interior-point solve: Nesterov-Todd scaling,
/// Mehrotra predictor-corrector, homogeneous self-dual embedding, dense
/// Schur complement. Deterministic: identical inputs give identical output.
ConicSolution solve(const ConicProblem& problem,
                    const SolverOptions& options = {});

/// Sparse SDPA (.dat-s) export. Equality rows are encoded as one diagonal
/// block holding the split (Ay - b >= 0, b - Ay >= 0), announced in a
/// header comment so import_sdpa can undo the encoding; the objective row
/// is negated because the format minimizes. Deterministic output;
/// re-importing reproduces the problem bit-exactly.
void export_sdpa(const ConicProblem& problem, const std::string& path);
std::string sdpa_text(const ConicProblem& problem);

/// Reads a sparse SDPA file (either our own export or a foreign one).
/// Throws ParseError with a line number on malformed input.
ConicProblem import_sdpa(const std::string& path);
ConicProblem sdpa_from_text(const std::string& text);

}  // namespace roax
