#pragma once

#include <Eigen/Dense>
#include <vector>

#include "roax/polynomial.hpp"
#include "roax/semialg.hpp"

namespace roax {

/// Truncated moment sequence: one value per monomial of total degree
/// <= `degree`, in graded-lex order over the context.
struct MomentVector {
  VariableContext ctx;
  int degree = 0;
  std::vector<double> values;

  static MomentVector zero(const VariableContext& ctx, int degree);
  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  double operator[](const MultiIndex& idx) const;
  double& at(const MultiIndex& idx);
};

/// Moments of the Lebesgue measure on an axis-aligned box.
MomentVector lebesgue_moments(const VariableContext& ctx, int degree,
                              const std::vector<Interval>& box);

/// Moments of a unit point mass at `point`.
MomentVector dirac_moments(const VariableContext& ctx, int degree,
                           const std::vector<double>& point);

/// sum_a p_a y_a. Throws DegreeTooLow when deg p exceeds the truncation.
double riesz(const MomentVector& y, const Polynomial& p);

/// Entry of a symbolic symmetric matrix: constant + sum coeff * y[coord],
/// with coord a graded-lex rank into a moment vector.
struct LinearForm {
  double constant = 0.0;
  std::vector<std::pair<std::int64_t, double>> terms;
};

/// Symmetric matrix whose entries are affine in the coordinates of one
/// moment vector. Upper triangle is stored; (r,c) with r <= c.
struct SymmetricMatrixExpr {
  int size = 0;
  /// Largest moment degree any entry references.
  int needed_degree = 0;
  std::vector<std::vector<LinearForm>> entries;  // entries[r][c-r]

  const LinearForm& entry(int r, int c) const;
  Eigen::MatrixXd evaluate(const MomentVector& y) const;
};

/// Moment matrix M_k(y): rows/columns over the degree-k monomial basis,
/// entry (a, b) = y_{a+b}.
SymmetricMatrixExpr moment_matrix(const VariableContext& ctx, int order);

/// Localizing matrix M_k(g y): entry (a, b) = sum_c g_c y_{a+b+c}.
SymmetricMatrixExpr localizing_matrix(const Polynomial& g, int order);

}  // namespace roax
