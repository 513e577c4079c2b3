#include "roax/moments.hpp"

#include <cmath>

#include "roax/errors.hpp"

namespace roax {

MomentVector MomentVector::zero(const VariableContext& ctx, int degree) {
  MomentVector y;
  y.ctx = ctx;
  y.degree = degree;
  y.values.assign(static_cast<std::size_t>(basis_size(ctx.size(), degree)),
                  0.0);
  return y;
}

double MomentVector::operator[](const MultiIndex& idx) const {
  if (total_degree(idx) > degree)
    throw DegreeTooLow("moment index beyond truncation degree");
  return values[static_cast<std::size_t>(grlex_rank(idx))];
}

double& MomentVector::at(const MultiIndex& idx) {
  if (total_degree(idx) > degree)
    throw DegreeTooLow("moment index beyond truncation degree");
  return values[static_cast<std::size_t>(grlex_rank(idx))];
}

MomentVector lebesgue_moments(const VariableContext& ctx, int degree,
                              const std::vector<Interval>& box) {
  if (static_cast<int>(box.size()) != ctx.size())
    throw DimensionMismatch("box dimension differs from context");
  MomentVector y = MomentVector::zero(ctx, degree);
  const auto basis = monomial_basis(ctx.size(), degree);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 1.0;
    for (int d = 0; d < ctx.size(); ++d) {
      const int e = basis[i][d];
      v *= (std::pow(box[d].hi, e + 1) - std::pow(box[d].lo, e + 1)) /
           (e + 1);
    }
    y.values[i] = v;
  }
  return y;
}

MomentVector dirac_moments(const VariableContext& ctx, int degree,
                           const std::vector<double>& point) {
  if (static_cast<int>(point.size()) != ctx.size())
    throw DimensionMismatch("point dimension differs from context");
  MomentVector y = MomentVector::zero(ctx, degree);
  const auto basis = monomial_basis(ctx.size(), degree);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 1.0;
    for (int d = 0; d < ctx.size(); ++d)
      for (int e = 0; e < basis[i][d]; ++e) v *= point[d];
    y.values[i] = v;
  }
  return y;
}

double riesz(const MomentVector& y, const Polynomial& p) {
  if (!(p.context() == y.ctx))
    throw ContextMismatch("riesz functional across contexts");
  if (p.degree() > y.degree)
    throw DegreeTooLow("polynomial degree exceeds moment truncation");
  double acc = 0.0;
  for (const auto& [idx, c] : p.coefficients())
    acc += c * y.values[static_cast<std::size_t>(grlex_rank(idx))];
  return acc;
}

const LinearForm& SymmetricMatrixExpr::entry(int r, int c) const {
  if (r > c) std::swap(r, c);
  return entries[r][c - r];
}

Eigen::MatrixXd SymmetricMatrixExpr::evaluate(const MomentVector& y) const {
  if (needed_degree > y.degree)
    throw DegreeTooLow("matrix references moments beyond truncation");
  Eigen::MatrixXd M(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = r; c < size; ++c) {
      const LinearForm& f = entries[r][c - r];
      double v = f.constant;
      for (const auto& [coord, coeff] : f.terms)
        v += coeff * y.values[static_cast<std::size_t>(coord)];
      M(r, c) = v;
      M(c, r) = v;
    }
  }
  return M;
}

SymmetricMatrixExpr moment_matrix(const VariableContext& ctx, int order) {
  if (order < 0) throw DimensionMismatch("moment matrix order negative");
  const auto basis = monomial_basis(ctx.size(), order);
  SymmetricMatrixExpr M;
  M.size = static_cast<int>(basis.size());
  M.needed_degree = 2 * order;
  M.entries.resize(M.size);
  for (int r = 0; r < M.size; ++r) {
    M.entries[r].resize(M.size - r);
    for (int c = r; c < M.size; ++c) {
      LinearForm f;
      f.terms.emplace_back(grlex_rank(add_indices(basis[r], basis[c])), 1.0);
      M.entries[r][c - r] = std::move(f);
    }
  }
  return M;
}

SymmetricMatrixExpr localizing_matrix(const Polynomial& g, int order) {
  if (order < 0) throw DimensionMismatch("localizing matrix order negative");
  if (g.is_zero()) throw DimensionMismatch("localizing polynomial is zero");
  const auto basis = monomial_basis(g.context().size(), order);
  SymmetricMatrixExpr M;
  M.size = static_cast<int>(basis.size());
  M.needed_degree = 2 * order + g.degree();
  M.entries.resize(M.size);
  for (int r = 0; r < M.size; ++r) {
    M.entries[r].resize(M.size - r);
    for (int c = r; c < M.size; ++c) {
      LinearForm f;
      const MultiIndex rc = add_indices(basis[r], basis[c]);
      for (const auto& [gamma, coeff] : g.coefficients())
        f.terms.emplace_back(grlex_rank(add_indices(rc, gamma)), coeff);
      M.entries[r][c - r] = std::move(f);
    }
  }
  return M;
}

}  // namespace roax
