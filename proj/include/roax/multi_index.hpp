#pragma once

#include <cstdint>
#include <vector>

namespace roax {

/// Exponent vector of a monomial. Comparison is graded lexicographic: lower
/// total degree first, ties broken so that within a grade the first variable
/// carries the highest power first (1, x1, x2, x1^2, x1*x2, x2^2, ...).
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& a);

/// Graded-lex strict order. Requires equal lengths.
bool grlex_less(const MultiIndex& a, const MultiIndex& b);

struct GrlexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return grlex_less(a, b);
  }
};

/// Binomial coefficient as a checked 64-bit integer.
std::int64_t binomial(int n, int k);

/// Number of monomials in `nvars` variables of total degree <= `degree`.
std::int64_t basis_size(int nvars, int degree);

/// All exponent vectors with total degree <= `degree`, in graded-lex order.
/// The first entry is always the zero index.
std::vector<MultiIndex> monomial_basis(int nvars, int degree);

/// Position of `a` in the graded-lex enumeration of all monomials of its
/// dimension. Computed with the combinatorial number system, so it agrees
/// with monomial_basis without materialising the list.
std::int64_t grlex_rank(const MultiIndex& a);

MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b);

}  // namespace roax
