#include "roax/conic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "roax/errors.hpp"

namespace roax {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIter: return "max_iterations";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

void ConicProblem::check() const {
  if (num_vars <= 0)
    throw DimensionMismatch("conic problem has no decision variables");
  if (static_cast<int>(objective.size()) != num_vars)
    throw DimensionMismatch("objective length " +
                            std::to_string(objective.size()) +
                            " does not match variable count " +
                            std::to_string(num_vars));
  std::vector<char> touched(static_cast<size_t>(num_vars), 0);
  for (size_t r = 0; r < equalities.size(); ++r) {
    const EqualityRow& row = equalities[r];
    bool nonzero = false;
    for (const auto& [coord, coeff] : row.terms) {
      if (coord < 0 || coord >= num_vars)
        throw DimensionMismatch("equality row " + std::to_string(r) +
                                " references coordinate " +
                                std::to_string(coord));
      if (coeff != 0.0) {
        nonzero = true;
        touched[static_cast<size_t>(coord)] = 1;
      }
    }
    if (!nonzero)
      throw DimensionMismatch("equality row " + std::to_string(r) +
                              " has an all-zero coefficient vector");
  }
  for (size_t b = 0; b < blocks.size(); ++b) {
    const ConicBlock& blk = blocks[b];
    if (blk.size <= 0)
      throw DimensionMismatch("block " + std::to_string(b) +
                              " has nonpositive size");
    bool any_var = false;
    for (const BlockEntry& e : blk.entries) {
      if (e.row < 0 || e.col < 0 || e.row >= blk.size || e.col >= blk.size ||
          e.row > e.col)
        throw DimensionMismatch("block " + std::to_string(b) +
                                " entry outside the upper triangle");
      if (blk.diagonal && e.row != e.col)
        throw DimensionMismatch("block " + std::to_string(b) +
                                " is diagonal but has an off-diagonal entry");
      if (e.coord < -1 || e.coord >= num_vars)
        throw DimensionMismatch("block " + std::to_string(b) +
                                " references coordinate " +
                                std::to_string(e.coord));
      if (e.coord >= 0 && e.coeff != 0.0) {
        any_var = true;
        touched[static_cast<size_t>(e.coord)] = 1;
      }
    }
    if (!any_var)
      throw DimensionMismatch("block " + std::to_string(b) +
                              " does not involve any decision variable");
  }
  for (int j = 0; j < num_vars; ++j) {
    if (!touched[static_cast<size_t>(j)])
      throw DimensionMismatch("coordinate " + std::to_string(j) +
                              " appears in no equality row and no block");
  }
}

}  // namespace roax
