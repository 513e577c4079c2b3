#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roax/multi_index.hpp"

namespace roax {

/// Ordered list of variable names. Two contexts are interchangeable iff the
/// name lists are equal.
class VariableContext {
 public:
  VariableContext() = default;
  explicit VariableContext(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> index_of(const std::string& name) const;

  friend bool operator==(const VariableContext& a, const VariableContext& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
};

/// Context helpers for the fixed naming scheme t, x1..xn, u1..um.
VariableContext state_context(int n);
VariableContext input_context(int m);
VariableContext time_state_context(int n);
VariableContext full_context(int n, int m);

/// Sparse polynomial with real coefficients over a named variable context.
/// The coefficient map is canonical: graded-lex key order, no explicit zeros.
/// Arithmetic drops coefficients below 1e-14 in magnitude.
class Polynomial {
 public:
  using CoeffMap = std::map<MultiIndex, double, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(VariableContext ctx) : ctx_(std::move(ctx)) {}
  Polynomial(VariableContext ctx, CoeffMap coeffs);

  static Polynomial constant(const VariableContext& ctx, double value);
  static Polynomial variable(const VariableContext& ctx, int var);
  static Polynomial monomial(const VariableContext& ctx, MultiIndex exponents,
                             double coeff = 1.0);

  const VariableContext& context() const { return ctx_; }
  const CoeffMap& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Total degree; 0 for the zero polynomial.
  int degree() const;
  double coefficient(const MultiIndex& idx) const;
  double max_abs_coefficient() const;

  double evaluate(const std::vector<double>& point) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial scaled(double s) const;
  Polynomial pow(int e) const;

  Polynomial partial_derivative(int var) const;
  /// Substitutes variable `var` := a * var + b.
  Polynomial substitute_affine(int var, double a, double b) const;
  /// Reinterprets the polynomial over `target`, matching variables by name.
  /// Every variable of this context must exist in the target.
  Polynomial embedded(const VariableContext& target) const;

  /// Canonical text form: terms in graded-lex order, explicit signs,
  /// shortest-round-trip coefficients. parse(print(p)) == p exactly.
  std::string to_string() const;

 private:
  void set(const MultiIndex& idx, double v);
  void prune();

  VariableContext ctx_;
  CoeffMap coeffs_;
};

/// Parses the expression grammar:
///   expr   := [sign] term (sign term)*
///   term   := factor ('*' factor)*
///   factor := number | var ['^' uint] | '(' expr ')'
/// Parenthesised groups nest at most one level and distribute at parse time.
/// Throws SyntaxError (with character position) or UnknownVariable.
Polynomial parse_polynomial(const std::string& text,
                            const VariableContext& ctx);

/// d/dt v + sum_i d/dx_i v * f_i, as a polynomial over `full`. `v` lives on
/// (t, x1..xn); each f_i lives on `full` = (t, x1..xn[, u1..um]).
Polynomial lie_derivative(const Polynomial& v,
                          const std::vector<Polynomial>& f,
                          const VariableContext& full);

/// Shortest decimal that round-trips to exactly this double.
std::string format_double(double v);

}  // namespace roax
