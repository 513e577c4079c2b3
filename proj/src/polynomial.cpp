#include "roax/polynomial.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstring>

#include "roax/errors.hpp"

namespace roax {

namespace {
constexpr double kDropTol = 1e-14;

double ipow(double x, int e) {
  double r = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}
}  // namespace

VariableContext::VariableContext(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j])
        throw DimensionMismatch("duplicate variable name '" + names_[i] + "'");
}

std::optional<int> VariableContext::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

VariableContext state_context(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return VariableContext(std::move(v));
}

VariableContext input_context(int m) {
  std::vector<std::string> v;
  for (int i = 1; i <= m; ++i) v.push_back("u" + std::to_string(i));
  return VariableContext(std::move(v));
}

VariableContext time_state_context(int n) {
  std::vector<std::string> v{"t"};
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return VariableContext(std::move(v));
}

VariableContext full_context(int n, int m) {
  std::vector<std::string> v{"t"};
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  for (int i = 1; i <= m; ++i) v.push_back("u" + std::to_string(i));
  return VariableContext(std::move(v));
}

Polynomial::Polynomial(VariableContext ctx, CoeffMap coeffs)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
  for (const auto& [idx, c] : coeffs_) {
    if (static_cast<int>(idx.size()) != ctx_.size())
      throw DimensionMismatch("exponent vector length differs from context");
    (void)c;
  }
  prune();
}

Polynomial Polynomial::constant(const VariableContext& ctx, double value) {
  Polynomial p(ctx);
  p.set(MultiIndex(ctx.size(), 0), value);
  return p;
}

Polynomial Polynomial::variable(const VariableContext& ctx, int var) {
  if (var < 0 || var >= ctx.size())
    throw DimensionMismatch("variable position out of range");
  MultiIndex idx(ctx.size(), 0);
  idx[var] = 1;
  Polynomial p(ctx);
  p.set(idx, 1.0);
  return p;
}

Polynomial Polynomial::monomial(const VariableContext& ctx,
                                MultiIndex exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != ctx.size())
    throw DimensionMismatch("exponent vector length differs from context");
  Polynomial p(ctx);
  p.set(exponents, coeff);
  return p;
}

int Polynomial::degree() const {
  if (coeffs_.empty()) return 0;
  // Map is graded-lex ordered, so the last key has the highest grade.
  return total_degree(coeffs_.rbegin()->first);
}

double Polynomial::coefficient(const MultiIndex& idx) const {
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [idx, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::evaluate(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != ctx_.size())
    throw DimensionMismatch("evaluation point length differs from context");
  double acc = 0.0;
  for (const auto& [idx, c] : coeffs_) {
    double term = c;
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (idx[i] != 0) term *= ipow(point[i], idx[i]);
    acc += term;
  }
  return acc;
}

void Polynomial::set(const MultiIndex& idx, double v) {
  if (std::abs(v) < kDropTol) {
    coeffs_.erase(idx);
  } else {
    coeffs_[idx] = v;
  }
}

void Polynomial::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) < kDropTol)
      it = coeffs_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (!(ctx_ == o.ctx_)) throw ContextMismatch("adding across contexts");
  Polynomial r = *this;
  for (const auto& [idx, c] : o.coeffs_) {
    auto it = r.coeffs_.find(idx);
    const double v = (it == r.coeffs_.end() ? 0.0 : it->second) + c;
    r.set(idx, v);
  }
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + (-o);
}

Polynomial Polynomial::operator-() const { return scaled(-1.0); }

Polynomial Polynomial::scaled(double s) const {
  Polynomial r(ctx_);
  for (const auto& [idx, c] : coeffs_) r.set(idx, c * s);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (!(ctx_ == o.ctx_)) throw ContextMismatch("multiplying across contexts");
  Polynomial r(ctx_);
  for (const auto& [ia, ca] : coeffs_) {
    for (const auto& [ib, cb] : o.coeffs_) {
      const MultiIndex idx = add_indices(ia, ib);
      auto it = r.coeffs_.find(idx);
      const double v = (it == r.coeffs_.end() ? 0.0 : it->second) + ca * cb;
      if (std::abs(v) < kDropTol) {
        if (it != r.coeffs_.end()) r.coeffs_.erase(it);
      } else {
        r.coeffs_[idx] = v;
      }
    }
  }
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw DimensionMismatch("negative polynomial power");
  Polynomial r = constant(ctx_, 1.0);
  for (int i = 0; i < e; ++i) r = r * *this;
  return r;
}

Polynomial Polynomial::partial_derivative(int var) const {
  if (var < 0 || var >= ctx_.size())
    throw DimensionMismatch("derivative variable out of range");
  Polynomial r(ctx_);
  for (const auto& [idx, c] : coeffs_) {
    if (idx[var] == 0) continue;
    MultiIndex d = idx;
    d[var] -= 1;
    r.set(d, c * idx[var]);
  }
  return r;
}

Polynomial Polynomial::substitute_affine(int var, double a, double b) const {
  if (var < 0 || var >= ctx_.size())
    throw DimensionMismatch("substitution variable out of range");
  Polynomial r(ctx_);
  for (const auto& [idx, c] : coeffs_) {
    const int e = idx[var];
    MultiIndex base = idx;
    base[var] = 0;
    // (a*z + b)^e expanded binomially.
    for (int j = 0; j <= e; ++j) {
      MultiIndex tgt = base;
      tgt[var] = j;
      const double coef =
          c * static_cast<double>(binomial(e, j)) * ipow(a, j) * ipow(b, e - j);
      auto it = r.coeffs_.find(tgt);
      const double v = (it == r.coeffs_.end() ? 0.0 : it->second) + coef;
      if (std::abs(v) < kDropTol) {
        if (it != r.coeffs_.end()) r.coeffs_.erase(it);
      } else {
        r.coeffs_[tgt] = v;
      }
    }
  }
  return r;
}

Polynomial Polynomial::embedded(const VariableContext& target) const {
  std::vector<int> map(ctx_.size());
  for (int i = 0; i < ctx_.size(); ++i) {
    auto pos = target.index_of(ctx_.name(i));
    if (!pos) throw UnknownVariable(ctx_.name(i));
    map[i] = *pos;
  }
  Polynomial r(target);
  for (const auto& [idx, c] : coeffs_) {
    MultiIndex tgt(target.size(), 0);
    for (int i = 0; i < ctx_.size(); ++i) tgt[map[i]] = idx[i];
    r.set(tgt, c);
  }
  return r;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string Polynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [idx, c] : coeffs_) {
    const bool neg = c < 0;
    const double mag = std::abs(c);
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    const bool is_const = total_degree(idx) == 0;
    std::string vars;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += ctx_.name(static_cast<int>(i));
      if (idx[i] > 1) vars += "^" + std::to_string(idx[i]);
    }
    if (is_const) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += vars;
    } else {
      out += format_double(mag) + "*" + vars;
    }
  }
  return out;
}

namespace {

/// Recursive-descent parser over a flat character range.
class Parser {
 public:
  Parser(const std::string& text, const VariableContext& ctx)
      : text_(text), ctx_(ctx) {}

  Polynomial run() {
    skip_ws();
    if (eof()) throw SyntaxError("empty expression", pos_);
    Polynomial p = parse_expr(0);
    skip_ws();
    if (!eof()) throw SyntaxError("unexpected trailing input", pos_);
    return p;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  Polynomial parse_expr(int depth) {
    Polynomial acc(ctx_);
    bool expect_term = true;
    double sign = 1.0;
    skip_ws();
    if (peek() == '+' || peek() == '-') {
      sign = (peek() == '-') ? -1.0 : 1.0;
      ++pos_;
    }
    while (true) {
      Polynomial term = parse_term(depth);
      acc = acc + term.scaled(sign);
      (void)expect_term;
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        sign = (peek() == '-') ? -1.0 : 1.0;
        ++pos_;
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial parse_term(int depth) {
    Polynomial prod = parse_factor(depth);
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        prod = prod * parse_factor(depth);
      } else {
        break;
      }
    }
    return prod;
  }

  Polynomial parse_factor(int depth) {
    skip_ws();
    if (eof()) throw SyntaxError("expected a factor", pos_);
    const char c = peek();
    if (c == '(') {
      if (depth >= 1)
        throw SyntaxError("parentheses nest at most one level", pos_);
      ++pos_;
      skip_ws();
      if (peek() == ')') throw SyntaxError("empty parentheses", pos_);
      Polynomial inner = parse_expr(depth + 1);
      skip_ws();
      if (peek() != ')') throw SyntaxError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_varpow();
    throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
  }

  Polynomial parse_number() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
      } else if ((c == 'e' || c == 'E') && pos_ > start) {
        ++pos_;
        if (!eof() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      } else {
        break;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw SyntaxError("malformed number", start);
    return Polynomial::constant(ctx_, value);
  }

  Polynomial parse_varpow() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
        ++pos_;
      else
        break;
    }
    const std::string name = text_.substr(start, pos_ - start);
    auto var = ctx_.index_of(name);
    if (!var) throw UnknownVariable(name);
    int exponent = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t estart = pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == estart) throw SyntaxError("expected integer exponent", pos_);
      auto res = std::from_chars(text_.data() + estart, text_.data() + pos_,
                                 exponent);
      if (res.ec != std::errc())
        throw SyntaxError("malformed exponent", estart);
    }
    return Polynomial::variable(ctx_, *var).pow(exponent);
  }

  const std::string& text_;
  const VariableContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text,
                            const VariableContext& ctx) {
  return Parser(text, ctx).run();
}

Polynomial lie_derivative(const Polynomial& v,
                          const std::vector<Polynomial>& f,
                          const VariableContext& full) {
  const VariableContext& vc = v.context();
  auto tpos = vc.index_of("t");
  if (!tpos) throw ContextMismatch("test function needs a time variable t");
  for (int i = 0; i < vc.size(); ++i)
    if (vc.name(i).rfind("u", 0) == 0 && vc.name(i) != "t")
      throw ContextMismatch("test function must not depend on inputs");
  Polynomial out = v.partial_derivative(*tpos).embedded(full);
  int state = 0;
  for (int i = 0; i < vc.size(); ++i) {
    const std::string& nm = vc.name(i);
    if (nm == "t") continue;
    if (state >= static_cast<int>(f.size()))
      throw DimensionMismatch("dynamics shorter than state dimension");
    if (!(f[state].context() == full))
      throw ContextMismatch("dynamics entry on unexpected context");
    out = out + v.partial_derivative(i).embedded(full) * f[state];
    ++state;
  }
  if (state != static_cast<int>(f.size()))
    throw DimensionMismatch("dynamics longer than state dimension");
  return out;
}

}  // namespace roax
