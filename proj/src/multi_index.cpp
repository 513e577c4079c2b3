#include "roax/multi_index.hpp"

#include <limits>
#include <stdexcept>

#include "roax/errors.hpp"

namespace roax {

int total_degree(const MultiIndex& a) {
  int g = 0;
  for (int e : a) g += e;
  return g;
}

bool grlex_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("grlex comparison of indices of different length");
  const int ga = total_degree(a), gb = total_degree(b);
  if (ga != gb) return ga < gb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::int64_t num = n - k + i;
    if (r > std::numeric_limits<std::int64_t>::max() / num)
      throw Error("binomial overflow");
    r = r * num / i;
  }
  return r;
}

std::int64_t basis_size(int nvars, int degree) {
  return binomial(nvars + degree, degree);
}

namespace {

void generate_rec(int nvars, int remaining, MultiIndex& cur,
                  std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == nvars - 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur.push_back(e);
    generate_rec(nvars, remaining - e, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> monomial_basis(int nvars, int degree) {
  if (nvars < 0 || degree < 0)
    throw DimensionMismatch("monomial_basis needs nvars >= 0, degree >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(basis_size(nvars, degree)));
  if (nvars == 0) {
    out.push_back({});
    return out;
  }
  MultiIndex cur;
  for (int g = 0; g <= degree; ++g) generate_rec(nvars, g, cur, out);
  return out;
}

std::int64_t grlex_rank(const MultiIndex& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0;
  const int g = total_degree(a);
  // Monomials of strictly lower grade.
  std::int64_t rank = (g == 0) ? 0 : binomial(n + g - 1, g - 1);
  // Within the grade, count indices that come first: those whose leading
  // entries agree with `a` and whose next entry is larger.
  int rem = g;
  for (int i = 0; i + 1 < n; ++i) {
    for (int e = rem; e > a[i]; --e) {
      // suffix of n-i-1 variables summing to rem-e
      rank += binomial((n - i - 2) + (rem - e), rem - e);
    }
    rem -= a[i];
  }
  return rank;
}

MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("adding indices of different length");
  MultiIndex c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

}  // namespace roax
