#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "roax/conic.hpp"
#include "roax/errors.hpp"
#include "roax/polynomial.hpp"

namespace roax {

namespace {

constexpr const char* kMarker = "*roax-sdpa v1";

// (matrix number 0..m, block 1.., row 1.., col 1..) -> summed value
using EntryKey = std::tuple<int, int, int, int>;

void add_entry(std::map<EntryKey, double>& out, int mat, int blk, int i,
               int j, double v) {
  if (v == 0.0) return;
  out[{mat, blk, i, j}] += v;
}

}  // namespace

std::string sdpa_text(const ConicProblem& problem) {
  problem.check();
  const int neq = static_cast<int>(problem.equalities.size());
  const int nblocks = static_cast<int>(problem.blocks.size()) + (neq ? 1 : 0);

  std::map<EntryKey, double> entries;
  for (size_t b = 0; b < problem.blocks.size(); ++b) {
    const int blk = static_cast<int>(b) + 1;
    for (const BlockEntry& e : problem.blocks[b].entries) {
      if (e.coord < 0)
        add_entry(entries, 0, blk, e.row + 1, e.col + 1, -e.coeff);
      else
        add_entry(entries, e.coord + 1, blk, e.row + 1, e.col + 1, e.coeff);
    }
  }
  if (neq) {
    const int blk = nblocks;
    for (int r = 0; r < neq; ++r) {
      const EqualityRow& row = problem.equalities[static_cast<size_t>(r)];
      for (const auto& [coord, coeff] : row.terms) {
        add_entry(entries, coord + 1, blk, r + 1, r + 1, coeff);
        add_entry(entries, coord + 1, blk, neq + r + 1, neq + r + 1, -coeff);
      }
      add_entry(entries, 0, blk, r + 1, r + 1, row.rhs);
      add_entry(entries, 0, blk, neq + r + 1, neq + r + 1, -row.rhs);
    }
  }

  std::string out;
  out += kMarker;
  out += "\n*maximize: the objective row below is negated\n";
  if (neq) out += "*eq-rows " + std::to_string(neq) + "\n";
  out += std::to_string(problem.num_vars) + "\n";
  out += std::to_string(nblocks) + "\n";
  for (size_t b = 0; b < problem.blocks.size(); ++b) {
    if (b) out += " ";
    const ConicBlock& blk = problem.blocks[b];
    out += std::to_string(blk.diagonal ? -blk.size : blk.size);
  }
  if (neq) {
    if (!problem.blocks.empty()) out += " ";
    out += std::to_string(-2 * neq);
  }
  out += "\n";
  for (int j = 0; j < problem.num_vars; ++j) {
    if (j) out += " ";
    double v = -problem.objective[static_cast<size_t>(j)];
    if (v == 0.0) v = 0.0;  // canonicalize -0
    out += format_double(v);
  }
  out += "\n";
  for (const auto& [key, v] : entries) {
    if (v == 0.0) continue;
    const auto [mat, blk, i, j] = key;
    out += std::to_string(mat) + " " + std::to_string(blk) + " " +
           std::to_string(i) + " " + std::to_string(j) + " " +
           format_double(v) + "\n";
  }
  return out;
}

void export_sdpa(const ConicProblem& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << sdpa_text(problem);
  if (!out) throw IoError("write to " + path + " failed");
}

namespace {

struct Token {
  std::string text;
  int line = 0;
};

bool comment_line(const std::string& line) {
  for (char ch : line) {
    if (ch == ' ' || ch == '\t') continue;
    return ch == '*' || ch == '"';
  }
  return true;  // blank
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (comment_line(line)) continue;
    std::string cur;
    for (char ch : line) {
      const bool sep = ch == ' ' || ch == '\t' || ch == ',' || ch == '(' ||
                       ch == ')' || ch == '{' || ch == '}' || ch == '\r';
      if (sep) {
        if (!cur.empty()) tokens.push_back({cur, lineno});
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) tokens.push_back({cur, lineno});
  }
  return tokens;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens)
      : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  int line() const {
    if (pos_ < tokens_.size()) return tokens_[pos_].line;
    return tokens_.empty() ? 0 : tokens_.back().line;
  }

  long long next_int(const char* what) {
    const Token& t = take(what);
    long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(),
                                   t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       std::string(what) + ", got '" + t.text + "'");
    return v;
  }

  double next_double(const char* what) {
    const Token& t = take(what);
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(),
                                   t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       std::string(what) + ", got '" + t.text + "'");
    return v;
  }

  // Skips the rest of the current line (trailing annotations like "= mDIM").
  void skip_line() {
    if (pos_ >= tokens_.size()) return;
    const int ln = tokens_[pos_ > 0 ? pos_ - 1 : 0].line;
    while (pos_ < tokens_.size() && tokens_[pos_].line == ln) ++pos_;
  }

 private:
  const Token& take(const char* what) {
    if (pos_ >= tokens_.size())
      throw ParseError("line " + std::to_string(line()) +
                       ": unexpected end of file while reading " +
                       std::string(what));
    return tokens_[pos_++];
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace

ConicProblem sdpa_from_text(const std::string& text) {
  bool ours = false;
  int marked_eq_rows = 0;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.rfind(kMarker, 0) == 0) ours = true;
      const std::string tag = "*eq-rows ";
      if (line.rfind(tag, 0) == 0)
        marked_eq_rows = std::atoi(line.c_str() + tag.size());
      if (!line.empty() && line[0] != '*' && line[0] != '"') break;
    }
  }

  TokenStream ts(tokenize(text));
  const long long m = ts.next_int("variable count");
  if (m <= 0 || m > 2'000'000)
    throw ParseError("line " + std::to_string(ts.line()) +
                     ": implausible variable count " + std::to_string(m));
  ts.skip_line();
  const long long nblocks = ts.next_int("block count");
  if (nblocks <= 0 || nblocks > 1'000'000)
    throw ParseError("line " + std::to_string(ts.line()) +
                     ": implausible block count " + std::to_string(nblocks));
  ts.skip_line();

  std::vector<long long> sizes;
  for (long long b = 0; b < nblocks; ++b) {
    const long long s = ts.next_int("block size");
    if (s == 0 || s < -100000 || s > 100000)
      throw ParseError("line " + std::to_string(ts.line()) +
                       ": bad block size " + std::to_string(s));
    sizes.push_back(s);
  }

  ConicProblem problem;
  problem.num_vars = static_cast<int>(m);
  problem.objective.resize(static_cast<size_t>(m));
  for (long long j = 0; j < m; ++j)
    problem.objective[static_cast<size_t>(j)] =
        -ts.next_double("objective coefficient");

  for (long long s : sizes) {
    ConicBlock blk;
    blk.size = static_cast<int>(s < 0 ? -s : s);
    blk.diagonal = s < 0;
    problem.blocks.push_back(std::move(blk));
  }

  while (!ts.done()) {
    const int at = ts.line();
    const long long mat = ts.next_int("matrix number");
    const long long blk = ts.next_int("block number");
    const long long i = ts.next_int("row index");
    const long long j = ts.next_int("column index");
    const double v = ts.next_double("entry value");
    if (mat < 0 || mat > m)
      throw ParseError("line " + std::to_string(at) +
                       ": matrix number out of range");
    if (blk < 1 || blk > nblocks)
      throw ParseError("line " + std::to_string(at) +
                       ": block number out of range");
    ConicBlock& block = problem.blocks[static_cast<size_t>(blk - 1)];
    long long r = i, c = j;
    if (r > c) std::swap(r, c);
    if (r < 1 || c > block.size)
      throw ParseError("line " + std::to_string(at) +
                       ": entry position outside block");
    if (block.diagonal && r != c)
      throw ParseError("line " + std::to_string(at) +
                       ": off-diagonal entry in a diagonal block");
    BlockEntry e;
    e.row = static_cast<int>(r - 1);
    e.col = static_cast<int>(c - 1);
    e.coord = static_cast<int>(mat - 1);        // -1 for the constant matrix
    e.coeff = mat == 0 ? -v : v;                // constant matrix enters negated
    block.entries.push_back(e);
  }

  if (ours && marked_eq_rows > 0) {
    if (problem.blocks.empty())
      throw ParseError("equality marker present but no blocks found");
    ConicBlock eq = std::move(problem.blocks.back());
    problem.blocks.pop_back();
    if (!eq.diagonal || eq.size != 2 * marked_eq_rows)
      throw ParseError("equality block does not match its header marker");
    problem.equalities.assign(static_cast<size_t>(marked_eq_rows), {});
    std::vector<std::map<int, double>> lhs(
        static_cast<size_t>(marked_eq_rows));
    std::vector<std::map<int, double>> mirror(
        static_cast<size_t>(marked_eq_rows));
    std::vector<double> rhs(static_cast<size_t>(marked_eq_rows), 0.0);
    std::vector<double> rhs_mirror(static_cast<size_t>(marked_eq_rows), 0.0);
    for (const BlockEntry& e : eq.entries) {
      const bool first = e.row < marked_eq_rows;
      const size_t r =
          static_cast<size_t>(first ? e.row : e.row - marked_eq_rows);
      if (e.coord < 0) {
        // Constant side: exported as b on the first half, -b on the second,
        // then negated once more by the F0 sign convention above.
        (first ? rhs : rhs_mirror)[r] += -e.coeff;
      } else {
        (first ? lhs : mirror)[r][e.coord] += e.coeff;
      }
    }
    for (size_t r = 0; r < static_cast<size_t>(marked_eq_rows); ++r) {
      for (auto& [coord, coeff] : mirror[r]) coeff = -coeff;
      if (lhs[r] != mirror[r] || rhs[r] != -rhs_mirror[r])
        throw ParseError("equality block halves disagree (corrupted file?)");
      EqualityRow row;
      row.rhs = rhs[r];
      for (const auto& [coord, coeff] : lhs[r])
        row.terms.emplace_back(coord, coeff);
      problem.equalities[r] = std::move(row);
    }
  }

  for (ConicBlock& blk : problem.blocks) {
    std::sort(blk.entries.begin(), blk.entries.end(),
              [](const BlockEntry& a, const BlockEntry& b) {
                return std::tie(a.coord, a.row, a.col) <
                       std::tie(b.coord, b.row, b.col);
              });
  }
  problem.check();
  return problem;
}

ConicProblem import_sdpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sdpa_from_text(buf.str());
}

}  // namespace roax
