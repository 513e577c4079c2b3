#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roax/polynomial.hpp"

namespace roax {

/// Basic closed semialgebraic set {z : g_i(z) >= 0}. A singleton set is
/// carried exactly as a point; its inequality list is empty.
struct SemialgebraicSet {
  VariableContext ctx;
  std::vector<Polynomial> inequalities;
  bool singleton = false;
  std::vector<double> point;

  /// All inequalities >= -margin (singleton: sup-norm distance <= margin).
  bool contains(const std::vector<double>& z, double margin = 0.0) const;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
};

enum class TimeMode { kFixed, kFree };

/// Finite-horizon polynomial control problem: dynamics xdot = f(t, x, u) on
/// state constraint X, input constraint U, target XT, horizon [0, T].
struct ProblemSpec {
  int n = 0;
  int m = 0;
  double T = 0.0;
  TimeMode mode = TimeMode::kFixed;
  std::vector<Polynomial> dynamics;  // over (t, x1..xn, u1..um)
  SemialgebraicSet X;                // over (x1..xn)
  SemialgebraicSet U;                // over (u1..um)
  SemialgebraicSet XT;               // over (x1..xn)
};

/// One-variable affine change of coordinates: original = center + radius * z.
struct AxisMap {
  double center = 0.0;
  double radius = 1.0;
};

/// Invertible map between original and solver coordinates. Solver
/// coordinates put every box into [-1,1]^d and the horizon into [0,1].
struct ScalingMap {
  double time = 1.0;
  std::vector<AxisMap> x;
  std::vector<AxisMap> u;

  std::vector<double> scale_state(const std::vector<double>& orig) const;
  std::vector<double> unscale_state(const std::vector<double>& scaled) const;

  /// Rewrites a polynomial over scaled (t, x...) or (x...) coordinates as a
  /// polynomial over the original ones; values are preserved pointwise.
  Polynomial unscale_time_state(const Polynomial& p) const;
  Polynomial unscale_state_poly(const Polynomial& p) const;
};

struct Preprocessed {
  ProblemSpec scaled;
  ScalingMap map;
  /// Radius of the redundant ball appended to X/U/XT (0 = already present).
  double ball_x = 0.0;
  double ball_u = 0.0;
  double ball_xt = 0.0;
};

/// Tightest per-variable bounds implied by interval-shaped inequalities
/// (affine bounds, concave univariate quadratics, balls). nullopt if some
/// variable is unbounded on either side.
std::optional<std::vector<Interval>> bounding_box(const SemialgebraicSet& s);

/// Diagnostics for a malformed problem; empty iff the spec is well formed.
std::vector<std::string> validate(const ProblemSpec& spec);

/// Scales time to [0,1] and every boxed variable into [-1,1], rewrites all
/// polynomials accordingly, and appends a redundant ball constraint
/// R - |z|^2 (R = group dimension) to any set description lacking one.
/// Throws InvalidSpec on validation failure, DegenerateBox on empty boxes.
/// Idempotent: preprocessing a preprocessed spec is the identity.
Preprocessed preprocess(const ProblemSpec& spec);

/// Problem file I/O. The format is a JSON object with fields
///   n, m, T, mode ("fixed"|"free"), dynamics, X, U, XT
/// where polynomial lists are arrays of expression strings over x1..xn,
/// u1..um, t, and XT is either such an array or the string "origin".
/// save(load(path)) reproduces a canonically saved file byte-for-byte.
ProblemSpec load_problem(const std::string& path);
void save_problem(const ProblemSpec& spec, const std::string& path);
std::string problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const std::string& text);

/// FNV-1a hash of the canonical serialization, as "fnv1a64:<hex>".
std::string problem_hash(const ProblemSpec& spec);

}  // namespace roax
