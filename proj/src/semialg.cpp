#include "roax/semialg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "roax/errors.hpp"

namespace roax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool SemialgebraicSet::contains(const std::vector<double>& z,
                                double margin) const {
  if (static_cast<int>(z.size()) != ctx.size())
    throw DimensionMismatch("membership query point has wrong dimension");
  if (singleton) {
    for (std::size_t i = 0; i < point.size(); ++i)
      if (std::abs(z[i] - point[i]) > margin) return false;
    return true;
  }
  for (const auto& g : inequalities)
    if (g.evaluate(z) < -margin) return false;
  return true;
}

std::vector<double> ScalingMap::scale_state(
    const std::vector<double>& orig) const {
  if (orig.size() != x.size())
    throw DimensionMismatch("state point has wrong dimension");
  std::vector<double> out(orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i)
    out[i] = (orig[i] - x[i].center) / x[i].radius;
  return out;
}

std::vector<double> ScalingMap::unscale_state(
    const std::vector<double>& scaled) const {
  if (scaled.size() != x.size())
    throw DimensionMismatch("state point has wrong dimension");
  std::vector<double> out(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    out[i] = x[i].center + x[i].radius * scaled[i];
  return out;
}

Polynomial ScalingMap::unscale_time_state(const Polynomial& p) const {
  // Scaled s relates to original t by s = t / time; scaled z_i by
  // z_i = (x_i - c_i) / r_i. Substitute accordingly.
  Polynomial q = p;
  const auto& ctx = p.context();
  for (int i = 0; i < ctx.size(); ++i) {
    const std::string& nm = ctx.name(i);
    if (nm == "t") {
      q = q.substitute_affine(i, 1.0 / time, 0.0);
    } else if (nm[0] == 'x') {
      const int j = std::stoi(nm.substr(1)) - 1;
      q = q.substitute_affine(i, 1.0 / x[j].radius,
                              -x[j].center / x[j].radius);
    } else {
      throw ContextMismatch("cannot unscale variable " + nm);
    }
  }
  return q;
}

Polynomial ScalingMap::unscale_state_poly(const Polynomial& p) const {
  Polynomial q = p;
  const auto& ctx = p.context();
  for (int i = 0; i < ctx.size(); ++i) {
    const std::string& nm = ctx.name(i);
    if (nm[0] != 'x') throw ContextMismatch("cannot unscale variable " + nm);
    const int j = std::stoi(nm.substr(1)) - 1;
    q = q.substitute_affine(i, 1.0 / x[j].radius, -x[j].center / x[j].radius);
  }
  return q;
}

namespace {

/// Accumulates bounds implied by one inequality into lo/hi arrays.
void absorb_bounds(const Polynomial& g, std::vector<double>& lo,
                   std::vector<double>& hi) {
  const int n = g.context().size();
  // Classify: affine in one variable; concave quadratic in one variable;
  // c - sum d_i z_i^2 (weighted ball). Anything else gives no bounds.
  int max_deg_per_var = 0;
  std::vector<int> touched;
  bool pure_even = true;  // only constant + pure squares
  for (const auto& [idx, c] : g.coefficients()) {
    int nz = -1, nnz = 0;
    for (int i = 0; i < n; ++i)
      if (idx[i] != 0) {
        nz = i;
        ++nnz;
        max_deg_per_var = std::max(max_deg_per_var, idx[i]);
      }
    if (nnz > 1) return;  // mixed term: no interval information used
    if (nz >= 0) {
      if (std::find(touched.begin(), touched.end(), nz) == touched.end())
        touched.push_back(nz);
      if (idx[nz] != 2) pure_even = false;
    }
    (void)c;
  }
  if (touched.empty()) return;

  if (touched.size() == 1) {
    const int v = touched[0];
    MultiIndex e0(n, 0), e1(n, 0), e2(n, 0);
    e1[v] = 1;
    e2[v] = 2;
    const double c0 = g.coefficient(e0);
    const double c1 = g.coefficient(e1);
    const double c2 = g.coefficient(e2);
    if (max_deg_per_var == 1) {
      const double bound = -c0 / c1;
      if (c1 > 0)
        lo[v] = std::max(lo[v], bound);
      else
        hi[v] = std::min(hi[v], bound);
      return;
    }
    if (max_deg_per_var == 2 && c2 < 0) {
      const double disc = c1 * c1 - 4 * c2 * c0;
      if (disc < 0) return;
      const double s = std::sqrt(disc);
      const double r1 = (-c1 + s) / (2 * c2);
      const double r2 = (-c1 - s) / (2 * c2);
      lo[v] = std::max(lo[v], std::min(r1, r2));
      hi[v] = std::min(hi[v], std::max(r1, r2));
    }
    return;
  }

  // Several variables: usable only for c - sum d_i z_i^2 with d_i > 0.
  if (!pure_even || max_deg_per_var != 2) return;
  MultiIndex zero(n, 0);
  const double c0 = g.coefficient(zero);
  if (c0 <= 0) return;
  for (int v : touched) {
    MultiIndex e2(n, 0);
    e2[v] = 2;
    const double d = -g.coefficient(e2);
    if (d <= 0) return;
  }
  for (int v : touched) {
    MultiIndex e2(n, 0);
    e2[v] = 2;
    const double r = std::sqrt(c0 / -g.coefficient(e2));
    lo[v] = std::max(lo[v], -r);
    hi[v] = std::min(hi[v], r);
  }
}

/// True when some inequality has the weighted-ball shape
/// c - sum_i d_i z_i^2 over all variables, c > 0, every d_i > 0.
bool has_full_ball(const SemialgebraicSet& s) {
  const int n = s.ctx.size();
  for (const auto& g : s.inequalities) {
    MultiIndex zero(n, 0);
    const double c0 = g.coefficient(zero);
    if (c0 <= 0) continue;
    bool shape_ok = true;
    std::vector<bool> seen(n, false);
    for (const auto& [idx, c] : g.coefficients()) {
      const int deg = total_degree(idx);
      if (deg == 0) continue;
      int nz = -1, nnz = 0;
      for (int i = 0; i < n; ++i)
        if (idx[i] != 0) {
          nz = i;
          nnz += idx[i];
        }
      if (nnz != 2 || idx[nz] != 2 || c >= 0) {
        shape_ok = false;
        break;
      }
      seen[nz] = true;
    }
    if (shape_ok && std::all_of(seen.begin(), seen.end(),
                                [](bool b) { return b; }) &&
        n > 0)
      return true;
  }
  return false;
}

Polynomial scale_into(const Polynomial& p, const ScalingMap& map,
                      bool with_time, bool with_input) {
  Polynomial q = p;
  const auto& ctx = p.context();
  for (int i = 0; i < ctx.size(); ++i) {
    const std::string& nm = ctx.name(i);
    if (nm == "t") {
      if (!with_time) throw ContextMismatch("unexpected time variable");
      q = q.substitute_affine(i, map.time, 0.0);
    } else if (nm[0] == 'x') {
      const int j = std::stoi(nm.substr(1)) - 1;
      q = q.substitute_affine(i, map.x[j].radius, map.x[j].center);
    } else if (nm[0] == 'u') {
      if (!with_input) throw ContextMismatch("unexpected input variable");
      const int j = std::stoi(nm.substr(1)) - 1;
      q = q.substitute_affine(i, map.u[j].radius, map.u[j].center);
    }
  }
  return q;
}

}  // namespace

std::optional<std::vector<Interval>> bounding_box(const SemialgebraicSet& s) {
  const int n = s.ctx.size();
  if (s.singleton) {
    std::vector<Interval> box(n);
    for (int i = 0; i < n; ++i) box[i] = {s.point[i], s.point[i]};
    return box;
  }
  std::vector<double> lo(n, -kInf), hi(n, kInf);
  for (const auto& g : s.inequalities) absorb_bounds(g, lo, hi);
  std::vector<Interval> box(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return std::nullopt;
    box[i] = {lo[i], hi[i]};
  }
  return box;
}

std::vector<std::string> validate(const ProblemSpec& spec) {
  std::vector<std::string> diags;
  if (spec.n < 1) diags.push_back("state dimension must be at least 1");
  if (spec.m < 0) diags.push_back("input dimension must be nonnegative");
  if (!(spec.T > 0)) diags.push_back("horizon T must be positive");
  if (static_cast<int>(spec.dynamics.size()) != spec.n)
    diags.push_back("dynamics must list exactly n entries");
  const auto full = full_context(spec.n, spec.m);
  for (std::size_t i = 0; i < spec.dynamics.size(); ++i)
    if (!(spec.dynamics[i].context() == full))
      diags.push_back("dynamics entry " + std::to_string(i + 1) +
                      " has wrong variable context");
  if (!(spec.X.ctx == state_context(spec.n)))
    diags.push_back("X has wrong variable context");
  if (spec.m > 0 && !(spec.U.ctx == input_context(spec.m)))
    diags.push_back("U has wrong variable context");
  if (!(spec.XT.ctx == state_context(spec.n)))
    diags.push_back("target set has wrong variable context");

  auto xbox = bounding_box(spec.X);
  if (!xbox) {
    diags.push_back("state set unbounded: no bounding box for some x_i");
  } else {
    for (int i = 0; i < spec.n; ++i)
      if (!((*xbox)[i].lo < (*xbox)[i].hi))
        diags.push_back("state box degenerate in x" + std::to_string(i + 1));
  }
  if (spec.m > 0) {
    auto ubox = bounding_box(spec.U);
    if (!ubox) {
      diags.push_back("input set unbounded: no bounding box for some u_i");
    } else {
      for (int i = 0; i < spec.m; ++i)
        if (!((*ubox)[i].lo < (*ubox)[i].hi))
          diags.push_back("input box degenerate in u" + std::to_string(i + 1));
    }
  }
  if (spec.XT.singleton) {
    if (static_cast<int>(spec.XT.point.size()) != spec.n)
      diags.push_back("singleton target point has wrong dimension");
    else if (xbox) {
      for (int i = 0; i < spec.n; ++i)
        if (spec.XT.point[i] < (*xbox)[i].lo ||
            spec.XT.point[i] > (*xbox)[i].hi)
          diags.push_back("singleton target lies outside the state box");
    }
  } else if (!bounding_box(spec.XT)) {
    diags.push_back("target set unbounded: no bounding box for some x_i");
  }
  for (const auto& g : spec.X.inequalities)
    if (g.is_zero()) diags.push_back("X contains the zero inequality");
  for (const auto& g : spec.U.inequalities)
    if (g.is_zero()) diags.push_back("U contains the zero inequality");
  for (const auto& g : spec.XT.inequalities)
    if (g.is_zero()) diags.push_back("target set contains the zero inequality");
  return diags;
}

Preprocessed preprocess(const ProblemSpec& spec) {
  auto diags = validate(spec);
  if (!diags.empty()) {
    std::string msg = "invalid problem:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw InvalidSpec(msg);
  }
  auto xbox = *bounding_box(spec.X);
  ScalingMap map;
  map.time = spec.T;
  map.x.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const double width = xbox[i].hi - xbox[i].lo;
    if (!(width > 0)) throw DegenerateBox("state box degenerate");
    map.x[i] = {0.5 * (xbox[i].hi + xbox[i].lo), 0.5 * width};
  }
  map.u.resize(spec.m);
  if (spec.m > 0) {
    auto ubox = *bounding_box(spec.U);
    for (int i = 0; i < spec.m; ++i) {
      const double width = ubox[i].hi - ubox[i].lo;
      if (!(width > 0)) throw DegenerateBox("input box degenerate");
      map.u[i] = {0.5 * (ubox[i].hi + ubox[i].lo), 0.5 * width};
    }
  }

  Preprocessed out;
  out.map = map;
  ProblemSpec& s = out.scaled;
  s.n = spec.n;
  s.m = spec.m;
  s.T = 1.0;
  s.mode = spec.mode;
  const auto full = full_context(spec.n, spec.m);
  for (int i = 0; i < spec.n; ++i) {
    Polynomial fi = scale_into(spec.dynamics[i], map, true, true);
    s.dynamics.push_back(fi.scaled(map.time / map.x[i].radius));
  }
  s.X.ctx = state_context(spec.n);
  for (const auto& g : spec.X.inequalities)
    s.X.inequalities.push_back(scale_into(g, map, false, false));
  if (!has_full_ball(s.X)) {
    out.ball_x = spec.n;
    Polynomial ball = Polynomial::constant(s.X.ctx, out.ball_x);
    for (int i = 0; i < spec.n; ++i) {
      MultiIndex e(spec.n, 0);
      e[i] = 2;
      ball = ball + Polynomial::monomial(s.X.ctx, e, -1.0);
    }
    s.X.inequalities.push_back(ball);
  }
  s.U.ctx = input_context(spec.m);
  if (spec.m > 0) {
    for (const auto& g : spec.U.inequalities)
      s.U.inequalities.push_back(scale_into(g, map, false, true));
    if (!has_full_ball(s.U)) {
      out.ball_u = spec.m;
      Polynomial ball = Polynomial::constant(s.U.ctx, out.ball_u);
      for (int i = 0; i < spec.m; ++i) {
        MultiIndex e(spec.m, 0);
        e[i] = 2;
        ball = ball + Polynomial::monomial(s.U.ctx, e, -1.0);
      }
      s.U.inequalities.push_back(ball);
    }
  }
  s.XT.ctx = state_context(spec.n);
  if (spec.XT.singleton) {
    s.XT.singleton = true;
    s.XT.point = map.scale_state(spec.XT.point);
  } else {
    for (const auto& g : spec.XT.inequalities)
      s.XT.inequalities.push_back(scale_into(g, map, false, false));
    if (!has_full_ball(s.XT)) {
      out.ball_xt = spec.n;
      Polynomial ball = Polynomial::constant(s.XT.ctx, out.ball_xt);
      for (int i = 0; i < spec.n; ++i) {
        MultiIndex e(spec.n, 0);
        e[i] = 2;
        ball = ball + Polynomial::monomial(s.XT.ctx, e, -1.0);
      }
      s.XT.inequalities.push_back(ball);
    }
  }
  (void)full;
  return out;
}

namespace {

nlohmann::ordered_json to_json(const ProblemSpec& spec) {
  nlohmann::ordered_json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["T"] = spec.T;
  j["mode"] = spec.mode == TimeMode::kFixed ? "fixed" : "free";
  nlohmann::ordered_json dyn = nlohmann::ordered_json::array();
  for (const auto& f : spec.dynamics) dyn.push_back(f.to_string());
  j["dynamics"] = dyn;
  nlohmann::ordered_json gx = nlohmann::ordered_json::array();
  for (const auto& g : spec.X.inequalities) gx.push_back(g.to_string());
  j["X"] = gx;
  nlohmann::ordered_json gu = nlohmann::ordered_json::array();
  for (const auto& g : spec.U.inequalities) gu.push_back(g.to_string());
  j["U"] = gu;
  if (spec.XT.singleton) {
    bool all_zero = true;
    for (double p : spec.XT.point) all_zero = all_zero && p == 0.0;
    if (all_zero) {
      j["XT"] = "origin";
    } else {
      j["XT"] = nlohmann::ordered_json::object();
      j["XT"]["point"] = spec.XT.point;
    }
  } else {
    nlohmann::ordered_json gt = nlohmann::ordered_json::array();
    for (const auto& g : spec.XT.inequalities) gt.push_back(g.to_string());
    j["XT"] = gt;
  }
  return j;
}

}  // namespace

std::string problem_to_json(const ProblemSpec& spec) {
  return to_json(spec).dump(2) + "\n";
}

ProblemSpec problem_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") +
                     e.what());
  }
  ProblemSpec spec;
  try {
    spec.n = j.at("n").get<int>();
    spec.m = j.at("m").get<int>();
    spec.T = j.at("T").get<double>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "fixed")
      spec.mode = TimeMode::kFixed;
    else if (mode == "free")
      spec.mode = TimeMode::kFree;
    else
      throw ParseError("mode must be \"fixed\" or \"free\"");
    const auto full = full_context(spec.n, spec.m);
    for (const auto& s : j.at("dynamics"))
      spec.dynamics.push_back(parse_polynomial(s.get<std::string>(), full));
    spec.X.ctx = state_context(spec.n);
    for (const auto& s : j.at("X"))
      spec.X.inequalities.push_back(
          parse_polynomial(s.get<std::string>(), spec.X.ctx));
    spec.U.ctx = input_context(spec.m);
    if (j.contains("U"))
      for (const auto& s : j.at("U"))
        spec.U.inequalities.push_back(
            parse_polynomial(s.get<std::string>(), spec.U.ctx));
    spec.XT.ctx = state_context(spec.n);
    const auto& xt = j.at("XT");
    if (xt.is_string()) {
      if (xt.get<std::string>() != "origin")
        throw ParseError("XT string form must be \"origin\"");
      spec.XT.singleton = true;
      spec.XT.point.assign(spec.n, 0.0);
    } else if (xt.is_object()) {
      spec.XT.singleton = true;
      spec.XT.point = xt.at("point").get<std::vector<double>>();
    } else {
      for (const auto& s : xt)
        spec.XT.inequalities.push_back(
            parse_polynomial(s.get<std::string>(), spec.XT.ctx));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem file missing or mistyped field: ") +
                     e.what());
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open problem file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

void save_problem(const ProblemSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write problem file " + path);
  out << problem_to_json(spec);
}

std::string problem_hash(const ProblemSpec& spec) {
  const std::string bytes = problem_to_json(spec);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace roax
