#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roax/conic.hpp"
#include "roax/errors.hpp"

// Homogeneous self-dual interior-point method. The user problem
//   maximize c.y  s.t.  A y = b,  E_i + D_i(y) >= 0
// is embedded together with its dual
//   minimize b.x + sum_i <E_i, U_i>  s.t.  A'x - sum_i D_i'(U_i) = c, U_i >= 0
// into the homogeneous system over (x, U, y, S, tau, kappa). Directions use
// Nesterov-Todd scaling with a Mehrotra predictor-corrector; each iteration
// eliminates (dU, dS, dkappa) and solves one dense saddle system in (dy, dx)
// for two right-hand sides, pinning dtau with the gap row.

namespace roax {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoeffEntry {
  int r, c;
  double v;
};

// One PSD block with its coefficients grouped per decision coordinate.
struct BlockData {
  int size = 0;
  bool has_const = false;
  MatrixXd E;
  std::vector<int> coords;
  std::vector<std::vector<CoeffEntry>> columns;
};

BlockData build_block_data(const ConicBlock& blk) {
  BlockData bd;
  bd.size = blk.size;
  bd.E = MatrixXd::Zero(blk.size, blk.size);
  std::map<int, std::vector<CoeffEntry>> grouped;
  for (const BlockEntry& e : blk.entries) {
    if (e.coeff == 0.0) continue;
    if (e.coord < 0) {
      bd.E(e.row, e.col) += e.coeff;
      if (e.row != e.col) bd.E(e.col, e.row) += e.coeff;
      bd.has_const = true;
    } else {
      grouped[e.coord].push_back({e.row, e.col, e.coeff});
    }
  }
  for (auto& [coord, col] : grouped) {
    bd.coords.push_back(coord);
    bd.columns.push_back(std::move(col));
  }
  return bd;
}

// D_i(y): assemble the linear part of the block at y.
MatrixXd apply_map(const BlockData& bd, const VectorXd& y) {
  MatrixXd M = MatrixXd::Zero(bd.size, bd.size);
  for (size_t q = 0; q < bd.coords.size(); ++q) {
    const double yq = y[bd.coords[q]];
    if (yq == 0.0) continue;
    for (const CoeffEntry& e : bd.columns[q]) {
      M(e.r, e.c) += e.v * yq;
      if (e.r != e.c) M(e.c, e.r) += e.v * yq;
    }
  }
  return M;
}

double inner_col(const std::vector<CoeffEntry>& col, const MatrixXd& V) {
  double s = 0.0;
  for (const CoeffEntry& e : col)
    s += e.v * (e.r == e.c ? V(e.r, e.r) : 2.0 * V(e.r, e.c));
  return s;
}

// out += w * D_i'(M), i.e. the adjoint pairing per coordinate.
void add_adjoint(const BlockData& bd, const MatrixXd& M, double w,
                 VectorXd& out) {
  for (size_t q = 0; q < bd.coords.size(); ++q)
    out[bd.coords[q]] += w * inner_col(bd.columns[q], M);
}

double inner_full(const MatrixXd& A, const MatrixXd& B) {
  return (A.cwiseProduct(B)).sum();
}

// Nesterov-Todd scaling point of the pair (U, S): W S W = U, with
// R R' = W, R^{-1} U R^{-T} = R' S R = diag(lambda).
struct Scaling {
  bool ok = false;
  MatrixXd W, R, Rinv;
  VectorXd lambda;
  Eigen::LLT<MatrixXd> llt_u, llt_s;
};

Scaling make_scaling(const MatrixXd& U, const MatrixXd& S) {
  Scaling sc;
  sc.llt_u.compute(U);
  if (sc.llt_u.info() != Eigen::Success) return sc;
  sc.llt_s.compute(S);
  if (sc.llt_s.info() != Eigen::Success) return sc;
  const int n = static_cast<int>(U.rows());
  MatrixXd Lu = sc.llt_u.matrixL();
  MatrixXd M = Lu.transpose() * S * Lu;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()));
  if (es.info() != Eigen::Success) return sc;
  const VectorXd d = es.eigenvalues();
  if (!(d.minCoeff() > 0.0)) return sc;
  const VectorXd dq = d.array().pow(0.25).matrix();
  sc.R = Lu * es.eigenvectors() * dq.cwiseInverse().asDiagonal();
  sc.Rinv = dq.asDiagonal() * es.eigenvectors().transpose() *
            Lu.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(n, n));
  sc.W = sc.R * sc.R.transpose();
  sc.lambda = d.cwiseSqrt();
  sc.ok = true;
  return sc;
}

// Largest a >= 0 with X + a D >= 0, where llt factors X > 0.
double psd_max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& D) {
  MatrixXd C = llt.matrixL().solve(D);
  C = llt.matrixL().solve(C.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (C + C.transpose()),
                                             Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double scalar_max_step(double v, double dv) {
  return dv >= 0.0 ? kInf : -v / dv;
}

// Dense saddle system [[G, A'], [A, 0]] with static regularization and
// iterative refinement against the unregularized matrix.
struct KktSolver {
  MatrixXd K;
  Eigen::PartialPivLU<MatrixXd> lu;
  int n = 0, f = 0;

  bool factor(const MatrixXd& G, const MatrixXd& A) {
    n = static_cast<int>(G.rows());
    f = static_cast<int>(A.rows());
    K.setZero(n + f, n + f);
    K.topLeftCorner(n, n) = G;
    if (f > 0) {
      K.topRightCorner(n, f) = A.transpose();
      K.bottomLeftCorner(f, n) = A;
    }
    const double scale = n > 0 ? 1.0 + G.diagonal().cwiseAbs().maxCoeff() : 1.0;
    const double delta = 1e-11 * scale;
    MatrixXd Kr = K;
    for (int i = 0; i < n; ++i) Kr(i, i) += delta;
    for (int i = n; i < n + f; ++i) Kr(i, i) -= delta;
    lu.compute(Kr);
    VectorXd probe = solve(VectorXd::Ones(n + f));
    return probe.allFinite();
  }

  VectorXd solve(const VectorXd& rhs) const {
    VectorXd u = lu.solve(rhs);
    for (int it = 0; it < 2; ++it) {
      VectorXd r = rhs - K * u;
      u += lu.solve(r);
    }
    return u;
  }
};

struct Direction {
  VectorXd dY, dx;
  double dtau = 0.0, dkappa = 0.0;
  std::vector<MatrixXd> dU, dS;
};

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opt) {
  problem.check();
  if (problem.blocks.empty())
    throw DimensionMismatch("solver requires at least one conic block");
  for (const ConicBlock& blk : problem.blocks)
    if (blk.size > opt.max_block_size)
      throw LimitExceeded("block size " + std::to_string(blk.size) +
                          " exceeds the in-process limit " +
                          std::to_string(opt.max_block_size) +
                          "; export the problem instead");
  if (problem.num_vars > opt.max_vars)
    throw LimitExceeded("decision vector length " +
                        std::to_string(problem.num_vars) +
                        " exceeds the in-process limit " +
                        std::to_string(opt.max_vars));

  const int nY = problem.num_vars;
  const int f = static_cast<int>(problem.equalities.size());
  const int p = static_cast<int>(problem.blocks.size());

  VectorXd c = VectorXd::Zero(nY);
  for (int j = 0; j < nY; ++j) c[j] = problem.objective[static_cast<size_t>(j)];
  MatrixXd A = MatrixXd::Zero(f, nY);
  VectorXd b = VectorXd::Zero(f);
  for (int r = 0; r < f; ++r) {
    const EqualityRow& row = problem.equalities[static_cast<size_t>(r)];
    for (const auto& [coord, coeff] : row.terms) A(r, coord) += coeff;
    b[r] = row.rhs;
  }
  std::vector<BlockData> blocks;
  blocks.reserve(static_cast<size_t>(p));
  for (const ConicBlock& blk : problem.blocks)
    blocks.push_back(build_block_data(blk));

  double data_max = 1.0;
  data_max = std::max(data_max, c.cwiseAbs().maxCoeff());
  if (f > 0) {
    data_max = std::max(data_max, A.cwiseAbs().maxCoeff());
    data_max = std::max(data_max, b.cwiseAbs().maxCoeff());
  }
  for (const BlockData& bd : blocks) {
    if (bd.has_const) data_max = std::max(data_max, bd.E.cwiseAbs().maxCoeff());
    for (const auto& col : bd.columns)
      for (const CoeffEntry& e : col)
        data_max = std::max(data_max, std::abs(e.v));
  }
  const double bnorm = 1.0 + (f > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const double cnorm = 1.0 + c.cwiseAbs().maxCoeff();

  // Cone degree: sum of block sizes plus the tau/kappa pair.
  double nu = 1.0;
  for (const BlockData& bd : blocks) nu += bd.size;

  // State.
  VectorXd x = VectorXd::Zero(f);
  VectorXd Y = VectorXd::Zero(nY);
  std::vector<MatrixXd> U, S;
  for (const BlockData& bd : blocks) {
    U.push_back(MatrixXd::Identity(bd.size, bd.size));
    S.push_back(MatrixXd::Identity(bd.size, bd.size));
  }
  double tau = 1.0, kappa = 1.0;

  ConicSolution sol;
  sol.y.assign(static_cast<size_t>(nY), 0.0);
  sol.x.assign(static_cast<size_t>(f), 0.0);
  for (const BlockData& bd : blocks)
    sol.Z.push_back(MatrixXd::Zero(bd.size, bd.size));

  auto fill_normalized = [&](ConicSolution& out) {
    if (!(tau > 0.0)) return;
    for (int j = 0; j < nY; ++j) out.y[static_cast<size_t>(j)] = Y[j] / tau;
    for (int r = 0; r < f; ++r) out.x[static_cast<size_t>(r)] = x[r] / tau;
    for (int i = 0; i < p; ++i) out.Z[static_cast<size_t>(i)] = U[static_cast<size_t>(i)] / tau;
    out.primal_objective = c.dot(Y) / tau;
    double dobj = f > 0 ? b.dot(x) / tau : 0.0;
    for (int i = 0; i < p; ++i)
      if (blocks[static_cast<size_t>(i)].has_const)
        dobj += inner_full(blocks[static_cast<size_t>(i)].E,
                           U[static_cast<size_t>(i)]) / tau;
    out.dual_objective = dobj;
    out.gap = std::abs(out.primal_objective - out.dual_objective) /
              (1.0 + std::abs(out.primal_objective) +
               std::abs(out.dual_objective));
  };

  int small_steps = 0;
  double pres_n = kInf, dres_n = kInf;
  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    sol.iterations = iter;

    // Residuals of the homogeneous system.
    VectorXd r1 = -c * tau;                     // A'x - sum D'(U) - c tau
    if (f > 0) r1 += A.transpose() * x;
    for (int i = 0; i < p; ++i)
      add_adjoint(blocks[static_cast<size_t>(i)], U[static_cast<size_t>(i)],
                  -1.0, r1);
    VectorXd r2f = b * tau;                     // b tau - A Y
    if (f > 0) r2f -= A * Y;
    std::vector<MatrixXd> R2P;                  // D(Y) + E tau - S
    for (int i = 0; i < p; ++i) {
      const auto ui = static_cast<size_t>(i);
      MatrixXd Ri = apply_map(blocks[ui], Y) - S[ui];
      if (blocks[ui].has_const) Ri += blocks[ui].E * tau;
      R2P.push_back(std::move(Ri));
    }
    double gap_h = c.dot(Y) - kappa;            // c'Y - b'x - sum<E,U> - kappa
    if (f > 0) gap_h -= b.dot(x);
    for (int i = 0; i < p; ++i)
      if (blocks[static_cast<size_t>(i)].has_const)
        gap_h -= inner_full(blocks[static_cast<size_t>(i)].E,
                            U[static_cast<size_t>(i)]);
    double compl_total = tau * kappa;
    for (int i = 0; i < p; ++i)
      compl_total += inner_full(U[static_cast<size_t>(i)],
                                S[static_cast<size_t>(i)]);
    const double mu = compl_total / (nu + 1.0);

    // Optimality of the normalized iterate.
    if (tau > 1e-12) {
      double pres = 0.0;
      if (f > 0) pres = (A * (Y / tau) - b).cwiseAbs().maxCoeff() / bnorm;
      for (int i = 0; i < p; ++i) {
        const auto ui = static_cast<size_t>(i);
        const double en =
            1.0 + (blocks[ui].has_const ? blocks[ui].E.cwiseAbs().maxCoeff()
                                        : 0.0);
        pres = std::max(pres,
                        R2P[ui].cwiseAbs().maxCoeff() / tau / en);
      }
      VectorXd rd = -c;
      if (f > 0) rd += A.transpose() * (x / tau);
      for (int i = 0; i < p; ++i)
        add_adjoint(blocks[static_cast<size_t>(i)],
                    U[static_cast<size_t>(i)] / tau, -1.0, rd);
      const double dres = rd.cwiseAbs().maxCoeff() / cnorm;
      fill_normalized(sol);
      sol.feas_primal = pres;
      sol.feas_dual = dres;
      if (opt.verbose)
        std::printf("it %3d  mu %9.2e  pres %9.2e  dres %9.2e  gap %9.2e  "
                    "tau %9.2e  kappa %9.2e\n",
                    iter, mu, pres, dres, sol.gap, tau, kappa);
      pres_n = pres;
      dres_n = dres;
      if (pres <= opt.tol_feas && dres <= opt.tol_feas &&
          sol.gap <= opt.tol_gap) {
        sol.status = SolveStatus::kOptimal;
        sol.message = "converged";
        return sol;
      }
    }

    // Farkas certificate of primal infeasibility: A'x - sum D'(U) = 0 with
    // b'x + sum<E,U> < 0.
    {
      double ph = f > 0 ? b.dot(x) : 0.0;
      for (int i = 0; i < p; ++i)
        if (blocks[static_cast<size_t>(i)].has_const)
          ph += inner_full(blocks[static_cast<size_t>(i)].E,
                           U[static_cast<size_t>(i)]);
      if (ph < 0.0) {
        VectorXd hx = VectorXd::Zero(nY);
        if (f > 0) hx = A.transpose() * x;
        for (int i = 0; i < p; ++i)
          add_adjoint(blocks[static_cast<size_t>(i)],
                      U[static_cast<size_t>(i)], -1.0, hx);
        if (hx.cwiseAbs().maxCoeff() <= opt.tol_feas * data_max * (-ph)) {
          for (int r = 0; r < f; ++r)
            sol.x[static_cast<size_t>(r)] = x[r] / (-ph);
          for (int i = 0; i < p; ++i)
            sol.Z[static_cast<size_t>(i)] = U[static_cast<size_t>(i)] / (-ph);
          sol.status = SolveStatus::kInfeasible;
          sol.message =
              "infeasible: certificate A'x - D'(U) = 0 with b'x + <E,U> = -1";
          return sol;
        }
      }
    }
    // Improving-ray detection (problem unbounded above).
    if (tau <= 1e-6 * std::max(1.0, kappa)) {
      const double xi = c.dot(Y);
      if (xi > 0.0) {
        double vres = f > 0 ? (A * Y).cwiseAbs().maxCoeff() / xi : 0.0;
        double lmin = 0.0;
        for (int i = 0; i < p; ++i) {
          MatrixXd Dy = apply_map(blocks[static_cast<size_t>(i)], Y) / xi;
          Eigen::SelfAdjointEigenSolver<MatrixXd> es(Dy,
                                                     Eigen::EigenvaluesOnly);
          lmin = std::min(lmin, es.eigenvalues().minCoeff());
        }
        if (vres <= opt.tol_feas * data_max &&
            lmin >= -opt.tol_feas * data_max) {
          sol.status = SolveStatus::kNumericalFailure;
          sol.message = "objective unbounded above (improving ray found)";
          return sol;
        }
      }
    }

    if (iter == opt.max_iter) break;
    if (mu < 1e-16 || !std::isfinite(mu)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "complementarity collapsed without meeting tolerances";
      return sol;
    }

    // Nesterov-Todd scalings.
    std::vector<Scaling> sc(static_cast<size_t>(p));
    bool sc_ok = true;
    for (int i = 0; i < p; ++i) {
      sc[static_cast<size_t>(i)] =
          make_scaling(U[static_cast<size_t>(i)], S[static_cast<size_t>(i)]);
      sc_ok = sc_ok && sc[static_cast<size_t>(i)].ok;
    }
    if (!sc_ok) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "scaling-point computation failed (iterate left the cone)";
      return sol;
    }

    // Schur operator G = sum_i D_i'(W_i D_i(.) W_i) and constant couplings.
    MatrixXd G = MatrixXd::Zero(nY, nY);
    VectorXd hE = VectorXd::Zero(nY);
    double eEE = 0.0, kR2 = 0.0;
    VectorXd vR2 = VectorXd::Zero(nY);
    for (int i = 0; i < p; ++i) {
      const auto ui = static_cast<size_t>(i);
      const BlockData& bd = blocks[ui];
      const MatrixXd& W = sc[ui].W;
      const int nq = static_cast<int>(bd.coords.size());
      for (int q = 0; q < nq; ++q) {
        MatrixXd Vq = MatrixXd::Zero(bd.size, bd.size);
        for (const CoeffEntry& e : bd.columns[static_cast<size_t>(q)]) {
          Vq.noalias() += e.v * (W.col(e.r) * W.col(e.c).transpose());
          if (e.r != e.c)
            Vq.noalias() += e.v * (W.col(e.c) * W.col(e.r).transpose());
        }
        const int cq = bd.coords[static_cast<size_t>(q)];
        for (int pq = 0; pq <= q; ++pq) {
          const int cp = bd.coords[static_cast<size_t>(pq)];
          const double g = inner_col(bd.columns[static_cast<size_t>(pq)], Vq);
          G(std::min(cp, cq), std::max(cp, cq)) += g;
        }
      }
      MatrixXd WR2W = W * R2P[ui] * W;
      add_adjoint(bd, WR2W, 1.0, vR2);
      if (bd.has_const) {
        MatrixXd WEW = W * bd.E * W;
        add_adjoint(bd, WEW, 1.0, hE);
        eEE += inner_full(WEW, bd.E);
        kR2 += inner_full(WEW, R2P[ui]);
      }
    }
    G = G.selfadjointView<Eigen::Upper>();

    KktSolver kkt;
    if (!kkt.factor(G, A)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "saddle-system factorization failed";
      return sol;
    }
    VectorXd rhs1(nY + f);
    rhs1.head(nY) = c - hE;
    rhs1.tail(f) = b;
    const VectorXd sol1 = kkt.solve(rhs1);
    const VectorXd Y1 = sol1.head(nY);
    const VectorXd x1 = sol1.tail(f);

    const double chY1 = (c + hE).dot(Y1);
    const double den =
        chY1 - (f > 0 ? b.dot(x1) : 0.0) + eEE + kappa / tau;

    auto direction = [&](double eta, double sigma,
                         const std::vector<MatrixXd>* corr,
                         double corr_tk) -> Direction {
      Direction d;
      std::vector<MatrixXd> T(static_cast<size_t>(p));
      VectorXd rhoY = -eta * r1 - eta * vR2;
      double KE = 0.0;
      for (int i = 0; i < p; ++i) {
        const auto ui = static_cast<size_t>(i);
        const VectorXd& lam = sc[ui].lambda;
        MatrixXd Rhs = (-lam.cwiseProduct(lam)).asDiagonal();
        Rhs.diagonal().array() += sigma * mu;
        if (corr) Rhs -= (*corr)[ui];
        MatrixXd H(Rhs.rows(), Rhs.cols());
        for (int a = 0; a < Rhs.rows(); ++a)
          for (int bcol = 0; bcol < Rhs.cols(); ++bcol)
            H(a, bcol) = 2.0 * Rhs(a, bcol) / (lam[a] + lam[bcol]);
        T[ui] = sc[ui].R * H * sc[ui].R.transpose();
        add_adjoint(blocks[ui], T[ui], 1.0, rhoY);
        if (blocks[ui].has_const) KE += inner_full(blocks[ui].E, T[ui]);
      }
      VectorXd rhs0(nY + f);
      rhs0.head(nY) = rhoY;
      rhs0.tail(f) = eta * r2f;
      const VectorXd sol0 = kkt.solve(rhs0);
      const VectorXd Y0 = sol0.head(nY);
      const VectorXd x0 = sol0.tail(f);
      const double ctk = sigma * mu - tau * kappa - corr_tk;
      const double num = -eta * gap_h + KE - eta * kR2 - (c + hE).dot(Y0) +
                         (f > 0 ? b.dot(x0) : 0.0) + ctk / tau;
      d.dtau = num / den;
      d.dY = Y0 + d.dtau * Y1;
      d.dx = x0 + d.dtau * x1;
      d.dkappa = (ctk - kappa * d.dtau) / tau;
      d.dS.resize(static_cast<size_t>(p));
      d.dU.resize(static_cast<size_t>(p));
      for (int i = 0; i < p; ++i) {
        const auto ui = static_cast<size_t>(i);
        MatrixXd dS = apply_map(blocks[ui], d.dY) + eta * R2P[ui];
        if (blocks[ui].has_const) dS += blocks[ui].E * d.dtau;
        d.dU[ui] = T[ui] - sc[ui].W * dS * sc[ui].W;
        d.dS[ui] = std::move(dS);
      }
      return d;
    };

    auto max_step = [&](const Direction& d) {
      double a = kInf;
      for (int i = 0; i < p; ++i) {
        const auto ui = static_cast<size_t>(i);
        a = std::min(a, psd_max_step(sc[ui].llt_u, d.dU[ui]));
        a = std::min(a, psd_max_step(sc[ui].llt_s, d.dS[ui]));
      }
      a = std::min(a, scalar_max_step(tau, d.dtau));
      a = std::min(a, scalar_max_step(kappa, d.dkappa));
      return a;
    };

    // Predictor.
    const Direction aff = direction(1.0, 0.0, nullptr, 0.0);
    if (!aff.dY.allFinite() || !std::isfinite(aff.dtau)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "affine direction is not finite";
      return sol;
    }
    const double alpha_aff = std::min(1.0, max_step(aff));
    double compl_aff = (tau + alpha_aff * aff.dtau) *
                       (kappa + alpha_aff * aff.dkappa);
    for (int i = 0; i < p; ++i) {
      const auto ui = static_cast<size_t>(i);
      compl_aff += inner_full(U[ui] + alpha_aff * aff.dU[ui],
                              S[ui] + alpha_aff * aff.dS[ui]);
    }
    const double mu_aff = std::max(0.0, compl_aff / (nu + 1.0));
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // Near convergence the centering component of the search direction is
    // amplified by the ill-conditioned scaled system and blocks the step
    // long before the affine component would; capping sigma once the
    // iterate is essentially feasible restores fast tail convergence (and
    // is what rescues instances without strict complementarity).
    if (mu < 1e-6 && std::max(pres_n, dres_n) < 1e-4)
      sigma = std::min(sigma, 0.02);

    // Corrector: second-order terms in the scaled space.
    std::vector<MatrixXd> corr(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) {
      const auto ui = static_cast<size_t>(i);
      MatrixXd Hu = sc[ui].Rinv * aff.dU[ui] * sc[ui].Rinv.transpose();
      MatrixXd Hs = sc[ui].R.transpose() * aff.dS[ui] * sc[ui].R;
      corr[ui] = 0.5 * (Hu * Hs + Hs * Hu);
    }
    const Direction dir =
        direction(1.0 - sigma, sigma, &corr, aff.dtau * aff.dkappa);
    if (!dir.dY.allFinite() || !std::isfinite(dir.dtau)) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "combined direction is not finite";
      return sol;
    }

    double alpha = std::min(1.0, opt.step_fraction * max_step(dir));
    // Keep the new iterate safely inside the cone: back off if a factor-
    // ization of the trial point fails.
    bool committed = false;
    for (int tries = 0; tries < 30 && alpha > 1e-13; ++tries) {
      bool ok = tau + alpha * dir.dtau > 0.0 &&
                kappa + alpha * dir.dkappa > 0.0;
      std::vector<MatrixXd> Ut, St;
      for (int i = 0; ok && i < p; ++i) {
        const auto ui = static_cast<size_t>(i);
        Ut.push_back(U[ui] + alpha * dir.dU[ui]);
        St.push_back(S[ui] + alpha * dir.dS[ui]);
        ok = Eigen::LLT<MatrixXd>(Ut.back()).info() == Eigen::Success &&
             Eigen::LLT<MatrixXd>(St.back()).info() == Eigen::Success;
      }
      if (ok) {
        for (int i = 0; i < p; ++i) {
          const auto ui = static_cast<size_t>(i);
          U[ui] = std::move(Ut[ui]);
          S[ui] = std::move(St[ui]);
        }
        Y += alpha * dir.dY;
        x += alpha * dir.dx;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        committed = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!committed) {
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "no admissible step length";
      return sol;
    }
    small_steps = alpha < 1e-7 ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      fill_normalized(sol);
      sol.status = SolveStatus::kNumericalFailure;
      sol.message = "step lengths collapsed";
      return sol;
    }
  }

  fill_normalized(sol);
  sol.status = SolveStatus::kMaxIter;
  sol.message = "iteration limit reached";
  return sol;
}

}  // namespace roax
