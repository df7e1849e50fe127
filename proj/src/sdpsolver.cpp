// Primal-dual interior-point method with Nesterov-Todd scaling and
// Mehrotra predictor-corrector steps, dense linear algebra throughout.
#include "sosineq/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sosineq {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalTrouble: return "numerical_trouble";
    case SolveStatus::InfeasibleSuspected: return "infeasible_suspected";
  }
  return "unknown";
}

void SdpProblem::set_dims(std::vector<int> dims, int nfree) {
  block_dims = std::move(dims);
  num_free = nfree;
  objective_blocks.assign(block_dims.size(), {});
  objective_free = Eigen::VectorXd::Zero(num_free);
}

std::string SdpProblem::dump() const {
  std::ostringstream os;
  os << "blocks:";
  for (int d : block_dims) os << " " << d;
  os << "\nfree: " << num_free << "\nobjective:\n";
  for (size_t k = 0; k < objective_blocks.size(); ++k)
    for (const BlockEntry& e : objective_blocks[k])
      os << "  C[" << k << "](" << e.i << "," << e.j << ") = " << e.v << "\n";
  for (int v = 0; v < objective_free.size(); ++v)
    if (objective_free[v] != 0.0) os << "  c_f[" << v << "] = " << objective_free[v] << "\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    os << "row " << r << ": rhs = " << rows[r].rhs << "\n";
    for (const auto& [k, es] : rows[r].block_terms)
      for (const BlockEntry& e : es)
        os << "  A[" << k << "](" << e.i << "," << e.j << ") = " << e.v << "\n";
    for (const auto& [v, c] : rows[r].free_terms) os << "  d[" << v << "] = " << c << "\n";
  }
  return os.str();
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd densify(const std::vector<BlockEntry>& es, int m) {
  MatrixXd A = MatrixXd::Zero(m, m);
  for (const BlockEntry& e : es) {
    A(e.i, e.j) += e.v;
    if (e.i != e.j) A(e.j, e.i) += e.v;
  }
  return A;
}

double sparse_ip(const std::vector<BlockEntry>& es, const MatrixXd& X) {
  double acc = 0.0;
  for (const BlockEntry& e : es)
    acc += e.i == e.j ? e.v * X(e.i, e.i) : 2.0 * e.v * X(e.i, e.j);
  return acc;
}

double max_abs_entry(const std::vector<BlockEntry>& es) {
  double m = 0.0;
  for (const BlockEntry& e : es) m = std::max(m, std::abs(e.v));
  return m;
}

// Alias-safe (A + A^T)/2; writing `a = a + a.transpose()` in place corrupts
// the result.
MatrixXd symmetrized(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

struct Point {
  std::vector<MatrixXd> X, S;
  VectorXd y, f;
};

struct ResidualState {
  VectorXd rp;                 // b - A(X) - D f
  std::vector<MatrixXd> Rd;    // C - A*(y) - S
  VectorXd rf;                 // c_f - D' y
  double pobj = 0, dobj = 0, comp = 0;
  double rel_p = 0, rel_d = 0, rel_g = 0;
};

class Workspace {
 public:
  Workspace(const SdpProblem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg) {
    K_ = int(p.block_dims.size());
    M_ = int(p.rows.size());
    for (int r = 0; r < M_; ++r) {
      bool has_block = false;
      for (const auto& [k, es] : p.rows[r].block_terms)
        if (!es.empty()) has_block = true;
      if (has_block)
        coupled_.push_back(r);
      else if (!p.rows[r].free_terms.empty())
        pure_free_.push_back(r);
      else if (std::abs(p.rows[r].rhs) > 1e-12)
        throw std::invalid_argument("structurally inconsistent equality constraint (empty row with nonzero right-hand side)");
      // all-zero rows with zero rhs are kept out of both lists
    }
    b_ = VectorXd::Zero(M_);
    for (int r = 0; r < M_; ++r) b_[r] = p.rows[r].rhs;
    norm_b_ = std::max(1.0, b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
    double cmax = p.objective_free.size() ? p.objective_free.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& es : p.objective_blocks) cmax = std::max(cmax, max_abs_entry(es));
    norm_c_ = std::max(1.0, cmax);
    total_dim_ = 0;
    for (int d : p.block_dims) total_dim_ += d;
  }

  double b_abs() const { return b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0; }
  double c_abs() const {
    double cmax = p_.objective_free.size() ? p_.objective_free.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& es : p_.objective_blocks) cmax = std::max(cmax, max_abs_entry(es));
    return cmax;
  }

  ResidualState residuals(const Point& pt) const {
    ResidualState st;
    st.rp = b_;
    for (int r = 0; r < M_; ++r) {
      double ax = 0.0;
      for (const auto& [k, es] : p_.rows[r].block_terms) ax += sparse_ip(es, pt.X[k]);
      for (const auto& [v, c] : p_.rows[r].free_terms) ax += c * pt.f[v];
      st.rp[r] -= ax;
    }
    st.Rd.resize(K_);
    for (int k = 0; k < K_; ++k) {
      MatrixXd asy = MatrixXd::Zero(p_.block_dims[k], p_.block_dims[k]);
      for (int r = 0; r < M_; ++r)
        for (const auto& [bk, es] : p_.rows[r].block_terms)
          if (bk == k)
            for (const BlockEntry& e : es) {
              asy(e.i, e.j) += pt.y[r] * e.v;
              if (e.i != e.j) asy(e.j, e.i) += pt.y[r] * e.v;
            }
      st.Rd[k] = densify(p_.objective_blocks[k], p_.block_dims[k]) - asy - pt.S[k];
    }
    st.rf = p_.objective_free;
    for (int r = 0; r < M_; ++r)
      for (const auto& [v, c] : p_.rows[r].free_terms) st.rf[v] -= c * pt.y[r];
    st.pobj = p_.objective_free.size() ? p_.objective_free.dot(pt.f) : 0.0;
    for (int k = 0; k < K_; ++k) st.pobj += sparse_ip(p_.objective_blocks[k], pt.X[k]);
    st.dobj = b_.dot(pt.y);
    st.comp = 0.0;
    for (int k = 0; k < K_; ++k) st.comp += (pt.X[k].array() * pt.S[k].array()).sum();
    double rd_max = st.rf.size() ? st.rf.cwiseAbs().maxCoeff() : 0.0;
    for (int k = 0; k < K_; ++k)
      if (p_.block_dims[k] > 0) rd_max = std::max(rd_max, st.Rd[k].cwiseAbs().maxCoeff());
    st.rel_p = (st.rp.size() ? st.rp.cwiseAbs().maxCoeff() : 0.0) / norm_b_;
    st.rel_d = rd_max / norm_c_;
    st.rel_g = std::abs(st.comp) / (1.0 + std::abs(st.pobj) + std::abs(st.dobj));
    return st;
  }

  const std::vector<int>& coupled() const { return coupled_; }
  const std::vector<int>& pure_free() const { return pure_free_; }
  int K() const { return K_; }
  int M() const { return M_; }
  int total_dim() const { return total_dim_; }
  const VectorXd& b() const { return b_; }

 private:
  const SdpProblem& p_;
  const SolverConfig& cfg_;
  int K_, M_, total_dim_;
  std::vector<int> coupled_, pure_free_;
  VectorXd b_;
  double norm_b_, norm_c_;
};

// Largest alpha with Lambda + alpha * Dhat staying PSD, computed from the
// smallest eigenvalue of Lambda^{-1/2} Dhat Lambda^{-1/2}.
double max_step(const VectorXd& lam, const MatrixXd& dhat) {
  int m = int(lam.size());
  MatrixXd T(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T(i, j) = dhat(i, j) / std::sqrt(lam[i] * lam[j]);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  if (lo >= -1e-18) return 1e18;
  return -1.0 / lo;
}

}  // namespace

SdpSolution sdp_solve(const SdpProblem& p, const SolverConfig& cfg) {
  const int K = int(p.block_dims.size());
  const int M = int(p.rows.size());
  const int F = p.num_free;
  for (const auto& row : p.rows) {
    for (const auto& [k, es] : row.block_terms) {
      if (k < 0 || k >= K) throw std::invalid_argument("row references a missing block");
      for (const BlockEntry& e : es)
        if (e.i < 0 || e.j < e.i || e.j >= p.block_dims[k])
          throw std::invalid_argument("block entry out of range or not upper-triangular");
    }
    for (const auto& [v, c] : row.free_terms)
      if (v < 0 || v >= F) throw std::invalid_argument("row references a missing free variable");
  }

  Workspace ws(p, cfg);
  SdpSolution sol;
  sol.X.resize(K);
  sol.S.resize(K);

  double alpha0 = 1.0 + std::max(ws.b_abs(), ws.c_abs());
  Point pt;
  pt.X.resize(K);
  pt.S.resize(K);
  for (int k = 0; k < K; ++k) {
    pt.X[k] = alpha0 * MatrixXd::Identity(p.block_dims[k], p.block_dims[k]);
    pt.S[k] = pt.X[k];
  }
  pt.y = VectorXd::Zero(M);
  pt.f = VectorXd::Zero(F);

  const std::vector<int>& E = ws.coupled();
  const std::vector<int>& Fr = ws.pure_free();
  const int nE = int(E.size()), nF = int(Fr.size());
  const double sum_dims = std::max(1, ws.total_dim());

  // Dense row data and the row Gram factorization for projecting Newton
  // steps back onto the primal equations. The scaled-space round trip leaks
  // noise into the primal part of a direction exactly when the scaling is
  // most extreme, and an unprojected step then drags the iterate off the
  // constraint plane as the gap closes.
  const int nR = nE + nF;
  std::vector<int> prow(nR);
  for (int i = 0; i < nE; ++i) prow[i] = E[i];
  for (int i = 0; i < nF; ++i) prow[nE + i] = Fr[i];
  std::vector<std::vector<std::pair<int, MatrixXd>>> rowmats(nR);
  std::vector<VectorXd> rowfree(nR);
  for (int a = 0; a < nR; ++a) {
    const auto& row = p.rows[prow[a]];
    for (const auto& [k, es] : row.block_terms)
      if (!es.empty()) rowmats[a].emplace_back(k, densify(es, p.block_dims[k]));
    rowfree[a] = VectorXd::Zero(F);
    for (const auto& [v, c] : row.free_terms) rowfree[a][v] += c;
  }
  MatrixXd rowgram = MatrixXd::Zero(nR, nR);
  for (int a = 0; a < nR; ++a)
    for (int b = a; b < nR; ++b) {
      double acc = rowfree[a].dot(rowfree[b]);
      for (const auto& [ka, Ma] : rowmats[a])
        for (const auto& [kb, Mb] : rowmats[b])
          if (ka == kb) acc += (Ma.array() * Mb.array()).sum();
      rowgram(a, b) = acc;
      rowgram(b, a) = acc;
    }
  rowgram.diagonal().array() += 1e-12 * std::max(1.0, rowgram.diagonal().maxCoeff());
  Eigen::LDLT<MatrixXd> rowgram_ldlt(rowgram);

  // The endgame on degenerate problems can spoil an excellent iterate, so
  // the best point seen (by worst relative residual) is kept and returned.
  Point best_pt = pt;
  ResidualState best_rs;
  double best_score = std::numeric_limits<double>::infinity();
  auto score_of = [](const ResidualState& rs) {
    return std::max({rs.rel_p, rs.rel_d, rs.rel_g});
  };

  auto finish = [&](SolveStatus st, int iter) {
    const bool usable = best_score < std::numeric_limits<double>::infinity();
    Point out = usable ? best_pt : pt;
    // Rows that touch only free variables are exactly solvable in f, and
    // free variables carry no cone constraint, so a closing minimum-norm
    // correction finishes off whatever residual the cone-limited step
    // lengths left on them.
    if (F > 0 && nF > 0) {
      ResidualState r0 = ws.residuals(out);
      MatrixXd Dg(nF, nF);
      VectorXd rpf(nF);
      for (int a = 0; a < nF; ++a) {
        rpf[a] = r0.rp[Fr[a]];
        for (int b = a; b < nF; ++b) {
          double acc = rowfree[nE + a].dot(rowfree[nE + b]);
          Dg(a, b) = acc;
          Dg(b, a) = acc;
        }
      }
      Dg.diagonal().array() += 1e-14 * std::max(1.0, Dg.diagonal().maxCoeff());
      VectorXd mult = Dg.ldlt().solve(rpf);
      if (mult.allFinite()) {
        VectorXd df = VectorXd::Zero(F);
        for (int a = 0; a < nF; ++a) df += mult[a] * rowfree[nE + a];
        out.f += df;
        if (ws.residuals(out).rel_p > 3.0 * r0.rel_p) out.f -= df;
      }
    }
    // What residual remains sits on the cone rows. The minimum-norm
    // correction in the metric of the returned X is X A*(mult) X, which for
    // a scaled norm rho < 1 cannot push X outside the cone, so as much of it
    // is applied as that bound allows.
    if (nE > 0) {
      ResidualState r1 = ws.residuals(out);
      MatrixXd MsX = MatrixXd::Zero(nE, nE);
      std::vector<std::vector<std::pair<int, MatrixXd>>> xdx(nE);
      for (int a = 0; a < nE; ++a)
        for (const auto& [k, Ma] : rowmats[a])
          xdx[a].emplace_back(k, MatrixXd(out.X[k] * Ma * out.X[k]));
      for (int a = 0; a < nE; ++a)
        for (int b = 0; b < nE; ++b) {
          double acc = 0.0;
          for (const auto& [ka, Ta] : xdx[a])
            for (const auto& [kb, Mb] : rowmats[b])
              if (ka == kb) acc += (Ta.array() * Mb.array()).sum();
          MsX(a, b) = acc;
        }
      MsX = symmetrized(MsX);
      MsX.diagonal().array() += 1e-13 * std::max(1.0, MsX.diagonal().maxCoeff());
      VectorXd qe(nE);
      for (int a = 0; a < nE; ++a) qe[a] = r1.rp[E[a]];
      VectorXd mult = MsX.ldlt().solve(qe);
      if (mult.allFinite()) {
        double rho2 = mult.dot(MsX * mult);
        double t = rho2 > 0 ? std::min(1.0, 0.5 / std::sqrt(rho2)) : 0.0;
        if (t > 0) {
          std::vector<MatrixXd> saved = out.X;
          for (int a = 0; a < nE; ++a)
            for (const auto& [k, Ta] : xdx[a]) out.X[k] += (t * mult[a]) * Ta;
          for (int k = 0; k < K; ++k) out.X[k] = symmetrized(out.X[k]);
          if (ws.residuals(out).rel_p > r1.rel_p) out.X = saved;
        }
      }
    }
    const ResidualState rs = ws.residuals(out);
    if (st != SolveStatus::InfeasibleSuspected) {
      if (rs.rel_p <= cfg.tol_feas && rs.rel_d <= cfg.tol_feas && rs.rel_g <= cfg.tol_gap)
        st = SolveStatus::Optimal;
      else if (rs.rel_p <= cfg.tol_feas)
        st = SolveStatus::Feasible;
    }
    sol.status = st;
    sol.X = out.X;
    sol.S = out.S;
    sol.y = out.y;
    sol.f = out.f;
    sol.primal_obj = rs.pobj;
    sol.dual_obj = rs.dobj;
    sol.iterations = iter;
    return sol;
  };

  double best_relp = std::numeric_limits<double>::infinity();
  int stalled_iters = 0;

  for (int iter = 0;; ++iter) {
    ResidualState rs = ws.residuals(pt);
    sol.objective_history.emplace_back(rs.pobj, rs.dobj);
    if (!std::isfinite(rs.pobj) || !std::isfinite(rs.dobj) || !std::isfinite(rs.comp))
      return finish(SolveStatus::NumericalTrouble, iter);
    if (score_of(rs) < best_score) {
      best_score = score_of(rs);
      best_pt = pt;
      best_rs = rs;
    }
    if (rs.rel_p <= cfg.tol_feas && rs.rel_d <= cfg.tol_feas && rs.rel_g <= cfg.tol_gap)
      return finish(SolveStatus::Optimal, iter);
    // Once a near-solution has been found, residual growth means the Newton
    // systems have gone bad; stop and keep the good point.
    if (best_score <= 1e4 * std::max(cfg.tol_feas, cfg.tol_gap) &&
        score_of(rs) > 50.0 * best_score)
      return finish(SolveStatus::NumericalTrouble, iter);
    if (rs.dobj > 1e10)
      return finish(SolveStatus::InfeasibleSuspected, iter);
    // Infeasibility heuristic: count iterations that sit above the primal
    // residual floor without improving it. Iterations spent below the floor
    // are a feasible endgame, not evidence of infeasibility.
    if (rs.rel_p < 0.99 * best_relp) {
      best_relp = rs.rel_p;
      stalled_iters = 0;
    } else if (rs.rel_p > 100.0 * cfg.tol_feas) {
      ++stalled_iters;
    }
    if (stalled_iters >= 30)
      return finish(SolveStatus::InfeasibleSuspected, iter);
    if (iter >= cfg.max_iter) return finish(SolveStatus::IterationLimit, iter);

    // Nesterov-Todd scaling per block.
    std::vector<MatrixXd> G(K), Ginv(K), W(K);
    std::vector<VectorXd> lam(K);
    bool factor_ok = true;
    for (int k = 0; k < K && factor_ok; ++k) {
      int m = p.block_dims[k];
      Eigen::LLT<MatrixXd> lltx(pt.X[k]);
      Eigen::LLT<MatrixXd> llts(pt.S[k]);
      if (lltx.info() != Eigen::Success || llts.info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      MatrixXd L = lltx.matrixL();
      MatrixXd R = llts.matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(R.transpose() * L,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
      lam[k] = svd.singularValues();
      if (lam[k].size() > 0 && lam[k].minCoeff() <= 0.0) {
        factor_ok = false;
        break;
      }
      MatrixXd V = svd.matrixV();
      G[k] = L * V;
      for (int j = 0; j < m; ++j) G[k].col(j) /= std::sqrt(lam[k][j]);
      W[k] = G[k] * G[k].transpose();
      Ginv[k] = V.transpose() * L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m, m));
      for (int j = 0; j < m; ++j) Ginv[k].row(j) *= std::sqrt(lam[k][j]);
    }
    if (!factor_ok) {
      return finish(SolveStatus::NumericalTrouble, iter);
    }

    // Schur complement over the block-coupled rows.
    std::vector<std::vector<MatrixXd>> WAW(nE);  // per coupled row, per block
    for (int pi = 0; pi < nE; ++pi) {
      WAW[pi].assign(K, MatrixXd());
      for (const auto& [k, es] : p.rows[E[pi]].block_terms) {
        MatrixXd A = densify(es, p.block_dims[k]);
        WAW[pi][k] = W[k] * A * W[k];
      }
    }
    MatrixXd Ms = MatrixXd::Zero(nE, nE);
    for (int pi = 0; pi < nE; ++pi)
      for (int qi = 0; qi < nE; ++qi) {
        double acc = 0.0;
        for (const auto& [k, es] : p.rows[E[qi]].block_terms)
          if (WAW[pi][k].size() > 0) acc += sparse_ip(es, WAW[pi][k]);
        Ms(pi, qi) = acc;
      }
    Ms = symmetrized(Ms);

    // One symmetric saddle system over (dy_E, dy_F, df). Cone blocks are
    // eliminated into the Schur matrix Ms; a quasi-definite shift keeps the
    // factorization stable and iterative refinement against the unshifted
    // matrix removes its bias.
    const int nK = nE + nF + F;
    MatrixXd K0 = MatrixXd::Zero(nK, nK);
    K0.topLeftCorner(nE, nE) = Ms;
    for (int pi = 0; pi < nE; ++pi)
      for (const auto& [v, c] : p.rows[E[pi]].free_terms) K0(pi, nE + nF + v) += c;
    for (int pi = 0; pi < nF; ++pi)
      for (const auto& [v, c] : p.rows[Fr[pi]].free_terms) K0(nE + pi, nE + nF + v) += c;
    K0.bottomLeftCorner(F, nE + nF) = K0.topRightCorner(nE + nF, F).transpose();
    // Ruiz equilibration: near the optimum the Schur block dwarfs the O(1)
    // constraint columns, and without balancing the small saddle pivots
    // drown in the factorization error.
    VectorXd dscale = VectorXd::Ones(nK);
    MatrixXd Keq = K0;
    for (int pass = 0; pass < 3; ++pass) {
      VectorXd s(nK);
      for (int i = 0; i < nK; ++i) {
        double rn = Keq.row(i).cwiseAbs().maxCoeff();
        s[i] = rn > 0 ? 1.0 / std::sqrt(rn) : 1.0;
      }
      Keq = s.asDiagonal() * Keq * s.asDiagonal();
      dscale = dscale.cwiseProduct(s);
    }
    const double reg = cfg.kkt_regularization;
    MatrixXd Kreg = Keq;
    for (int i = 0; i < nE; ++i) Kreg(i, i) += reg;
    for (int i = nE; i < nK; ++i) Kreg(i, i) -= reg;
    Eigen::FullPivLU<MatrixXd> kkt_lu(Kreg);
    auto kkt_solve = [&](const VectorXd& rhs) {
      auto eqsolve = [&](const VectorXd& r) -> VectorXd {
        return dscale.asDiagonal() * kkt_lu.solve(VectorXd(dscale.asDiagonal() * r));
      };
      VectorXd x = eqsolve(rhs);
      VectorXd bestx = x;
      double bestr = (rhs - K0 * x).cwiseAbs().maxCoeff();
      for (int pass = 0; pass < 3; ++pass) {
        VectorXd r = rhs - K0 * x;
        x += eqsolve(r);
        double rn = (rhs - K0 * x).cwiseAbs().maxCoeff();
        if (!(rn < bestr)) {
          x = bestx;
          break;
        }
        bestr = rn;
        bestx = x;
      }
      return bestx;
    };

    // Solves the Newton system for a given scaled complementarity target.
    auto direction = [&](const std::vector<MatrixXd>& Rtil, VectorXd& dy, VectorXd& df,
                         std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dS) -> bool {
      VectorXd rhs = VectorXd::Zero(nK);
      std::vector<MatrixXd> base(K);
      for (int k = 0; k < K; ++k)
        base[k] = G[k] * Rtil[k] * G[k].transpose() - W[k] * rs.Rd[k] * W[k];
      for (int pi = 0; pi < nE; ++pi) {
        double acc = rs.rp[E[pi]];
        for (const auto& [k, es] : p.rows[E[pi]].block_terms) acc -= sparse_ip(es, base[k]);
        rhs[pi] = acc;
      }
      for (int pi = 0; pi < nF; ++pi) rhs[nE + pi] = rs.rp[Fr[pi]];
      rhs.tail(F) = rs.rf;
      VectorXd xsol = kkt_solve(rhs);
      if (!xsol.allFinite()) return false;
      dy = VectorXd::Zero(M);
      df = xsol.tail(F);
      for (int pi = 0; pi < nE; ++pi) dy[E[pi]] = xsol[pi];
      for (int pi = 0; pi < nF; ++pi) dy[Fr[pi]] = xsol[nE + pi];
      dS.resize(K);
      dX.resize(K);
      for (int k = 0; k < K; ++k) {
        MatrixXd asdy = MatrixXd::Zero(p.block_dims[k], p.block_dims[k]);
        for (int pi = 0; pi < nE; ++pi) {
          double yv = dy[E[pi]];
          if (yv == 0.0) continue;
          for (const auto& [bk, es] : p.rows[E[pi]].block_terms)
            if (bk == k)
              for (const BlockEntry& e : es) {
                asdy(e.i, e.j) += yv * e.v;
                if (e.i != e.j) asdy(e.j, e.i) += yv * e.v;
              }
        }
        dS[k] = rs.Rd[k] - asdy;
        dX[k] = base[k] + W[k] * asdy * W[k];
        dX[k] = symmetrized(dX[k]);
        dS[k] = symmetrized(dS[k]);
      }
      // Least-squares projection of (dX, df) onto the primal equations.
      // Only engaged once the iterate is close to primal feasible: there the
      // correction is at KKT-noise scale, far below the cone margin, and it
      // stops Schur evaluation noise from dragging the iterate off the
      // constraint plane as the gap closes. Applied early it would inject
      // that same noise at full magnitude into the direction instead.
      if (rs.rel_p < 1e-4) {
        VectorXd q(nR);
        for (int a = 0; a < nR; ++a) {
          double acc = rs.rp[prow[a]] - rowfree[a].dot(df);
          for (const auto& [k, Ma] : rowmats[a]) acc -= (Ma.array() * dX[k].array()).sum();
          q[a] = acc;
        }
        VectorXd lq = rowgram_ldlt.solve(q);
        if (lq.allFinite() && (nR == 0 || lq.cwiseAbs().maxCoeff() < 1e8)) {
          for (int a = 0; a < nR; ++a) {
            if (lq[a] == 0.0) continue;
            for (const auto& [k, Ma] : rowmats[a]) dX[k] += lq[a] * Ma;
            df += lq[a] * rowfree[a];
          }
        }
      }
      return true;
    };

    // Predictor: target -Lambda.
    std::vector<MatrixXd> Rtil(K);
    for (int k = 0; k < K; ++k) {
      Rtil[k] = MatrixXd::Zero(p.block_dims[k], p.block_dims[k]);
      Rtil[k].diagonal() = -lam[k];
    }
    VectorXd dy, df;
    std::vector<MatrixXd> dX, dS;
    if (!direction(Rtil, dy, df, dX, dS)) {
      return finish(SolveStatus::NumericalTrouble, iter);
    }

    double mu = rs.comp / sum_dims;
    // Step lengths come from the actual directions pulled into scaled space,
    // so the primal projection inside direction() is accounted for.
    std::vector<MatrixXd> dXhat(K), dShat(K);
    double ap = 1e18, ad = 1e18;
    for (int k = 0; k < K; ++k) {
      dShat[k] = G[k].transpose() * dS[k] * G[k];
      dShat[k] = symmetrized(dShat[k]);
      dXhat[k] = Ginv[k] * dX[k] * Ginv[k].transpose();
      dXhat[k] = symmetrized(dXhat[k]);
      ap = std::min(ap, max_step(lam[k], dXhat[k]));
      ad = std::min(ad, max_step(lam[k], dShat[k]));
    }
    double ap_aff = std::min(1.0, cfg.step_fraction * ap);
    double ad_aff = std::min(1.0, cfg.step_fraction * ad);

    double comp_aff = 0.0;
    for (int k = 0; k < K; ++k) {
      MatrixXd Xa = MatrixXd(lam[k].asDiagonal()) + ap_aff * dXhat[k];
      MatrixXd Sa = MatrixXd(lam[k].asDiagonal()) + ad_aff * dShat[k];
      comp_aff += (Xa.array() * Sa.array()).sum();
    }
    double mu_aff = comp_aff / sum_dims;
    double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);

    // Corrector: sigma*mu*I - Lambda^2 - H(dXhat_aff * dShat_aff).
    for (int k = 0; k < K; ++k) {
      int m = p.block_dims[k];
      MatrixXd cross = dXhat[k] * dShat[k];
      cross = symmetrized(cross);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double rhs = -cross(i, j);
          if (i == j) rhs += sigma * mu - lam[k][i] * lam[k][i];
          Rtil[k](i, j) = 2.0 * rhs / (lam[k][i] + lam[k][j]);
        }
    }
    if (!direction(Rtil, dy, df, dX, dS)) {
      return finish(SolveStatus::NumericalTrouble, iter);
    }
    ap = 1e18;
    ad = 1e18;
    for (int k = 0; k < K; ++k) {
      dShat[k] = G[k].transpose() * dS[k] * G[k];
      dShat[k] = symmetrized(dShat[k]);
      dXhat[k] = Ginv[k] * dX[k] * Ginv[k].transpose();
      dXhat[k] = symmetrized(dXhat[k]);
      ap = std::min(ap, max_step(lam[k], dXhat[k]));
      ad = std::min(ad, max_step(lam[k], dShat[k]));
    }
    double step_p = std::min(1.0, cfg.step_fraction * ap);
    double step_d = std::min(1.0, cfg.step_fraction * ad);
    if (step_p < 1e-10 && step_d < 1e-10) {
      return finish(SolveStatus::NumericalTrouble, iter);
    }
    // Lopsided steps can grow the complementarity: with the primal pinned at
    // the cone boundary, repeated full dual steps send mu and the dual
    // objective off to infinity. When the pair would not shrink mu, a common
    // step length restores the guaranteed decrease.
    auto mu_at = [&](double a, double b) {
      double acc = 0.0;
      for (int k = 0; k < K; ++k) {
        MatrixXd Xa = MatrixXd(lam[k].asDiagonal()) + a * dXhat[k];
        MatrixXd Sa = MatrixXd(lam[k].asDiagonal()) + b * dShat[k];
        acc += (Xa.array() * Sa.array()).sum();
      }
      return acc / sum_dims;
    };
    if (mu_at(step_p, step_d) > (1.0 - 0.01 * std::min(step_p, step_d)) * mu) {
      double common = std::min(step_p, step_d);
      if (mu_at(common, common) < mu_at(step_p, step_d)) {
        step_p = common;
        step_d = common;
      }
    }

    for (int k = 0; k < K; ++k) {
      pt.X[k] += step_p * dX[k];
      pt.S[k] += step_d * dS[k];
    }
    pt.f += step_p * df;
    pt.y += step_d * dy;

    if (cfg.verbose) {
      std::printf(
          "iter %3d  pobj % .6e  dobj % .6e  relp %.2e  reld %.2e  gap %.2e  step %.2f/%.2f"
          "  mu %.2e  sig %.2e  ap %.2e  ad %.2e\n",
          iter, rs.pobj, rs.dobj, rs.rel_p, rs.rel_d, rs.rel_g, step_p, step_d, mu, sigma, ap, ad);
    }
  }
}

Residuals kkt_residuals(const SdpProblem& p, const SdpSolution& s) {
  SolverConfig cfg;
  Workspace ws(p, cfg);
  Point pt{s.X, s.S, s.y, s.f};
  ResidualState rs = ws.residuals(pt);
  return Residuals{rs.rel_p, rs.rel_d, rs.rel_g};
}

}  // namespace sosineq
