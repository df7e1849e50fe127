#include "sosineq/certify.hpp"

#include <algorithm>

namespace sosineq {

namespace {

PolyMat trimmed(const PolyMat& m) {
  PolyMat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = trim(m(i, j));
  return out;
}

}  // namespace

ProblemStatement statement_from_program(const SosProgram& prog, const std::string& kind,
                                        const std::string& description) {
  ProblemStatement st;
  st.kind = kind;
  st.description = description;
  st.variables = prog.pool.names();
  for (const SosConstraintSpec& sc : prog.sos) {
    StatementSos s;
    s.name = sc.name;
    s.m = sc.T.dim();
    s.deg_N = sc.deg_N;
    s.constant = trimmed(sc.T.constant);
    for (const auto& [var, mat] : sc.T.terms)
      s.terms.emplace_back(prog.pool.name(var), trimmed(mat));
    st.sos.push_back(std::move(s));
  }
  for (const LinearConstraint& lc : prog.linear) {
    StatementLinear s;
    s.rel = lc.rel;
    s.rhs = lc.rhs;
    s.tag = lc.tag;
    for (const auto& [var, c] : lc.terms) s.terms.emplace_back(prog.pool.name(var), c);
    st.linear.push_back(std::move(s));
  }
  return st;
}

Certificate certificate_from_solution(const SosProgram& prog, const SosAssembly& asmb,
                                      const SdpSolution& sol, const std::string& kind,
                                      const std::string& description) {
  Certificate cert;
  cert.kind = kind;
  cert.statement = statement_from_program(prog, kind, description);
  for (int v = 0; v < prog.pool.size(); ++v)
    cert.values[prog.pool.name(v)] = v < sol.f.size() ? sol.f[v] : 0.0;
  for (const GramLayout& gl : asmb.grams) {
    CertGram g;
    g.name = gl.name;
    g.m = gl.m;
    g.support = gl.support;
    g.d_main = gl.d_main;
    g.d_loc = gl.d_loc;
    g.basis = gl.basis;
    if (gl.block_main >= 0) g.q_main = sol.X[gl.block_main];
    if (gl.block_loc >= 0) g.q_loc = sol.X[gl.block_loc];
    cert.grams.push_back(std::move(g));
  }
  cert.solver_status = to_string(sol.status);
  cert.solver_iterations = sol.iterations;
  Residuals res = kkt_residuals(asmb.sdp, sol);
  cert.solver_primal_residual = res.primal;
  cert.solver_dual_residual = res.dual;
  cert.solver_gap = res.gap;
  stamp_fingerprint(cert);
  return cert;
}

}  // namespace sosineq
