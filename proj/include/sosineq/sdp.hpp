// Standard-form semidefinite program with free scalar variables:
//   minimize    sum_k <C_k, X_k> + c_f' f
//   subject to  sum_k <A_rk, X_k> + d_r' f = b_r   (r = 1..M)
//               X_k PSD, f free.
// Symmetric coefficient matrices are stored as upper triangles; an
// off-diagonal stored value v stands for the symmetric pair (v, v), so
// <A, X> = sum_diag v*X_ii + 2*sum_offdiag v*X_ij.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sosineq {

struct BlockEntry {
  int i, j;  // i <= j
  double v;
};

struct SdpProblem {
  std::vector<int> block_dims;
  int num_free = 0;

  std::vector<std::vector<BlockEntry>> objective_blocks;  // per block, may be empty
  Eigen::VectorXd objective_free;

  struct Row {
    std::vector<std::pair<int, std::vector<BlockEntry>>> block_terms;
    std::vector<std::pair<int, double>> free_terms;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  void set_dims(std::vector<int> dims, int nfree);
  std::string dump() const;  // plain-text form, one section per field
};

enum class SolveStatus { Optimal, Feasible, IterationLimit, NumericalTrouble, InfeasibleSuspected };

std::string to_string(SolveStatus s);

struct SolverConfig {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  double kkt_regularization = 1e-12;
  bool verbose = false;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  std::vector<Eigen::MatrixXd> X, S;
  Eigen::VectorXd y, f;
  double primal_obj = 0.0, dual_obj = 0.0;
  int iterations = 0;
  // Per-iterate (primal objective, dual objective) trace, for audit.
  std::vector<std::pair<double, double>> objective_history;
};

SdpSolution sdp_solve(const SdpProblem& p, const SolverConfig& cfg = {});

struct Residuals {
  double primal = 0.0;  // relative equality violation
  double dual = 0.0;    // relative dual-feasibility violation
  double gap = 0.0;     // relative complementarity
};

Residuals kkt_residuals(const SdpProblem& p, const SdpSolution& s);

}  // namespace sosineq
