// Jet coordinates (derivatives of the dependent variables), the basis of
// degree-2 monomials over them, the derivative matrix C, and conversions
// between monomial coefficient vectors and symmetric quadratic forms.
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sosineq/polymatrix.hpp"

namespace sosineq {

// Coordinate order is variable-major, derivative order ascending:
// (u_1, du_1, ..., d^theta u_1, u_2, ...), length n*(theta+1).
struct JetSpec {
  int n = 1;
  int theta = 1;

  int dim() const { return n * (theta + 1); }
  int coord(int var, int order) const { return var * (theta + 1) + order; }
  int var_of(int idx) const { return idx / (theta + 1); }
  int order_of(int idx) const { return idx % (theta + 1); }
};

JetSpec jet_basis(int n, int theta);

// All unordered pairs (i, j), i <= j, in lexicographic order; these index
// the degree-2 monomials z_i * z_j over the jet coordinates.
struct SquaredBasis {
  JetSpec jet;
  std::vector<std::pair<int, int>> pairs;

  int size() const { return int(pairs.size()); }
  int index(int a, int b) const;
};

SquaredBasis squared_basis(const JetSpec& jet);

// C with rows over squared_basis(n, theta-1) and columns over
// squared_basis(n, theta), satisfying d/dx of each degree-2 monomial of the
// order-(theta-1) jet = C times the degree-2 monomials of the order-theta jet.
Eigen::MatrixXd derivative_map(int n, int theta);

// Symmetric G with z^T G z = sum_k c_k q_k: diagonal pairs go on the
// diagonal, cross terms are split evenly between (i,j) and (j,i).
PolyMat quadform_from_squares(const SquaredBasis& basis, const std::vector<Poly>& coeffs);

// Inverse of quadform_from_squares for symmetric input.
std::vector<Poly> squares_from_quadform(const SquaredBasis& basis, const PolyMat& G);

// H(x) over the order-theta jet with
//   v^T H v = sum_k [h_k'(x) q_k + h_k(x) (C q)_k],
// h indexed by squared_basis(n, theta-1). Integrating v^T H v over [0,1]
// yields the endpoint difference sum_k [h_k(1) q_k(1) - h_k(0) q_k(0)].
PolyMat multiplier_form(int n, int theta, const std::vector<Poly>& h);

}  // namespace sosineq
