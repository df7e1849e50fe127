#pragma once
// Lowers a sum-of-squares program to a block semidefinite program.
//
// Each matrix inequality T(x) >= 0 on [0,1] is certified through the
// decomposition T = Q_main-expansion + x(1-x) * Q_loc-expansion, where both
// Gram matrices are indexed jet-major: position (r, p) = r*(d+1)+p pairs the
// r-th supported jet coordinate with the p-th basis polynomial. Jet
// coordinates whose diagonal entry of T is structurally zero are dropped from
// the Gram support; their matching rows survive as free-variable-only
// equalities. Matching is done coefficient-wise in the monomial basis for
// low degrees and the Chebyshev basis on [0,1] once products exceed degree 12.
//
// Block order in the produced problem: for each SOS constraint in order, its
// main Gram block then its localized block; afterwards one 1x1 slack block per
// linear inequality constraint.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sosineq/program.hpp"
#include "sosineq/sdp.hpp"

namespace sosineq {

struct GramLayout {
  std::string name;
  int m = 0;                  // full side length of T
  std::vector<int> support;   // kept jet coordinates, ascending
  int d_main = 0;             // basis degree of the main Gram block
  int d_loc = 0;              // basis degree of the localized Gram block
  Basis basis = Basis::Monomial;
  int block_main = -1;        // block indices in the SdpProblem, -1 if empty
  int block_loc = -1;

  int dim_main() const { return int(support.size()) * (d_main + 1); }
  int dim_loc() const { return int(support.size()) * (d_loc + 1); }
};

struct SosAssembly {
  SdpProblem sdp;
  std::vector<GramLayout> grams;
};

// Builds the SDP. Throws std::invalid_argument if the program has no SOS
// constraints or a constraint references an unknown variable.
SosAssembly assemble_sdp(const SosProgram& prog);

// Expands Gram matrices back into the m x m polynomial matrix they represent,
// in the layout's basis. Entries involving dropped jet coordinates are zero.
PolyMat gram_expansion(const GramLayout& layout, const Eigen::MatrixXd& q_main,
                       const Eigen::MatrixXd& q_loc);

// The localizer x(1-x) expressed in the given basis.
Poly localizer_poly(Basis basis);

}  // namespace sosineq
