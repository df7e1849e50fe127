// Boundary conditions as linear constraints on the stacked endpoint jet,
// classification of each squared boundary monomial on the constraint kernel,
// and the resulting sign conditions on multiplier endpoint values.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sosineq/jet.hpp"

namespace sosineq {

enum class Rel { Eq, Le, Ge };

// Either a homogeneous pin d^order u_var(endpoint) = 0, or a periodic link
// identifying all trace derivatives of one variable across the endpoints.
struct BoundaryAtom {
  bool periodic = false;
  int var = 0;
  int order = 0;     // pin only
  int endpoint = 0;  // pin only, 0 or 1
};

// B acts on the stacked vector [v(1); v(0)] of the trace jet (order theta-1
// when the integrand lives on the order-theta jet); endpoint 1 block first.
struct BoundarySpec {
  JetSpec jet;
  Eigen::MatrixXd B;
  Eigen::MatrixXd kernel;  // columns span ker(B)
};

BoundarySpec boundary_matrix(const JetSpec& trace_jet, const std::vector<BoundaryAtom>& atoms);

enum class EndpointTag { Vanishes, Square, Indefinite };

struct EndpointClassification {
  SquaredBasis basis;                 // over the trace jet
  std::vector<EndpointTag> at1, at0;  // per pair
  std::vector<bool> linked;          // q_k(1) == q_k(0) on ker(B)
};

EndpointClassification boundary_classify(const BoundarySpec& spec);

// coeff1 * h_k(1) + coeff0 * h_k(0)  rel  0
struct EndpointConstraint {
  int pair;
  Rel rel;
  double coeff1;
  double coeff0;
};

// Sufficient linear conditions on the multiplier endpoint values making
// sum_k [h_k(1) q_k(1) - h_k(0) q_k(0)] <= 0 for every boundary jet in ker(B).
std::vector<EndpointConstraint> multiplier_constraints(const EndpointClassification& cls);

}  // namespace sosineq
