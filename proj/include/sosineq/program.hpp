// Decision-variable pool, affine polynomial matrices T = F + H, multiplier
// templates with their endpoint sign constraints, and the assembled
// SOS-feasibility program description.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sosineq/boundary.hpp"
#include "sosineq/polymatrix.hpp"

namespace sosineq {

class VarPool {
 public:
  int add(const std::string& name);
  int id(const std::string& name) const;  // -1 if absent
  int size() const { return int(names_.size()); }
  const std::string& name(int id) const { return names_[id]; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> ids_;
};

// constant + sum_v value_v * terms[v], all parts symmetric and same size.
struct AffinePolyMat {
  PolyMat constant;
  std::map<int, PolyMat> terms;

  explicit AffinePolyMat(int m = 0) : constant(m, m) {}
  int dim() const { return constant.rows(); }

  void add_constant(int i, int j, const Poly& p);
  void add_term(int var, int i, int j, const Poly& p);
  void add_term(int var, const PolyMat& m);
  PolyMat eval(const Eigen::VectorXd& values) const;
  int max_degree() const;
};

struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;  // (var, coeff)
  Rel rel = Rel::Eq;
  double rhs = 0.0;
  std::string tag;  // "endpoint", "normalization", "floor", ...
};

// One polynomial multiplier per squared-basis pair of the trace jet, with
// one decision variable per monomial coefficient.
struct MultiplierTemplate {
  JetSpec inner;  // order theta-1
  int deg_h = 0;
  std::vector<std::vector<int>> vars;         // per pair, coeff var ids
  std::vector<LinearConstraint> endpoint;     // admissibility constraints
};

MultiplierTemplate make_multiplier_template(VarPool& pool, int n, int theta, int deg_h,
                                            const std::vector<BoundaryAtom>& atoms,
                                            const std::string& prefix = "h");

// T = F + H(h) with H affine in the template's coefficient variables.
AffinePolyMat build_T(const AffinePolyMat& F, const MultiplierTemplate& tmpl);

// Evaluate one multiplier polynomial from a value assignment.
Poly multiplier_poly(const MultiplierTemplate& tmpl, int pair, const Eigen::VectorXd& values);

struct SosConstraintSpec {
  std::string name;
  AffinePolyMat T;
  int deg_N = 0;  // requested degree of the localizer SOS matrix
};

struct SosProgram {
  VarPool pool;
  std::vector<SosConstraintSpec> sos;
  std::vector<LinearConstraint> linear;
  std::vector<std::pair<int, double>> objective_min;  // minimize sum c*v
};

}  // namespace sosineq
