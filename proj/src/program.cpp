#include "sosineq/program.hpp"

#include <stdexcept>

namespace sosineq {

int VarPool::add(const std::string& name) {
  if (ids_.count(name)) throw std::invalid_argument("duplicate decision variable: " + name);
  int id = int(names_.size());
  names_.push_back(name);
  ids_[name] = id;
  return id;
}

int VarPool::id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

void AffinePolyMat::add_constant(int i, int j, const Poly& p) {
  constant(i, j) = constant(i, j) + p;
}

void AffinePolyMat::add_term(int var, int i, int j, const Poly& p) {
  auto it = terms.find(var);
  if (it == terms.end()) it = terms.emplace(var, PolyMat(dim(), dim())).first;
  it->second(i, j) = it->second(i, j) + p;
}

void AffinePolyMat::add_term(int var, const PolyMat& m) {
  if (m.rows() != dim() || m.cols() != dim())
    throw std::invalid_argument("term dimension mismatch");
  auto it = terms.find(var);
  if (it == terms.end()) it = terms.emplace(var, PolyMat(dim(), dim())).first;
  it->second = it->second + m;
}

PolyMat AffinePolyMat::eval(const Eigen::VectorXd& values) const {
  PolyMat out = constant;
  for (const auto& [var, mat] : terms) {
    if (var < 0 || var >= values.size())
      throw std::invalid_argument("assignment does not cover decision variable");
    out = out + values[var] * mat;
  }
  return out;
}

int AffinePolyMat::max_degree() const {
  int d = constant.max_degree();
  for (const auto& [var, mat] : terms) d = std::max(d, mat.max_degree());
  return d;
}

MultiplierTemplate make_multiplier_template(VarPool& pool, int n, int theta, int deg_h,
                                            const std::vector<BoundaryAtom>& atoms,
                                            const std::string& prefix) {
  if (n < 1 || theta < 1) throw std::invalid_argument("multiplier template needs n >= 1, theta >= 1");
  MultiplierTemplate tmpl;
  tmpl.inner = JetSpec{n, theta - 1};
  tmpl.deg_h = deg_h;
  SquaredBasis basis = squared_basis(tmpl.inner);
  tmpl.vars.resize(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    auto [a, b] = basis.pairs[k];
    for (int t = 0; t <= deg_h; ++t) {
      std::string nm = prefix + "_" + std::to_string(a) + "_" + std::to_string(b) +
                       "_c" + std::to_string(t);
      tmpl.vars[k].push_back(pool.add(nm));
    }
  }
  BoundarySpec bspec = boundary_matrix(tmpl.inner, atoms);
  EndpointClassification cls = boundary_classify(bspec);
  for (const EndpointConstraint& ec : multiplier_constraints(cls)) {
    // h_k(1) = sum of monomial coefficients, h_k(0) = constant coefficient.
    LinearConstraint lc;
    lc.rel = ec.rel;
    lc.rhs = 0.0;
    lc.tag = "endpoint";
    for (int t = 0; t <= deg_h; ++t) {
      double c = ec.coeff1 + (t == 0 ? ec.coeff0 : 0.0);
      if (c != 0.0) lc.terms.emplace_back(tmpl.vars[ec.pair][t], c);
    }
    if (!lc.terms.empty()) tmpl.endpoint.push_back(lc);
  }
  return tmpl;
}

AffinePolyMat build_T(const AffinePolyMat& F, const MultiplierTemplate& tmpl) {
  JetSpec outer{tmpl.inner.n, tmpl.inner.theta + 1};
  if (F.dim() != outer.dim())
    throw std::invalid_argument("integrand dimension does not match multiplier jet");
  AffinePolyMat T = F;
  SquaredBasis basis = squared_basis(tmpl.inner);
  std::vector<Poly> unit(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    for (int t = 0; t <= tmpl.deg_h; ++t) {
      Poly::Vec c = Poly::Vec::Zero(t + 1);
      c[t] = 1.0;
      unit[k] = Poly(std::move(c));
      T.add_term(tmpl.vars[k][t], multiplier_form(outer.n, outer.theta, unit));
      unit[k] = Poly();
    }
  }
  return T;
}

Poly multiplier_poly(const MultiplierTemplate& tmpl, int pair, const Eigen::VectorXd& values) {
  Poly::Vec c(tmpl.deg_h + 1);
  for (int t = 0; t <= tmpl.deg_h; ++t) c[t] = values[tmpl.vars[pair][t]];
  return trim(Poly(std::move(c)));
}

}  // namespace sosineq
