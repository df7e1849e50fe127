#include "sosineq/boundary.hpp"

#include <stdexcept>

namespace sosineq {

namespace {
constexpr double kClassifyTol = 1e-12;
}

BoundarySpec boundary_matrix(const JetSpec& trace_jet, const std::vector<BoundaryAtom>& atoms) {
  int L = trace_jet.dim();
  std::vector<Eigen::RowVectorXd> rows;
  auto pos = [&](int endpoint, int coord) { return (endpoint == 1 ? 0 : L) + coord; };
  for (const BoundaryAtom& a : atoms) {
    if (a.var < 0 || a.var >= trace_jet.n)
      throw std::invalid_argument("boundary condition names an unknown variable");
    if (a.periodic) {
      for (int j = 0; j <= trace_jet.theta; ++j) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * L);
        r(pos(1, trace_jet.coord(a.var, j))) = 1.0;
        r(pos(0, trace_jet.coord(a.var, j))) = -1.0;
        rows.push_back(r);
      }
    } else {
      if (a.order > trace_jet.theta)
        throw std::invalid_argument("boundary derivative order exceeds the trace jet");
      if (a.endpoint != 0 && a.endpoint != 1)
        throw std::invalid_argument("boundary endpoint must be 0 or 1");
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(2 * L);
      r(pos(a.endpoint, trace_jet.coord(a.var, a.order))) = 1.0;
      rows.push_back(r);
    }
  }
  BoundarySpec spec;
  spec.jet = trace_jet;
  spec.B.resize(rows.size(), 2 * L);
  for (size_t i = 0; i < rows.size(); ++i) spec.B.row(i) = rows[i];
  if (rows.empty()) {
    spec.kernel = Eigen::MatrixXd::Identity(2 * L, 2 * L);
    return spec;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  spec.kernel = svd.matrixV().rightCols(2 * L - rank);
  return spec;
}

EndpointClassification boundary_classify(const BoundarySpec& spec) {
  int L = spec.jet.dim();
  const Eigen::MatrixXd& Z = spec.kernel;
  EndpointClassification cls;
  cls.basis = squared_basis(spec.jet);
  int N = cls.basis.size();
  cls.at1.resize(N);
  cls.at0.resize(N);
  cls.linked.resize(N);
  for (int k = 0; k < N; ++k) {
    auto [a, b] = cls.basis.pairs[k];
    Eigen::MatrixXd M[2];
    for (int e : {0, 1}) {
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * L, 2 * L);
      int off = e == 1 ? 0 : L;
      if (a == b) {
        E(off + a, off + a) = 1.0;
      } else {
        E(off + a, off + b) = 0.5;
        E(off + b, off + a) = 0.5;
      }
      M[e] = Z.transpose() * E * Z;
      bool vanishes = M[e].size() == 0 || M[e].cwiseAbs().maxCoeff() <= kClassifyTol;
      EndpointTag tag = vanishes ? EndpointTag::Vanishes
                                 : (a == b ? EndpointTag::Square : EndpointTag::Indefinite);
      (e == 1 ? cls.at1 : cls.at0)[k] = tag;
    }
    cls.linked[k] =
        M[1].size() == 0 || (M[1] - M[0]).cwiseAbs().maxCoeff() <= kClassifyTol;
  }
  return cls;
}

std::vector<EndpointConstraint> multiplier_constraints(const EndpointClassification& cls) {
  std::vector<EndpointConstraint> out;
  for (int k = 0; k < cls.basis.size(); ++k) {
    EndpointTag t1 = cls.at1[k], t0 = cls.at0[k];
    if (t1 == EndpointTag::Vanishes && t0 == EndpointTag::Vanishes) continue;
    if (cls.linked[k]) {
      // q_k(1) = q_k(0) on the kernel, so only the difference of endpoint
      // values matters.
      Rel rel = t1 == EndpointTag::Square ? Rel::Le : Rel::Eq;
      out.push_back({k, rel, 1.0, -1.0});
      continue;
    }
    if (t1 == EndpointTag::Square) out.push_back({k, Rel::Le, 1.0, 0.0});
    if (t1 == EndpointTag::Indefinite) out.push_back({k, Rel::Eq, 1.0, 0.0});
    if (t0 == EndpointTag::Square) out.push_back({k, Rel::Ge, 0.0, 1.0});
    if (t0 == EndpointTag::Indefinite) out.push_back({k, Rel::Eq, 0.0, 1.0});
  }
  return out;
}

}  // namespace sosineq
