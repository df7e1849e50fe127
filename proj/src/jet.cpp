#include "sosineq/jet.hpp"

#include <stdexcept>

namespace sosineq {

JetSpec jet_basis(int n, int theta) {
  if (n < 1 || theta < 1)
    throw std::invalid_argument("jet_basis requires n >= 1 and theta >= 1");
  return JetSpec{n, theta};
}

int SquaredBasis::index(int a, int b) const {
  if (a > b) std::swap(a, b);
  int L = jet.dim();
  return a * L - a * (a - 1) / 2 + (b - a);
}

SquaredBasis squared_basis(const JetSpec& jet) {
  SquaredBasis sb;
  sb.jet = jet;
  int L = jet.dim();
  sb.pairs.reserve(size_t(L) * (L + 1) / 2);
  for (int a = 0; a < L; ++a)
    for (int b = a; b < L; ++b) sb.pairs.emplace_back(a, b);
  return sb;
}

Eigen::MatrixXd derivative_map(int n, int theta) {
  if (theta < 1) throw std::invalid_argument("derivative_map requires theta >= 1");
  JetSpec inner{n, theta - 1};
  JetSpec outer{n, theta};
  SquaredBasis in = squared_basis(inner);
  SquaredBasis out = squared_basis(outer);
  // An order-(theta-1) coordinate (var i, order j) sits at a different flat
  // index in the order-theta jet; raise(a) is that index, bumped by one order.
  auto lift = [&](int a) { return outer.coord(inner.var_of(a), inner.order_of(a)); };
  auto raise = [&](int a) { return outer.coord(inner.var_of(a), inner.order_of(a) + 1); };
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(in.size(), out.size());
  for (int k = 0; k < in.size(); ++k) {
    auto [a, b] = in.pairs[k];
    C(k, out.index(raise(a), lift(b))) += 1.0;
    C(k, out.index(lift(a), raise(b))) += 1.0;
  }
  return C;
}

PolyMat quadform_from_squares(const SquaredBasis& basis, const std::vector<Poly>& coeffs) {
  if (int(coeffs.size()) != basis.size())
    throw std::invalid_argument("coefficient count does not match squared basis size");
  int L = basis.jet.dim();
  PolyMat G(L, L);
  for (int k = 0; k < basis.size(); ++k) {
    auto [a, b] = basis.pairs[k];
    if (a == b) {
      G(a, a) = G(a, a) + coeffs[k];
    } else {
      Poly half = 0.5 * coeffs[k];
      G(a, b) = G(a, b) + half;
      G(b, a) = G(b, a) + half;
    }
  }
  return G;
}

std::vector<Poly> squares_from_quadform(const SquaredBasis& basis, const PolyMat& G) {
  if (G.rows() != basis.jet.dim() || G.cols() != basis.jet.dim())
    throw std::invalid_argument("matrix dimension does not match jet");
  std::vector<Poly> coeffs(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    auto [a, b] = basis.pairs[k];
    coeffs[k] = a == b ? G(a, a) : G(a, b) + G(b, a);
  }
  return coeffs;
}

PolyMat multiplier_form(int n, int theta, const std::vector<Poly>& h) {
  JetSpec inner{n, theta - 1};
  JetSpec outer{n, theta};
  SquaredBasis in = squared_basis(inner);
  SquaredBasis out = squared_basis(outer);
  if (int(h.size()) != in.size())
    throw std::invalid_argument("multiplier count does not match squared basis size");
  Eigen::MatrixXd C = derivative_map(n, theta);
  auto lift = [&](int a) { return outer.coord(inner.var_of(a), inner.order_of(a)); };
  std::vector<Poly> comb(out.size());
  for (int k = 0; k < in.size(); ++k) {
    auto [a, b] = in.pairs[k];
    int embedded = out.index(lift(a), lift(b));
    comb[embedded] = comb[embedded] + h[k].derivative();
    for (int c = 0; c < out.size(); ++c)
      if (C(k, c) != 0.0) comb[c] = comb[c] + C(k, c) * h[k];
  }
  return quadform_from_squares(out, comb);
}

}  // namespace sosineq
