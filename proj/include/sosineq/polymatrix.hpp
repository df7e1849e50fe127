// Dense matrices with polynomial entries, used for Gram-form integrands
// and pointwise positivity targets.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sosineq/polynomial.hpp"

namespace sosineq {

template <typename Scalar = double>
class PolyMatrix {
 public:
  using P = Polynomial<Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  PolyMatrix() : rows_(0), cols_(0) {}
  PolyMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

  static PolyMatrix zero(int rows, int cols) { return PolyMatrix(rows, cols); }

  static PolyMatrix identity(int n) {
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = P::constant(Scalar(1));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  P& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  const P& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  Mat eval(Scalar x) const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j)(x);
    return m;
  }

  PolyMatrix derivative() const {
    PolyMatrix m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).derivative();
    return m;
  }

  PolyMatrix transpose() const {
    PolyMatrix m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  int max_degree() const {
    int d = 0;
    for (const P& p : data_) d = std::max(d, trim(p).degree());
    return d;
  }

  bool is_zero(Scalar tol = Scalar(0)) const {
    for (const P& p : data_)
      if (!p.is_zero(tol)) return false;
    return true;
  }

 private:
  int rows_, cols_;
  std::vector<P> data_;
};

using PolyMat = PolyMatrix<double>;

template <typename Scalar>
PolyMatrix<Scalar> operator+(const PolyMatrix<Scalar>& a, const PolyMatrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("polynomial matrix shape mismatch");
  PolyMatrix<Scalar> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) + b(i, j);
  return m;
}

template <typename Scalar>
PolyMatrix<Scalar> operator-(const PolyMatrix<Scalar>& a, const PolyMatrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("polynomial matrix shape mismatch");
  PolyMatrix<Scalar> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) - b(i, j);
  return m;
}

template <typename Scalar>
PolyMatrix<Scalar> operator*(Scalar s, const PolyMatrix<Scalar>& a) {
  PolyMatrix<Scalar> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = s * a(i, j);
  return m;
}

template <typename Scalar>
PolyMatrix<Scalar> operator*(const Polynomial<Scalar>& p, const PolyMatrix<Scalar>& a) {
  PolyMatrix<Scalar> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = p * a(i, j);
  return m;
}

// Symmetric part (A + A^T)/2.
template <typename Scalar>
PolyMatrix<Scalar> symmetric_part(const PolyMatrix<Scalar>& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("symmetric_part needs a square matrix");
  PolyMatrix<Scalar> m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      m(i, j) = Scalar(0.5) * (a(i, j) + a(j, i));
  return m;
}

template <typename Scalar>
Scalar max_abs_coeff(const PolyMatrix<Scalar>& a) {
  Scalar m = Scalar(0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      m = std::max(m, a(i, j).coeffs().cwiseAbs().maxCoeff());
  return m;
}

}  // namespace sosineq
