// Dense univariate polynomials on [0,1] in monomial or shifted-Chebyshev basis.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sosineq {

enum class Basis { Monomial, Chebyshev01 };

namespace detail {

// Error-free transforms used by the basis conversions. Coefficient
// conversion between the monomial and Chebyshev bases is exponentially
// ill conditioned, so the intermediate accumulation is done in
// double-double precision and rounded once at the end.
struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  dd r = two_sum(s.hi, lo);
  return r;
}

inline dd dd_add(dd a, double b) { return dd_add(a, dd{b, 0.0}); }

inline dd dd_mul(dd a, double b) {
  dd p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  dd r = two_sum(p.hi, p.lo);
  return r;
}

}  // namespace detail

template <typename Scalar = double>
class Polynomial {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coef_(Vec::Zero(1)), basis_(Basis::Monomial) {}

  explicit Polynomial(Vec coeffs, Basis basis = Basis::Monomial)
      : coef_(std::move(coeffs)), basis_(basis) {
    if (coef_.size() == 0) coef_ = Vec::Zero(1);
  }

  static Polynomial constant(Scalar v, Basis basis = Basis::Monomial) {
    Vec c(1);
    c[0] = v;
    return Polynomial(std::move(c), basis);
  }

  // The coordinate function x itself.
  static Polynomial variable(Basis basis = Basis::Monomial) {
    Vec c(2);
    if (basis == Basis::Monomial) {
      c[0] = Scalar(0);
      c[1] = Scalar(1);
    } else {
      c[0] = Scalar(0.5);
      c[1] = Scalar(0.5);
    }
    return Polynomial(std::move(c), basis);
  }

  int degree() const { return int(coef_.size()) - 1; }
  Basis basis() const { return basis_; }
  const Vec& coeffs() const { return coef_; }

  Scalar coeff(int k) const {
    return (k >= 0 && k < coef_.size()) ? coef_[k] : Scalar(0);
  }

  bool is_zero(Scalar tol = Scalar(0)) const {
    return coef_.cwiseAbs().maxCoeff() <= tol;
  }

  Scalar operator()(Scalar x) const {
    if (basis_ == Basis::Monomial) {
      Scalar acc = Scalar(0);
      for (int k = int(coef_.size()) - 1; k >= 0; --k) acc = acc * x + coef_[k];
      return acc;
    }
    // Clenshaw on y = 2x - 1.
    Scalar y = Scalar(2) * x - Scalar(1);
    Scalar b1 = Scalar(0), b2 = Scalar(0);
    for (int k = int(coef_.size()) - 1; k >= 1; --k) {
      Scalar b = coef_[k] + Scalar(2) * y * b1 - b2;
      b2 = b1;
      b1 = b;
    }
    return coef_[0] + y * b1 - b2;
  }

  Polynomial derivative() const {
    int n = degree();
    if (n == 0) return Polynomial(Vec::Zero(1), basis_);
    Vec d(n);
    if (basis_ == Basis::Monomial) {
      for (int k = 1; k <= n; ++k) d[k - 1] = Scalar(k) * coef_[k];
      return Polynomial(std::move(d), basis_);
    }
    // Chebyshev derivative recurrence on [-1,1], then the factor 2 from y = 2x - 1.
    Vec work = Vec::Zero(n + 2);
    for (int k = n - 1; k >= 0; --k)
      work[k] = work[k + 2] + Scalar(2 * (k + 1)) * coef_[k + 1];
    work[0] *= Scalar(0.5);
    for (int k = 0; k < n; ++k) d[k] = Scalar(2) * work[k];
    return Polynomial(std::move(d), basis_);
  }

  Scalar integral01() const {
    Scalar acc = Scalar(0);
    if (basis_ == Basis::Monomial) {
      for (int k = 0; k <= degree(); ++k) acc += coef_[k] / Scalar(k + 1);
    } else {
      for (int k = 0; k <= degree(); k += 2)
        acc += coef_[k] / Scalar(1 - k * k);
    }
    return acc;
  }

 private:
  Vec coef_;
  Basis basis_;
};

using Poly = Polynomial<double>;

template <typename Scalar>
Polynomial<Scalar> trim(const Polynomial<Scalar>& p, Scalar tol = Scalar(1e-14)) {
  int n = p.degree();
  while (n > 0 && std::abs(p.coeff(n)) <= tol) --n;
  typename Polynomial<Scalar>::Vec c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = std::abs(p.coeff(k)) <= tol ? Scalar(0) : p.coeff(k);
  return Polynomial<Scalar>(std::move(c), p.basis());
}

template <typename Scalar>
Polynomial<Scalar> operator+(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  if (a.basis() != b.basis())
    throw std::invalid_argument("polynomial basis mismatch in addition");
  int n = std::max(a.degree(), b.degree());
  typename Polynomial<Scalar>::Vec c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = a.coeff(k) + b.coeff(k);
  return Polynomial<Scalar>(std::move(c), a.basis());
}

template <typename Scalar>
Polynomial<Scalar> operator-(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  if (a.basis() != b.basis())
    throw std::invalid_argument("polynomial basis mismatch in subtraction");
  int n = std::max(a.degree(), b.degree());
  typename Polynomial<Scalar>::Vec c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = a.coeff(k) - b.coeff(k);
  return Polynomial<Scalar>(std::move(c), a.basis());
}

template <typename Scalar>
Polynomial<Scalar> operator-(const Polynomial<Scalar>& a) {
  return Polynomial<Scalar>(-a.coeffs(), a.basis());
}

template <typename Scalar>
Polynomial<Scalar> operator*(Scalar s, const Polynomial<Scalar>& a) {
  return Polynomial<Scalar>(s * a.coeffs(), a.basis());
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& a, Scalar s) {
  return s * a;
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  if (a.basis() != b.basis())
    throw std::invalid_argument("polynomial basis mismatch in multiplication");
  int na = a.degree(), nb = b.degree();
  typename Polynomial<Scalar>::Vec c = Polynomial<Scalar>::Vec::Zero(na + nb + 1);
  if (a.basis() == Basis::Monomial) {
    for (int i = 0; i <= na; ++i)
      for (int j = 0; j <= nb; ++j) c[i + j] += a.coeff(i) * b.coeff(j);
  } else {
    // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2
    for (int i = 0; i <= na; ++i)
      for (int j = 0; j <= nb; ++j) {
        Scalar half = Scalar(0.5) * a.coeff(i) * b.coeff(j);
        c[i + j] += half;
        c[std::abs(i - j)] += half;
      }
  }
  return Polynomial<Scalar>(std::move(c), a.basis());
}

// Basis conversions (double precision interface, compensated internals).
Poly to_basis(const Poly& p, Basis target);

// Text form "c0 + c1*x + c2*x^2". Parsing accepts any term order and
// signs; printing emits ascending powers with nonzero coefficients.
Poly parse_polynomial(const std::string& text);
std::string to_string(const Poly& p);

}  // namespace sosineq
