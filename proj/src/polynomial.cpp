#include "sosineq/polynomial.hpp"

#include <cctype>
#include <cstdio>
#include <vector>

namespace sosineq {

namespace {

using detail::dd;
using detail::dd_add;
using detail::dd_mul;

// Multiply a Chebyshev01 coefficient vector by x using
// x*T_j = T_{j-1}/4 + T_j/2 + T_{j+1}/4 (j >= 1), x*T_0 = T_0/2 + T_1/2,
// where T_k denotes the Chebyshev polynomial shifted to [0,1].
std::vector<dd> shift_by_x(const std::vector<dd>& c) {
  std::vector<dd> out(c.size() + 1);
  if (!c.empty()) {
    out[0] = dd_add(out[0], dd_mul(c[0], 0.5));
    out[1] = dd_add(out[1], dd_mul(c[0], 0.5));
  }
  for (size_t j = 1; j < c.size(); ++j) {
    out[j - 1] = dd_add(out[j - 1], dd_mul(c[j], 0.25));
    out[j] = dd_add(out[j], dd_mul(c[j], 0.5));
    out[j + 1] = dd_add(out[j + 1], dd_mul(c[j], 0.25));
  }
  return out;
}

Poly mono_to_cheb(const Poly& p) {
  // Horner in coefficient space: c <- x*c + a_k, from the top degree down.
  std::vector<dd> c;
  for (int k = p.degree(); k >= 0; --k) {
    if (!c.empty()) c = shift_by_x(c);
    if (c.empty()) c.resize(1);
    c[0] = dd_add(c[0], p.coeff(k));
  }
  Poly::Vec out(c.size());
  for (size_t i = 0; i < c.size(); ++i) out[i] = c[i].hi + c[i].lo;
  return Poly(std::move(out), Basis::Chebyshev01);
}

Poly cheb_to_mono(const Poly& p) {
  // Clenshaw with polynomial-valued accumulators:
  // b_k = c_k + (4x-2)*b_{k+1} - b_{k+2}, result c_0 + (2x-1)*b_1 - b_2.
  int n = p.degree();
  size_t cap = size_t(n) + 1;
  std::vector<dd> b1(cap), b2(cap), b(cap);
  auto combine = [&](double ck, double lin0, double lin1) {
    // b = ck + (lin0 + lin1*x)*b1 - b2
    for (size_t i = 0; i < cap; ++i) b[i] = dd{0.0, 0.0};
    b[0] = dd_add(b[0], ck);
    for (size_t i = 0; i < cap; ++i) {
      b[i] = dd_add(b[i], dd_mul(b1[i], lin0));
      if (i + 1 < cap) b[i + 1] = dd_add(b[i + 1], dd_mul(b1[i], lin1));
      b[i] = dd_add(b[i], dd_mul(b2[i], -1.0));
    }
    std::swap(b2, b1);
    std::swap(b1, b);
  };
  for (int k = n; k >= 1; --k) combine(p.coeff(k), -2.0, 4.0);
  combine(p.coeff(0), -1.0, 2.0);
  Poly::Vec out(cap);
  for (size_t i = 0; i < cap; ++i) out[i] = b1[i].hi + b1[i].lo;
  return Poly(std::move(out), Basis::Monomial);
}

}  // namespace

Poly to_basis(const Poly& p, Basis target) {
  if (p.basis() == target) return p;
  return target == Basis::Chebyshev01 ? mono_to_cheb(p) : cheb_to_mono(p);
}

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("polynomial parse error at position " +
                                std::to_string(i) + ": " + what);
  }
};

double parse_number(Cursor& c) {
  c.skip_ws();
  size_t start = c.i;
  const std::string& s = c.s;
  while (c.i < s.size() &&
         (std::isdigit(static_cast<unsigned char>(s[c.i])) || s[c.i] == '.'))
    ++c.i;
  if (c.i < s.size() && (s[c.i] == 'e' || s[c.i] == 'E')) {
    size_t mark = c.i++;
    if (c.i < s.size() && (s[c.i] == '+' || s[c.i] == '-')) ++c.i;
    if (c.i < s.size() && std::isdigit(static_cast<unsigned char>(s[c.i]))) {
      while (c.i < s.size() && std::isdigit(static_cast<unsigned char>(s[c.i])))
        ++c.i;
    } else {
      c.i = mark;
    }
  }
  if (c.i == start) c.fail("expected a number");
  return std::stod(s.substr(start, c.i - start));
}

// term := number ('*' x-part)? | x-part, with x-part := 'x' ('^' uint)?
void parse_term(Cursor& c, double sign, std::vector<double>& acc) {
  double coeff = 1.0;
  bool saw_number = false;
  char ch = c.peek();
  if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
    coeff = parse_number(c);
    saw_number = true;
  }
  int power = 0;
  ch = c.peek();
  if (ch == '*' || ch == 'x') {
    if (ch == '*') {
      ++c.i;
      if (c.peek() != 'x') c.fail("expected x after *");
    }
    ++c.i;  // consume x
    power = 1;
    if (c.peek() == '^') {
      ++c.i;
      double e = parse_number(c);
      power = int(e);
      if (power < 0 || double(power) != e) c.fail("exponent must be a nonnegative integer");
    }
  } else if (!saw_number) {
    c.fail("expected a term");
  }
  if (acc.size() < size_t(power) + 1) acc.resize(power + 1, 0.0);
  acc[power] += sign * coeff;
}

}  // namespace

Poly parse_polynomial(const std::string& text) {
  Cursor c{text};
  std::vector<double> acc;
  double sign = 1.0;
  if (c.peek() == '+' || c.peek() == '-') {
    sign = c.peek() == '-' ? -1.0 : 1.0;
    ++c.i;
  }
  parse_term(c, sign, acc);
  while (!c.done()) {
    char op = c.peek();
    if (op != '+' && op != '-') c.fail("expected + or -");
    ++c.i;
    parse_term(c, op == '-' ? -1.0 : 1.0, acc);
  }
  if (acc.empty()) acc.push_back(0.0);
  Poly::Vec v(acc.size());
  for (size_t k = 0; k < acc.size(); ++k) v[k] = acc[k];
  return trim(Poly(std::move(v)));
}

std::string to_string(const Poly& p) {
  const Poly m = p.basis() == Basis::Monomial ? p : to_basis(p, Basis::Monomial);
  std::string out;
  char buf[64];
  for (int k = 0; k <= m.degree(); ++k) {
    double c = m.coeff(k);
    if (c == 0.0 && !(k == 0 && m.degree() == 0)) continue;
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(c));
    out += buf;
    if (k >= 1) {
      out += "*x";
      if (k >= 2) {
        out += "^";
        out += std::to_string(k);
      }
    }
  }
  if (out.empty()) out = "0";
  return out;
}

}  // namespace sosineq
