#ifndef MONODROMIC_GPOLY_HPP
#define MONODROMIC_GPOLY_HPP

#include <algorithm>
#include <vector>

#include "monodromic/rational.hpp"

namespace monodromic {

/// Dense univariate polynomial over Gaussian rationals, ascending coefficients.
struct GPoly {
  std::vector<GaussRat> c;

  GPoly() = default;
  explicit GPoly(std::vector<GaussRat> coeffs) : c(std::move(coeffs)) { trim(); }
  static GPoly constant(GaussRat a) { return GPoly({std::move(a)}); }
  static GPoly monomial(GaussRat a, int deg) {
    std::vector<GaussRat> v(deg + 1);
    v[deg] = std::move(a);
    return GPoly(std::move(v));
  }

  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  const GaussRat& lead() const { return c.back(); }

  GaussRat eval(const GaussRat& x) const {
    GaussRat acc(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  std::complex<double> eval(std::complex<double> x) const {
    std::complex<double> acc{0, 0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + it->to_complex();
    return acc;
  }

  GPoly derivative() const {
    if (c.size() <= 1) return {};
    std::vector<GaussRat> d(c.size() - 1);
    for (size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * GaussRat(Rat(static_cast<long>(k)));
    return GPoly(std::move(d));
  }

  friend GPoly operator+(const GPoly& a, const GPoly& b) {
    std::vector<GaussRat> v(std::max(a.c.size(), b.c.size()));
    for (size_t k = 0; k < v.size(); ++k) {
      if (k < a.c.size()) v[k] += a.c[k];
      if (k < b.c.size()) v[k] += b.c[k];
    }
    return GPoly(std::move(v));
  }
  friend GPoly operator-(const GPoly& a, const GPoly& b) {
    std::vector<GaussRat> v(std::max(a.c.size(), b.c.size()));
    for (size_t k = 0; k < v.size(); ++k) {
      if (k < a.c.size()) v[k] += a.c[k];
      if (k < b.c.size()) v[k] -= b.c[k];
    }
    return GPoly(std::move(v));
  }
  friend GPoly operator*(const GPoly& a, const GPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<GaussRat> v(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) v[i + j] += a.c[i] * b.c[j];
    return GPoly(std::move(v));
  }
  GPoly scaled(const GaussRat& s) const {
    GPoly r = *this;
    for (auto& x : r.c) x *= s;
    r.trim();
    return r;
  }

  /// Quotient and remainder; throws on zero divisor.
  static void divmod(const GPoly& a, const GPoly& b, GPoly& q, GPoly& r) {
    if (b.is_zero()) throw std::domain_error("GPoly: division by zero polynomial");
    r = a;
    q = {};
    q.c.assign(a.c.size(), GaussRat(0));
    GaussRat inv = b.lead().inverse();
    while (!r.is_zero() && r.degree() >= b.degree()) {
      int shift = r.degree() - b.degree();
      GaussRat f = r.lead() * inv;
      q.c[shift] += f;
      for (size_t k = 0; k < b.c.size(); ++k) r.c[shift + k] -= f * b.c[k];
      r.trim();
    }
    q.trim();
  }

  /// Exact division; throws if remainder is nonzero.
  friend GPoly operator/(const GPoly& a, const GPoly& b) {
    GPoly q, r;
    divmod(a, b, q, r);
    if (!r.is_zero()) throw std::domain_error("GPoly: inexact division");
    return q;
  }

  /// Make the polynomial monic.
  GPoly monic() const {
    if (is_zero()) return {};
    return scaled(lead().inverse());
  }
};

inline GPoly gcd(GPoly a, GPoly b) {
  while (!b.is_zero()) {
    GPoly q, r;
    GPoly::divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.is_zero() ? a : a.monic();
}

/// Extended Euclid: returns g = gcd(a,b) monic with u*a + v*b = g.
inline GPoly ext_gcd(const GPoly& a, const GPoly& b, GPoly& u, GPoly& v) {
  GPoly r0 = a, r1 = b;
  GPoly u0 = GPoly::constant(GaussRat(1)), u1{};
  GPoly v0{}, v1 = GPoly::constant(GaussRat(1));
  while (!r1.is_zero()) {
    GPoly q, r;
    GPoly::divmod(r0, r1, q, r);
    GPoly u2 = u0 - q * u1, v2 = v0 - q * v1;
    r0 = std::move(r1); r1 = std::move(r);
    u0 = std::move(u1); u1 = std::move(u2);
    v0 = std::move(v1); v1 = std::move(v2);
  }
  if (r0.is_zero()) { u = {}; v = {}; return r0; }
  GaussRat s = r0.lead().inverse();
  u = u0.scaled(s);
  v = v0.scaled(s);
  return r0.scaled(s);
}

/// Squarefree decomposition: returns list of (factor, multiplicity) with
/// product(factor^mult) = p / lead (factors monic).
inline std::vector<std::pair<GPoly, int>> squarefree(const GPoly& p) {
  std::vector<std::pair<GPoly, int>> out;
  if (p.degree() < 1) return out;
  GPoly a = p.monic();
  GPoly g = gcd(a, a.derivative());
  if (g.degree() < 1) {
    out.push_back({a, 1});
    return out;
  }
  GPoly w = a / g;
  int mult = 1;
  while (w.degree() >= 1) {
    GPoly y = gcd(w, g);
    GPoly z = w / y;
    if (z.degree() >= 1) out.push_back({z.monic(), mult});
    ++mult;
    w = std::move(y);
    g = g / w;
  }
  return out;
}

}  // namespace monodromic

#endif
