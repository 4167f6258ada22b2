#ifndef MONODROMIC_RATIONAL_HPP
#define MONODROMIC_RATIONAL_HPP

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace monodromic {

using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

/// Gaussian rational a + b*i, the coefficient field for the z = e^{i phi}
/// substitution. All arithmetic is exact.
struct GaussRat {
  Rat re, im;

  GaussRat() : re(0), im(0) {}
  GaussRat(Rat r) : re(std::move(r)), im(0) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussRat(long n) : re(n), im(0) {}

  static GaussRat i() { return GaussRat(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussRat conj() const { return {re, -im}; }
  Rat norm() const { return re * re + im * im; }

  GaussRat operator-() const { return {-re, -im}; }
  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
  GaussRat inverse() const {
    Rat n = norm();
    if (n == 0) throw std::domain_error("GaussRat: division by zero");
    return {re / n, -im / n};
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    return a * b.inverse();
  }
  GaussRat& operator/=(const GaussRat& o) { return *this = *this / o; }

  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) {
    return !(a == b);
  }

  std::complex<double> to_complex() const {
    return {to_double(re), to_double(im)};
  }

  std::string str() const {
    std::string s = re.get_str();
    if (im != 0) s += (im > 0 ? "+" : "") + im.get_str() + "i";
    return s;
  }
};

/// i^n, exact.
inline GaussRat i_pow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return GaussRat(1);
    case 1: return GaussRat::i();
    case 2: return GaussRat(-1);
    default: return -GaussRat::i();
  }
}

inline GaussRat pow(GaussRat b, long e) {
  GaussRat acc(1);
  for (long k = 0; k < e; ++k) acc *= b;
  return acc;
}

}  // namespace monodromic

#endif
