#ifndef MONODROMIC_TRIG_HPP
#define MONODROMIC_TRIG_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monodromic/gpoly.hpp"
#include "monodromic/rational.hpp"

namespace monodromic {

/// Hard cap on harmonic support; guards against runaway recursions.
long& trig_harmonic_cap();

struct TrigCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finite Fourier series sum_k c_k e^{i k phi} over Gaussian rationals.
/// A real-valued series has c_{-k} = conj(c_k) for all k; that property is
/// tracked by is_real() rather than stored.
class TrigPoly {
 public:
  TrigPoly() = default;

  static TrigPoly zero() { return {}; }
  static TrigPoly constant(Rat a);
  static TrigPoly cos_k(long k);          // cos(k phi)
  static TrigPoly sin_k(long k);          // sin(k phi)
  static TrigPoly harmonic(long k, GaussRat c);

  const std::map<long, GaussRat>& coeffs() const { return c_; }
  void set(long k, GaussRat v);
  GaussRat coeff(long k) const;

  bool is_zero() const { return c_.empty(); }
  bool is_constant() const;
  bool is_real() const;
  long max_harmonic() const;  // largest |k| with nonzero coefficient

  TrigPoly operator-() const;
  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly& operator-=(const TrigPoly& o);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);
  TrigPoly& operator*=(const TrigPoly& o) { return *this = *this * o; }
  TrigPoly scaled(const GaussRat& s) const;
  friend bool operator==(const TrigPoly& a, const TrigPoly& b) { return a.c_ == b.c_; }

  /// d/dphi: multiplies c_k by i k.
  TrigPoly differentiate() const;

  std::complex<double> evaluate(double phi) const;
  double evaluate_real(double phi) const;

  /// Exact value at phi = quarter * pi/2, quarter in {0,1,2,3}.
  GaussRat evaluate_quarter(int quarter) const;

  /// Value at quarter*pi/2 + s with the quarter phase applied exactly, so
  /// that s -> -s is a bitwise-symmetric evaluation.
  double evaluate_quarter_offset(int quarter, double s) const;

  /// Exact Taylor coefficients of t(phi* + s) in s, phi* = quarter * pi/2.
  std::vector<GaussRat> taylor_quarter(int quarter, int terms) const;

  std::string str() const;  // human-readable cos/sin form

 private:
  std::map<long, GaussRat> c_;
  void check_cap() const;
};

/// Finite Laurent polynomial in z over Gaussian rationals.
struct LaurentPoly {
  std::map<long, GaussRat> c;

  bool is_zero() const { return c.empty(); }
  long low() const { return c.empty() ? 0 : c.begin()->first; }
  long high() const { return c.empty() ? 0 : c.rbegin()->first; }
  void set(long n, GaussRat v);

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);

  /// z^{-low} * this as a dense polynomial.
  GPoly poly_part() const;
};

/// z = e^{i phi}: e^{i k phi} <-> z^k. Exact, invertible.
LaurentPoly trig_to_laurent(const TrigPoly& t);
TrigPoly laurent_to_trig(const LaurentPoly& l);

/// Quotient of trig polynomials, reduced by exact gcd cancellation in z-form.
struct RationalTrig {
  TrigPoly num, den;

  RationalTrig() : den(TrigPoly::constant(rat(1))) {}
  RationalTrig(TrigPoly n, TrigPoly d);

  static RationalTrig from_trig(TrigPoly t) { return {std::move(t), TrigPoly::constant(rat(1))}; }

  bool is_zero() const { return num.is_zero(); }
  std::complex<double> evaluate(double phi) const;
  double evaluate_real(double phi) const;

  friend RationalTrig operator*(const RationalTrig& a, const RationalTrig& b);
  friend RationalTrig operator+(const RationalTrig& a, const RationalTrig& b);
  friend RationalTrig operator-(const RationalTrig& a, const RationalTrig& b);
  friend RationalTrig operator/(const RationalTrig& a, const RationalTrig& b);
  RationalTrig differentiate() const;

 private:
  void reduce();
};

/// One zero of a trig polynomial on the unit circle.
struct CircleZero {
  double angle;      // in [0, 2pi)
  int multiplicity;
  std::optional<int> quarter;  // set when the zero is exactly at k*pi/2
};

/// All angles where t vanishes, with multiplicities (via the z-form numerator).
std::vector<CircleZero> zeros_on_circle(const TrigPoly& t);

enum class CircleSign { Positive, Negative, NonnegWithZeros, NonposWithZeros, SignChanging };

CircleSign sign_on_circle(const TrigPoly& t);

std::string to_string(CircleSign s);

}  // namespace monodromic

#endif
