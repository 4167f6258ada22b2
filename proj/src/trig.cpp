#include "monodromic/trig.hpp"

#include <cmath>
#include <sstream>

#include "monodromic/roots.hpp"

namespace monodromic {

long& trig_harmonic_cap() {
  static long cap = 512;
  return cap;
}

void TrigPoly::check_cap() const {
  if (!c_.empty() && (std::max(std::labs(c_.begin()->first), std::labs(c_.rbegin()->first)) > trig_harmonic_cap()))
    throw TrigCapExceeded("trig polynomial harmonic support exceeds cap");
}

TrigPoly TrigPoly::constant(Rat a) {
  TrigPoly t;
  t.set(0, GaussRat(std::move(a)));
  return t;
}

TrigPoly TrigPoly::cos_k(long k) {
  TrigPoly t;
  t.set(k, GaussRat(rat(1, 2)));
  t.set(-k, GaussRat(rat(1, 2)));
  return t;
}

TrigPoly TrigPoly::sin_k(long k) {
  // sin k phi = (z^k - z^-k) / (2i) = -i/2 z^k + i/2 z^-k
  TrigPoly t;
  t.set(k, GaussRat(rat(0), rat(-1, 2)));
  t.set(-k, GaussRat(rat(0), rat(1, 2)));
  return t;
}

TrigPoly TrigPoly::harmonic(long k, GaussRat c) {
  TrigPoly t;
  t.set(k, std::move(c));
  return t;
}

void TrigPoly::set(long k, GaussRat v) {
  if (v.is_zero())
    c_.erase(k);
  else
    c_[k] = std::move(v);
  check_cap();
}

GaussRat TrigPoly::coeff(long k) const {
  auto it = c_.find(k);
  return it == c_.end() ? GaussRat(0) : it->second;
}

bool TrigPoly::is_constant() const {
  return c_.empty() || (c_.size() == 1 && c_.begin()->first == 0);
}

bool TrigPoly::is_real() const {
  for (auto& [k, v] : c_)
    if (!(coeff(-k) == v.conj())) return false;
  return true;
}

long TrigPoly::max_harmonic() const {
  if (c_.empty()) return 0;
  return std::max(std::labs(c_.begin()->first), std::labs(c_.rbegin()->first));
}

TrigPoly TrigPoly::operator-() const {
  TrigPoly t;
  for (auto& [k, v] : c_) t.c_[k] = -v;
  return t;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  for (auto& [k, v] : o.c_) {
    auto it = c_.find(k);
    if (it == c_.end())
      c_[k] = v;
    else {
      it->second += v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
  for (auto& [k, v] : o.c_) {
    auto it = c_.find(k);
    if (it == c_.end())
      c_[k] = -v;
    else {
      it->second -= v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }
  return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
  TrigPoly t;
  for (auto& [i, u] : a.c_)
    for (auto& [j, v] : b.c_) {
      GaussRat p = u * v;
      auto it = t.c_.find(i + j);
      if (it == t.c_.end())
        t.c_[i + j] = std::move(p);
      else {
        it->second += p;
        if (it->second.is_zero()) t.c_.erase(it);
      }
    }
  t.check_cap();
  return t;
}

TrigPoly TrigPoly::scaled(const GaussRat& s) const {
  TrigPoly t;
  if (s.is_zero()) return t;
  for (auto& [k, v] : c_) t.c_[k] = v * s;
  return t;
}

TrigPoly TrigPoly::differentiate() const {
  TrigPoly t;
  for (auto& [k, v] : c_)
    if (k != 0) t.c_[k] = v * GaussRat(Rat(0), Rat(k));
  return t;
}

std::complex<double> TrigPoly::evaluate(double phi) const {
  std::complex<double> acc{0, 0};
  for (auto& [k, v] : c_) {
    std::complex<double> zk = std::polar(1.0, k * phi);
    acc += v.to_complex() * zk;
  }
  return acc;
}

double TrigPoly::evaluate_real(double phi) const { return evaluate(phi).real(); }

double TrigPoly::evaluate_quarter_offset(int quarter, double s) const {
  std::complex<double> acc{0, 0};
  for (auto& [k, v] : c_) {
    std::complex<double> phase = i_pow(k * quarter).to_complex();
    acc += v.to_complex() * phase * std::polar(1.0, k * s);
  }
  return acc.real();
}

GaussRat TrigPoly::evaluate_quarter(int quarter) const {
  GaussRat acc(0);
  for (auto& [k, v] : c_) acc += v * i_pow(k * quarter);
  return acc;
}

std::vector<GaussRat> TrigPoly::taylor_quarter(int quarter, int terms) const {
  // t(phi* + s) = sum_k c_k e^{ik phi*} e^{iks}; coefficient of s^n is
  // sum_k c_k i^{k*quarter} (ik)^n / n!.
  std::vector<GaussRat> out(terms, GaussRat(0));
  Rat fact(1);
  for (int n = 0; n < terms; ++n) {
    if (n > 0) fact *= n;
    GaussRat sum(0);
    for (auto& [k, v] : c_) {
      // (ik)^n = i^n k^n
      Rat kn(1);
      for (int t = 0; t < n; ++t) kn *= k;
      sum += v * i_pow(k * quarter) * i_pow(n) * GaussRat(kn);
    }
    out[n] = sum * GaussRat(Rat(1) / fact);
  }
  return out;
}

std::string TrigPoly::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  GaussRat c0 = coeff(0);
  if (!c0.is_zero()) {
    os << c0.str();
    first = false;
  }
  for (auto& [k, v] : c_) {
    if (k <= 0) continue;
    GaussRat a = v + coeff(-k);            // cos amplitude
    GaussRat b = (v - coeff(-k)) * GaussRat::i();  // sin amplitude
    if (!a.is_zero()) {
      os << (first ? "" : " + ") << a.str() << "*cos(" << k << "phi)";
      first = false;
    }
    if (!b.is_zero()) {
      os << (first ? "" : " + ") << b.str() << "*sin(" << k << "phi)";
      first = false;
    }
  }
  if (first) os << "0";
  return os.str();
}

void LaurentPoly::set(long n, GaussRat v) {
  if (v.is_zero())
    c.erase(n);
  else
    c[n] = std::move(v);
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r;
  for (auto& [i, u] : a.c)
    for (auto& [j, v] : b.c) {
      GaussRat p = u * v;
      auto it = r.c.find(i + j);
      if (it == r.c.end())
        r.c[i + j] = std::move(p);
      else {
        it->second += p;
        if (it->second.is_zero()) r.c.erase(it);
      }
    }
  return r;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r = a;
  for (auto& [j, v] : b.c) {
    auto it = r.c.find(j);
    if (it == r.c.end())
      r.c[j] = v;
    else {
      it->second += v;
      if (it->second.is_zero()) r.c.erase(it);
    }
  }
  return r;
}

GPoly LaurentPoly::poly_part() const {
  if (c.empty()) return {};
  long lo = low();
  std::vector<GaussRat> v(high() - lo + 1);
  for (auto& [n, x] : c) v[n - lo] = x;
  return GPoly(std::move(v));
}

LaurentPoly trig_to_laurent(const TrigPoly& t) {
  LaurentPoly l;
  l.c = t.coeffs();
  return l;
}

TrigPoly laurent_to_trig(const LaurentPoly& l) {
  TrigPoly t;
  for (auto& [n, v] : l.c) t.set(n, v);
  return t;
}

RationalTrig::RationalTrig(TrigPoly n, TrigPoly d) : num(std::move(n)), den(std::move(d)) {
  if (den.is_zero()) throw std::domain_error("RationalTrig: zero denominator");
  reduce();
}

void RationalTrig::reduce() {
  if (num.is_zero()) {
    den = TrigPoly::constant(rat(1));
    return;
  }
  LaurentPoly ln = trig_to_laurent(num), ld = trig_to_laurent(den);
  GPoly pn = ln.poly_part(), pd = ld.poly_part();
  GPoly g = gcd(pn, pd);
  long shift_n = ln.low(), shift_d = ld.low();
  if (g.degree() >= 1) {
    pn = pn / g;
    pd = pd / g;
  }
  // rebalance z-power between numerator and denominator
  long s = shift_n - shift_d;
  LaurentPoly rn, rd;
  for (int k = 0; k <= pn.degree(); ++k) rn.set(k + (s > 0 ? s : 0), pn.c[k]);
  for (int k = 0; k <= pd.degree(); ++k) rd.set(k + (s < 0 ? -s : 0), pd.c[k]);
  // normalize: scale so den's top coefficient is 1
  GaussRat top = rd.c.rbegin()->second;
  GaussRat inv = top.inverse();
  for (auto& [k, v] : rn.c) v *= inv;
  for (auto& [k, v] : rd.c) v *= inv;
  // recentre harmonics: shift both by the same power so den is "balanced"
  long mid = (rd.low() + rd.high()) / 2;
  LaurentPoly fn, fd;
  for (auto& [k, v] : rn.c) fn.set(k - mid, v);
  for (auto& [k, v] : rd.c) fd.set(k - mid, v);
  num = laurent_to_trig(fn);
  den = laurent_to_trig(fd);
}

std::complex<double> RationalTrig::evaluate(double phi) const {
  return num.evaluate(phi) / den.evaluate(phi);
}

double RationalTrig::evaluate_real(double phi) const { return evaluate(phi).real(); }

RationalTrig operator*(const RationalTrig& a, const RationalTrig& b) {
  return {a.num * b.num, a.den * b.den};
}
RationalTrig operator+(const RationalTrig& a, const RationalTrig& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}
RationalTrig operator-(const RationalTrig& a, const RationalTrig& b) {
  return {a.num * b.den - b.num * a.den, a.den * b.den};
}
RationalTrig operator/(const RationalTrig& a, const RationalTrig& b) {
  if (b.num.is_zero()) throw std::domain_error("RationalTrig: division by zero");
  return {a.num * b.den, a.den * b.num};
}

RationalTrig RationalTrig::differentiate() const {
  return {num.differentiate() * den - num * den.differentiate(), den * den};
}

std::vector<CircleZero> zeros_on_circle(const TrigPoly& t) {
  if (t.is_zero()) throw std::domain_error("zeros_on_circle: identically zero input");
  std::vector<CircleZero> out;
  LaurentPoly l = trig_to_laurent(t);
  GPoly p = l.poly_part();
  if (p.degree() < 1) return out;
  for (auto& [factor, mult] : squarefree(p)) {
    for (auto& root : unit_circle_roots(factor)) {
      CircleZero z;
      z.angle = root.angle;
      z.multiplicity = mult;
      z.quarter = root.quarter;
      out.push_back(z);
    }
  }
  std::sort(out.begin(), out.end(), [](const CircleZero& a, const CircleZero& b) { return a.angle < b.angle; });
  return out;
}

CircleSign sign_on_circle(const TrigPoly& t) {
  if (t.is_zero()) return CircleSign::NonnegWithZeros;
  if (!t.is_real()) throw std::domain_error("sign_on_circle: non-real trig polynomial");
  auto zeros = zeros_on_circle(t);
  // sample midpoints between consecutive zeros (or a fixed grid when none)
  std::vector<double> samples;
  if (zeros.empty()) {
    for (int k = 0; k < 16; ++k) samples.push_back(2 * M_PI * (k + 0.37) / 16);
  } else {
    for (size_t i = 0; i < zeros.size(); ++i) {
      double a = zeros[i].angle;
      double b = (i + 1 < zeros.size()) ? zeros[i + 1].angle : zeros[0].angle + 2 * M_PI;
      samples.push_back((a + b) / 2);
      samples.push_back(a + (b - a) * 0.21);
      samples.push_back(a + (b - a) * 0.83);
    }
  }
  bool pos = false, neg = false;
  for (double phi : samples) {
    double v = t.evaluate_real(phi);
    if (v > 0) pos = true;
    if (v < 0) neg = true;
  }
  if (pos && neg) return CircleSign::SignChanging;
  if (zeros.empty()) return pos ? CircleSign::Positive : CircleSign::Negative;
  // odd multiplicity at any zero forces a sign change
  for (auto& z : zeros)
    if (z.multiplicity % 2 == 1) return CircleSign::SignChanging;
  return pos ? CircleSign::NonnegWithZeros : CircleSign::NonposWithZeros;
}

std::string to_string(CircleSign s) {
  switch (s) {
    case CircleSign::Positive: return "positive";
    case CircleSign::Negative: return "negative";
    case CircleSign::NonnegWithZeros: return "nonneg_with_zeros";
    case CircleSign::NonposWithZeros: return "nonpos_with_zeros";
    default: return "sign_changing";
  }
}

}  // namespace monodromic
