#include "monodromic/ode.hpp"

#include "monodromic/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace monodromic {

namespace {
constexpr double TWO_PI = 2 * M_PI;
}

// ---------------------------------------------------------------- affine ops

AffineTrig AffineTrig::differentiate() const {
  AffineTrig r;
  r.base = base.differentiate();
  for (auto& [k, t] : parts) {
    TrigPoly d = t.differentiate();
    if (!d.is_zero()) r.parts[k] = d;
  }
  return r;
}

AffineTrig operator+(const AffineTrig& a, const AffineTrig& b) {
  AffineTrig r = a;
  r.base += b.base;
  for (auto& [k, t] : b.parts) {
    auto it = r.parts.find(k);
    if (it == r.parts.end())
      r.parts[k] = t;
    else
      it->second += t;
  }
  r.prune();
  return r;
}

AffineTrig operator-(const AffineTrig& a, const AffineTrig& b) {
  AffineTrig r = a;
  r.base -= b.base;
  for (auto& [k, t] : b.parts) {
    auto it = r.parts.find(k);
    if (it == r.parts.end())
      r.parts[k] = -t;
    else
      it->second -= t;
  }
  r.prune();
  return r;
}

AffineTrig AffineTrig::mul(const TrigPoly& t) const {
  AffineTrig r;
  r.base = base * t;
  for (auto& [k, p] : parts) {
    TrigPoly m = p * t;
    if (!m.is_zero()) r.parts[k] = m;
  }
  return r;
}

AffineTrig AffineTrig::scaled(const GaussRat& s) const {
  AffineTrig r;
  r.base = base.scaled(s);
  for (auto& [k, p] : parts) {
    TrigPoly m = p.scaled(s);
    if (!m.is_zero()) r.parts[k] = m;
  }
  return r;
}

void AffineTrig::prune() {
  for (auto it = parts.begin(); it != parts.end();)
    it = it->second.is_zero() ? parts.erase(it) : std::next(it);
}

double ConstantBook::resolve(const AffineValue& v) const {
  double acc = v.base;
  for (auto& [k, c] : v.parts) {
    auto it = assigned.find(k);
    acc += c * (it == assigned.end() ? 0.0 : it->second);
  }
  return acc;
}

// --------------------------------------------------------------- coefficient

namespace {

AffineValue affine_eval(const AffineTrig& t, double phi) {
  AffineValue v;
  v.base = t.base.evaluate_real(phi);
  for (auto& [k, p] : t.parts) v.parts[k] = p.evaluate_real(phi);
  return v;
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, TWO_PI);
  if (phi < 0) phi += TWO_PI;
  return phi;
}

}  // namespace

AffineValue CoefficientFn::eval(double phi) const {
  if (exact) return affine_eval(closed, phi);
  if (samples.empty()) return {};
  phi = wrap_angle(phi);
  // locate bracketing samples; the grid is periodic
  auto it = std::lower_bound(samples.begin(), samples.end(), phi,
                             [](const Sample& s, double x) { return s.phi < x; });
  Sample wrapped;
  const Sample* bp;
  const Sample* ap;
  if (it == samples.begin() || it == samples.end()) {
    ap = &samples.back();
    wrapped = samples.front();
    wrapped.phi += 2 * M_PI;
    bp = &wrapped;
    if (it == samples.begin()) phi += 2 * M_PI;
  } else {
    bp = &*it;
    ap = &*(it - 1);
  }
  const Sample& b = *bp;
  const Sample& a = *ap;
  double h = b.phi - a.phi;
  if (h <= 0) return a.v;
  double u = (phi - a.phi) / h;
  // cubic Hermite on each affine component
  auto hermite = [&](double va, double da, double vb, double db) {
    double u2 = u * u, u3 = u2 * u;
    return va * (2 * u3 - 3 * u2 + 1) + da * h * (u3 - 2 * u2 + u) + vb * (-2 * u3 + 3 * u2) +
           db * h * (u3 - u2);
  };
  AffineValue out;
  out.base = hermite(a.v.base, a.dv.base, b.v.base, b.dv.base);
  for (auto& [k, av] : a.v.parts) {
    double da = a.dv.parts.count(k) ? a.dv.parts.at(k) : 0;
    double vb = b.v.parts.count(k) ? b.v.parts.at(k) : 0;
    double db = b.dv.parts.count(k) ? b.dv.parts.at(k) : 0;
    out.parts[k] = hermite(av, da, vb, db);
  }
  return out;
}

AffineValue CoefficientFn::eval_deriv(double phi) const {
  if (exact) return affine_eval(closed.differentiate(), phi);
  if (samples.empty()) return {};
  phi = wrap_angle(phi);
  auto it = std::lower_bound(samples.begin(), samples.end(), phi,
                             [](const Sample& s, double x) { return s.phi < x; });
  if (it == samples.end()) return samples.back().dv;
  return it->dv;
}

// ------------------------------------------------------------------ exact LA

namespace {

/// Complex linear system over GaussRat by Gaussian elimination.
/// Returns true if consistent; solution in x; kernel basis appended to ker.
bool solve_gauss(std::vector<std::vector<GaussRat>> M, std::vector<GaussRat> rhs,
                 std::vector<GaussRat>& x, std::vector<std::vector<GaussRat>>& ker) {
  size_t rows = M.size();
  size_t cols = rows ? M[0].size() : 0;
  std::vector<int> pivot_col(rows, -1);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && M[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(M[piv], M[r]);
    std::swap(rhs[piv], rhs[r]);
    GaussRat inv = M[r][c].inverse();
    for (size_t cc = c; cc < cols; ++cc) M[r][cc] *= inv;
    rhs[r] *= inv;
    for (size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || M[rr][c].is_zero()) continue;
      GaussRat f = M[rr][c];
      for (size_t cc = c; cc < cols; ++cc) M[rr][cc] -= f * M[r][cc];
      rhs[rr] -= f * rhs[r];
    }
    pivot_col[r] = static_cast<int>(c);
    ++r;
  }
  for (size_t rr = r; rr < rows; ++rr)
    if (!rhs[rr].is_zero()) return false;
  x.assign(cols, GaussRat(0));
  std::vector<bool> is_pivot(cols, false);
  for (size_t rr = 0; rr < r; ++rr) {
    x[pivot_col[rr]] = rhs[rr];
    is_pivot[pivot_col[rr]] = true;
  }
  for (size_t c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<GaussRat> k(cols, GaussRat(0));
    k[c] = GaussRat(1);
    for (size_t rr = 0; rr < r; ++rr) k[pivot_col[rr]] = -M[rr][c];
    ker.push_back(std::move(k));
  }
  return true;
}

/// Realify a complex solution of a real-symmetric problem:
/// v_real(n) = (v(n) + conj(v(-n)))/2.
TrigPoly realify(const TrigPoly& t) {
  TrigPoly r;
  for (auto& [k, v] : t.coeffs()) {
    GaussRat avg = (v + t.coeff(-k).conj()) * GaussRat(rat(1, 2));
    if (!avg.is_zero()) r.set(k, avg);
  }
  return r;
}

TrigPoly imagify(const TrigPoly& t) {
  // (v - conj-flip(v)) / (2i): the other real representative
  TrigPoly r;
  for (auto& [k, v] : t.coeffs()) {
    GaussRat d = (v - t.coeff(-k).conj()) / (GaussRat::i() * GaussRat(2));
    if (!d.is_zero()) r.set(k, d);
  }
  return r;
}

}  // namespace

ExactSolve solve_exact_trig(const TrigPoly& A, const TrigPoly& P, const TrigPoly& Q,
                            int window_margin, int harmonic_cap) {
  ExactSolve out;
  long H = std::max<long>({Q.max_harmonic(), A.max_harmonic() + 2, P.max_harmonic() + 2});
  H += window_margin;
  if (H > harmonic_cap) H = harmonic_cap;
  long lo = -H, hi = H;
  long data_h = std::max(A.max_harmonic(), P.max_harmonic());
  long row_lo = lo - data_h, row_hi = hi + data_h;
  row_lo = std::min(row_lo, (long)(trig_to_laurent(Q).is_zero() ? 0 : trig_to_laurent(Q).low()));
  row_hi = std::max(row_hi, (long)(trig_to_laurent(Q).is_zero() ? 0 : trig_to_laurent(Q).high()));
  size_t cols = static_cast<size_t>(hi - lo + 1);
  size_t rows = static_cast<size_t>(row_hi - row_lo + 1);
  std::vector<std::vector<GaussRat>> M(rows, std::vector<GaussRat>(cols, GaussRat(0)));
  std::vector<GaussRat> rhs(rows, GaussRat(0));
  // column n: coefficient function of V_n: (in) A z^n + P z^n
  for (long n = lo; n <= hi; ++n) {
    GaussRat in = GaussRat(Rat(0), Rat(n));
    for (auto& [k, a] : A.coeffs()) {
      long h = k + n;
      if (h < row_lo || h > row_hi) continue;
      M[h - row_lo][n - lo] += a * in;
    }
    for (auto& [k, p] : P.coeffs()) {
      long h = k + n;
      if (h < row_lo || h > row_hi) continue;
      M[h - row_lo][n - lo] += p;
    }
  }
  for (auto& [k, q] : Q.coeffs()) {
    if (k < row_lo || k > row_hi) return out;  // forcing outside window
    rhs[k - row_lo] = -q;
  }
  std::vector<GaussRat> x;
  std::vector<std::vector<GaussRat>> ker;
  if (!solve_gauss(std::move(M), std::move(rhs), x, ker)) return out;
  TrigPoly part;
  for (long n = lo; n <= hi; ++n)
    if (!x[n - lo].is_zero()) part.set(n, x[n - lo]);
  // realify (the data is real; solutions come in conjugate-symmetric pairs)
  TrigPoly preal = realify(part);
  // verify exactly
  auto residual = [&](const TrigPoly& v) {
    return A * v.differentiate() + P * v + Q;
  };
  if (residual(preal).is_zero())
    part = preal;
  else if (!residual(part).is_zero())
    return out;
  out.found = true;
  out.particular = part;
  for (auto& kvec : ker) {
    TrigPoly k;
    for (long n = lo; n <= hi; ++n)
      if (!kvec[n - lo].is_zero()) k.set(n, kvec[n - lo]);
    TrigPoly kr = realify(k);
    if (kr.is_zero()) kr = imagify(k);
    if (kr.is_zero()) continue;
    if ((A * kr.differentiate() + P * kr).is_zero()) {
      out.kernel = kr;
      break;
    }
  }
  return out;
}

// ------------------------------------------------------------------- mu(2pi)

MuResult compute_mu(const TrigPoly& P, const TrigPoly& A, const std::vector<CircleZero>& omega,
                    const OdeConfig& cfg) {
  MuResult mr;
  RationalTrig W(P, A);
  mr.residue = pv_contour_integral(W, cfg.pv);
  std::vector<double> poles;
  for (auto& z : omega) poles.push_back(z.angle);
  mr.quadrature = pv_quadrature([&](double s) { return W.evaluate_real(s); }, poles, cfg.pv);
  if (mr.residue.diverges && mr.quadrature.diverges)
    throw PVUndefined("mu: PV of P/A diverges (non-simple on-contour structure)");
  double v = mr.residue.diverges ? mr.quadrature.value.real() : mr.residue.real_checked();
  mr.log_mu = v;
  mr.err = std::max(mr.residue.error_estimate, 1e-14);
  mr.exact = mr.residue.exact;
  if (!mr.residue.diverges && !mr.quadrature.diverges &&
      std::abs(mr.quadrature.value.real() - v) > 1e-6 * (1 + std::abs(v)))
    mr.err = std::max(mr.err, std::abs(mr.quadrature.value.real() - v));
  return mr;
}

// ------------------------------------------------------------ local analysis

LocalData analyze_local(const TrigPoly& A, const TrigPoly& P, const CircleZero& zero) {
  LocalData L;
  L.angle = zero.angle;
  L.quarter = zero.quarter;
  L.kappa = zero.multiplicity;
  int need = L.kappa + 2;
  if (zero.quarter) {
    auto at = A.taylor_quarter(*zero.quarter, need);
    auto pt = P.taylor_quarter(*zero.quarter, need);
    // lambda: vanishing order of P at the angle (capped at kappa)
    int lam = 0;
    while (lam < L.kappa && lam < need && pt[lam].is_zero()) ++lam;
    L.lambda = lam;
    if (lam >= L.kappa - 1) {
      L.regular_singular = true;
      GaussRat Ak = at[L.kappa];
      GaussRat Pk1 = (L.kappa - 1 < need) ? pt[L.kappa - 1] : GaussRat(0);
      GaussRat al = -(Pk1 / Ak);
      if (al.im == 0) {
        L.alpha_exact = al.re;
        L.alpha = to_double(al.re);
        Rat a = al.re;
        if (a >= 0 && a.get_den() == 1) {
          L.alpha_is_nonneg_int = true;
          L.resonance_order = static_cast<int>(a.get_num().get_si());
        }
      }
    }
  } else {
    // numeric Taylor via exact differentiation, double evaluation
    std::vector<double> at(need), pt(need);
    TrigPoly da = A, dp = P;
    double fact = 1;
    for (int n = 0; n < need; ++n) {
      if (n > 0) {
        fact *= n;
        da = da.differentiate();
        dp = dp.differentiate();
      }
      at[n] = (n == 0 ? A : da).evaluate_real(zero.angle) / fact;
      pt[n] = (n == 0 ? P : dp).evaluate_real(zero.angle) / fact;
    }
    double scale = 0;
    for (double x : pt) scale = std::max(scale, std::abs(x));
    int lam = 0;
    while (lam < L.kappa && std::abs(pt[lam]) < 1e-9 * (1 + scale)) ++lam;
    L.lambda = lam;
    if (lam >= L.kappa - 1) {
      L.regular_singular = true;
      L.alpha = -pt[L.kappa - 1] / at[L.kappa];
      double rounded = std::round(L.alpha);
      if (L.alpha > -1e-9 && std::abs(L.alpha - rounded) < 1e-7) {
        L.alpha_is_nonneg_int = true;
        L.resonance_order = static_cast<int>(rounded);
      }
    }
  }
  return L;
}

// ------------------------------------------------- Frobenius series (affine)

namespace {

struct AffineG {
  GaussRat base;
  std::map<int, GaussRat> parts;
  bool is_zero() const {
    if (!base.is_zero()) return false;
    for (auto& [k, v] : parts)
      if (!v.is_zero()) return false;
    return true;
  }
  AffineG& operator+=(const AffineG& o) {
    base += o.base;
    for (auto& [k, v] : o.parts) parts[k] += v;
    return *this;
  }
  AffineG times(const GaussRat& s) const {
    AffineG r;
    r.base = base * s;
    for (auto& [k, v] : parts) r.parts[k] = v * s;
    return r;
  }
  AffineValue to_value() const {
    AffineValue av;
    av.base = base.to_complex().real();
    av.exact_base = base;
    for (auto& [k, v] : parts) {
      av.parts[k] = v.to_complex().real();
      av.exact_parts[k] = v;
    }
    return av;
  }
};

struct FrobeniusResult {
  bool ok = false;
  bool irregular = false;
  std::vector<LinearCondition> conditions;  // pre-resonance + resonance residuals
  std::vector<AffineG> series;              // analytic branch coefficients (exact)
  std::vector<AffineValue> numeric_series;  // numeric fallback seeds
  bool exact = false;
  std::string note;
};

/// Exact analytic-branch recursion at a quarter-angle singular point.
/// Equation A v' + P v + Q = 0 with A vanishing to order kappa.
FrobeniusResult frobenius_exact(const TrigPoly& A, const TrigPoly& P, const AffineTrig& Q,
                                const LocalData& L, int terms, int source_index) {
  FrobeniusResult fr;
  if (!L.quarter) return fr;
  if (!L.regular_singular) {
    fr.irregular = true;
    fr.note = "irregular singular point (P vanishes deeper than order kappa-1)";
    return fr;
  }
  int kappa = L.kappa;
  int top = terms + kappa + 2;
  auto at = A.taylor_quarter(*L.quarter, top);
  auto pt = P.taylor_quarter(*L.quarter, top);
  std::vector<AffineG> qt(top);
  {
    auto qb = Q.base.taylor_quarter(*L.quarter, top);
    for (int n = 0; n < top; ++n) qt[n].base = qb[n];
    for (auto& [k, t] : Q.parts) {
      auto qp = t.taylor_quarter(*L.quarter, top);
      for (int n = 0; n < top; ++n) qt[n].parts[k] = qp[n];
    }
  }
  // orders m < kappa-1 must have Q_m = 0 (otherwise every solution is
  // unbounded at this angle)
  for (int m = 0; m < kappa - 1; ++m) {
    if (!qt[m].is_zero()) {
      LinearCondition c;
      c.lhs = qt[m].to_value();
      c.source_index = source_index;
      fr.conditions.push_back(c);
    }
  }
  GaussRat Ak = at[kappa];
  GaussRat Pk1 = pt[kappa - 1];
  fr.series.assign(terms, AffineG{});
  for (int n = 0; n < terms; ++n) {
    int m = n + kappa - 1;  // order fixing v_n
    AffineG rest = qt[m];
    // A-part: sum_{a>kappa, a<=m+1-?} A_a (m-a+1) v_{m-a+1}, indices < n
    for (int a = kappa + 1; a <= m + 1; ++a) {
      int idx = m - a + 1;
      if (idx < 0 || idx >= n) continue;
      if (a < top && !at[a].is_zero())
        rest += fr.series[idx].times(at[a] * GaussRat(Rat(idx)));
    }
    // also a = kappa with idx = n handled by the pivot; a = kappa, idx < n impossible
    // P-part: sum_{a >= kappa-1} P_a v_{m-a}, indices < n plus pivot at a = kappa-1
    for (int a = kappa; a <= m; ++a) {
      int idx = m - a;
      if (idx < 0 || idx >= n) continue;
      if (a < top && !pt[a].is_zero()) rest += fr.series[idx].times(pt[a]);
    }
    GaussRat pivot = GaussRat(Rat(n)) * Ak + Pk1;
    if (pivot.is_zero()) {
      // resonance: the order-m equation is a pure condition
      if (!rest.is_zero()) {
        LinearCondition c;
        c.lhs = rest.to_value();
        c.source_index = source_index;
        fr.conditions.push_back(c);
      }
      fr.series[n] = AffineG{};  // canonical representative
    } else {
      fr.series[n] = rest.times(-(pivot.inverse()));
    }
  }
  fr.ok = true;
  fr.exact = true;
  fr.numeric_series.resize(terms);
  for (int n = 0; n < terms; ++n) fr.numeric_series[n] = fr.series[n].to_value();
  return fr;
}

/// Numeric analytic-branch recursion at an arbitrary singular angle.
FrobeniusResult frobenius_numeric(const TrigPoly& A, const TrigPoly& P,
                                  const std::function<AffineValue(double)>& /*Q_eval*/,
                                  const AffineTrig& Q, bool q_exact, const LocalData& L, int terms,
                                  int source_index) {
  FrobeniusResult fr;
  if (!L.regular_singular) {
    fr.irregular = true;
    return fr;
  }
  if (!q_exact) {
    fr.irregular = true;  // cannot Taylor-expand a sampled forcing reliably
    fr.note = "sampled forcing at singular angle";
    return fr;
  }
  int kappa = L.kappa;
  int top = terms + kappa + 2;
  auto taylor_num = [&](const TrigPoly& t) {
    std::vector<double> out(top);
    TrigPoly d = t;
    double fact = 1;
    for (int n = 0; n < top; ++n) {
      if (n > 0) {
        fact *= n;
        d = d.differentiate();
      }
      out[n] = (n == 0 ? t : d).evaluate_real(L.angle) / fact;
    }
    return out;
  };
  auto at = taylor_num(A);
  auto pt = taylor_num(P);
  std::vector<AffineValue> qt(top);
  {
    auto qb = taylor_num(Q.base);
    for (int n = 0; n < top; ++n) qt[n].base = qb[n];
    for (auto& [k, t] : Q.parts) {
      auto qp = taylor_num(t);
      for (int n = 0; n < top; ++n) qt[n].parts[k] = qp[n];
    }
  }
  for (int m = 0; m < kappa - 1; ++m) {
    double scale = std::abs(qt[m].base);
    for (auto& [k, v] : qt[m].parts) scale += std::abs(v);
    if (scale > 1e-9) {
      LinearCondition c;
      c.lhs = qt[m];
      c.source_index = source_index;
      fr.conditions.push_back(c);
    }
  }
  double Ak = at[kappa], Pk1 = pt[kappa - 1];
  std::vector<AffineValue> series(terms);
  auto add_scaled = [](AffineValue& acc, const AffineValue& x, double s) {
    acc.base += x.base * s;
    for (auto& [k, v] : x.parts) acc.parts[k] += v * s;
  };
  for (int n = 0; n < terms; ++n) {
    int m = n + kappa - 1;
    AffineValue rest = qt[m];
    for (int a = kappa + 1; a <= m + 1; ++a) {
      int idx = m - a + 1;
      if (idx < 0 || idx >= n || a >= top) continue;
      add_scaled(rest, series[idx], at[a] * idx);
    }
    for (int a = kappa; a <= m; ++a) {
      int idx = m - a;
      if (idx < 0 || idx >= n || a >= top) continue;
      add_scaled(rest, series[idx], pt[a]);
    }
    double pivot = n * Ak + Pk1;
    if (std::abs(pivot) < 1e-9 * (std::abs(Ak) * std::max(1, n))) {
      double scale = std::abs(rest.base);
      for (auto& [k, v] : rest.parts) scale += std::abs(v);
      if (scale > 1e-9) {
        LinearCondition c;
        c.lhs = rest;
        c.source_index = source_index;
        fr.conditions.push_back(c);
      }
      series[n] = AffineValue{};
    } else {
      AffineValue v;
      add_scaled(v, rest, -1.0 / pivot);
      series[n] = v;
    }
  }
  fr.ok = true;
  fr.note = "numeric";
  fr.numeric_series = std::move(series);
  return fr;
}

}  // namespace

std::string to_string(ObstructionKind k) {
  switch (k) {
    case ObstructionKind::XiNonzero: return "XiNonzero";
    case ObstructionKind::MuNotOne: return "MuNotOne";
    case ObstructionKind::ZetaNonzero: return "ZetaNonzero";
    case ObstructionKind::Unbounded: return "Unbounded";
    case ObstructionKind::NonPeriodicTerm: return "NonPeriodicTerm";
    default: return "ConstantSystemInconsistent";
  }
}

namespace {

double affine_norm(const AffineValue& v, const ConstantBook& book) {
  double n = std::abs(book.resolve(v));
  for (auto& [k, c] : v.parts)
    if (!book.assigned.count(k)) n += std::abs(c);
  return n;
}

bool affine_has_free(const AffineValue& v, const ConstantBook& book, double tol) {
  for (auto& [k, c] : v.parts)
    if (!book.assigned.count(k) && std::abs(c) > tol) return true;
  return false;
}

/// Evaluate the affine forcing of eq at angle phi.
AffineValue forcing_at(const PeriodicODE& eq, double phi) {
  if (eq.Q_eval) return eq.Q_eval(phi);
  return affine_eval(eq.Q, phi);
}

/// Integrate the affine linear ODE A v' + P v + Q = 0 across [a, b] from an
/// affine seed, storing samples. Components: base plus one slot per constant.
struct AffineIvp {
  const PeriodicODE* eq;
  std::vector<int> keys;  // constant indices in play

  std::vector<double> pack(const AffineValue& v) const {
    std::vector<double> y(1 + keys.size(), 0.0);
    y[0] = v.base;
    for (size_t i = 0; i < keys.size(); ++i) {
      auto it = v.parts.find(keys[i]);
      y[1 + i] = it == v.parts.end() ? 0.0 : it->second;
    }
    return y;
  }
  AffineValue unpack(const std::vector<double>& y) const {
    AffineValue v;
    v.base = y[0];
    for (size_t i = 0; i < keys.size(); ++i)
      if (y[1 + i] != 0) v.parts[keys[i]] = y[1 + i];
    return v;
  }

  bool run(double a, double b, AffineValue seed, std::vector<CoefficientFn::Sample>& out,
           double rtol, double atol) const {
    Rk45 rk;
    rk.rtol = rtol;
    rk.atol = atol;
    rk.f = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
      double Av = eq->A.evaluate_real(t);
      double Pv = eq->P.evaluate_real(t);
      AffineValue q = forcing_at(*eq, t);
      double qb = q.base;
      dy.assign(y.size(), 0.0);
      if (std::abs(Av) < 1e-300) Av = (Av >= 0 ? 1e-300 : -1e-300);
      dy[0] = -(Pv * y[0] + qb) / Av;
      for (size_t i = 0; i < keys.size(); ++i) {
        auto it = q.parts.find(keys[i]);
        double qk = it == q.parts.end() ? 0.0 : it->second;
        dy[1 + i] = -(Pv * y[1 + i] + qk) / Av;
      }
    };
    auto y = pack(seed);
    size_t base_out = out.size();
    bool ok = rk.integrate(a, b, y, [&](double t, const std::vector<double>& yy) {
      CoefficientFn::Sample s;
      s.phi = wrap_angle(t);
      s.v = unpack(yy);
      std::vector<double> dy;
      rk.f(t, yy, dy);
      s.dv = unpack(dy);
      out.push_back(s);
    });
    // thin out to a manageable density, keep endpoints
    size_t added = out.size() - base_out;
    if (added > 512) {
      std::vector<CoefficientFn::Sample> slim;
      size_t stride = added / 384 + 1;
      for (size_t i = 0; i < added; ++i)
        if (i % stride == 0 || i + 1 == added) slim.push_back(out[base_out + i]);
      out.resize(base_out);
      out.insert(out.end(), slim.begin(), slim.end());
    }
    return ok;
  }
};

std::vector<int> forcing_keys(const PeriodicODE& eq) {
  std::vector<int> keys;
  for (auto& [k, t] : eq.Q.parts) keys.push_back(k);
  return keys;
}

AffineValue series_eval(const std::vector<AffineValue>& series, double s) {
  AffineValue acc;
  double p = 1;
  for (auto& c : series) {
    acc.base += c.base * p;
    for (auto& [k, v] : c.parts) acc.parts[k] += v * p;
    p *= s;
  }
  return acc;
}

/// Numeric confirmation that the mu-weighted forcing integral diverges:
/// returns the fitted 1/delta growth strength of the excised integral of
/// (Q/A) exp(int P/A).
double zeta_divergence_probe(const PeriodicODE& eq, const ConstantBook& book,
                             const OdeConfig& cfg) {
  std::vector<double> poles;
  for (auto& z : eq.omega) poles.push_back(z.angle);
  std::sort(poles.begin(), poles.end());
  if (poles.empty()) return 0;
  // accumulate log-mu along arcs (PV crossing increments neglected at scale delta)
  struct Node {
    double phi, lm;
  };
  std::vector<Node> table;
  double delta = 1e-6;
  double lm = 0;
  Rk45 rk;
  rk.rtol = 1e-10;
  rk.atol = 1e-12;
  rk.f = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    double Av = eq.A.evaluate_real(t);
    if (std::abs(Av) < 1e-300) Av = 1e-300;
    dy = {eq.P.evaluate_real(t) / Av};
  };
  for (size_t i = 0; i < poles.size(); ++i) {
    double a = poles[i] + delta;
    double b = (i + 1 < poles.size() ? poles[i + 1] : poles[0] + TWO_PI) - delta;
    std::vector<double> y = {lm};
    rk.integrate(a, b, y, [&](double t, const std::vector<double>& yy) {
      table.push_back({wrap_angle(t), yy[0]});
    });
    lm = y[0];
  }
  std::sort(table.begin(), table.end(), [](const Node& x, const Node& y) { return x.phi < y.phi; });
  if (table.empty()) return 0.0;
  // rebase so that mu = 1 at the first arc's midpoint (a regular angle);
  // without this the normalization collapses the measured strength
  {
    double mid = poles[0] + (poles.size() > 1 ? (poles[1] - poles[0]) : TWO_PI) / 2;
    mid = wrap_angle(mid);
    double lm_mid = 0;
    double bestd = 1e300;
    for (auto& n : table) {
      double d = std::abs(n.phi - mid);
      if (d < bestd) {
        bestd = d;
        lm_mid = n.lm;
      }
    }
    for (auto& n : table) n.lm -= lm_mid;
  }
  auto lm_at = [&](double phi) {
    phi = wrap_angle(phi);
    auto it = std::lower_bound(table.begin(), table.end(), phi,
                               [](const Node& n, double x) { return n.phi < x; });
    if (it == table.begin()) return it->lm;
    if (it == table.end()) return table.back().lm;
    auto p = it - 1;
    double u = (phi - p->phi) / std::max(it->phi - p->phi, 1e-300);
    return p->lm + u * (it->lm - p->lm);
  };
  auto g = [&](double s) {
    double Av = eq.A.evaluate_real(s);
    if (std::abs(Av) < 1e-300) Av = 1e-300;
    AffineValue q = forcing_at(eq, s);
    return book.resolve(q) / Av * std::exp(lm_at(s));
  };
  PVConfig pv = cfg.pv;
  pv.delta0 = 0.02;
  PVResult qr = pv_quadrature(g, poles, pv);
  double strength = 0;
  for (auto& d : qr.divergences) strength = std::max(strength, std::abs(d.strength.real()));
  return strength;
}

}  // namespace

Admissibility admissibility_check(const CoefficientFn& v, const PeriodicODE& eq,
                                  const ConstantBook& book, const OdeConfig& cfg) {
  Admissibility adm;
  if (v.exact) return adm;  // trig polynomials are bounded and periodic
  if (v.samples.empty()) {
    adm.ok = false;
    ObstructionRecord ob;
    ob.kind = ObstructionKind::NonPeriodicTerm;
    ob.index = eq.index;
    adm.obstruction = ob;
    return adm;
  }
  // growth sampling toward each characteristic angle
  for (auto& z : eq.omega) {
    std::vector<double> dist, mag;
    for (double d = 1e-2; d >= 1e-7; d /= 10) {
      for (double side : {+1.0, -1.0}) {
        double phi = z.angle + side * d;
        AffineValue val = v.eval(phi);
        double m = std::abs(book.resolve(val));
        if (m > 0) {
          dist.push_back(std::log10(d));
          mag.push_back(std::log10(m + 1e-300));
        }
      }
    }
    if (dist.size() >= 4) {
      // least-squares slope of log|v| vs log(dist)
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < dist.size(); ++i) {
        sx += dist[i];
        sy += mag[i];
        sxx += dist[i] * dist[i];
        sxy += dist[i] * mag[i];
      }
      double n = static_cast<double>(dist.size());
      double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      double top = *std::max_element(mag.begin(), mag.end());
      if (slope < cfg.unbounded_slope && top > 3) {
        adm.ok = false;
        ObstructionRecord ob;
        ob.kind = ObstructionKind::Unbounded;
        ob.index = eq.index;
        ob.value = std::pow(10.0, top);
        ob.quadrature_path = "growth slope " + std::to_string(slope);
        adm.obstruction = ob;
        return adm;
      }
    }
  }
  // periodicity across the cut
  AffineValue a0 = v.eval(1e-9), a1 = v.eval(TWO_PI - 1e-9);
  double jump = std::abs(book.resolve(a0) - book.resolve(a1));
  double scale = std::abs(book.resolve(a0)) + std::abs(book.resolve(a1)) + 1;
  bool near_omega = false;
  for (auto& z : eq.omega)
    if (std::abs(z.angle) < 1e-6 || std::abs(z.angle - TWO_PI) < 1e-6) near_omega = true;
  if (!near_omega && jump > 1e-6 * scale) {
    AffineValue diff;
    diff.base = a0.base - a1.base;
    for (auto& [k, c] : a0.parts) diff.parts[k] += c;
    for (auto& [k, c] : a1.parts) diff.parts[k] -= c;
    if (affine_has_free(diff, book, 1e-9)) {
      LinearCondition lc;
      lc.lhs = diff;
      lc.source_index = eq.index;
      adm.conditions.push_back(lc);
    } else {
      adm.ok = false;
      ObstructionRecord ob;
      ob.kind = ObstructionKind::NonPeriodicTerm;
      ob.index = eq.index;
      ob.value = jump;
      adm.obstruction = ob;
    }
  }
  return adm;
}

StepResult solve_periodic_ode(const PeriodicODE& eq, const ConstantBook& book,
                              const OdeConfig& cfg) {
  StepResult res;
  res.note = "";

  // ---- exact layer
  if (eq.q_exact) {
    bool all_found = true;
    AffineTrig closed;
    std::optional<TrigPoly> kernel;
    ExactSolve base_s = solve_exact_trig(eq.A, eq.P, eq.Q.base, 8, cfg.exact_harmonic_cap);
    if (base_s.found) {
      closed.base = base_s.particular;
      kernel = base_s.kernel;
      for (auto& [k, qk] : eq.Q.parts) {
        ExactSolve ps = solve_exact_trig(eq.A, eq.P, qk, 8, cfg.exact_harmonic_cap);
        if (!ps.found) {
          all_found = false;
          break;
        }
        if (!ps.particular.is_zero()) closed.parts[k] = ps.particular;
        if (!kernel && ps.kernel) kernel = ps.kernel;
      }
    } else {
      all_found = false;
    }
    if (all_found) {
      res.status = StepStatus::Solved;
      res.fn.exact = true;
      res.fn.closed = closed;
      if (kernel && !kernel->is_zero()) {
        res.new_constant = true;  // caller assigns the index and merges
        res.kernel = *kernel;
        res.mu_is_one = true;
        res.mu_value = 1;
      } else {
        // classify mu for the record (and catch a missed non-polynomial kernel)
        try {
          MuResult mu = compute_mu(eq.P, eq.A, eq.omega, cfg);
          res.mu_value = std::exp(mu.log_mu);
          res.mu_is_one = std::abs(mu.log_mu) < cfg.tol_mu;
          if (res.mu_is_one) res.note = "mu(2pi) = 1 with no trig-polynomial kernel; free direction not carried";
        } catch (const PVUndefined&) {
          res.note = "mu undefined; exact particular retained";
        }
      }
      return res;
    }
  }

  // ---- analytic-numeric layer
  MuResult mu = compute_mu(eq.P, eq.A, eq.omega, cfg);  // PVUndefined propagates
  res.mu_value = std::exp(mu.log_mu);
  res.mu_is_one = std::abs(mu.log_mu) < cfg.tol_mu;

  std::vector<int> keys = forcing_keys(eq);
  AffineIvp ivp{&eq, keys};

  if (eq.omega.empty()) {
    // classical Floquet case on a regular circle
    Rk45 rk;
    rk.rtol = cfg.pv.quad_tol;
    rk.atol = 1e-14;
    size_t nk = keys.size();
    // y = [log mu, zeta_base, zeta_k...]
    rk.f = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
      double Av = eq.A.evaluate_real(t);
      double Pv = eq.P.evaluate_real(t);
      AffineValue q = forcing_at(eq, t);
      dy.assign(y.size(), 0.0);
      dy[0] = Pv / Av;
      double m = std::exp(y[0]);
      dy[1] = q.base / Av * m;
      for (size_t i = 0; i < nk; ++i) {
        auto it = q.parts.find(keys[i]);
        dy[2 + i] = (it == q.parts.end() ? 0.0 : it->second) / Av * m;
      }
    };
    std::vector<double> y(2 + nk, 0.0);
    if (!rk.integrate(0, TWO_PI, y)) {
      res.status = StepStatus::Undetermined;
      res.note = "IVP failed on the regular circle";
      return res;
    }
    double M = std::exp(y[0]);
    AffineValue zeta;
    zeta.base = y[1];
    for (size_t i = 0; i < nk; ++i)
      if (y[2 + i] != 0) zeta.parts[keys[i]] = y[2 + i];
    if (!res.mu_is_one) {
      AffineValue v0;
      v0.base = zeta.base / (1 - M);
      for (auto& [k, c] : zeta.parts) v0.parts[k] = c / (1 - M);
      std::vector<CoefficientFn::Sample> samples;
      if (!ivp.run(0, TWO_PI, v0, samples, cfg.pv.quad_tol, 1e-14)) {
        res.status = StepStatus::Undetermined;
        return res;
      }
      res.fn.samples = std::move(samples);
      std::sort(res.fn.samples.begin(), res.fn.samples.end(),
                [](auto& a, auto& b) { return a.phi < b.phi; });
      res.status = StepStatus::Solved;
      return res;
    }
    // mu = 1: all periodic iff zeta = 0
    if (affine_norm(zeta, book) > cfg.tol_zero * (1 + std::abs(M))) {
      if (affine_has_free(zeta, book, cfg.tol_zero)) {
        LinearCondition lc;
        lc.lhs = zeta;
        lc.source_index = eq.index;
        res.conditions.push_back(lc);
        res.status = StepStatus::Condition;
        return res;
      }
      ObstructionRecord ob;
      ob.kind = ObstructionKind::ZetaNonzero;
      ob.index = eq.index;
      ob.value = book.resolve(zeta);
      ob.error = 1e-10;
      ob.quadrature_path = "zeta(2pi) by direct integration";
      ob.dual_confirmed = false;
      res.obstruction = ob;
      res.status = StepStatus::Obstructed;
      return res;
    }
    // particular with v(0) = 0, plus the periodic homogeneous direction
    AffineValue v0;
    std::vector<CoefficientFn::Sample> samples;
    ivp.run(0, TWO_PI, v0, samples, cfg.pv.quad_tol, 1e-14);
    res.fn.samples = std::move(samples);
    std::sort(res.fn.samples.begin(), res.fn.samples.end(),
              [](auto& a, auto& b) { return a.phi < b.phi; });
    res.status = StepStatus::Solved;
    res.new_constant = true;
    res.kernel_numeric = true;  // h = exp(-int P/A); caller samples it
    return res;
  }

  // ---- singular circle: local analysis at each characteristic angle
  std::vector<LocalData> locals;
  for (auto& z : eq.omega) locals.push_back(analyze_local(eq.A, eq.P, z));

  // case (ii) global periodicity test against the kernel
  std::optional<TrigPoly> exact_kernel;
  if (res.mu_is_one) {
    ExactSolve hom = solve_exact_trig(eq.A, eq.P, TrigPoly(), 8, cfg.exact_harmonic_cap);
    if (hom.found && hom.kernel) exact_kernel = hom.kernel;
    if (!exact_kernel) {
      res.status = StepStatus::Undetermined;
      res.note = "mu(2pi) = 1 but no exact kernel available on a singular circle";
      return res;
    }
    if (eq.q_exact && !eq.Q.is_zero()) {
      // J = PV of -Q/(A K): the kernel-normalized secular increment
      TrigPoly AK = eq.A * *exact_kernel;
      PVConfig pvq = cfg.pv;
      std::vector<std::pair<double, int>> poles;
      for (auto& z : zeros_on_circle(AK)) {
        poles.push_back({z.angle, z.multiplicity});
        pvq.max_pole_order = std::max(pvq.max_pole_order, z.multiplicity + 1);
      }
      auto j_of = [&](const TrigPoly& q) {
        RationalTrig W(-q, AK);
        // the reduced denominator may have shallower poles than A*K
        std::vector<std::pair<double, int>> wpoles;
        if (!W.num.is_zero())
          for (auto& z : zeros_on_circle(W.den)) wpoles.push_back({z.angle, z.multiplicity});
        PVResult r = pv_contour_integral(W, pvq);
        PVResult qd =
            pv_finite_part_quadrature([&](double s) { return W.evaluate_real(s); }, wpoles, pvq);
        return std::make_pair(r, qd);
      };
      auto [jr, jq] = j_of(eq.Q.base);
      AffineValue J;
      J.base = jr.value.real();
      // exact payload: value = 2 pi i sum, so the rational part is -Im(sum);
      // base and parts share the common 2 pi factor, which cancels in the
      // greedy assignments
      if (jr.exact_sum && jr.exact_sum->re == 0) J.exact_base = GaussRat(-jr.exact_sum->im);
      double dual_gap = std::abs(jr.value.real() - jq.value.real());
      for (auto& [k, qk] : eq.Q.parts) {
        auto [pr, pq] = j_of(qk);
        if (std::abs(pr.value.real()) > cfg.tol_zero) {
          J.parts[k] = pr.value.real();
          if (pr.exact_sum && pr.exact_sum->re == 0 && J.exact_base)
            J.exact_parts[k] = GaussRat(-pr.exact_sum->im);
        }
      }
      if (affine_norm(J, book) > cfg.tol_zero) {
        if (affine_has_free(J, book, cfg.tol_zero)) {
          LinearCondition lc;
          lc.lhs = J;
          lc.source_index = eq.index;
          res.conditions.push_back(lc);
          res.status = StepStatus::Condition;
          return res;
        }
        ObstructionRecord ob;
        ob.kind = ObstructionKind::ZetaNonzero;
        ob.index = eq.index;
        ob.value = book.resolve(J);
        ob.error = std::max(jr.error_estimate, dual_gap);
        ob.residue_path = jr.exact ? "half-residue finite part (exact factors)"
                                   : "half-residue finite part";
        ob.quadrature_path = "window-corrected excision, gap " + std::to_string(dual_gap);
        ob.dual_confirmed =
            dual_gap < std::max({1e-6, 3e-2 * std::abs(ob.value),
                                 4 * (jq.error_estimate + jr.error_estimate)});
        res.obstruction = ob;
        res.status = StepStatus::Obstructed;
        return res;
      }
    }
  }

  // local crossing conditions (resonances and forced-unbounded forcings)
  std::vector<FrobeniusResult> frobs;
  int terms_needed = 4;
  for (auto& L : locals)
    if (L.resonance_order >= 0) terms_needed = std::max(terms_needed, L.resonance_order + 3);
  if (terms_needed > cfg.frobenius_cap) {
    res.status = StepStatus::Undetermined;
    res.note = "resonance order beyond cap";
    return res;
  }
  for (size_t i = 0; i < locals.size(); ++i) {
    const LocalData& L = locals[i];
    FrobeniusResult fr;
    if (L.quarter && eq.q_exact)
      fr = frobenius_exact(eq.A, eq.P, eq.Q, L, terms_needed, eq.index);
    else
      fr = frobenius_numeric(eq.A, eq.P, eq.Q_eval, eq.Q, eq.q_exact, L, terms_needed, eq.index);
    if (fr.irregular || !fr.ok) {
      res.status = StepStatus::Undetermined;
      res.note = "local analysis unavailable at angle " + std::to_string(L.angle) +
                 (fr.note.empty() ? "" : (": " + fr.note));
      return res;
    }
    for (auto& c : fr.conditions) {
      double norm = affine_norm(c.lhs, book);
      if (norm <= cfg.tol_zero) continue;
      if (affine_has_free(c.lhs, book, cfg.tol_zero)) {
        res.conditions.push_back(c);
      } else {
        // hard local obstruction; dual-confirm by the quadrature divergence
        ObstructionRecord ob;
        ob.kind = ObstructionKind::ZetaNonzero;
        ob.index = eq.index;
        ob.value = book.resolve(c.lhs);
        if (c.lhs.exact_base && c.lhs.parts.empty())
          ob.residue_path = "exact local residual " + c.lhs.exact_base->str();
        else
          ob.residue_path = "local series residual";
        double strength = zeta_divergence_probe(eq, book, cfg);
        ob.quadrature_path = "mu-weighted excision strength " + std::to_string(strength);
        ob.dual_confirmed = strength > cfg.tol_zero;
        ob.error = 1e-12;
        res.obstruction = ob;
        res.status = StepStatus::Obstructed;
        return res;
      }
    }
    frobs.push_back(std::move(fr));
  }
  if (!res.conditions.empty()) {
    res.status = StepStatus::Condition;
    return res;
  }

  // ---- construct the candidate arc by arc from the analytic branches
  double margin = cfg.arc_margin;
  std::vector<CoefficientFn::Sample> samples;
  size_t n_omega = locals.size();
  AffineValue carried;  // value transported across the current crossing
  bool carried_valid = false;
  for (size_t i = 0; i < n_omega; ++i) {
    const LocalData& L = locals[i];
    const LocalData& Lnext = locals[(i + 1) % n_omega];
    double a = L.angle + margin;
    double b = (i + 1 < n_omega ? Lnext.angle : locals[0].angle + TWO_PI) - margin;
    if (b <= a) {
      res.status = StepStatus::Undetermined;
      res.note = "characteristic angles too close for arc construction";
      return res;
    }
    AffineValue seed = series_eval(frobs[i].numeric_series, margin);
    (void)carried_valid;
    (void)carried;
    std::vector<CoefficientFn::Sample> arc;
    if (!ivp.run(a, b, seed, arc, cfg.pv.quad_tol, 1e-14)) {
      res.status = StepStatus::Undetermined;
      res.note = "arc integration failed";
      return res;
    }
    // defect against the next analytic branch (approached from the left)
    AffineValue end_val = arc.back().v;
    AffineValue branch = series_eval(frobs[(i + 1) % n_omega].numeric_series, -margin);
    AffineValue defect;
    defect.base = end_val.base - branch.base;
    for (auto& [k, c] : end_val.parts) defect.parts[k] += c;
    for (auto& [k, c] : branch.parts) defect.parts[k] -= c;
    double dnorm = affine_norm(defect, book);
    double scale = 1 + std::abs(book.resolve(end_val)) + std::abs(book.resolve(branch));
    if (dnorm > 1e-5 * scale) {
      bool far_bounded = Lnext.alpha > 1e-9;  // singular branch |s|^alpha bounded
      if (!far_bounded) {
        if (affine_has_free(defect, book, cfg.tol_zero)) {
          LinearCondition lc;
          lc.lhs = defect;
          lc.source_index = eq.index;
          res.conditions.push_back(lc);
          res.status = StepStatus::Condition;
          return res;
        }
        ObstructionRecord ob;
        ob.kind = ObstructionKind::Unbounded;
        ob.index = eq.index;
        ob.value = book.resolve(defect);
        ob.error = 1e-6 * scale;
        ob.quadrature_path = "arc-matching defect against the bounded branch";
        res.obstruction = ob;
        res.status = StepStatus::Obstructed;
        return res;
      }
      // absorbed by the decaying singular branch; continue from the branch
    }
    for (auto& s : arc) samples.push_back(s);
  }
  std::sort(samples.begin(), samples.end(), [](auto& x, auto& y) { return x.phi < y.phi; });
  res.fn.samples = std::move(samples);
  res.status = StepStatus::Solved;
  if (res.mu_is_one && exact_kernel) {
    res.new_constant = true;
    res.kernel = *exact_kernel;
  }
  return res;
}

}  // namespace monodromic
