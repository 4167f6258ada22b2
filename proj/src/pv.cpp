#include "monodromic/pv.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace monodromic {

namespace {

using cd = std::complex<double>;
constexpr double TWO_PI = 2 * M_PI;

/// Laurent coefficients a_{-m}..a_{-1} of N/D at a root z0 of D of order m.
/// Shift both polynomials to z0 and divide the series.
std::vector<cd> local_principal_part(const GPoly& N, const GPoly& D, cd z0, int m) {
  int terms = 2 * m + 2;
  // Taylor coefficients of N and D at z0 (numeric synthetic shift)
  auto shift = [&](const GPoly& p) {
    std::vector<cd> t(terms, cd{0, 0});
    // t[j] = p^{(j)}(z0)/j!  via repeated synthetic division
    std::vector<cd> c(p.c.size());
    for (size_t k = 0; k < p.c.size(); ++k) c[k] = p.c[k].to_complex();
    for (int j = 0; j < terms; ++j) {
      if (c.empty()) break;
      cd rem{0, 0};
      for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        cd tmp = c[k] + rem * z0;
        c[k] = rem;
        rem = tmp;
      }
      t[j] = rem;
      if (!c.empty()) c.pop_back();
    }
    return t;
  };
  std::vector<cd> nt = shift(N), dt = shift(D);
  // D = s^m * (dt[m] + dt[m+1] s + ...); invert the regular part
  std::vector<cd> reg(dt.begin() + m, dt.end());
  while (reg.size() < static_cast<size_t>(m) + 2) reg.push_back(cd{0, 0});
  std::vector<cd> inv(m + 1, cd{0, 0});
  inv[0] = 1.0 / reg[0];
  for (int j = 1; j <= m; ++j) {
    cd acc{0, 0};
    for (int k = 1; k <= j; ++k)
      if (k < static_cast<int>(reg.size())) acc += reg[k] * inv[j - k];
    inv[j] = -acc / reg[0];
  }
  // series of N/D = s^{-m} * (nt * inv)
  std::vector<cd> pp(m, cd{0, 0});  // pp[k] = a_{k-m}
  for (int j = 0; j < m; ++j) {
    cd acc{0, 0};
    for (int k = 0; k <= j; ++k) acc += nt[k] * inv[j - k];
    pp[j] = acc;
  }
  return pp;  // a_{-m}, a_{-m+1}, ..., a_{-1}
}

/// Divergence strengths of the symmetric excision around an on-contour pole:
/// the jump of the rational antiderivative terms across z0 e^{+-i delta}.
/// Returns coefficients of delta^{-j} at index j-1, j = 1..m-1.
std::vector<cd> excision_strengths(const std::vector<cd>& principal, cd z0) {
  int m = static_cast<int>(principal.size());
  if (m < 2) return {};
  std::vector<cd> strengths(m - 1, cd{0, 0});
  int terms = m + 3;
  // e^{id} - 1 = id (1 + u(d)), u_j = i^j / (j+1)!
  std::vector<cd> u(terms, cd{0, 0});
  double fact = 1;  // (j+1)!
  for (int j = 1; j < terms; ++j) {
    fact *= (j + 1);
    u[j] = std::pow(cd{0, 1}, j) / fact;
  }
  for (int k = 2; k <= m; ++k) {
    cd a = principal[m - k];  // a_{-k}
    if (std::abs(a) == 0) continue;
    // (1+u)^{1-k} as a truncated series
    std::vector<cd> pow_series(terms, cd{0, 0});
    pow_series[0] = 1.0;
    std::vector<cd> up(terms, cd{0, 0});
    up[0] = 1.0;
    double binom = 1.0;
    for (int t = 1; t < terms; ++t) {
      std::vector<cd> nu(terms, cd{0, 0});
      for (int x = 0; x < terms; ++x) {
        if (std::abs(up[x]) == 0) continue;
        for (int y = 0; x + y < terms; ++y) nu[x + y] += up[x] * u[y];
      }
      up = nu;
      binom *= double(1 - k - (t - 1)) / t;
      for (int x = 0; x < terms; ++x) pow_series[x] += binom * up[x];
    }
    // h(d) = (z0(e^{id}-1))^{1-k} = (i z0)^{1-k} d^{1-k} (1+u)^{1-k}
    cd front = std::pow(z0 * cd{0, 1}, 1.0 - k);
    cd coef = a / double(1 - k);  // antiderivative factor
    // jump h(-d) - h(d): d^{power} survives only for odd power, factor -2
    for (int n = 0; n < terms; ++n) {
      int power = 1 - k + n;
      if (power >= 0) break;
      bool odd = ((power % 2) + 2) % 2 == 1;
      if (!odd) continue;
      strengths[-power - 1] += coef * front * pow_series[n] * (-2.0);
    }
  }
  return strengths;
}

double min_gap(const std::vector<double>& poles) {
  if (poles.size() < 2) return TWO_PI;
  double g = TWO_PI;
  for (size_t i = 0; i < poles.size(); ++i) {
    double a = poles[i];
    double b = (i + 1 < poles.size()) ? poles[i + 1] : poles[0] + TWO_PI;
    g = std::min(g, b - a);
  }
  return g;
}

}  // namespace

double PVResult::real_checked(double tol) const {
  if (std::abs(value.imag()) > tol)
    throw std::runtime_error("PV value has unexpected imaginary part");
  return value.real();
}

void contour_integrand(const RationalTrig& W, GPoly& N, GPoly& D) {
  LaurentPoly ln = trig_to_laurent(W.num), ld = trig_to_laurent(W.den);
  if (ln.is_zero()) {
    N = {};
    D = GPoly::constant(GaussRat(1));
    return;
  }
  GPoly pn = ln.poly_part(), pd = ld.poly_part();
  long e = ln.low() - ld.low() - 1;  // net z power after dividing by iz
  N = pn;
  D = pd;
  if (e >= 0)
    N = N * GPoly::monomial(GaussRat(1), static_cast<int>(e));
  else
    D = D * GPoly::monomial(GaussRat(1), static_cast<int>(-e));
  D = D.scaled(GaussRat::i());  // dphi = dz/(iz)
}

namespace {

/// Exact Laurent principal part a_{-m}..a_{-1} of N/D at an exactly-known
/// root z0 of D of order m (Gaussian-rational synthetic shift).
std::vector<GaussRat> exact_principal_part(const GPoly& N, const GPoly& D, const GaussRat& z0,
                                           int m) {
  int terms = 2 * m + 2;
  auto shift = [&](const GPoly& p) {
    std::vector<GaussRat> t(terms, GaussRat(0));
    std::vector<GaussRat> c = p.c;
    for (int j = 0; j < terms; ++j) {
      if (c.empty()) break;
      GaussRat rem(0);
      for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        GaussRat tmp = c[k] + rem * z0;
        c[k] = rem;
        rem = tmp;
      }
      t[j] = rem;
      if (!c.empty()) c.pop_back();
    }
    return t;
  };
  std::vector<GaussRat> nt = shift(N), dt = shift(D);
  std::vector<GaussRat> reg(dt.begin() + m, dt.end());
  while (reg.size() < static_cast<size_t>(m) + 2) reg.push_back(GaussRat(0));
  if (reg[0].is_zero()) throw std::domain_error("exact_principal_part: order mismatch");
  std::vector<GaussRat> inv(m + 1, GaussRat(0));
  inv[0] = reg[0].inverse();
  for (int j = 1; j <= m; ++j) {
    GaussRat acc(0);
    for (int k = 1; k <= j; ++k)
      if (k < static_cast<int>(reg.size())) acc += reg[k] * inv[j - k];
    inv[j] = -(acc * inv[0]);
  }
  std::vector<GaussRat> pp(m, GaussRat(0));
  for (int j = 0; j < m; ++j) {
    GaussRat acc(0);
    for (int k = 0; k <= j; ++k) acc += nt[k] * inv[j - k];
    pp[j] = acc;
  }
  return pp;
}

}  // namespace

PVResult pv_contour_integral(const RationalTrig& W, const PVConfig& cfg) {
  PVResult res;
  res.method = PVMethod::Residues;
  if (W.is_zero()) {
    res.exact = true;
    res.exact_sum = GaussRat(0);
    return res;
  }
  GPoly N, D;
  contour_integrand(W, N, D);
  if (D.degree() < 1) {
    // no poles at all: the integral of a trig polynomial is 2pi * mean
    GaussRat mean = W.num.coeff(0) / W.den.coeff(0);
    res.value = TWO_PI * mean.to_complex();
    res.exact = true;
    res.exact_sum = -(GaussRat::i() * mean);  // value = 2 pi i * sum
    return res;
  }

  ExactFactors ef = exact_factor(D, cfg.factor_denominator_cap);
  GaussRat exact_sum(0);
  cd inexact{0, 0};
  bool all_exact = true;
  double err = 0;

  auto classify_exact = [&](const GPoly& q) {
    RootSet rs = find_roots(q, RootConfig{cfg.tau_circle, cfg.tau_cluster});
    int in = 0, on = 0, out = 0;
    for (auto& r : rs.roots) {
      if (r.circle_class == CircleClass::Inside) in += r.multiplicity;
      else if (r.circle_class == CircleClass::OnContour) on += r.multiplicity;
      else out += r.multiplicity;
    }
    if (in && !on && !out) return CircleClass::Inside;
    if (on && !in && !out) return CircleClass::OnContour;
    if (out && !in && !on) return CircleClass::Outside;
    return static_cast<CircleClass>(-1);
  };

  auto note_contour_pole = [&](double ang) {
    if (ang < 0) ang += TWO_PI;
    res.on_contour_poles.push_back(ang);
  };

  auto numeric_pole = [&](std::complex<double> z0, int order, double residual) {
    auto pp = local_principal_part(N, D, z0, order);
    cd a1 = pp.back();
    double dev = std::abs(std::abs(z0) - 1.0);
    if (dev < cfg.tau_circle) {
      note_contour_pole(std::arg(z0));
      inexact += cd{0, 1} * M_PI * a1;
      if (order >= 2) {
        auto strengths = excision_strengths(pp, z0);
        for (size_t j = 0; j < strengths.size(); ++j)
          if (std::abs(strengths[j]) > cfg.divergence_tol) {
            res.diverges = true;
            double ang = std::arg(z0);
            if (ang < 0) ang += TWO_PI;
            res.divergences.push_back({ang, static_cast<int>(j + 1), strengths[j]});
          }
      }
    } else if (std::abs(z0) < 1) {
      inexact += cd{0, 1} * TWO_PI * a1;
    }
    all_exact = false;
    err = std::max(err, residual * 10);
  };

  for (auto& [q, mult] : ef.factors) {
    CircleClass cls = classify_exact(q);
    if (cls == CircleClass::Outside) continue;
    if (mult == 1 && (cls == CircleClass::Inside || cls == CircleClass::OnContour)) {
      GaussRat sum = residue_sum_over_factor(N, D, q);
      if (cls == CircleClass::OnContour) {
        sum = sum * GaussRat(rat(1, 2));
        RootSet rs = find_roots(q);
        for (auto& r : rs.roots) note_contour_pole(std::arg(r.location));
      }
      exact_sum += sum;
      continue;
    }
    if (mult == 2 && cls == CircleClass::Inside && q.degree() >= 2) {
      exact_sum += residue_sum_over_double_factor(N, D, q);
      continue;
    }
    if (q.degree() == 1 && mult >= 2) {
      // exactly-known multiple pole: exact local series
      GaussRat z0 = -(q.c[0] / q.c[1]);
      auto pp = exact_principal_part(N, D, z0, mult);
      GaussRat a1 = pp.back();
      bool on = (z0.norm() == 1);
      if (on) {
        note_contour_pole(std::arg(z0.to_complex()));
        exact_sum += a1 * GaussRat(rat(1, 2));
        std::vector<cd> ppc(pp.size());
        for (size_t i = 0; i < pp.size(); ++i) ppc[i] = pp[i].to_complex();
        auto strengths = excision_strengths(ppc, z0.to_complex());
        for (size_t j = 0; j < strengths.size(); ++j)
          if (std::abs(strengths[j]) > cfg.divergence_tol) {
            res.diverges = true;
            double ang = std::arg(z0.to_complex());
            if (ang < 0) ang += TWO_PI;
            res.divergences.push_back({ang, static_cast<int>(j + 1), strengths[j]});
          }
      } else if (z0.norm() < 1) {
        exact_sum += a1;
      }
      continue;
    }
    // inexact fallback per root
    RootSet rs = find_roots(q, RootConfig{cfg.tau_circle, cfg.tau_cluster});
    for (auto& r : rs.roots) numeric_pole(r.location, r.multiplicity * mult, r.residual);
  }
  if (!ef.complete()) {
    RootSet rs = find_roots(ef.rest, RootConfig{cfg.tau_circle, cfg.tau_cluster});
    for (auto& r : rs.roots) numeric_pole(r.location, r.multiplicity * ef.rest_multiplicity, r.residual);
  }
  std::sort(res.on_contour_poles.begin(), res.on_contour_poles.end());
  res.value = cd{0, 1} * TWO_PI * exact_sum.to_complex() + inexact;
  res.exact = all_exact;
  if (all_exact) res.exact_sum = exact_sum;
  res.error_estimate = all_exact ? 1e-15 : std::max(err, 1e-13);
  return res;
}

PVResult pv_quadrature(const std::function<double(double)>& W, std::vector<double> poles,
                       const PVConfig& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  PVResult res;
  res.method = PVMethod::Quadrature;
  std::sort(poles.begin(), poles.end());
  res.on_contour_poles = poles;

  if (poles.empty()) {
    double err;
    double v = gauss_kronrod<double, 31>::integrate(W, 0.0, TWO_PI, 10, 1e-13, &err);
    res.value = v;
    res.error_estimate = err;
    return res;
  }

  double gap = min_gap(poles);
  double d0 = std::min(cfg.delta0, gap / 8);
  // model I(delta) = sum_{j=1}^{M-1} c_j delta^-j + c_log ln(1/delta)
  //                 + FP + a1 delta + a2 delta^2
  int neg = std::max(cfg.max_pole_order - 1, 1);
  int P = neg + 4;
  int L = std::max(cfg.ladder, P + 4);

  auto excised = [&](double delta) {
    double total = 0;
    for (size_t i = 0; i < poles.size(); ++i) {
      double a = poles[i] + delta;
      double b = (i + 1 < poles.size() ? poles[i + 1] : poles[0] + TWO_PI) - delta;
      if (b <= a) continue;
      double err;
      total += gauss_kronrod<double, 31>::integrate(W, a, b, 12, 1e-13, &err);
    }
    return total;
  };

  std::vector<double> deltas(L), vals(L);
  for (int k = 0; k < L; ++k) {
    deltas[k] = d0 / std::pow(2.0, k * 0.5);
    vals[k] = excised(deltas[k]);
  }

  auto basis = [&](double d, int j) -> double {
    if (j < neg) return std::pow(d, -double(neg - j));  // delta^{-(neg-j)}
    switch (j - neg) {
      case 0: return std::log(1.0 / d);
      case 1: return 1.0;
      case 2: return d;
      default: return d * d;
    }
  };
  // least squares with column scaling
  std::vector<double> colscale(P, 1.0);
  for (int j = 0; j < P; ++j) {
    double m = 0;
    for (int k = 0; k < L; ++k) m = std::max(m, std::abs(basis(deltas[k], j)));
    colscale[j] = m > 0 ? 1.0 / m : 1.0;
  }
  std::vector<std::vector<double>> A(P, std::vector<double>(P + 1, 0.0));
  for (int k = 0; k < L; ++k)
    for (int i = 0; i < P; ++i) {
      double bi = basis(deltas[k], i) * colscale[i];
      A[i][P] += bi * vals[k];
      for (int j = 0; j < P; ++j) A[i][j] += bi * basis(deltas[k], j) * colscale[j];
    }
  std::vector<double> x(P, 0.0);
  for (int col = 0; col < P; ++col) {
    int piv = col;
    for (int r = col + 1; r < P; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    if (std::abs(A[col][col]) < 1e-300) continue;
    for (int r = 0; r < P; ++r) {
      if (r == col) continue;
      double f = A[r][col] / A[col][col];
      for (int cc = col; cc <= P; ++cc) A[r][cc] -= f * A[col][cc];
    }
  }
  for (int i = 0; i < P; ++i)
    x[i] = (std::abs(A[i][i]) > 1e-300) ? A[i][P] / A[i][i] * colscale[i] : 0.0;

  double fp = x[neg + 1];
  double fit_resid = 0;
  for (int k = 0; k < L; ++k) {
    double pred = 0;
    for (int j = 0; j < P; ++j) pred += x[j] * basis(deltas[k], j);
    fit_resid = std::max(fit_resid, std::abs(pred - vals[k]));
  }
  res.value = fp;
  res.error_estimate = std::max(fit_resid, 1e-13 * (1 + std::abs(fp)));
  double scale = 1 + std::abs(fp);
  for (int j = 0; j < neg; ++j) {
    int order = neg - j;
    // discount deep orders: their basis columns are huge, coefficients tiny
    double thresh = cfg.divergence_tol * scale * std::pow(d0, order - 1);
    if (std::abs(x[j]) > thresh) {
      res.diverges = true;
      res.divergences.push_back({poles.front(), order, x[j]});
    }
  }
  if (!res.diverges && std::abs(x[neg]) > 1e-4 * scale)
    res.error_estimate = std::max(res.error_estimate, std::abs(x[neg]));
  return res;
}

namespace {

/// Least squares by modified Gram-Schmidt QR with column scaling.
std::vector<double> lsq_solve(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& rhs) {
  size_t m = rows.size(), n = m ? rows[0].size() : 0;
  std::vector<std::vector<double>> Q(n, std::vector<double>(m));
  std::vector<double> scale(n, 1.0);
  for (size_t j = 0; j < n; ++j) {
    double mx = 0;
    for (size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(rows[i][j]));
    scale[j] = mx > 0 ? 1.0 / mx : 1.0;
    for (size_t i = 0; i < m; ++i) Q[j][i] = rows[i][j] * scale[j];
  }
  std::vector<std::vector<double>> R(n, std::vector<double>(n, 0.0));
  for (size_t j = 0; j < n; ++j) {
    for (size_t k = 0; k < j; ++k) {
      double dot = 0;
      for (size_t i = 0; i < m; ++i) dot += Q[k][i] * Q[j][i];
      R[k][j] = dot;
      for (size_t i = 0; i < m; ++i) Q[j][i] -= dot * Q[k][i];
    }
    double nrm = 0;
    for (size_t i = 0; i < m; ++i) nrm += Q[j][i] * Q[j][i];
    nrm = std::sqrt(nrm);
    R[j][j] = nrm;
    if (nrm > 1e-300)
      for (size_t i = 0; i < m; ++i) Q[j][i] /= nrm;
  }
  std::vector<double> b(n, 0.0);
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < m; ++i) b[j] += Q[j][i] * rhs[i];
  std::vector<double> x(n, 0.0);
  for (int j = static_cast<int>(n) - 1; j >= 0; --j) {
    double acc = b[j];
    for (size_t k = j + 1; k < n; ++k) acc -= R[j][k] * x[k];
    x[j] = (std::abs(R[j][j]) > 1e-300) ? acc / R[j][j] : 0.0;
  }
  for (size_t j = 0; j < n; ++j) x[j] *= scale[j];
  return x;
}

}  // namespace

PVResult pv_finite_part_quadrature(const std::function<double(double)>& W,
                                   const std::vector<std::pair<double, int>>& poles_with_orders,
                                   const PVConfig& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  PVResult res;
  res.method = PVMethod::Quadrature;
  if (poles_with_orders.empty()) {
    double err;
    res.value = gauss_kronrod<double, 31>::integrate(W, 0.0, TWO_PI, 10, 1e-13, &err);
    res.error_estimate = err;
    return res;
  }
  std::vector<std::pair<double, int>> poles = poles_with_orders;
  std::sort(poles.begin(), poles.end());
  for (auto& [a, k] : poles) res.on_contour_poles.push_back(a);

  double gap = TWO_PI;
  for (size_t i = 0; i < poles.size(); ++i) {
    double b = (i + 1 < poles.size() ? poles[i + 1].first : poles[0].first + TWO_PI);
    gap = std::min(gap, b - poles[i].first);
  }
  double s_hi = std::min(gap / 4, 0.3);

  // stage 1: per pole, fit the even part of W locally; only even powers feed
  // the symmetric window corrections (odd ones cancel)
  struct Local {
    double angle;
    std::vector<int> powers;       // even powers, ascending
    std::vector<double> coeff;
    double resid = 0;
  };
  std::vector<Local> locals;
  double fit_err = 0;
  int max_even_order = 0;
  for (auto& [ang, K] : poles) {
    Local L;
    L.angle = ang;
    int keven = K - (K % 2);  // deepest even singular power
    max_even_order = std::max(max_even_order, keven);
    for (int p = -keven; p <= 6; p += 2) L.powers.push_back(p);
    int per_side = 24;
    double lo = s_hi / 10;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (int i = 0; i < per_side; ++i) {
      double s = lo * std::pow(s_hi / lo, double(i) / (per_side - 1));
      std::vector<double> row(L.powers.size());
      for (size_t j = 0; j < L.powers.size(); ++j) row[j] = std::pow(s, double(L.powers[j]));
      rows.push_back(row);
      rhs.push_back(0.5 * (W(ang + s) + W(ang - s)));
    }
    L.coeff = lsq_solve(rows, rhs);
    for (size_t i = 0; i < rows.size(); ++i) {
      double pred = 0;
      for (size_t j = 0; j < rows[i].size(); ++j) pred += rows[i][j] * L.coeff[j];
      L.resid = std::max(L.resid, std::abs(pred - rhs[i]) / (std::abs(rhs[i]) + 1));
    }
    fit_err = std::max(fit_err, L.resid);
    for (size_t j = 0; j < L.powers.size(); ++j) {
      int p = L.powers[j];
      if (p <= -2 && std::abs(L.coeff[j]) > cfg.divergence_tol) {
        res.diverges = true;
        res.divergences.push_back({ang, -p - 1, 2.0 * L.coeff[j] / (-p - 1)});
      }
    }
    locals.push_back(std::move(L));
  }

  // stage 2: window-corrected excisions over an eps ladder, then a small
  // extrapolation removes the residual singular content of the fit errors
  auto F_of = [&](double eps) {
    double total = 0;
    for (size_t i = 0; i < locals.size(); ++i) {
      double a = locals[i].angle + eps;
      double b = (i + 1 < locals.size() ? locals[i + 1].angle : locals[0].angle + TWO_PI) - eps;
      double err;
      total += gauss_kronrod<double, 31>::integrate(W, a, b, 12, 1e-13, &err);
    }
    for (auto& L : locals)
      for (size_t j = 0; j < L.powers.size(); ++j) {
        int p = L.powers[j];
        // finite part of the window integral of coeff * s^p over (-eps, eps)
        total += L.coeff[j] * 2 * std::pow(eps, p + 1.0) / (p + 1.0);
      }
    return total;
  };
  int rungs = 8;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<int> fpowers;  // residual model: constant + even singulars + tail
  fpowers.push_back(0);
  for (int p = -max_even_order + 1; p <= -1; p += 2) fpowers.push_back(p);
  fpowers.push_back(8);
  for (int i = 0; i < rungs; ++i) {
    double eps = s_hi * std::pow(0.5, double(i) / 2.5);
    std::vector<double> row(fpowers.size());
    for (size_t j = 0; j < fpowers.size(); ++j) row[j] = std::pow(eps, double(fpowers[j]));
    rows.push_back(row);
    rhs.push_back(F_of(eps));
  }
  std::vector<double> x = lsq_solve(rows, rhs);
  double fp = x[0];
  double resid = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double pred = 0;
    for (size_t j = 0; j < rows[i].size(); ++j) pred += rows[i][j] * x[j];
    resid = std::max(resid, std::abs(pred - rhs[i]));
  }
  // spread of the plain ladder as a sanity bound
  double spread = 0;
  for (double v : rhs) spread = std::max(spread, std::abs(v - fp));
  res.value = fp;
  res.error_estimate = std::max({resid * 4, 1e-12, std::min(spread, fit_err * 10)});
  return res;
}

std::complex<double> residue_simple(const GPoly& N, const GPoly& D, std::complex<double> z0,
                                    double tau_cluster) {
  cd dv = D.derivative().eval(z0);
  if (std::abs(dv) < tau_cluster * 1e-2)
    throw PVUndefined("residue_simple: pole is not simple (multiple root of denominator)");
  return N.eval(z0) / dv;
}

}  // namespace monodromic
