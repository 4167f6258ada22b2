#include "monodromic/roots.hpp"

#include <algorithm>
#include <cmath>

namespace monodromic {

namespace {

using cd = std::complex<double>;

std::vector<cd> to_complex_coeffs(const GPoly& p) {
  std::vector<cd> c(p.c.size());
  for (size_t k = 0; k < p.c.size(); ++k) c[k] = p.c[k].to_complex();
  return c;
}

cd poly_eval(const std::vector<cd>& c, cd z) {
  cd acc{0, 0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cd> poly_deriv(const std::vector<cd>& c) {
  if (c.size() <= 1) return {cd{0, 0}};
  std::vector<cd> d(c.size() - 1);
  for (size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * double(k);
  return d;
}

/// Aberth–Ehrlich with deterministic initial placement.
std::vector<cd> aberth(const std::vector<cd>& c, int max_iters) {
  int n = static_cast<int>(c.size()) - 1;
  std::vector<cd> z(n);
  // initial guesses on a circle sized by the coefficient bound
  double amax = 0;
  for (int k = 0; k < n; ++k) amax = std::max(amax, std::abs(c[k]));
  double r = 1.0 + amax / std::max(std::abs(c[n]), 1e-300);
  r = std::pow(r, 1.0 / n) * 0.9 + 0.1;
  for (int k = 0; k < n; ++k) z[k] = std::polar(r, 2 * M_PI * k / n + 0.43);
  std::vector<cd> d = poly_deriv(c);
  for (int iter = 0; iter < max_iters; ++iter) {
    double moved = 0;
    for (int k = 0; k < n; ++k) {
      cd pv = poly_eval(c, z[k]);
      cd dv = poly_eval(d, z[k]);
      if (std::abs(pv) == 0) continue;
      cd newton = (std::abs(dv) > 0) ? pv / dv : cd{1e-3, 0};
      cd sum{0, 0};
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      cd denom = 1.0 - newton * sum;
      cd step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
      z[k] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15) break;
  }
  // Newton polish per root (kept until the residual stops improving)
  for (int k = 0; k < n; ++k) {
    for (int it = 0; it < 3; ++it) {
      cd pv = poly_eval(c, z[k]);
      cd dv = poly_eval(d, z[k]);
      if (std::abs(dv) < 1e-300) break;
      cd step = pv / dv;
      if (std::abs(step) > 1e-2 * (1 + std::abs(z[k]))) break;
      z[k] -= step;
      if (std::abs(step) < 1e-16 * (1 + std::abs(z[k]))) break;
    }
  }
  return z;
}

/// Try to write x as a rational with denominator <= cap (continued fractions).
std::optional<Rat> rationalize(double x, long cap) {
  if (!std::isfinite(x)) return std::nullopt;
  double a = x;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(a);
    if (fl > 1e17 || fl < -1e17) break;
    long ai = static_cast<long>(fl);
    long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > cap) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = a - fl;
    if (frac < 1e-15) break;
    a = 1.0 / frac;
  }
  if (q1 == 0) return std::nullopt;
  Rat r(p1, q1);
  r.canonicalize();
  if (std::abs(to_double(r) - x) > 1e-9 * (1 + std::abs(x))) return std::nullopt;
  return r;
}

std::optional<GaussRat> rationalize_c(cd z, long cap) {
  auto re = rationalize(z.real(), cap);
  auto im = rationalize(z.imag(), cap);
  if (!re || !im) return std::nullopt;
  return GaussRat(*re, *im);
}

}  // namespace

RootSet find_roots(const GPoly& p, const RootConfig& cfg) {
  if (p.is_zero()) throw std::domain_error("find_roots: zero polynomial");
  if (p.degree() > cfg.max_degree) throw std::domain_error("find_roots: degree exceeds cap");
  RootSet rs;
  rs.degree = p.degree();
  if (p.degree() < 1) return rs;
  auto c = to_complex_coeffs(p);
  // strip trailing zero roots (z^k factor)
  int zero_roots = 0;
  while (zero_roots < static_cast<int>(c.size()) - 1 && std::abs(c[zero_roots]) == 0) ++zero_roots;
  std::vector<cd> cc(c.begin() + zero_roots, c.end());
  std::vector<cd> raw = (cc.size() > 1) ? aberth(cc, cfg.max_iters) : std::vector<cd>{};
  for (int k = 0; k < zero_roots; ++k) raw.push_back(cd{0, 0});

  std::vector<bool> used(raw.size(), false);
  double scale = 0;
  for (auto& a : c) scale = std::max(scale, std::abs(a));
  for (size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    Root r;
    r.location = raw[i];
    r.multiplicity = 1;
    used[i] = true;
    cd acc = raw[i];
    for (size_t j = i + 1; j < raw.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(raw[j] - raw[i]) < cfg.tau_cluster * (1 + std::abs(raw[i]))) {
        used[j] = true;
        ++r.multiplicity;
        acc += raw[j];
      }
    }
    r.location = acc / double(r.multiplicity);
    double dev = std::abs(std::abs(r.location) - 1.0);
    r.circle_class = dev < cfg.tau_circle   ? CircleClass::OnContour
                     : (std::abs(r.location) < 1 ? CircleClass::Inside : CircleClass::Outside);
    // backward error normalized by the coefficient scale at the root's size
    double zscale = std::pow(std::max(1.0, std::abs(r.location)), static_cast<double>(rs.degree));
    r.residual = std::abs(poly_eval(c, r.location)) / std::max(scale * zscale, 1e-300);
    rs.roots.push_back(r);
  }
  std::sort(rs.roots.begin(), rs.roots.end(), [](const Root& a, const Root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return rs;
}

std::vector<UnitRoot> unit_circle_roots(const GPoly& p, double tau) {
  std::vector<UnitRoot> out;
  if (p.degree() < 1) return out;
  GPoly q = p;
  // certify quarter-angle roots exactly and deflate them
  const GaussRat quarter_vals[4] = {GaussRat(1), GaussRat::i(), GaussRat(-1), -GaussRat::i()};
  bool deflated = true;
  std::vector<int> quarter_mult(4, 0);
  while (deflated && q.degree() >= 1) {
    deflated = false;
    for (int qt = 0; qt < 4; ++qt) {
      if (q.eval(quarter_vals[qt]).is_zero()) {
        GPoly lin({-quarter_vals[qt], GaussRat(1)});
        q = q / lin;
        ++quarter_mult[qt];
        deflated = true;
      }
    }
  }
  for (int qt = 0; qt < 4; ++qt)
    if (quarter_mult[qt] > 0) out.push_back({qt * M_PI_2, qt});
  if (q.degree() >= 1) {
    RootConfig cfg;
    cfg.tau_circle = tau;
    RootSet rs = find_roots(q, cfg);
    for (auto& r : rs.roots)
      if (r.circle_class == CircleClass::OnContour) {
        double a = std::arg(r.location);
        if (a < 0) a += 2 * M_PI;
        out.push_back({a, std::nullopt});
      }
  }
  std::sort(out.begin(), out.end(), [](const UnitRoot& a, const UnitRoot& b) { return a.angle < b.angle; });
  return out;
}

ExactFactors exact_factor(const GPoly& p, long cap) {
  ExactFactors ef;
  ef.rest = {};
  if (p.degree() < 1) return ef;
  for (auto& [sf, mult] : squarefree(p)) {
    GPoly work = sf;
    // exact linear factors from rationalized numeric roots
    bool progress = true;
    while (progress && work.degree() >= 1) {
      progress = false;
      if (work.degree() == 1) {
        ef.factors.push_back({work.monic(), mult});
        work = GPoly::constant(GaussRat(1));
        break;
      }
      RootSet rs = find_roots(work);
      for (auto& r : rs.roots) {
        if (auto g = rationalize_c(r.location, cap)) {
          GPoly lin({-*g, GaussRat(1)});
          GPoly quo, rem;
          GPoly::divmod(work, lin, quo, rem);
          if (rem.is_zero()) {
            ef.factors.push_back({lin, mult});
            work = quo;
            progress = true;
            break;
          }
        }
      }
      if (progress) continue;
      // quadratic factors from root pairs (conjugate or reciprocal pairs)
      for (size_t i = 0; i < rs.roots.size() && !progress; ++i)
        for (size_t j = i + 1; j < rs.roots.size() && !progress; ++j) {
          cd s = rs.roots[i].location + rs.roots[j].location;
          cd pr = rs.roots[i].location * rs.roots[j].location;
          auto B = rationalize_c(-s, cap);
          auto C = rationalize_c(pr, cap);
          if (!B || !C) continue;
          GPoly quad({*C, *B, GaussRat(1)});
          GPoly quo, rem;
          GPoly::divmod(work, quad, quo, rem);
          if (rem.is_zero()) {
            ef.factors.push_back({quad, mult});
            work = quo;
            progress = true;
          }
        }
    }
    if (work.degree() >= 1) {
      ef.rest = work;
      ef.rest_multiplicity = mult;
    }
  }
  return ef;
}

GaussRat residue_sum_over_factor(const GPoly& n, const GPoly& d, const GPoly& q) {
  // residues at simple roots z_k of q: sum_k n(z_k)/d'(z_k)
  GPoly dp = d.derivative();
  GPoly u, v;
  GPoly g = ext_gcd(dp, q, u, v);
  if (g.degree() != 0) throw std::domain_error("residue_sum_over_factor: non-simple factor");
  // inverse of d' mod q is u/g
  GPoly inv = u.scaled(g.c[0].inverse());
  GPoly qq, r;
  GPoly::divmod(n * inv, q, qq, r);
  // trace of r over roots of q via power sums (Newton's identities)
  int deg = q.degree();
  GaussRat lead_inv = q.lead().inverse();
  std::vector<GaussRat> a(deg);  // monic coefficients: z^deg + a[deg-1] z^{deg-1} + ...
  for (int k = 0; k < deg; ++k) a[k] = q.c[k] * lead_inv;
  std::vector<GaussRat> power(deg);  // power sums p_0..p_{deg-1}
  power[0] = GaussRat(Rat(deg));
  for (int k = 1; k < deg; ++k) {
    GaussRat s = -GaussRat(Rat(k)) * a[deg - k];
    for (int j = 1; j < k; ++j) s -= a[deg - j] * power[k - j];
    power[k] = s;
  }
  GaussRat tr(0);
  for (int k = 0; k <= r.degree(); ++k) tr += r.c[k] * power[k];
  return tr;
}

std::complex<double> residue_simple_at(const GPoly& n, const GPoly& d, std::complex<double> z0) {
  return n.eval(z0) / d.derivative().eval(z0);
}

namespace {

GPoly mod_q(const GPoly& a, const GPoly& q) {
  GPoly quo, rem;
  GPoly::divmod(a, q, quo, rem);
  return rem;
}

GPoly inverse_mod(const GPoly& a, const GPoly& q) {
  GPoly u, v;
  GPoly g = ext_gcd(mod_q(a, q), q, u, v);
  if (g.degree() != 0) throw std::domain_error("inverse_mod: not invertible");
  return mod_q(u.scaled(g.c[0].inverse()), q);
}

GaussRat trace_mod(const GPoly& r, const GPoly& q) {
  int deg = q.degree();
  GaussRat lead_inv = q.lead().inverse();
  std::vector<GaussRat> a(deg);
  for (int k = 0; k < deg; ++k) a[k] = q.c[k] * lead_inv;
  std::vector<GaussRat> power(deg);
  power[0] = GaussRat(Rat(deg));
  for (int k = 1; k < deg; ++k) {
    GaussRat s = -GaussRat(Rat(k)) * a[deg - k];
    for (int j = 1; j < k; ++j) s -= a[deg - j] * power[k - j];
    power[k] = s;
  }
  GaussRat tr(0);
  for (int k = 0; k <= r.degree() && k < deg; ++k) tr += r.c[k] * power[k];
  // degrees >= deg should have been reduced already
  return tr;
}

}  // namespace

GaussRat residue_sum_over_double_factor(const GPoly& n, const GPoly& d, const GPoly& q) {
  // d = q^2 e with gcd(q, e) = 1; at each q-root z0 the residue of n/d is
  //   (n/e)'(z0)/q'(z0)^2 - (n/e)(z0) q''(z0)/q'(z0)^3
  GPoly e = d / (q * q);
  GPoly qp = q.derivative();
  GPoly qpp = qp.derivative();
  GPoly inv_e = inverse_mod(e, q);
  GPoly inv_qp = inverse_mod(qp, q);
  GPoly G = mod_q(n * inv_e, q);
  // (n/e)' = (n' e - n e')/e^2
  GPoly H = mod_q((n.derivative() * e - n * e.derivative()) * inv_e * inv_e, q);
  GPoly inv_qp2 = mod_q(inv_qp * inv_qp, q);
  GPoly expr = mod_q(H * inv_qp2 - G * qpp * mod_q(inv_qp2 * inv_qp, q), q);
  return trace_mod(expr, q);
}

}  // namespace monodromic
