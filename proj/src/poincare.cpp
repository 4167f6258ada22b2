#include "monodromic/poincare.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "monodromic/rk45.hpp"

namespace monodromic {

namespace {
constexpr double TWO_PI = 2 * M_PI;
}

double ClosedFormIIF::eval(double phi, double rho) const {
  double acc = 0;
  for (auto& [j, c] : coeffs) acc += c.evaluate_real(phi) * std::pow(rho, j);
  return acc;
}
double ClosedFormIIF::eval_drho(double phi, double rho) const {
  double acc = 0;
  for (auto& [j, c] : coeffs)
    if (j != 0) acc += c.evaluate_real(phi) * j * std::pow(rho, j - 1);
  return acc;
}
double ClosedFormIIF::eval_dphi(double phi, double rho) const {
  double acc = 0;
  for (auto& [j, c] : coeffs) acc += c.differentiate().evaluate_real(phi) * std::pow(rho, j);
  return acc;
}

double iif_residual(const PolarField& Z, const ClosedFormIIF& V) {
  GradedTrig res = pde_residual(Z, V.coeffs);
  if (res.empty()) return 0.0;
  // sampled magnitude of the residual on the verification grid
  double worst = 0;
  for (double rho : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    for (int i = 0; i < 64; ++i) {
      double phi = TWO_PI * i / 64;
      double acc = 0, scale = 1e-300;
      for (auto& [j, t] : res) acc += t.evaluate_real(phi) * std::pow(rho, j);
      for (auto& [j, t] : V.coeffs)
        scale = std::max(scale, std::abs(t.evaluate_real(phi) * std::pow(rho, j)));
      worst = std::max(worst, std::abs(acc) / scale);
    }
  }
  return worst;
}

ReturnSample return_map(const PolarField& Z, double rho0, const PoincareConfig& cfg, double phi0) {
  if (rho0 <= 0) throw std::domain_error("return_map: rho0 must be positive");
  Rk45 rk;
  rk.rtol = cfg.rtol;
  rk.atol = cfg.atol;
  rk.max_steps = cfg.max_steps;
  bool theta_died = false;
  // the variational equation rides along: d(drho)/dphi = d(R/Theta)/drho * drho
  rk.f = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    double th = Z.theta(t, y[0]);
    if (th < cfg.theta_floor) {
      theta_died = true;
      th = cfg.theta_floor;
    }
    double rr = Z.r(t, y[0]);
    double dfd = (Z.r_drho(t, y[0]) * th - rr * Z.theta_drho(t, y[0])) / (th * th);
    dy = {rr / th, dfd * y[1]};
  };
  std::vector<double> y = {rho0, 1.0};
  bool ok = rk.integrate(phi0, phi0 + TWO_PI, y);
  if (theta_died)
    throw ThetaVanishedOnOrbit("return_map: angular speed collapsed along the trajectory");
  if (!ok) throw StepLimit("return_map: step limit reached");
  ReturnSample s;
  s.rho0 = rho0;
  s.pi = y[0];
  s.dpi = y[1];
  s.steps = rk.steps_taken;
  s.error_estimate = cfg.rtol * std::abs(y[0]) * 10 + cfg.atol;
  return s;
}

PoincareEstimate eta_from_oracle(const PolarField& Z, const PoincareConfig& cfg) {
  PoincareEstimate est;
  std::vector<double> L;
  for (int i = 0; i < cfg.ladder; ++i) {
    double rho0 = cfg.rho_base / std::pow(2.0, i);
    ReturnSample s = return_map(Z, rho0, cfg);
    est.samples.push_back(s);
    L.push_back(std::log(s.pi / s.rho0));
  }
  // Richardson with ratio 2: log(Pi/rho) = log eta1 + c1 rho + c2 rho^2 + ...
  std::vector<std::vector<double>> T{L};
  for (int level = 1; level < static_cast<int>(L.size()); ++level) {
    std::vector<double> next;
    double w = std::pow(2.0, level);
    for (size_t i = 0; i + 1 < T.back().size(); ++i)
      next.push_back((w * T.back()[i + 1] - T.back()[i]) / (w - 1));
    T.push_back(next);
    if (next.size() <= 1) break;
  }
  double best = T.back().back();
  double prev = T[T.size() >= 2 ? T.size() - 2 : 0].back();
  est.log_eta1 = best;
  // the accumulated integrator error sets a noise floor under which the
  // extrapolation only chases roundoff
  long max_steps = 0;
  for (auto& s : est.samples) max_steps = std::max(max_steps, s.steps);
  double noise_floor = static_cast<double>(max_steps) * cfg.rtol * 4;
  est.uncertainty = std::max({std::abs(best - prev), noise_floor, 1e-12});
  // a ladder whose raw values grow toward rho -> 0 is chasing integrator
  // bias, not a limit; widen the uncertainty to the last raw value
  if (std::abs(L.back()) > 8 * std::abs(L.front()))
    est.uncertainty = std::max(est.uncertainty, std::abs(L.back()));
  if (std::abs(est.log_eta1) <= std::max(cfg.tol_identity, 4 * est.uncertainty))
    est.classification = MapClass::IdentityToTolerance;
  else
    est.classification = est.log_eta1 < 0 ? MapClass::Contracting : MapClass::Expanding;
  return est;
}

GOfR g_of_r(const PolarField& Z, const ClosedFormIIF& V, const std::vector<double>& radii,
            const PoincareConfig& cfg) {
  using boost::math::quadrature::gauss_kronrod;
  GOfR out;
  // the integrand spikes on scales ~ r^degree near characteristic angles;
  // refine geometrically toward them instead of trusting one adaptive pass
  std::vector<CircleZero> corner_zeros;
  std::vector<double> corners;
  try {
    for (auto& z : zeros_on_circle(Z.G0())) {
      corner_zeros.push_back(z);
      corners.push_back(z.angle);
    }
  } catch (const std::exception&) {
  }
  auto eval_all = [&](const CircleZero& zc, double s, double r) {
    // quarter-exact phases keep s -> -s bitwise symmetric at the corner
    if (zc.quarter) {
      int q = *zc.quarter;
      double th = 0, rr = 0, vv = 0, rp = 1;
      for (size_t k = 0; k < Z.G.size() || k < Z.R.size(); ++k) {
        if (k < Z.G.size() && !Z.G[k].is_zero())
          th += Z.G[k].evaluate_quarter_offset(q, s) * rp;
        if (k < Z.R.size() && !Z.R[k].is_zero()) rr += Z.R[k].evaluate_quarter_offset(q, s) * rp;
        rp *= r;
      }
      for (auto& [j, c] : V.coeffs) vv += c.evaluate_quarter_offset(q, s) * std::pow(r, j);
      return rr / (th * vv);
    }
    double phi = zc.angle + s;
    return Z.r(phi, r) / (Z.theta(phi, r) * V.eval(phi, r));
  };
  for (double r : radii) {
    // exclude radii where V nearly vanishes on the circle
    double vmin = 1e300;
    for (int i = 0; i < 256; ++i) vmin = std::min(vmin, std::abs(V.eval(TWO_PI * i / 256, r)));
    if (vmin < cfg.v_floor) {
      out.excluded_radii.push_back(r);
      continue;
    }
    auto f = [&](double phi) {
      double th = Z.theta(phi, r);
      return Z.r(phi, r) / (th * V.eval(phi, r));
    };
    double g = 0, err;
    if (corners.empty()) {
      g = gauss_kronrod<double, 31>::integrate(f, 0.0, TWO_PI, 12, 1e-13, &err);
    } else {
      // pair evaluations symmetric about each corner so the large odd part
      // of the spike cancels pointwise, then sweep the panels geometrically
      size_t nc = corners.size();
      double inner = std::max(std::pow(r, 8.0), 1e-30);
      auto arc_len = [&](size_t i) {  // arc to the right of corner i
        double next = corners[(i + 1) % nc];
        double d = next - corners[i];
        if (d <= 0) d += TWO_PI;
        return d;
      };
      std::vector<double> half(nc);
      for (size_t i = 0; i < nc; ++i)
        half[i] = std::min(arc_len(i), arc_len((i + nc - 1) % nc)) / 2;
      for (size_t i = 0; i < nc; ++i) {
        const CircleZero& zc = corner_zeros[i];
        auto paired = [&](double s) { return eval_all(zc, s, r) + eval_all(zc, -s, r); };
        for (double lo = inner; lo < half[i]; lo *= 4) {
          double hi = std::min(lo * 4, half[i]);
          g += gauss_kronrod<double, 31>::integrate(paired, lo, hi, 8, 1e-13, &err);
        }
        g += gauss_kronrod<double, 31>::integrate(paired, 0.0, inner, 4, 1e-13, &err);
      }
      // uncovered middle segments where adjacent arcs are unequal
      for (size_t i = 0; i < nc; ++i) {
        double a = corners[i] + half[i];
        double b = corners[i] + arc_len(i) - half[(i + 1) % nc];
        if (b > a + 1e-14)
          g += gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-13, &err);
      }
    }
    out.per_radius.push_back({r, g});
  }
  if (out.per_radius.empty()) throw RDependence("g_of_r: all radii excluded by the V floor");
  double lo = 1e300, hi = -1e300, sum = 0;
  for (auto& [r, g] : out.per_radius) {
    lo = std::min(lo, g);
    hi = std::max(hi, g);
    sum += g;
  }
  out.value = sum / out.per_radius.size();
  out.spread = hi - lo;
  if (out.spread > cfg.g_spread_tol * (1 + std::abs(out.value)))
    throw RDependence("g_of_r: value depends on r beyond tolerance (invalid V or breakdown)");
  return out;
}

EtaFromV eta_from_V(double g, int m, double tol) {
  if (m < 1) throw std::domain_error("eta_from_V: m must be >= 1");
  EtaFromV e;
  if (m == 1) {
    e.log_eta1 = g;
    e.is_focus = std::abs(g) > tol;
  } else {
    e.eta_m = g;
    e.is_focus = std::abs(g) > tol;
  }
  return e;
}

double fundamental_equation_check(const PolarField& Z, const ClosedFormIIF& V,
                                  const std::vector<double>& rho0s, const PoincareConfig& cfg) {
  // candidate section angles in order of |V-hat| health; fall through when a
  // section's orbit cannot be integrated
  double rref = rho0s.empty() ? 1e-3 : rho0s.front();
  std::vector<std::pair<double, double>> cands;  // (score, angle)
  for (int q = 0; q < 8; ++q) {
    double cand = q * M_PI / 4;
    double th = Z.theta(cand, rref);
    if (th <= 0) continue;
    cands.push_back({std::abs(V.eval(cand, rref)) / th, cand});
  }
  std::sort(cands.rbegin(), cands.rend());
  for (auto& [score, phi0] : cands) {
    auto vhat = [&, p0 = phi0](double x) { return V.eval(p0, x) / Z.theta(p0, x); };
    try {
      double worst = 0;
      for (double x : rho0s) {
        ReturnSample s = return_map(Z, x, cfg, phi0);
        double lhs = vhat(s.pi);
        double rhs = vhat(x) * s.dpi;  // Pi' from the variational flow
        double scale = std::abs(rhs) + std::abs(lhs) + 1e-300;
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
      }
      return worst;
    } catch (const ThetaVanishedOnOrbit&) {
      continue;
    }
  }
  throw ThetaVanishedOnOrbit("fundamental_equation_check: no integrable section found");
}

}  // namespace monodromic
