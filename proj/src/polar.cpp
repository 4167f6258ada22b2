#include "monodromic/polar.hpp"

#include <cmath>
#include <numeric>

namespace monodromic {

TrigPoly cos_sin_pow(int i, int j) {
  TrigPoly t = TrigPoly::constant(rat(1));
  TrigPoly c = TrigPoly::cos_k(1), s = TrigPoly::sin_k(1);
  for (int k = 0; k < i; ++k) t *= c;
  for (int k = 0; k < j; ++k) t *= s;
  return t;
}

int PolarField::g_top() const {
  for (int k = static_cast<int>(G.size()) - 1; k >= 0; --k)
    if (!G[k].is_zero()) return k;
  return -1;
}
int PolarField::r_top() const {
  for (int k = static_cast<int>(R.size()) - 1; k >= 0; --k)
    if (!R[k].is_zero()) return k;
  return -1;
}

double PolarField::theta(double phi, double rho) const {
  double acc = 0, rp = 1;
  for (auto& g : G) {
    if (!g.is_zero()) acc += g.evaluate_real(phi) * rp;
    rp *= rho;
  }
  return acc;
}
double PolarField::r(double phi, double rho) const {
  double acc = 0, rp = 1;
  for (auto& rk : R) {
    if (!rk.is_zero()) acc += rk.evaluate_real(phi) * rp;
    rp *= rho;
  }
  return acc;
}

double PolarField::theta_drho(double phi, double rho) const {
  double acc = 0, rp = 1;
  for (size_t k = 1; k < G.size(); ++k) {
    if (!G[k].is_zero()) acc += k * G[k].evaluate_real(phi) * rp;
    rp *= rho;
  }
  return acc;
}
double PolarField::r_drho(double phi, double rho) const {
  double acc = 0, rp = 1;
  for (size_t k = 1; k < R.size(); ++k) {
    if (!R[k].is_zero()) acc += k * R[k].evaluate_real(phi) * rp;
    rp *= rho;
  }
  return acc;
}

PolarField blow_up(const PolyVectorField& X, Weight w) {
  if (X.is_zero()) throw std::domain_error("blow_up: zero vector field");
  if (std::gcd(w.p, w.q) != 1) throw std::domain_error("blow_up: weights not coprime");

  int r = quasi_degree(X, w);
  // D * phi_dot = p cos Q~ rho^{-q} - q sin P~ rho^{-p}
  // D * rho_dot = cos P~ rho^{1-p} + sin Q~ rho^{1-q}
  GradedTrig theta_g, r_g;
  auto add_to = [](GradedTrig& g, int idx, const TrigPoly& t) {
    auto it = g.find(idx);
    if (it == g.end())
      g[idx] = t;
    else {
      it->second += t;
      if (it->second.is_zero()) g.erase(it);
    }
  };
  TrigPoly c1 = TrigPoly::cos_k(1), s1 = TrigPoly::sin_k(1);
  for (auto& [ij, coef] : X.P.terms) {
    TrigPoly mono = cos_sin_pow(ij.first, ij.second).scaled(GaussRat(coef));
    long wd = static_cast<long>(w.p) * ij.first + static_cast<long>(w.q) * ij.second;
    add_to(theta_g, static_cast<int>(wd - w.p - r), (s1 * mono).scaled(GaussRat(Rat(-w.q))));
    add_to(r_g, static_cast<int>(wd - w.p + 1 - r), c1 * mono);
  }
  for (auto& [ij, coef] : X.Q.terms) {
    TrigPoly mono = cos_sin_pow(ij.first, ij.second).scaled(GaussRat(coef));
    long wd = static_cast<long>(w.p) * ij.first + static_cast<long>(w.q) * ij.second;
    add_to(theta_g, static_cast<int>(wd - w.q - r), (c1 * mono).scaled(GaussRat(Rat(w.p))));
    add_to(r_g, static_cast<int>(wd - w.q + 1 - r), s1 * mono);
  }

  PolarField Z;
  Z.w = w;
  Z.removed_power = r;
  Z.cleared_positive_factor =
      TrigPoly::constant(rat(w.p)) * (c1 * c1) + TrigPoly::constant(rat(w.q)) * (s1 * s1);

  int top_g = theta_g.empty() ? -1 : theta_g.rbegin()->first;
  int top_r = r_g.empty() ? -1 : r_g.rbegin()->first;
  Z.G.assign(std::max(top_g + 1, 1), TrigPoly());
  Z.R.assign(std::max(top_r + 1, 2), TrigPoly());
  for (auto& [k, t] : theta_g) {
    if (k < 0) throw std::domain_error("blow_up: negative Theta index (convention bug)");
    Z.G[k] = t;
  }
  for (auto& [k, t] : r_g) {
    if (k < 1)
      throw NotMonodromicForTheseWeights("blow_up: R(phi,0) not identically zero for these weights");
    Z.R[k] = t;
  }

  if (Z.G[0].is_zero())
    throw NotMonodromicForTheseWeights("blow_up: G_0 identically zero (common factor exceeds quasi-degree)");

  CircleSign sign = sign_on_circle(Z.G[0]);
  if (sign == CircleSign::SignChanging)
    throw NotMonodromicForTheseWeights("blow_up: G_0 changes sign on the circle");
  if (sign == CircleSign::Negative || sign == CircleSign::NonposWithZeros) {
    for (auto& g : Z.G) g = -g;
    for (auto& rk : Z.R) rk = -rk;
    Z.orientation_flipped = true;
  }
  return Z;
}

CharacteristicSet characteristic_directions(const PolarField& Z) {
  CharacteristicSet cs;
  cs.angles = zeros_on_circle(Z.G0());
  return cs;
}

MonodromyReport lambda_pq_probe(const PolarField& Z, double rho_max, int grid_phi, int grid_rho,
                                int refinements) {
  MonodromyReport rep;
  rep.orientation_flipped = Z.orientation_flipped;
  rep.omega_empty = zeros_on_circle(Z.G0()).empty();
  double rmax = rho_max;
  bool any_nonpos = false;
  for (int level = 0; level < refinements; ++level) {
    bool nonpos_here = false;
    for (int i = 0; i < grid_phi; ++i) {
      double phi = 2 * M_PI * i / grid_phi;
      for (int j = 1; j <= grid_rho; ++j) {
        double rho = rmax * j / grid_rho;
        if (Z.theta(phi, rho) <= 0) {
          nonpos_here = true;
          if (rep.witnesses.size() < 16) rep.witnesses.push_back({phi, rho});
        }
      }
    }
    if (nonpos_here)
      any_nonpos = true;
    else if (level > 0 && !any_nonpos) {
      // clean at this and coarser scales
    }
    rmax /= 4;  // geometric refinement toward rho = 0
  }
  rep.lambda_pq_risk = any_nonpos ? LambdaRisk::Suspected : LambdaRisk::NoneDetected;
  return rep;
}

GradedTrig divergence(const PolarField& Z) {
  GradedTrig d;
  int top = std::max(Z.g_top(), Z.r_top() - 1);
  for (int k = 0; k <= top; ++k) {
    TrigPoly t = Z.Gk(k).differentiate() + Z.Rk(k + 1).scaled(GaussRat(Rat(k + 1)));
    if (!t.is_zero()) d[k] = t;
  }
  return d;
}

AscendingLaurent cartesian_iif_to_polar(const BivarPoly& v, const PolyVectorField& X, Weight w) {
  if (v.is_zero()) throw std::domain_error("cartesian_iif_to_polar: zero function");
  int r = quasi_degree(X, w);
  int shift = r + w.p + w.q - 1;
  AscendingLaurent out;
  for (auto& [ij, coef] : v.terms) {
    long wd = static_cast<long>(w.p) * ij.first + static_cast<long>(w.q) * ij.second;
    int idx = static_cast<int>(wd) - shift;
    TrigPoly mono = cos_sin_pow(ij.first, ij.second).scaled(GaussRat(coef));
    auto it = out.coeffs.find(idx);
    if (it == out.coeffs.end())
      out.coeffs[idx] = mono;
    else {
      it->second += mono;
      if (it->second.is_zero()) out.coeffs.erase(it);
    }
  }
  if (out.coeffs.empty()) throw std::domain_error("cartesian_iif_to_polar: vanished identically");
  out.leading = out.coeffs.begin()->first;
  return out;
}

GradedTrig pde_residual(const PolarField& Z, const GradedTrig& V) {
  GradedTrig res;
  auto add_to = [&](int s, const TrigPoly& t) {
    if (t.is_zero()) return;
    auto it = res.find(s);
    if (it == res.end())
      res[s] = t;
    else {
      it->second += t;
      if (it->second.is_zero()) res.erase(it);
    }
  };
  for (auto& [j, vj] : V) {
    TrigPoly dvj = vj.differentiate();
    for (int k = 0; k <= Z.g_top(); ++k) {
      if (Z.G[k].is_zero()) continue;
      add_to(k + j, Z.G[k] * dvj - Z.G[k].differentiate() * vj);
    }
    for (int k = 1; k <= Z.r_top(); ++k) {
      if (Z.R[k].is_zero()) continue;
      add_to(k + j - 1, Z.R[k].scaled(GaussRat(Rat(j - k))) * vj);
    }
  }
  return res;
}

}  // namespace monodromic
