#ifndef MONODROMIC_POLAR_HPP
#define MONODROMIC_POLAR_HPP

#include <map>
#include <optional>
#include <vector>

#include "monodromic/field.hpp"
#include "monodromic/newton.hpp"
#include "monodromic/trig.hpp"

namespace monodromic {

struct NotMonodromicForTheseWeights : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Graded list of trig-polynomial coefficients in powers of rho.
using GradedTrig = std::map<int, TrigPoly>;

/// The blown-up field Z = Theta d_phi + R d_rho on the cylinder, after
/// clearing the positive factor p cos^2 + q sin^2 and removing the common
/// rho^r, with counterclockwise orientation.
struct PolarField {
  Weight w;
  std::vector<TrigPoly> G;  // Theta = sum G[k] rho^k, G[0] = G_0
  std::vector<TrigPoly> R;  // R = sum R[k] rho^k, R[0] identically zero
  int removed_power = 0;
  TrigPoly cleared_positive_factor;
  bool orientation_flipped = false;

  const TrigPoly& G0() const { return G[0]; }
  TrigPoly Gk(int k) const { return k >= 0 && k < static_cast<int>(G.size()) ? G[k] : TrigPoly(); }
  TrigPoly Rk(int k) const { return k >= 0 && k < static_cast<int>(R.size()) ? R[k] : TrigPoly(); }
  int g_top() const;  // largest k with G[k] nonzero
  int r_top() const;  // largest k with R[k] nonzero

  double theta(double phi, double rho) const;
  double r(double phi, double rho) const;
  double theta_drho(double phi, double rho) const;
  double r_drho(double phi, double rho) const;
};

struct CharacteristicSet {
  std::vector<CircleZero> angles;
  bool empty() const { return angles.empty(); }
};

enum class LambdaRisk { NoneDetected, Suspected, Unknown };

struct MonodromyReport {
  bool omega_empty = false;
  LambdaRisk lambda_pq_risk = LambdaRisk::Unknown;
  bool orientation_flipped = false;
  std::vector<std::pair<double, double>> witnesses;  // (phi, rho) with Theta <= 0
};

PolarField blow_up(const PolyVectorField& X, Weight w);

CharacteristicSet characteristic_directions(const PolarField& Z);

/// Numeric heuristic for curves of zero angular speed off rho = 0: sample
/// Theta on a refined (phi, rho) grid with rho in (0, rho_max].
MonodromyReport lambda_pq_probe(const PolarField& Z, double rho_max = 1e-2, int grid_phi = 480,
                                int grid_rho = 24, int refinements = 3);

/// div(Z) = d_phi Theta + d_rho R as a graded list.
GradedTrig divergence(const PolarField& Z);

/// Ascending Laurent data of a Cartesian inverse integrating factor pushed
/// through the weighted blow-up and rescaled consistently with Z:
/// W = v(rho^p cos, rho^q sin) / rho^{r + p + q - 1}.
struct AscendingLaurent {
  int leading = 0;
  GradedTrig coeffs;
};

AscendingLaurent cartesian_iif_to_polar(const BivarPoly& v, const PolyVectorField& X, Weight w);

/// Coefficients of Z(V) - V div(Z) by rho-power for a Laurent V with
/// trig-polynomial coefficients. Exact.
GradedTrig pde_residual(const PolarField& Z, const GradedTrig& V);

/// cos^i sin^j as an exact trig polynomial.
TrigPoly cos_sin_pow(int i, int j);

}  // namespace monodromic

#endif
