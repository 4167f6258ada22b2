#ifndef MONODROMIC_POINCARE_HPP
#define MONODROMIC_POINCARE_HPP

#include <optional>
#include <vector>

#include "monodromic/polar.hpp"

namespace monodromic {

struct ThetaVanishedOnOrbit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RDependence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoincareConfig {
  double rtol = 1e-12, atol = 1e-14;
  double theta_floor = 1e-14;
  long max_steps = 4000000;
  double rho_base = 1e-2;
  int ladder = 6;
  double tol_identity = 1e-9;
  double g_spread_tol = 1e-6;
  double v_floor = 1e-10;
};

struct ReturnSample {
  double rho0 = 0;
  double pi = 0;   // Pi(rho0)
  double dpi = 1;  // Pi'(rho0), from the variational flow
  double error_estimate = 0;
  long steps = 0;
};

enum class MapClass { Contracting, Expanding, IdentityToTolerance, Unknown };

struct PoincareEstimate {
  double log_eta1 = 0;
  double uncertainty = 0;
  MapClass classification = MapClass::Unknown;
  std::vector<ReturnSample> samples;
};

/// A closed-form inverse integrating factor: Laurent in rho with
/// trig-polynomial coefficients, verified against the PDE before use.
struct ClosedFormIIF {
  GradedTrig coeffs;
  int m = 0;  // declared leading exponent

  double eval(double phi, double rho) const;
  double eval_drho(double phi, double rho) const;
  double eval_dphi(double phi, double rho) const;
};

/// Max |Z(V) - V div Z| over a verification grid (exact residual when the
/// coefficients allow it, then sampled).
double iif_residual(const PolarField& Z, const ClosedFormIIF& V);

/// Integrate the orbit equation d rho / d phi = R/Theta from phi0 around one
/// turn. Guards against the angular speed collapsing along the way.
ReturnSample return_map(const PolarField& Z, double rho0, const PoincareConfig& cfg = {},
                        double phi0 = 0);

/// Richardson-extrapolated log(Pi(rho)/rho) over a geometric ladder.
PoincareEstimate eta_from_oracle(const PolarField& Z, const PoincareConfig& cfg = {});

/// G(r) = int F/V dphi with F = R/Theta; must be r-independent.
struct GOfR {
  double value = 0;
  double spread = 0;
  std::vector<std::pair<double, double>> per_radius;  // (r, G(r))
  std::vector<double> excluded_radii;
};
GOfR g_of_r(const PolarField& Z, const ClosedFormIIF& V, const std::vector<double>& radii,
            const PoincareConfig& cfg = {});

/// Remark-5 discriminant: log eta_1 = g when m = 1, eta_m = g when m > 1.
struct EtaFromV {
  bool is_focus = false;
  double log_eta1 = 0;  // meaningful when m == 1
  double eta_m = 0;     // meaningful when m > 1
};
EtaFromV eta_from_V(double g, int m, double tol = 1e-9);

/// Max relative violation of V^(phi0, Pi(x)) = V^(phi0, x) Pi'(x) with
/// V^ = V/Theta, over the sample points. The section angle avoids zeros of V.
double fundamental_equation_check(const PolarField& Z, const ClosedFormIIF& V,
                                  const std::vector<double>& rho0s,
                                  const PoincareConfig& cfg = {});

}  // namespace monodromic

#endif
