#ifndef MONODROMIC_PV_HPP
#define MONODROMIC_PV_HPP

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "monodromic/roots.hpp"
#include "monodromic/trig.hpp"

namespace monodromic {

struct PVUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PVDiverges : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RootFindingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PVMethod { Residues, Quadrature };

/// One non-integrable singular contribution at a contour pole: the excised
/// integral grows like strength / delta^order as the excision shrinks.
struct DivergentPart {
  double angle;
  int order;            // power of 1/delta
  std::complex<double> strength;
};

struct PVResult {
  std::complex<double> value{0, 0};  // Cauchy principal value (finite part)
  double error_estimate = 0;
  PVMethod method = PVMethod::Residues;
  std::vector<double> on_contour_poles;
  bool diverges = false;
  std::vector<DivergentPart> divergences;
  bool exact = false;  // residue path evaluated through exact data only
  // when exact: value = 2 pi i * exact_sum (the weighted residue aggregate)
  std::optional<GaussRat> exact_sum;

  double real_checked(double tol = 1e-9) const;
};

struct PVConfig {
  double tau_circle = 1e-10;
  double tau_cluster = 1e-8;
  long factor_denominator_cap = 1000000;
  double quad_tol = 1e-12;
  int ladder = 10;          // excision ladder length
  double delta0 = 0.05;     // initial excision half-width (shrunk to fit gaps)
  double divergence_tol = 1e-7;
  int max_pole_order = 3;   // deepest on-contour pole the ladder fit models
};

/// PV of the 2pi-integral of W(phi), via the complex substitution
/// z = e^{i phi} and the half-residue contour formula. On-contour poles of
/// order >= 2 produce divergence records; the finite part is still reported.
PVResult pv_contour_integral(const RationalTrig& W, const PVConfig& cfg = {});

/// Independent oracle: symmetric-excision quadrature around the listed pole
/// angles, extrapolated as the excision width goes to zero.
PVResult pv_quadrature(const std::function<double(double)>& W, std::vector<double> poles,
                       const PVConfig& cfg = {});

/// Finite part of a 2pi-integral with deeper on-contour poles: the singular
/// coefficients are fitted from samples of W alone, periodic cotangent
/// templates (each of exactly zero principal value) are subtracted, and the
/// regular remainder is integrated. Works where plain excision Richardson
/// cannot converge; the divergent even-order strengths are reported.
PVResult pv_finite_part_quadrature(const std::function<double(double)>& W,
                                   const std::vector<std::pair<double, int>>& poles_with_orders,
                                   const PVConfig& cfg = {});

/// Residue of f = N/D at a simple root z0 of D: N(z0)/D'(z0).
/// Throws if z0 is a multiple root.
std::complex<double> residue_simple(const GPoly& N, const GPoly& D, std::complex<double> z0,
                                    double tau_cluster = 1e-8);

/// The contour integrand f(z) of W: substitute cos = (z+1/z)/2 etc. and
/// divide by iz; returned as numerator/denominator polynomials in z.
void contour_integrand(const RationalTrig& W, GPoly& N, GPoly& D);

}  // namespace monodromic

#endif
