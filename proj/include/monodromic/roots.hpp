#ifndef MONODROMIC_ROOTS_HPP
#define MONODROMIC_ROOTS_HPP

#include <complex>
#include <optional>
#include <vector>

#include "monodromic/gpoly.hpp"

namespace monodromic {

enum class CircleClass { Inside, OnContour, Outside };

struct Root {
  std::complex<double> location;
  int multiplicity = 1;
  CircleClass circle_class = CircleClass::Inside;
  // |p(root)| / (max|coeff| * max(1,|root|)^deg) after polish: the
  // scale-normalized backward error of the root
  double residual = 0;
};

struct RootSet {
  std::vector<Root> roots;
  int degree = 0;
};

struct RootConfig {
  double tau_circle = 1e-10;
  double tau_cluster = 1e-8;
  int max_degree = 512;
  int max_iters = 400;
};

/// All roots of the polynomial part of p (after factoring out z^k), by
/// Aberth–Ehrlich simultaneous iteration with one Newton polish, clustered
/// into multiplicities and classified against the unit circle.
RootSet find_roots(const GPoly& p, const RootConfig& cfg = {});

/// Convenience: roots of a Laurent polynomial's polynomial part.
struct LaurentPoly;

struct UnitRoot {
  double angle;                // arg in [0, 2pi)
  std::optional<int> quarter;  // set when the root is exactly 1, i, -1 or -i
};

/// Roots of a squarefree polynomial lying on the unit circle. Roots at
/// exactly +-1, +-i are certified exactly; others numerically with tau.
std::vector<UnitRoot> unit_circle_roots(const GPoly& squarefree_poly, double tau = 1e-10);

/// Exact linear/quadratic factors discovered by guess-and-verify from the
/// numeric roots (Gaussian-rational candidates with bounded denominators).
struct ExactFactors {
  std::vector<std::pair<GPoly, int>> factors;  // exact factor, multiplicity
  GPoly rest;                                  // unfactored remainder
  int rest_multiplicity = 1;
  bool complete() const { return rest.degree() < 1; }
};

ExactFactors exact_factor(const GPoly& p, long denominator_cap = 1000000);

/// Sum of residues of n/d over the roots of q, where q is an exact simple
/// factor of d (q squarefree, q^2 does not divide d). Exact: computed as the
/// trace of n * (d')^{-1} modulo q.
GaussRat residue_sum_over_factor(const GPoly& n, const GPoly& d, const GPoly& q);

/// Same for a squarefree factor q with q^2 exactly dividing d (double poles):
/// the double-pole residue expression traced over q's roots.
GaussRat residue_sum_over_double_factor(const GPoly& n, const GPoly& d, const GPoly& q);

/// Residue of n/d at a simple root z0 of d (numeric).
std::complex<double> residue_simple_at(const GPoly& n, const GPoly& d, std::complex<double> z0);

}  // namespace monodromic

#endif
