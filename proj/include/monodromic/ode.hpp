#ifndef MONODROMIC_ODE_HPP
#define MONODROMIC_ODE_HPP

#include <functional>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "monodromic/pv.hpp"
#include "monodromic/trig.hpp"

namespace monodromic {

/// Exact affine combination of trig polynomials in the carried constants:
/// base + sum_k parts[k] * c_k.
struct AffineTrig {
  TrigPoly base;
  std::map<int, TrigPoly> parts;

  bool pure() const { return parts.empty(); }
  bool is_zero() const { return base.is_zero() && parts.empty(); }
  AffineTrig differentiate() const;
  friend AffineTrig operator+(const AffineTrig& a, const AffineTrig& b);
  friend AffineTrig operator-(const AffineTrig& a, const AffineTrig& b);
  AffineTrig mul(const TrigPoly& t) const;
  AffineTrig scaled(const GaussRat& s) const;
  void prune();
};

/// Affine scalar value (double precision mirror of exact data where known).
struct AffineValue {
  double base = 0;
  std::map<int, double> parts;
  std::optional<GaussRat> exact_base;
  std::map<int, GaussRat> exact_parts;
  bool constant() const { return parts.empty(); }
};

/// Value assignments for greedily solved constants.
struct ConstantBook {
  std::map<int, double> assigned;
  std::map<int, Rat> exact;
  int next_index = 0;
  double resolve(const AffineValue& v) const;
};

/// One linear first-order 2pi-periodic equation A v' + P v + Q = 0, where A
/// is the stored leading trig polynomial of the polar field and Q is affine
/// in the carried constants.
struct PeriodicODE {
  TrigPoly A;   // G_0 (ascending) or G_{n-1} (descending)
  TrigPoly P;
  AffineTrig Q;  // exact forcing when available
  std::function<AffineValue(double)> Q_eval;  // always usable
  bool q_exact = true;
  int index = 0;
  std::vector<CircleZero> omega;  // zeros of A
};

/// A solved coefficient function: exact affine trig polynomial, or per-arc
/// samples with derivatives (derivative from the ODE identity).
struct CoefficientFn {
  bool exact = false;
  AffineTrig closed;  // when exact

  struct Sample {
    double phi;
    AffineValue v, dv;
  };
  std::vector<Sample> samples;  // sorted by phi over [0, 2pi)

  AffineValue eval(double phi) const;
  AffineValue eval_deriv(double phi) const;
  bool defined() const { return exact || !samples.empty(); }
};

enum class StepStatus { Solved, Obstructed, Condition, Undetermined };

enum class ObstructionKind {
  XiNonzero,
  MuNotOne,
  ZetaNonzero,
  Unbounded,
  NonPeriodicTerm,
  ConstantSystemInconsistent
};

struct ObstructionRecord {
  ObstructionKind kind = ObstructionKind::ZetaNonzero;
  int index = 0;
  double value = 0;
  double error = 0;
  bool dual_confirmed = false;
  std::string residue_path, quadrature_path;
};

std::string to_string(ObstructionKind k);

/// A linear condition on the carried constants: base + sum parts[k] c_k = 0.
struct LinearCondition {
  AffineValue lhs;
  int source_index = 0;
};

struct StepResult {
  StepStatus status = StepStatus::Undetermined;
  CoefficientFn fn;
  std::optional<ObstructionRecord> obstruction;
  std::vector<LinearCondition> conditions;  // solved greedily by the caller
  bool new_constant = false;
  int new_constant_index = -1;
  std::optional<TrigPoly> kernel;  // exact free direction when one exists
  bool kernel_numeric = false;     // free direction is exp(-int P/A), sampled by caller
  double mu_value = 1;             // mu(2pi)
  bool mu_is_one = true;
  int conditions_applied = 0;      // greedy assignments consumed by this step
  std::string note;
};

struct OdeConfig {
  double tol_mu = 1e-9;
  double tol_zero = 1e-9;
  int frobenius_cap = 64;
  int exact_harmonic_cap = 96;
  double arc_margin = 1e-4;
  int arc_samples = 192;
  double unbounded_slope = -0.2;  // log-log growth slope flagged as unbounded
  PVConfig pv;
};

/// Local structure of the equation at a singular angle.
struct LocalData {
  double angle;
  std::optional<int> quarter;
  int kappa = 0;       // order of the zero of A
  int lambda = 0;      // vanishing order of P (capped at kappa)
  bool regular_singular = false;  // lambda == kappa - 1 (or P deeper)
  double alpha = 0;               // indicial exponent -P_{k-1}/A_k
  std::optional<Rat> alpha_exact;
  bool alpha_is_nonneg_int = false;
  int resonance_order = -1;       // n* when integer resonance applies
};

/// mu(2pi) = exp(PV int P/A), dual-path. Throws PVUndefined if the PV of
/// P/A itself diverges.
struct MuResult {
  double log_mu;
  double err;
  bool exact;
  PVResult residue, quadrature;
};
MuResult compute_mu(const TrigPoly& P, const TrigPoly& A, const std::vector<CircleZero>& omega,
                    const OdeConfig& cfg);

/// Exact Laurent-window solver for A (iz V') + P V + Q = 0.
/// Returns particular solution (if one exists in the window) and kernel.
struct ExactSolve {
  bool found = false;
  TrigPoly particular;
  std::optional<TrigPoly> kernel;
};
ExactSolve solve_exact_trig(const TrigPoly& A, const TrigPoly& P, const TrigPoly& Q,
                            int window_margin = 8, int harmonic_cap = 96);

LocalData analyze_local(const TrigPoly& A, const TrigPoly& P, const CircleZero& zero);

/// Solve one step of the recursion per the periodic-solution dichotomy:
/// mu != 1 gives the unique candidate, mu = 1 decides by the zeta test.
StepResult solve_periodic_ode(const PeriodicODE& eq, const ConstantBook& book,
                              const OdeConfig& cfg);

/// Boundedness / periodicity admissibility of a solved coefficient near the
/// characteristic angles, by geometric approach sampling.
struct Admissibility {
  bool ok = true;
  std::vector<LinearCondition> conditions;
  std::optional<ObstructionRecord> obstruction;
};
Admissibility admissibility_check(const CoefficientFn& v, const PeriodicODE& eq,
                                  const ConstantBook& book, const OdeConfig& cfg);

}  // namespace monodromic

#endif
