#ifndef MONODROMIC_EXPANSION_HPP
#define MONODROMIC_EXPANSION_HPP

#include <optional>
#include <string>
#include <vector>

#include "monodromic/ode.hpp"
#include "monodromic/polar.hpp"

namespace monodromic {

enum class Direction { Ascending, Descending };

struct LeadingDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExpansionConfig {
  int max_order = 12;       // ascending chain length beyond the leading index
  int m_min = -8, m_max = 8;
  int saturation_window = 3;
  int max_constants = 8;
  int descend_depth = 16;
  OdeConfig ode;
};

/// xi_pq = PV of R_1/G_0 over one turn, dual-path.
struct XiResult {
  double value = 0;
  bool dual_confirmed = false;
  bool zero = false;       // both paths below tolerance
  bool ambiguous = false;  // paths disagree about vanishing
  PVResult residue, quadrature;
};

XiResult xi_pq(const PolarField& Z, const OdeConfig& cfg = {});

enum class MStatus { Free, Fixed };

/// Outcome of (m-1) xi = 0: xi != 0 pins the ascending leading exponent to 1
/// and closes the essential-singularity branch.
MStatus leading_constraint(const XiResult& xi, double tol_zero = 1e-9);

struct ChainEntry {
  int index = 0;
  bool exact = false;
  bool zero = false;
  bool new_constant = false;
  double mu = 1;
  std::string note;
};

struct ExpansionState {
  Direction direction = Direction::Ascending;
  MStatus m_status = MStatus::Free;
  int m = 0;
  std::map<int, CoefficientFn> coeffs;
  ConstantBook book;
  std::vector<ObstructionRecord> obstructions;
  std::vector<ChainEntry> log;
  bool leading_admissible = false;
  bool saturated = false;
  bool undetermined = false;
  std::string halted_reason;

  bool obstructed() const { return !obstructions.empty(); }
  /// Exact truncated Laurent form with all free constants set to zero,
  /// available when every computed coefficient is exact.
  std::optional<GradedTrig> closed_form() const;
};

/// The recursion forcing for coefficient index j, exact when the referenced
/// lower (ascending) or higher (descending) coefficients are exact.
AffineTrig ascending_forcing(const PolarField& Z, const std::map<int, CoefficientFn>& coeffs,
                             int j, bool& exact);
AffineTrig descending_forcing(const PolarField& Z, const std::map<int, CoefficientFn>& coeffs,
                              int n, int j, bool& exact);

/// One step of the chain (builds the equation and solves it).
StepResult ascend_step(const PolarField& Z, ExpansionState& st, int j, const ExpansionConfig& cfg);
StepResult descend_step(const PolarField& Z, ExpansionState& st, int j, const ExpansionConfig& cfg);

/// Run a whole chain from leading index m. For descending chains the field
/// must be polynomial with nondegenerate top coefficients.
ExpansionState run_chain(const PolarField& Z, Direction dir, int m, const ExpansionConfig& cfg);

enum class Outcome { Center, Focus, MaximalOrderFocusCandidate, CenterByEssentialSingularity, Undecided };

std::string to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::Undecided;
  std::string basis;
  bool conditional = false;
};

/// Everything the expansion engine concludes for one weight.
struct WeightAnalysis {
  Weight w;
  bool monodromic = false;
  std::string skip_reason;
  PolarField Z;
  CharacteristicSet omega;
  MonodromyReport probe;
  std::optional<XiResult> xi;
  MStatus m_status = MStatus::Free;
  std::vector<ExpansionState> ascending;
  std::vector<ExpansionState> descending;
  Verdict verdict;
  std::optional<GradedTrig> constructed_V;  // exact truncated V from a clean chain
  int constructed_m = 0;
};

/// The ascending/descending procedure for one weight (no oracle; the oracle
/// and the Remark-5 resolution of candidates live in the runner).
WeightAnalysis analyze_weight(const PolyVectorField& X, Weight w, const ExpansionConfig& cfg);

}  // namespace monodromic

#endif
