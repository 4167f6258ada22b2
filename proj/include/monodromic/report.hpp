#ifndef MONODROMIC_REPORT_HPP
#define MONODROMIC_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "monodromic/expansion.hpp"
#include "monodromic/poincare.hpp"

namespace monodromic {

struct OracleReport {
  bool computed = false;
  double log_eta1 = 0;
  double uncertainty = 0;
  std::string classification;
  std::string error;
};

struct GReport {
  bool computed = false;
  double value = 0;
  double spread = 0;
  std::string error;
};

struct WeightReport {
  int p = 1, q = 1;
  bool monodromic = false;
  std::string skip_reason;
  bool omega_empty = false;
  std::vector<double> omega_angles;
  std::string lambda_risk;
  bool orientation_flipped = false;
  std::optional<double> xi_value;
  std::optional<double> xi_residue, xi_quadrature;
  bool xi_dual_confirmed = false;
  std::string m_status;
  struct Chain {
    std::string direction;
    int m = 0;
    bool saturated = false;
    bool undetermined = false;
    std::string halted_reason;
    std::vector<ChainEntry> entries;
    std::vector<ObstructionRecord> obstructions;
  };
  std::vector<Chain> chains;
  OracleReport oracle;
  GReport g;
  std::string constructed_V;
  Verdict verdict;
};

struct SweepSample {
  std::string param_value;   // exact rational text
  double param_double = 0;
  bool failed = false;
  std::string error;
  std::string verdict;
  std::string basis;
  std::optional<double> log_eta1;
  std::optional<double> leading_obstruction;
};

struct SweepReport {
  std::string param;
  std::vector<SweepSample> samples;
  std::vector<std::pair<double, double>> brackets;  // refined roots of log eta1
};

struct Report {
  std::string schema = "monodromic/1";
  std::string input_pretty;
  std::vector<WeightReport> weights;
  Verdict overall;
  std::optional<SweepReport> sweep;
  std::string error;  // top-level failure, when any
};

std::string emit_report_json(const Report& r);
std::string emit_report_text(const Report& r);

}  // namespace monodromic

#endif
