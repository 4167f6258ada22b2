#ifndef MONODROMIC_RUNNER_HPP
#define MONODROMIC_RUNNER_HPP

#include "monodromic/parser.hpp"
#include "monodromic/report.hpp"

namespace monodromic {

struct RunConfig {
  RunMode mode = RunMode::Auto;
  ExpansionConfig expansion;
  PoincareConfig poincare;
  int jobs = 1;
  bool run_oracle = true;  // derived from mode
};

/// Full analysis of one bound instance (no sweep).
Report run_single(const ProblemSpec& spec, const RunConfig& cfg,
                  const std::map<std::string, Rat>& overrides = {});

/// Orchestrates the procedure: sweeps dispatch run_single per sample and
/// bracket sign changes of the oracle's leading coefficient.
Report run(const ProblemSpec& spec, const RunConfig& cfg);

}  // namespace monodromic

#endif
