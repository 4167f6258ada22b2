#include "monodromic/runner.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace monodromic {

namespace {

std::string lambda_risk_str(LambdaRisk r) {
  switch (r) {
    case LambdaRisk::NoneDetected: return "none_detected";
    case LambdaRisk::Suspected: return "suspected";
    default: return "unknown";
  }
}

std::string graded_str(const GradedTrig& V) {
  std::ostringstream os;
  bool first = true;
  for (auto& [j, t] : V) {
    if (!first) os << " + ";
    os << "(" << t.str() << ")*rho^" << j;
    first = false;
  }
  return os.str();
}

WeightReport::Chain chain_report(const ExpansionState& st) {
  WeightReport::Chain c;
  c.direction = st.direction == Direction::Ascending ? "ascending" : "descending";
  c.m = st.m;
  c.saturated = st.saturated;
  c.undetermined = st.undetermined;
  c.halted_reason = st.halted_reason;
  c.entries = st.log;
  c.obstructions = st.obstructions;
  return c;
}

/// Descending-only analysis used by the corresponding run mode.
WeightAnalysis analyze_descending_only(const PolyVectorField& X, Weight w,
                                       const ExpansionConfig& cfg) {
  WeightAnalysis wa;
  wa.w = w;
  try {
    wa.Z = blow_up(X, w);
  } catch (const NotMonodromicForTheseWeights& e) {
    wa.monodromic = false;
    wa.skip_reason = e.what();
    return wa;
  }
  wa.monodromic = true;
  wa.omega = characteristic_directions(wa.Z);
  wa.probe = lambda_pq_probe(wa.Z);
  bool conditional = wa.probe.lambda_pq_risk != LambdaRisk::NoneDetected;
  bool saturated = false, undetermined = false;
  for (int m = cfg.m_max; m >= cfg.m_min; --m) {
    ExpansionState st = run_chain(wa.Z, Direction::Descending, m, cfg);
    if (!st.leading_admissible && !st.undetermined) continue;
    wa.descending.push_back(st);
    if (st.saturated) {
      saturated = true;
      if (!wa.constructed_V) {
        if (auto V = st.closed_form()) {
          wa.constructed_V = V;
          wa.constructed_m = st.m;
        }
      }
    }
    if (st.undetermined) undetermined = true;
  }
  if (saturated)
    wa.verdict = {Outcome::MaximalOrderFocusCandidate, "descending expansion saturated",
                  conditional};
  else if (undetermined)
    wa.verdict = {Outcome::Undecided, "descending analysis inconclusive", conditional};
  else if (wa.descending.empty())
    wa.verdict = {Outcome::Undecided, "no admissible descending leading index in the window",
                  conditional};
  else
    wa.verdict = {Outcome::Undecided, "descending expansion obstructed", conditional};
  return wa;
}

WeightAnalysis analyze_ascending_only(const PolyVectorField& X, Weight w,
                                      const ExpansionConfig& cfg) {
  // the full analysis already prefers ascending; reuse it but drop descending
  WeightAnalysis wa = analyze_weight(X, w, cfg);
  wa.descending.clear();
  return wa;
}

}  // namespace

Report run_single(const ProblemSpec& spec, const RunConfig& cfg,
                  const std::map<std::string, Rat>& overrides) {
  Report rep;
  PolyVectorField X = build_field(spec, overrides);
  {
    ProblemSpec bound = spec;
    for (auto& [k, v] : X.bindings) bound.params[k] = v;
    rep.input_pretty = pretty_print(bound);
  }

  std::vector<Weight> weights;
  if (spec.weight_override) {
    weights.push_back(*spec.weight_override);
  } else {
    NewtonDiagram d = compute_diagram(X);
    weights = d.weights;
  }
  if (weights.empty()) throw std::domain_error("Newton diagram has no admissible weights");

  std::optional<UserV> user_v;
  if (spec.V) user_v = build_user_v(*spec.V, X.bindings);

  std::vector<Verdict> weight_verdicts;
  for (Weight w : weights) {
    WeightReport wr;
    wr.p = w.p;
    wr.q = w.q;

    WeightAnalysis wa;
    if (cfg.mode == RunMode::OracleOnly) {
      try {
        wa.Z = blow_up(X, w);
        wa.monodromic = true;
        wa.omega = characteristic_directions(wa.Z);
        wa.probe = lambda_pq_probe(wa.Z);
        wa.verdict = {Outcome::Undecided, "oracle-only mode", false};
      } catch (const NotMonodromicForTheseWeights& e) {
        wa.monodromic = false;
        wa.skip_reason = e.what();
      }
    } else if (cfg.mode == RunMode::DescendingOnly) {
      wa = analyze_descending_only(X, w, cfg.expansion);
    } else if (cfg.mode == RunMode::AscendingOnly) {
      wa = analyze_ascending_only(X, w, cfg.expansion);
    } else {
      wa = analyze_weight(X, w, cfg.expansion);
    }

    wr.monodromic = wa.monodromic;
    wr.skip_reason = wa.skip_reason;
    if (!wa.monodromic) {
      rep.weights.push_back(wr);
      continue;
    }
    wr.omega_empty = wa.omega.empty();
    for (auto& z : wa.omega.angles) wr.omega_angles.push_back(z.angle);
    wr.lambda_risk = lambda_risk_str(wa.probe.lambda_pq_risk);
    wr.orientation_flipped = wa.Z.orientation_flipped;
    if (wa.xi) {
      wr.xi_value = wa.xi->value;
      wr.xi_residue = wa.xi->residue.value.real();
      wr.xi_quadrature = wa.xi->quadrature.value.real();
      wr.xi_dual_confirmed = wa.xi->dual_confirmed;
    }
    wr.m_status = (wa.m_status == MStatus::Fixed) ? "fixed(1)" : "free";
    for (auto& st : wa.ascending) wr.chains.push_back(chain_report(st));
    for (auto& st : wa.descending) wr.chains.push_back(chain_report(st));
    wr.verdict = wa.verdict;

    // numeric Poincare oracle
    if (cfg.run_oracle && (cfg.mode == RunMode::Auto || cfg.mode == RunMode::OracleOnly)) {
      try {
        PoincareEstimate est = eta_from_oracle(wa.Z, cfg.poincare);
        wr.oracle.computed = true;
        wr.oracle.log_eta1 = est.log_eta1;
        wr.oracle.uncertainty = est.uncertainty;
        switch (est.classification) {
          case MapClass::Contracting: wr.oracle.classification = "contracting"; break;
          case MapClass::Expanding: wr.oracle.classification = "expanding"; break;
          case MapClass::IdentityToTolerance: wr.oracle.classification = "identity_to_tolerance"; break;
          default: wr.oracle.classification = "unknown";
        }
      } catch (const std::exception& e) {
        wr.oracle.error = e.what();
      }
    }

    // Remark-5 resolution of a saturated candidate through a closed-form V
    std::optional<ClosedFormIIF> V;
    if (user_v) {
      ClosedFormIIF cf;
      if (user_v->cartesian) {
        AscendingLaurent al = cartesian_iif_to_polar(user_v->xy, X, w);
        cf.coeffs = al.coeffs;
        cf.m = al.leading;
      } else {
        cf.coeffs = user_v->polar;
        cf.m = cf.coeffs.begin()->first;
      }
      if (iif_residual(wa.Z, cf) < 1e-8)
        V = cf;
      else if (wr.verdict.basis.find("rejected closed-form V") == std::string::npos)
        wr.verdict.basis += "; user V rejected (PDE residual above 1e-8)";
    } else if (wa.constructed_V) {
      ClosedFormIIF cf;
      cf.coeffs = *wa.constructed_V;
      cf.m = wa.constructed_m;
      if (iif_residual(wa.Z, cf) < 1e-8) V = cf;
    }
    if (V) wr.constructed_V = graded_str(V->coeffs);

    if (wa.verdict.outcome == Outcome::MaximalOrderFocusCandidate && V && V->m >= 1 &&
        cfg.mode != RunMode::OracleOnly) {
      try {
        GOfR g = g_of_r(wa.Z, *V, {1e-2, 5e-3, 2e-3}, cfg.poincare);
        wr.g.computed = true;
        wr.g.value = g.value;
        wr.g.spread = g.spread;
        EtaFromV ev = eta_from_V(g.value, V->m, cfg.poincare.tol_identity);
        bool conditional = wa.probe.lambda_pq_risk != LambdaRisk::NoneDetected;
        if (ev.is_focus) {
          wr.verdict = {Outcome::Focus,
                        V->m == 1 ? "closed-form V with log eta1 = G(r) != 0"
                                  : "closed-form V with eta_m = G(r) != 0",
                        false};
        } else {
          wr.verdict = {Outcome::Center,
                        "closed-form V constructed and G(r) = 0 (return map is the identity)",
                        conditional};
        }
      } catch (const std::exception& e) {
        wr.g.error = e.what();
      }
    }

    weight_verdicts.push_back(wr.verdict);
    rep.weights.push_back(wr);
  }

  // combine per-weight verdicts
  Verdict overall{Outcome::Undecided, "no monodromic weight produced a decision", true};
  bool have_focus = false, have_center = false;
  for (auto& v : weight_verdicts) {
    if (v.outcome == Outcome::Focus) {
      have_focus = true;
      overall = v;
    }
  }
  if (!have_focus) {
    for (auto& v : weight_verdicts)
      if (v.outcome == Outcome::Center || v.outcome == Outcome::CenterByEssentialSingularity) {
        have_center = true;
        if (overall.outcome == Outcome::Undecided || (!v.conditional && overall.conditional))
          overall = v;
      }
    if (!have_center)
      for (auto& v : weight_verdicts)
        if (v.outcome == Outcome::MaximalOrderFocusCandidate) overall = v;
    if (overall.outcome == Outcome::Undecided)
      for (auto& v : weight_verdicts)
        if (!v.basis.empty()) {
          overall = v;
          break;
        }
  } else {
    // a focus certificate beats candidates; flag conflicts
    for (auto& v : weight_verdicts)
      if (v.outcome == Outcome::Center || v.outcome == Outcome::CenterByEssentialSingularity) {
        overall = {Outcome::Undecided, "weights disagree (focus vs center evidence)", true};
        break;
      }
  }
  rep.overall = overall;
  return rep;
}

namespace {

int env_jobs() {
  const char* s = std::getenv("MONODROMIC_JOBS");
  if (!s) return 0;
  int n = std::atoi(s);
  return n > 0 ? n : 0;
}

}  // namespace

Report run(const ProblemSpec& spec, const RunConfig& cfg) {
  if (!spec.sweep) return run_single(spec, cfg);

  const auto& sw = *spec.sweep;
  Report rep;
  rep.input_pretty = pretty_print(spec);
  SweepReport srep;
  srep.param = sw.name;
  int n = std::max(sw.steps, 1);
  std::vector<Rat> values;
  for (int i = 0; i <= n; ++i) {
    Rat t = Rat(i) / Rat(n);
    values.push_back(sw.from + t * (sw.to - sw.from));
  }
  srep.samples.resize(values.size());

  int jobs = cfg.jobs > 0 ? cfg.jobs : (env_jobs() > 0 ? env_jobs() : 1);
  jobs = std::min<int>(jobs, static_cast<int>(values.size()));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= values.size()) break;
      SweepSample& s = srep.samples[i];
      s.param_value = values[i].get_str();
      s.param_double = to_double(values[i]);
      try {
        Report r = run_single(spec, cfg, {{sw.name, values[i]}});
        s.verdict = to_string(r.overall.outcome);
        s.basis = r.overall.basis;
        for (auto& w : r.weights) {
          if (w.oracle.computed && !s.log_eta1) s.log_eta1 = w.oracle.log_eta1;
          for (auto& c : w.chains)
            for (auto& ob : c.obstructions)
              if (!s.leading_obstruction) s.leading_obstruction = ob.value;
        }
      } catch (const std::exception& e) {
        s.failed = true;
        s.error = e.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // bracket sign changes of the oracle's leading coefficient
  for (size_t i = 0; i + 1 < srep.samples.size(); ++i) {
    auto& a = srep.samples[i];
    auto& b = srep.samples[i + 1];
    if (a.failed || b.failed || !a.log_eta1 || !b.log_eta1) continue;
    if ((*a.log_eta1) * (*b.log_eta1) < 0) {
      Rat lo = values[i], hi = values[i + 1];
      double flo = *a.log_eta1;
      for (int it = 0; it < 10; ++it) {
        Rat mid = (lo + hi) / Rat(2);
        try {
          Report r = run_single(spec, cfg, {{sw.name, mid}});
          std::optional<double> fm;
          double unc = 1e-12;
          for (auto& w : r.weights)
            if (w.oracle.computed) {
              fm = w.oracle.log_eta1;
              unc = w.oracle.uncertainty;
              break;
            }
          if (!fm) break;
          // below the oracle's noise the sign reads are meaningless
          if (std::abs(*fm) < std::max(1e-4, 8 * unc)) break;
          if ((*fm) * flo <= 0)
            hi = mid;
          else {
            lo = mid;
            flo = *fm;
          }
        } catch (const std::exception&) {
          break;
        }
      }
      srep.brackets.push_back({to_double(lo), to_double(hi)});
    }
  }
  rep.sweep = srep;
  rep.overall = {Outcome::Undecided, "sweep run; see per-sample verdicts", false};
  return rep;
}

}  // namespace monodromic
