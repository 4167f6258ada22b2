#include "monodromic/report.hpp"

#include <json.hpp>

#include <sstream>

namespace monodromic {

namespace {

using json = nlohmann::ordered_json;

json obstruction_json(const ObstructionRecord& ob) {
  json j;
  j["kind"] = to_string(ob.kind);
  j["index"] = ob.index;
  j["value"] = ob.value;
  j["error"] = ob.error;
  j["dual_confirmed"] = ob.dual_confirmed;
  if (!ob.residue_path.empty()) j["residue_path"] = ob.residue_path;
  if (!ob.quadrature_path.empty()) j["quadrature_path"] = ob.quadrature_path;
  return j;
}

json verdict_json(const Verdict& v) {
  json j;
  j["outcome"] = to_string(v.outcome);
  j["basis"] = v.basis;
  j["conditional"] = v.conditional;
  return j;
}

}  // namespace

std::string emit_report_json(const Report& r) {
  json j;
  j["schema"] = r.schema;
  if (!r.error.empty()) j["error"] = r.error;
  j["input"] = r.input_pretty;
  json jw = json::array();
  for (auto& w : r.weights) {
    json x;
    x["p"] = w.p;
    x["q"] = w.q;
    x["monodromic"] = w.monodromic;
    if (!w.monodromic) {
      x["skip_reason"] = w.skip_reason;
      jw.push_back(x);
      continue;
    }
    x["omega_empty"] = w.omega_empty;
    x["omega"] = w.omega_angles;
    x["lambda_pq_risk"] = w.lambda_risk;
    x["orientation_flipped"] = w.orientation_flipped;
    if (w.xi_value) {
      json xi;
      xi["value"] = *w.xi_value;
      if (w.xi_residue) xi["residue_path"] = *w.xi_residue;
      if (w.xi_quadrature) xi["quadrature_path"] = *w.xi_quadrature;
      xi["dual_confirmed"] = w.xi_dual_confirmed;
      x["xi"] = xi;
    }
    x["m_status"] = w.m_status;
    json chains = json::array();
    for (auto& c : w.chains) {
      json jc;
      jc["direction"] = c.direction;
      jc["m"] = c.m;
      jc["saturated"] = c.saturated;
      jc["undetermined"] = c.undetermined;
      jc["halted"] = c.halted_reason;
      json entries = json::array();
      for (auto& e : c.entries) {
        json je;
        je["index"] = e.index;
        je["exact"] = e.exact;
        je["zero"] = e.zero;
        je["mu"] = e.mu;
        if (e.new_constant) je["new_constant"] = true;
        if (!e.note.empty()) je["note"] = e.note;
        entries.push_back(je);
      }
      jc["coefficients"] = entries;
      json obs = json::array();
      for (auto& ob : c.obstructions) obs.push_back(obstruction_json(ob));
      jc["obstructions"] = obs;
      chains.push_back(jc);
    }
    x["chains"] = chains;
    if (w.oracle.computed) {
      json o;
      o["log_eta1"] = w.oracle.log_eta1;
      o["uncertainty"] = w.oracle.uncertainty;
      o["classification"] = w.oracle.classification;
      o["method"] = "poincare_map_extrapolation";
      x["oracle"] = o;
    } else if (!w.oracle.error.empty()) {
      x["oracle"] = json{{"error", w.oracle.error}};
    }
    if (w.g.computed) {
      json g;
      g["value"] = w.g.value;
      g["spread"] = w.g.spread;
      g["method"] = "g_of_r_quadrature";
      x["g_of_r"] = g;
    } else if (!w.g.error.empty()) {
      x["g_of_r"] = json{{"error", w.g.error}};
    }
    if (!w.constructed_V.empty()) x["constructed_V"] = w.constructed_V;
    x["verdict"] = verdict_json(w.verdict);
    jw.push_back(x);
  }
  j["weights"] = jw;
  j["verdict"] = verdict_json(r.overall);
  if (r.sweep) {
    json s;
    s["param"] = r.sweep->param;
    json samples = json::array();
    for (auto& smp : r.sweep->samples) {
      json js;
      js["value"] = smp.param_value;
      js["value_double"] = smp.param_double;
      if (smp.failed) {
        js["error"] = smp.error;
      } else {
        js["verdict"] = smp.verdict;
        js["basis"] = smp.basis;
        if (smp.log_eta1) js["log_eta1"] = *smp.log_eta1;
        if (smp.leading_obstruction) js["leading_obstruction"] = *smp.leading_obstruction;
      }
      samples.push_back(js);
    }
    s["samples"] = samples;
    json br = json::array();
    for (auto& [a, b] : r.sweep->brackets) br.push_back(json::array({a, b}));
    s["brackets"] = br;
    j["sweep"] = s;
  }
  return j.dump(2) + "\n";
}

std::string emit_report_text(const Report& r) {
  std::ostringstream os;
  os << "monodromic analysis\n===================\n";
  if (!r.error.empty()) {
    os << "error: " << r.error << "\n";
    return os.str();
  }
  for (auto& w : r.weights) {
    os << "\nweights (" << w.p << "," << w.q << ")\n";
    if (!w.monodromic) {
      os << "  skipped: " << w.skip_reason << "\n";
      continue;
    }
    os << "  characteristic directions: ";
    if (w.omega_angles.empty())
      os << "none";
    else
      for (double a : w.omega_angles) os << a << " ";
    os << "\n  lambda_pq risk: " << w.lambda_risk << "\n";
    if (w.xi_value) {
      os << "  xi = " << *w.xi_value;
      if (w.xi_residue && w.xi_quadrature)
        os << "  (residues " << *w.xi_residue << ", quadrature " << *w.xi_quadrature << ")";
      os << "\n";
    }
    os << "  leading exponent: " << w.m_status << "\n";
    for (auto& c : w.chains) {
      os << "  " << c.direction << " chain from m = " << c.m << ": ";
      if (c.saturated)
        os << "saturated";
      else if (!c.obstructions.empty())
        os << "obstructed";
      else if (c.undetermined)
        os << "undetermined";
      else
        os << "halted";
      os << " (" << c.halted_reason << ")\n";
      for (auto& e : c.entries)
        os << "    v_" << e.index << (e.exact ? " exact" : " sampled") << (e.zero ? " = 0" : "")
           << (e.note.empty() ? "" : ("  [" + e.note + "]")) << "\n";
      for (auto& ob : c.obstructions)
        os << "    obstruction " << to_string(ob.kind) << " at index " << ob.index
           << ", value " << ob.value << (ob.dual_confirmed ? " (dual-path confirmed)" : "")
           << "\n";
    }
    if (w.oracle.computed)
      os << "  oracle: log eta1 = " << w.oracle.log_eta1 << " +- " << w.oracle.uncertainty << " ("
         << w.oracle.classification << ")\n";
    if (w.g.computed) os << "  G(r) = " << w.g.value << " (spread " << w.g.spread << ")\n";
    if (!w.constructed_V.empty()) os << "  V = " << w.constructed_V << "\n";
    os << "  verdict: " << to_string(w.verdict.outcome)
       << (w.verdict.conditional ? " (conditional)" : "") << "\n    basis: " << w.verdict.basis
       << "\n";
  }
  os << "\noverall: " << to_string(r.overall.outcome)
     << (r.overall.conditional ? " (conditional)" : "") << "\n  basis: " << r.overall.basis << "\n";
  if (r.sweep) {
    os << "\nsweep over " << r.sweep->param << "\n";
    for (auto& s : r.sweep->samples) {
      os << "  " << s.param_value << ": ";
      if (s.failed)
        os << "error: " << s.error;
      else {
        os << s.verdict;
        if (s.log_eta1) os << ", log eta1 = " << *s.log_eta1;
      }
      os << "\n";
    }
    for (auto& [a, b] : r.sweep->brackets)
      os << "  log eta1 sign change bracketed in [" << a << ", " << b << "]\n";
  }
  return os.str();
}

}  // namespace monodromic
