#include "monodromic/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace monodromic {

namespace {

/// Substitute exactly-assigned constants into an affine trig polynomial.
AffineTrig substitute_assigned(const AffineTrig& t, const ConstantBook& book, bool& still_exact) {
  AffineTrig r;
  r.base = t.base;
  for (auto& [k, p] : t.parts) {
    auto ex = book.exact.find(k);
    if (ex != book.exact.end()) {
      r.base += p.scaled(GaussRat(ex->second));
      continue;
    }
    if (book.assigned.count(k)) {
      still_exact = false;  // double-only assignment contaminates exactness
      continue;
    }
    r.parts[k] = p;
  }
  return r;
}

/// Canonical normalization of an exact kernel: make the lowest nonnegative
/// harmonic coefficient equal to 1 (or i when purely imaginary).
TrigPoly normalize_kernel(const TrigPoly& k) {
  if (k.is_zero()) return k;
  long pick = 0;
  bool found = false;
  for (auto& [h, c] : k.coeffs()) {
    if (h < 0) continue;
    pick = h;
    found = true;
    break;
  }
  if (!found) pick = k.coeffs().begin()->first;
  GaussRat c = k.coeff(pick);
  GaussRat scale = (c.re != 0) ? GaussRat(c.re).inverse() : c.inverse();
  return k.scaled(scale);
}

ObstructionRecord make_obstruction(ObstructionKind kind, int index, double value,
                                   const std::string& note) {
  ObstructionRecord ob;
  ob.kind = kind;
  ob.index = index;
  ob.value = value;
  ob.quadrature_path = note;
  return ob;
}

/// Greedy assignment of one linear condition; returns an obstruction when the
/// condition is numerically violated with no free constant left.
std::optional<ObstructionRecord> apply_condition(const LinearCondition& c, ConstantBook& book,
                                                 double tol) {
  // pick the free constant with the largest coefficient
  int best = -1;
  double best_mag = tol;
  for (auto& [k, coef] : c.lhs.parts) {
    if (book.assigned.count(k)) continue;
    if (std::abs(coef) > best_mag) {
      best = k;
      best_mag = std::abs(coef);
    }
  }
  double resolved = book.resolve(c.lhs);
  if (best < 0) {
    if (std::abs(resolved) > tol) {
      ObstructionRecord ob;
      ob.kind = ObstructionKind::ConstantSystemInconsistent;
      ob.index = c.source_index;
      ob.value = resolved;
      ob.quadrature_path = "condition violated with no free constant";
      return ob;
    }
    return std::nullopt;
  }
  // resolved = value with best treated as 0; solve base' + coef * c_best = 0
  double coef = c.lhs.parts.at(best);
  double value = -resolved / coef;
  book.assigned[best] = value;
  // constants produced by these chains are rational in practice; adopt a
  // small-denominator rationalization when it reproduces the double exactly
  if (!c.lhs.exact_base) {
    double x = value;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double a = x;
    for (int it = 0; it < 40; ++it) {
      double fl = std::floor(a);
      if (std::abs(fl) > 1e12) break;
      long ai = static_cast<long>(fl);
      long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
      if (q2 > 100000) break;
      p0 = p1; q0 = q1; p1 = p2; q1 = q2;
      double frac = a - fl;
      if (frac < 1e-14) break;
      a = 1.0 / frac;
    }
    if (q1 > 0) {
      Rat cand(p1, q1);
      cand.canonicalize();
      if (std::abs(to_double(cand) - x) < 1e-11 * (1 + std::abs(x))) {
        book.exact[best] = cand;
        book.assigned[best] = to_double(cand);
      }
    }
  }
  // exact assignment when the condition carries exact data
  if (c.lhs.exact_base && c.lhs.exact_parts.count(best)) {
    bool all_exact = true;
    GaussRat acc = *c.lhs.exact_base;
    for (auto& [k, coefd] : c.lhs.parts) {
      if (k == best) continue;
      auto it = book.exact.find(k);
      auto ex = c.lhs.exact_parts.find(k);
      if (it == book.exact.end() || ex == c.lhs.exact_parts.end()) {
        if (book.assigned.count(k) && book.assigned.at(k) == 0.0) continue;
        if (!book.assigned.count(k)) continue;  // unassigned treated as 0... not hit: best<0 path
        all_exact = false;
        break;
      }
      acc += ex->second * GaussRat(it->second);
    }
    GaussRat cb = c.lhs.exact_parts.at(best);
    if (all_exact && !cb.is_zero() && acc.im == 0 && cb.im == 0) {
      Rat ex_val = -(acc.re / cb.re);
      book.exact[best] = ex_val;
      book.assigned[best] = to_double(ex_val);
    }
  }
  return std::nullopt;
}

int descending_n(const PolarField& Z) {
  int n = Z.r_top();
  if (n < 1 || Z.Rk(n).is_zero())
    throw LeadingDegenerate("descending recursion: R_n identically zero");
  if (Z.g_top() != n - 1)
    throw LeadingDegenerate("descending recursion: Theta top index is not n-1");
  return n;
}

}  // namespace

XiResult xi_pq(const PolarField& Z, const OdeConfig& cfg) {
  XiResult xi;
  RationalTrig W(Z.Rk(1), Z.G0());
  xi.residue = pv_contour_integral(W, cfg.pv);
  // exact reduction may cancel characteristic-angle poles entirely; excise
  // only around the poles the reduced integrand actually has
  std::vector<double> poles;
  if (!W.num.is_zero())
    for (auto& z : zeros_on_circle(W.den)) poles.push_back(z.angle);
  xi.quadrature = pv_quadrature([&](double s) { return W.evaluate_real(s); }, poles, cfg.pv);
  if (xi.residue.diverges)
    throw PVUndefined("xi_pq: non-simple on-contour pole of R_1/G_0");
  double vr = xi.residue.real_checked();
  double vq = xi.quadrature.value.real();
  xi.value = vr;
  bool zr = std::abs(vr) < cfg.tol_zero;
  bool zq = std::abs(vq) < std::max(cfg.tol_zero, xi.quadrature.error_estimate * 4);
  xi.zero = zr && zq;
  xi.ambiguous = (zr != zq);
  xi.dual_confirmed = std::abs(vr - vq) < std::max(1e-6, 1e-4 * std::abs(vr));
  return xi;
}

MStatus leading_constraint(const XiResult& xi, double tol_zero) {
  if (xi.ambiguous) return MStatus::Free;  // treated cautiously by the caller
  return (std::abs(xi.value) > tol_zero && !xi.zero) ? MStatus::Fixed : MStatus::Free;
}

AffineTrig ascending_forcing(const PolarField& Z, const std::map<int, CoefficientFn>& coeffs,
                             int j, bool& exact) {
  // Q_j = sum_{k>=1} (G_k v'_{j-k} - G_k' v_{j-k}) + sum_{k>=2} (j+1-2k) R_k v_{j+1-k}
  exact = true;
  AffineTrig Q;
  for (int k = 1; k <= Z.g_top(); ++k) {
    auto it = coeffs.find(j - k);
    if (it == coeffs.end() || Z.Gk(k).is_zero()) continue;
    if (!it->second.exact) {
      exact = false;
      continue;
    }
    Q = Q + it->second.closed.differentiate().mul(Z.Gk(k)) -
        it->second.closed.mul(Z.Gk(k).differentiate());
  }
  for (int k = 2; k <= Z.r_top(); ++k) {
    auto it = coeffs.find(j + 1 - k);
    if (it == coeffs.end() || Z.Rk(k).is_zero()) continue;
    if (!it->second.exact) {
      exact = false;
      continue;
    }
    Q = Q + it->second.closed.mul(Z.Rk(k).scaled(GaussRat(Rat(j + 1 - 2 * k))));
  }
  return Q;
}

AffineTrig descending_forcing(const PolarField& Z, const std::map<int, CoefficientFn>& coeffs,
                              int n, int j, bool& exact) {
  // Q^d_j = sum_{k=0}^{n-2} (G_k v'_{j+n-1-k} - G_k' v_{j+n-1-k})
  //       + sum_{k=1}^{n-1} (j+n-2k) R_k v_{j+n-k}
  exact = true;
  AffineTrig Q;
  for (int k = 0; k <= n - 2; ++k) {
    auto it = coeffs.find(j + n - 1 - k);
    if (it == coeffs.end() || Z.Gk(k).is_zero()) continue;
    if (!it->second.exact) {
      exact = false;
      continue;
    }
    Q = Q + it->second.closed.differentiate().mul(Z.Gk(k)) -
        it->second.closed.mul(Z.Gk(k).differentiate());
  }
  for (int k = 1; k <= n - 1; ++k) {
    auto it = coeffs.find(j + n - k);
    if (it == coeffs.end() || Z.Rk(k).is_zero()) continue;
    if (!it->second.exact) {
      exact = false;
      continue;
    }
    Q = Q + it->second.closed.mul(Z.Rk(k).scaled(GaussRat(Rat(j + n - 2 * k))));
  }
  return Q;
}

namespace {

/// Pointwise affine forcing through sampled lower coefficients.
std::function<AffineValue(double)> forcing_evaluator(const PolarField& Z,
                                                     const std::map<int, CoefficientFn>* coeffs,
                                                     Direction dir, int n, int j) {
  return [&Z, coeffs, dir, n, j](double phi) {
    AffineValue q;
    auto add = [&](const AffineValue& v, double s) {
      q.base += v.base * s;
      for (auto& [k, c] : v.parts) q.parts[k] += c * s;
    };
    if (dir == Direction::Ascending) {
      for (int k = 1; k <= Z.g_top(); ++k) {
        auto it = coeffs->find(j - k);
        if (it == coeffs->end() || Z.Gk(k).is_zero()) continue;
        add(it->second.eval_deriv(phi), Z.Gk(k).evaluate_real(phi));
        add(it->second.eval(phi), -Z.Gk(k).differentiate().evaluate_real(phi));
      }
      for (int k = 2; k <= Z.r_top(); ++k) {
        auto it = coeffs->find(j + 1 - k);
        if (it == coeffs->end() || Z.Rk(k).is_zero()) continue;
        add(it->second.eval(phi), (j + 1 - 2 * k) * Z.Rk(k).evaluate_real(phi));
      }
    } else {
      for (int k = 0; k <= n - 2; ++k) {
        auto it = coeffs->find(j + n - 1 - k);
        if (it == coeffs->end() || Z.Gk(k).is_zero()) continue;
        add(it->second.eval_deriv(phi), Z.Gk(k).evaluate_real(phi));
        add(it->second.eval(phi), -Z.Gk(k).differentiate().evaluate_real(phi));
      }
      for (int k = 1; k <= n - 1; ++k) {
        auto it = coeffs->find(j + n - k);
        if (it == coeffs->end() || Z.Rk(k).is_zero()) continue;
        add(it->second.eval(phi), (j + n - 2 * k) * Z.Rk(k).evaluate_real(phi));
      }
    }
    return q;
  };
}

PeriodicODE make_equation(const PolarField& Z, ExpansionState& st, Direction dir, int j,
                          const ExpansionConfig& cfg) {
  PeriodicODE eq;
  eq.index = j;
  int n = 0;
  if (dir == Direction::Ascending) {
    eq.A = Z.G0();
    eq.P = Z.Rk(1).scaled(GaussRat(Rat(j - 1))) - Z.G0().differentiate();
  } else {
    n = descending_n(Z);
    eq.A = Z.Gk(n - 1);
    eq.P = Z.Rk(n).scaled(GaussRat(Rat(j - n))) - Z.Gk(n - 1).differentiate();
  }
  eq.omega = zeros_on_circle(eq.A);
  bool exact = true;
  AffineTrig Q = (dir == Direction::Ascending) ? ascending_forcing(Z, st.coeffs, j, exact)
                                               : descending_forcing(Z, st.coeffs, n, j, exact);
  if (exact) {
    bool still_exact = true;
    eq.Q = substitute_assigned(Q, st.book, still_exact);
    eq.q_exact = still_exact;
    if (!still_exact) eq.Q_eval = forcing_evaluator(Z, &st.coeffs, dir, n, j);
  } else {
    eq.q_exact = false;
    eq.Q_eval = forcing_evaluator(Z, &st.coeffs, dir, n, j);
  }
  return eq;
}

/// Sample an exact kernel into an already-sampled coefficient function.
void attach_kernel_samples(CoefficientFn& fn, const TrigPoly& kernel, int idx) {
  TrigPoly dk = kernel.differentiate();
  for (auto& s : fn.samples) {
    s.v.parts[idx] = kernel.evaluate_real(s.phi);
    s.dv.parts[idx] = dk.evaluate_real(s.phi);
  }
}

StepResult run_step(const PolarField& Z, ExpansionState& st, Direction dir, int j,
                    const ExpansionConfig& cfg) {
  PeriodicODE eq = make_equation(Z, st, dir, j, cfg);
  StepResult res;
  int applied = 0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    res = solve_periodic_ode(eq, st.book, cfg.ode);
    if (res.status != StepStatus::Condition) break;
    for (auto& c : res.conditions) {
      auto ob = apply_condition(c, st.book, cfg.ode.tol_zero);
      ++applied;
      if (ob) {
        res.status = StepStatus::Obstructed;
        res.obstruction = *ob;
        res.conditions_applied = applied;
        return res;
      }
    }
    // re-substitute any newly exact assignments into the forcing
    eq = make_equation(Z, st, dir, j, cfg);
  }
  res.conditions_applied = applied;
  return res;
}

}  // namespace

StepResult ascend_step(const PolarField& Z, ExpansionState& st, int j, const ExpansionConfig& cfg) {
  return run_step(Z, st, Direction::Ascending, j, cfg);
}

StepResult descend_step(const PolarField& Z, ExpansionState& st, int j,
                        const ExpansionConfig& cfg) {
  return run_step(Z, st, Direction::Descending, j, cfg);
}

std::optional<GradedTrig> ExpansionState::closed_form() const {
  GradedTrig V;
  for (auto& [j, fn] : coeffs) {
    if (!fn.exact) return std::nullopt;
    TrigPoly t = fn.closed.base;
    for (auto& [k, p] : fn.closed.parts) {
      auto ex = book.exact.find(k);
      if (ex != book.exact.end()) {
        t += p.scaled(GaussRat(ex->second));
        continue;
      }
      auto as = book.assigned.find(k);
      if (as != book.assigned.end() && as->second != 0.0) return std::nullopt;
      // unassigned free constants default to zero
    }
    if (!t.is_zero()) V[j] = t;
  }
  if (V.empty()) return std::nullopt;
  return V;
}

ExpansionState run_chain(const PolarField& Z, Direction dir, int m, const ExpansionConfig& cfg) {
  ExpansionState st;
  st.direction = dir;
  st.m = m;

  // leading step: homogeneous equation, nonzero bounded periodic solution
  PeriodicODE lead;
  try {
    lead = make_equation(Z, st, dir, m, cfg);
  } catch (const LeadingDegenerate& e) {
    st.undetermined = true;
    st.halted_reason = e.what();
    return st;
  }
  ExactSolve hom = solve_exact_trig(lead.A, lead.P, TrigPoly(), 8, cfg.ode.exact_harmonic_cap);
  if (hom.found && hom.kernel && !hom.kernel->is_zero()) {
    CoefficientFn fn;
    fn.exact = true;
    fn.closed.base = normalize_kernel(*hom.kernel);
    st.coeffs[m] = fn;
    st.leading_admissible = true;
    st.log.push_back({m, true, false, false, 1.0, "leading kernel (exact)"});
  } else {
    MuResult mu;
    try {
      mu = compute_mu(lead.P, lead.A, lead.omega, cfg.ode);
    } catch (const PVUndefined& e) {
      st.undetermined = true;
      st.halted_reason = std::string("leading mu undefined: ") + e.what();
      return st;
    }
    bool mu_one = std::abs(mu.log_mu) < cfg.ode.tol_mu;
    if (!mu_one) {
      st.obstructions.push_back(make_obstruction(ObstructionKind::MuNotOne, m,
                                                 std::exp(mu.log_mu),
                                                 "leading equation admits only the trivial periodic solution"));
      st.halted_reason = "leading coefficient inadmissible (mu(2pi) != 1, v_m = 0 only)";
      return st;
    }
    if (lead.omega.empty()) {
      // kernel exp(-int P/A) sampled on a fixed grid; periodic since mu = 1
      CoefficientFn fn;
      double h = 1.0;
      int steps = 4096;
      double prev = 0;
      auto f = [&](double t) { return -lead.P.evaluate_real(t) / lead.A.evaluate_real(t); };
      for (int i = 0; i < steps; ++i) {
        double phi = 2 * M_PI * i / steps;
        if (i > 0) {
          double dt = phi - prev;
          double k1 = f(prev), k2 = f(prev + dt / 2), k4 = f(phi);
          h *= std::exp(dt * (k1 + 4 * k2 + k4) / 6);
        }
        prev = phi;
        CoefficientFn::Sample s;
        s.phi = phi;
        s.v.base = h;
        s.dv.base = f(phi) * h;
        fn.samples.push_back(s);
      }
      st.coeffs[m] = fn;
      st.leading_admissible = true;
      st.log.push_back({m, false, false, false, 1.0, "leading kernel (sampled)"});
    } else {
      st.undetermined = true;
      st.halted_reason = "leading kernel not representable (mu = 1, no exact kernel, singular circle)";
      return st;
    }
  }

  // subsequent coefficients
  int clean_streak = 0;
  int steps = (dir == Direction::Ascending) ? cfg.max_order : cfg.descend_depth;
  for (int t = 1; t <= steps; ++t) {
    int j = (dir == Direction::Ascending) ? m + t : m - t;
    StepResult res;
    try {
      res = run_step(Z, st, dir, j, cfg);
    } catch (const PVUndefined& e) {
      st.undetermined = true;
      st.halted_reason = std::string("PV undefined at index ") + std::to_string(j) + ": " + e.what();
      return st;
    } catch (const LeadingDegenerate& e) {
      st.undetermined = true;
      st.halted_reason = e.what();
      return st;
    }
    if (res.status == StepStatus::Obstructed) {
      st.obstructions.push_back(*res.obstruction);
      st.halted_reason = "obstruction at index " + std::to_string(j);
      return st;
    }
    if (res.status == StepStatus::Undetermined) {
      st.undetermined = true;
      st.halted_reason = "undetermined at index " + std::to_string(j) +
                         (res.note.empty() ? "" : (": " + res.note));
      return st;
    }
    // solved: attach new constant if any
    bool added_constant = false;
    if (res.new_constant && res.kernel) {
      if (st.book.next_index < cfg.max_constants) {
        int idx = st.book.next_index++;
        TrigPoly k = normalize_kernel(*res.kernel);
        if (res.fn.exact)
          res.fn.closed.parts[idx] = k;
        else
          attach_kernel_samples(res.fn, k, idx);
        added_constant = true;
      }
    } else if (res.new_constant && res.kernel_numeric) {
      // periodic numeric kernel exp(-int P/A) on a regular circle
      if (st.book.next_index < cfg.max_constants && !res.fn.samples.empty()) {
        int idx = st.book.next_index++;
        PeriodicODE eqk = make_equation(Z, st, dir, j, cfg);
        double acc = 0, prev = 0;
        for (auto& s : res.fn.samples) {
          double Av = eqk.A.evaluate_real(s.phi);
          double Pv = eqk.P.evaluate_real(s.phi);
          if (&s != &res.fn.samples.front()) acc += -(Pv / Av) * (s.phi - prev);
          prev = s.phi;
          s.v.parts[idx] = std::exp(acc);
          s.dv.parts[idx] = -(Pv / Av) * std::exp(acc);
        }
        added_constant = true;
      }
    }
    // admissibility
    PeriodicODE eq = make_equation(Z, st, dir, j, cfg);
    Admissibility adm = admissibility_check(res.fn, eq, st.book, cfg.ode);
    for (auto& c : adm.conditions) {
      auto ob = apply_condition(c, st.book, cfg.ode.tol_zero);
      if (ob) {
        st.obstructions.push_back(*ob);
        st.halted_reason = "inconsistent constant system at index " + std::to_string(j);
        return st;
      }
    }
    if (!adm.ok) {
      st.obstructions.push_back(*adm.obstruction);
      st.halted_reason = "inadmissible coefficient at index " + std::to_string(j);
      return st;
    }
    bool is_zero = res.fn.exact && res.fn.closed.base.is_zero() && res.fn.closed.parts.empty();
    st.coeffs[j] = res.fn;
    st.log.push_back({j, res.fn.exact, is_zero, added_constant, res.mu_value, res.note});
    // new free constants do not count as conditions; only constraints reset
    if (adm.conditions.empty() && res.conditions_applied == 0)
      ++clean_streak;
    else
      clean_streak = 0;
    if (clean_streak >= cfg.saturation_window) {
      // a streak of structural zeros (parity gaps) must not end the
      // recursion while the next forcing is visibly nonzero
      bool trivial_streak = true;
      for (int back = 0; back < cfg.saturation_window; ++back) {
        int idx = (dir == Direction::Ascending) ? j - back : j + back;
        auto it = st.coeffs.find(idx);
        if (it == st.coeffs.end() || !it->second.exact ||
            !(it->second.closed.base.is_zero() && it->second.closed.parts.empty())) {
          trivial_streak = false;
          break;
        }
      }
      bool really_done = true;
      if (trivial_streak) {
        int jn = (dir == Direction::Ascending) ? j + 1 : j - 1;
        bool fex = true;
        AffineTrig Qn = (dir == Direction::Ascending)
                            ? ascending_forcing(Z, st.coeffs, jn, fex)
                            : descending_forcing(Z, st.coeffs, descending_n(Z), jn, fex);
        if (fex && !(Qn.base.is_zero() && Qn.parts.empty())) really_done = false;
      }
      if (really_done) {
        st.saturated = true;
        st.halted_reason = "saturated (" + std::to_string(cfg.saturation_window) +
                           " clean coefficients)";
        return st;
      }
      clean_streak = 0;
    }
  }
  st.halted_reason = "window exhausted without saturation or obstruction";
  return st;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Center: return "center";
    case Outcome::Focus: return "focus";
    case Outcome::MaximalOrderFocusCandidate: return "maximal_order_focus_candidate";
    case Outcome::CenterByEssentialSingularity: return "center_by_essential_singularity";
    default: return "undecided";
  }
}

WeightAnalysis analyze_weight(const PolyVectorField& X, Weight w, const ExpansionConfig& cfg) {
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

  try {
    wa.xi = xi_pq(wa.Z, cfg.ode);
  } catch (const PVUndefined& e) {
    wa.verdict = {Outcome::Undecided, std::string("xi undefined: ") + e.what(), conditional};
    return wa;
  }
  if (wa.xi->ambiguous) {
    wa.verdict = {Outcome::Undecided, "xi dual paths disagree about vanishing", conditional};
    return wa;
  }
  wa.m_status = leading_constraint(*wa.xi, cfg.ode.tol_zero);

  if (wa.m_status == MStatus::Fixed) {
    // m = 1; the essential-singularity branch is closed
    ExpansionState st = run_chain(wa.Z, Direction::Ascending, 1, cfg);
    st.m_status = MStatus::Fixed;
    wa.ascending.push_back(st);
    const ExpansionState& s = wa.ascending.back();
    if (s.obstructed()) {
      wa.verdict = {Outcome::Focus,
                    "no ascending Laurent inverse integrating factor with the pinned leading "
                    "exponent m = 1; essential singularities excluded since m is determined",
                    false};
    } else if (s.saturated) {
      if (auto V = s.closed_form()) {
        wa.constructed_V = V;
        wa.constructed_m = s.m;
      }
      wa.verdict = {Outcome::MaximalOrderFocusCandidate,
                    "ascending expansion saturated at m = 1", conditional};
    } else {
      wa.verdict = {Outcome::Undecided, "ascending chain inconclusive: " + s.halted_reason,
                    conditional};
    }
    return wa;
  }

  // free m: scan the window, preferring small positive leading exponents
  std::vector<int> scan;
  for (int m = 1; m <= cfg.m_max; ++m) scan.push_back(m);
  for (int m = 0; m >= cfg.m_min; --m) scan.push_back(m);
  bool any_admissible = false, any_saturated = false, any_undetermined = false;
  std::vector<int> admissible_ms;
  for (int m : scan) {
    ExpansionState st = run_chain(wa.Z, Direction::Ascending, m, cfg);
    if (!st.leading_admissible) continue;
    any_admissible = true;
    admissible_ms.push_back(m);
    wa.ascending.push_back(st);
    const ExpansionState& s = wa.ascending.back();
    if (s.saturated) {
      any_saturated = true;
      if (!wa.constructed_V) {
        if (auto V = s.closed_form()) {
          wa.constructed_V = V;
          wa.constructed_m = s.m;
        }
      }
    }
    if (s.undetermined) any_undetermined = true;
  }

  if (any_saturated) {
    // operationally fixed m <= 0 with a clean chain is the Theorem-4 center
    if (admissible_ms.size() == 1 && admissible_ms[0] <= 0) {
      wa.verdict = {Outcome::Center,
                    "unique admissible ascending start with m <= 0 (nonsingular inverse "
                    "integrating factor)",
                    conditional};
      return wa;
    }
    wa.verdict = {Outcome::MaximalOrderFocusCandidate, "ascending expansion saturated",
                  conditional};
    return wa;
  }
  if (any_undetermined) {
    wa.verdict = {Outcome::Undecided, "ascending analysis ran into undetermined steps",
                  conditional};
    return wa;
  }

  // ascending failed everywhere: any Laurent inverse integrating factor must
  // carry an essential singularity; try the descending recursion
  bool desc_possible = true;
  std::string desc_note;
  std::vector<int> dscan;
  for (int m = cfg.m_max; m >= cfg.m_min; --m) dscan.push_back(m);
  bool d_admissible = false, d_saturated = false, d_undetermined = false;
  try {
    descending_n(wa.Z);
  } catch (const LeadingDegenerate& e) {
    desc_possible = false;
    desc_note = e.what();
  }
  if (desc_possible) {
    for (int m : dscan) {
      ExpansionState st = run_chain(wa.Z, Direction::Descending, m, cfg);
      if (!st.leading_admissible) continue;
      d_admissible = true;
      wa.descending.push_back(st);
      const ExpansionState& s = wa.descending.back();
      if (s.saturated) {
        d_saturated = true;
        if (!wa.constructed_V) {
          if (auto V = s.closed_form()) {
            wa.constructed_V = V;
            wa.constructed_m = s.m;
          }
        }
      }
      if (s.undetermined) d_undetermined = true;
    }
  }

  if (d_saturated) {
    wa.verdict = {Outcome::MaximalOrderFocusCandidate,
                  "descending expansion saturated (ascending excluded)", conditional};
    return wa;
  }
  if (d_undetermined || any_undetermined || !desc_possible) {
    wa.verdict = {Outcome::Undecided,
                  "no ascending expansion; descending analysis inconclusive" +
                      (desc_note.empty() ? std::string() : (": " + desc_note)),
                  conditional};
    return wa;
  }
  if (!any_admissible && !d_admissible) {
    wa.verdict = {Outcome::Undecided, "no admissible leading coefficient in the scan window",
                  conditional};
    return wa;
  }
  // both directions obstructed everywhere: per the procedure this closes the
  // bounded-exponent forms; the essential-singularity dichotomy applies
  wa.verdict = {Outcome::CenterByEssentialSingularity,
                "no ascending or descending expansion in the scan window; any Laurent inverse "
                "integrating factor must have an essential singularity (exhaustive-search "
                "evidence)",
                true};
  if (wa.probe.lambda_pq_risk != LambdaRisk::NoneDetected) wa.verdict.conditional = true;
  return wa;
}

}  // namespace monodromic
