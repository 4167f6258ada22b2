#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monodromic/expansion.hpp"

using namespace monodromic;

namespace {

PolyVectorField manosa(const Rat& a) {
  PolyVectorField X;
  X.P.add(1, 2, rat(1));
  X.P.add(0, 3, rat(-1));
  X.P.add(5, 0, a);
  X.Q.add(7, 0, rat(2));
  X.Q.add(4, 1, rat(-1));
  X.Q.add(1, 2, rat(4));
  X.Q.add(0, 3, rat(1));
  return X;
}

PolyVectorField semi35(Rat a12, Rat a21, Rat b41, Rat b32, Rat b23, Rat b14, Rat b05) {
  PolyVectorField X;
  X.P.add(0, 3, rat(-1));
  X.P.add(1, 2, a12);
  X.P.add(2, 1, a21);
  X.Q.add(5, 0, rat(1));
  X.Q.add(4, 1, b41);
  X.Q.add(3, 2, b32);
  X.Q.add(2, 3, b23);
  X.Q.add(1, 4, b14);
  X.Q.add(0, 5, b05);
  return X;
}

PolyVectorField linear_toy(const Rat& lambda) {
  PolyVectorField X;
  X.P.add(0, 1, rat(-1));
  X.P.add(1, 0, lambda);
  X.Q.add(1, 0, rat(1));
  X.Q.add(0, 1, lambda);
  return X;
}

PolyVectorField family10(Rat l1, Rat l2, Rat mu, Rat A) {
  BivarPoly f;
  f.add(6, 0, rat(1));
  f.add(0, 2, rat(3));
  BivarPoly g;
  g.add(2, 0, rat(1));
  g.add(0, 2, rat(1));
  BivarPoly X1p, X1q, X2p, X2q;
  X1p.add(0, 1, rat(-1));
  X1p.add(1, 0, mu);
  X1q.add(1, 0, rat(1));
  X1q.add(0, 1, mu);
  X2p.add(0, 1, rat(1));
  X2p.add(3, 0, A);
  X2q.add(5, 0, rat(-1));
  X2q.add(2, 1, A * rat(3));
  PolyVectorField X;
  X.P = (f * X1p).scaled(l1) + (g * X2p).scaled(l2);
  X.Q = (f * X1q).scaled(l1) + (g * X2q).scaled(l2);
  return X;
}

TrigPoly sin_pow(int n) {
  TrigPoly t = TrigPoly::constant(rat(1));
  for (int i = 0; i < n; ++i) t *= TrigPoly::sin_k(1);
  return t;
}
TrigPoly cos_pow(int n) {
  TrigPoly t = TrigPoly::constant(rat(1));
  for (int i = 0; i < n; ++i) t *= TrigPoly::cos_k(1);
  return t;
}

/// Compare two trig polynomials up to a scalar, pointwise at 32 angles.
void check_proportional(const TrigPoly& got, const TrigPoly& want, double at = 1.1) {
  double scale = got.evaluate_real(at) / want.evaluate_real(at);
  REQUIRE(std::isfinite(scale));
  REQUIRE(scale != 0.0);
  for (int i = 0; i < 32; ++i) {
    double phi = 2 * M_PI * (i + 0.5) / 32;
    CHECK(std::abs(got.evaluate_real(phi) - scale * want.evaluate_real(phi)) <
          1e-8 * (1 + std::abs(scale * want.evaluate_real(phi))));
  }
}

}  // namespace

TEST_CASE("xi_pq fixtures") {
  XiResult xm = xi_pq(blow_up(manosa(rat(-31, 25)), {1, 1}));
  CHECK(std::abs(xm.value - M_PI) < 1e-12);
  CHECK(xm.residue.exact);
  CHECK(xm.dual_confirmed);

  XiResult xs =
      xi_pq(blow_up(semi35(rat(1), rat(-1), rat(0), rat(0), rat(0), rat(0), rat(0)), {1, 1}));
  CHECK(std::abs(xs.value) < 1e-9);
  CHECK(std::abs(xs.quadrature.value.real()) < 1e-9);
  CHECK(xs.zero);

  XiResult xt = xi_pq(blow_up(linear_toy(rat(1, 4)), {1, 1}));
  CHECK(std::abs(xt.value - 2 * M_PI * 0.25) < 1e-12);
}

TEST_CASE("leading_constraint") {
  XiResult xi;
  xi.value = M_PI;
  xi.zero = false;
  CHECK(leading_constraint(xi) == MStatus::Fixed);
  xi.value = 0;
  xi.zero = true;
  CHECK(leading_constraint(xi) == MStatus::Free);
}

TEST_CASE("Manosa chain: v_1, trivial v_2, zeta obstruction at 3") {
  PolarField Z = blow_up(manosa(rat(-31, 25)), {1, 1});
  ExpansionConfig cfg;
  ExpansionState st = run_chain(Z, Direction::Ascending, 1, cfg);

  REQUIRE(st.coeffs.count(1) == 1);
  REQUIRE(st.coeffs.at(1).exact);
  TrigPoly v1_paper =
      sin_pow(2) * (TrigPoly::constant(rat(4)) - sin_pow(2).scaled(GaussRat(rat(3))));
  check_proportional(st.coeffs.at(1).closed.base, v1_paper);

  REQUIRE(st.coeffs.count(2) == 1);
  CHECK(st.coeffs.at(2).closed.base.is_zero());
  bool found_mu2 = false;
  for (auto& e : st.log)
    if (e.index == 2) {
      CHECK(std::abs(e.mu - std::exp(M_PI)) < 1e-8);
      found_mu2 = true;
    }
  CHECK(found_mu2);

  REQUIRE(st.obstructions.size() == 1);
  const ObstructionRecord& ob = st.obstructions[0];
  CHECK(ob.kind == ObstructionKind::ZetaNonzero);
  CHECK(ob.index == 3);
  CHECK(std::abs(ob.value) > 1e-9);
  CHECK(ob.dual_confirmed);
}

TEST_CASE("Manosa Q_3 forcing matches the closed form exactly") {
  Rat a = rat(-31, 25);
  PolarField Z = blow_up(manosa(a), {1, 1});
  ExpansionState st;
  st.m = 1;
  CoefficientFn v1;
  v1.exact = true;
  v1.closed.base = Z.G0();  // the paper's normalization v_1 = G_0
  st.coeffs[1] = v1;
  CoefficientFn v2;
  v2.exact = true;
  st.coeffs[2] = v2;
  bool exact = true;
  AffineTrig Q3 = ascending_forcing(Z, st.coeffs, 3, exact);
  REQUIRE(exact);
  TrigPoly expected = (cos_pow(4) *
                       (TrigPoly::constant(rat(7) + rat(17) * a) +
                        TrigPoly::cos_k(2).scaled(GaussRat(rat(1) + rat(7) * a))) *
                       sin_pow(2))
                          .scaled(GaussRat(rat(-1, 2)));
  CHECK(Q3.base == expected);
}

TEST_CASE("toy chains") {
  ExpansionConfig cfg;
  {
    PolarField Z = blow_up(linear_toy(rat(1, 10)), {1, 1});
    ExpansionState st = run_chain(Z, Direction::Ascending, 1, cfg);
    CHECK(st.saturated);
    auto V = st.closed_form();
    REQUIRE(V.has_value());
    REQUIRE(V->size() == 1);
    CHECK(V->begin()->first == 1);
    CHECK(V->begin()->second.is_constant());
  }
  {
    // m = 2 with lambda != 0: only the trivial periodic solution
    PolarField Z = blow_up(linear_toy(rat(1, 10)), {1, 1});
    ExpansionState st = run_chain(Z, Direction::Ascending, 2, cfg);
    CHECK(!st.leading_admissible);
    REQUIRE(!st.obstructions.empty());
    CHECK(st.obstructions[0].kind == ObstructionKind::MuNotOne);
  }
  {
    PolarField Z = blow_up(linear_toy(rat(0)), {1, 1});
    ExpansionState st = run_chain(Z, Direction::Ascending, 1, cfg);
    CHECK(st.saturated);
    auto V = st.closed_form();
    REQUIRE(V.has_value());
    CHECK(V->begin()->first == 1);
  }
}

TEST_CASE("(3,5) leading kernels match the closed form") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> num(-8, 8);
  int done = 0;
  while (done < 5) {
    Rat a12 = rat(num(rng), 4), a21 = rat(num(rng) - 9, 4);
    if (to_double(a12) * to_double(a12) + 4 * to_double(a21) >= 0) continue;
    PolyVectorField X = semi35(a12, a21, rat(0), rat(0), rat(0), rat(0), rat(0));
    PolarField Z = blow_up(X, {1, 1});
    TrigPoly w = sin_pow(2) - (TrigPoly::cos_k(1) * TrigPoly::sin_k(1)).scaled(GaussRat(a12)) -
                 cos_pow(2).scaled(GaussRat(a21));
    ExpansionConfig cfg;
    for (int m : {1, 3, 5}) {
      ExpansionState st = run_chain(Z, Direction::Ascending, m, cfg);
      REQUIRE(st.leading_admissible);
      REQUIRE(st.coeffs.at(m).exact);
      check_proportional(st.coeffs.at(m).closed.base, sin_pow(m + 1) * w);
    }
    ++done;
  }
}

TEST_CASE("(3,5) obstruction fires at j = m+2 when (m-3) L1 != 0") {
  PolyVectorField X = semi35(rat(1), rat(-1), rat(1, 2), rat(1, 3), rat(0), rat(0), rat(0));
  PolarField Z = blow_up(X, {1, 1});
  ExpansionConfig cfg;
  for (int m : {1, 2, 4, 5}) {
    ExpansionState st = run_chain(Z, Direction::Ascending, m, cfg);
    REQUIRE(st.leading_admissible);
    REQUIRE(!st.obstructions.empty());
    CHECK(st.obstructions[0].kind == ObstructionKind::ZetaNonzero);
    CHECK(st.obstructions[0].index == m + 2);
  }
}

TEST_CASE("descending engine on family (10)") {
  PolarField Z = blow_up(family10(rat(1), rat(-1), rat(1), rat(1)), {1, 1});
  ExpansionConfig cfg;
  for (int m = cfg.m_max; m >= 0; --m) {
    ExpansionState st = run_chain(Z, Direction::Descending, m, cfg);
    if (m == 5) {
      REQUIRE(st.leading_admissible);
      REQUIRE(st.coeffs.at(5).exact);
      check_proportional(st.coeffs.at(5).closed.base, cos_pow(6));
      // the intermediate forcings vanish identically (odd field), and the
      // chain recovers the true inverse integrating factor
      CHECK(st.saturated);
      REQUIRE(st.coeffs.count(1) == 1);
      check_proportional(st.coeffs.at(1).closed.base, sin_pow(2));
      auto V = st.closed_form();
      REQUIRE(V.has_value());
      CHECK(pde_residual(Z, *V).empty());
    } else {
      CHECK(!st.leading_admissible);
    }
  }
}

TEST_CASE("descending requires nondegenerate top coefficients") {
  PolarField Z = blow_up(linear_toy(rat(0)), {1, 1});
  ExpansionConfig cfg;
  ExpansionState st = run_chain(Z, Direction::Descending, 1, cfg);
  CHECK(st.undetermined);
  CHECK(st.halted_reason.find("descending") != std::string::npos);
}

TEST_CASE("recursion forcings match the direct PDE residual expansion") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coef(-4, 4);
  auto rnd_trig = [&](int h) {
    TrigPoly t = TrigPoly::constant(rat(coef(rng)));
    for (int k = 1; k <= h; ++k) {
      t += TrigPoly::cos_k(k).scaled(GaussRat(rat(coef(rng), 2)));
      t += TrigPoly::sin_k(k).scaled(GaussRat(rat(coef(rng), 2)));
    }
    return t;
  };
  PolarField Z = blow_up(manosa(rat(1, 3)), {1, 1});
  for (int rep = 0; rep < 5; ++rep) {
    int m = 1 + rep % 3;
    std::map<int, CoefficientFn> coeffs;
    GradedTrig V;
    for (int j = m; j < m + 4; ++j) {
      TrigPoly vj = rnd_trig(3);
      CoefficientFn fn;
      fn.exact = true;
      fn.closed.base = vj;
      coeffs[j] = fn;
      if (!vj.is_zero()) V[j] = vj;
    }
    GradedTrig res = pde_residual(Z, V);
    for (int s = m; s < m + 4 + Z.r_top(); ++s) {
      bool exact = true;
      AffineTrig Qs = ascending_forcing(Z, coeffs, s, exact);
      REQUIRE(exact);
      TrigPoly vs = coeffs.count(s) ? coeffs.at(s).closed.base : TrigPoly();
      TrigPoly Ls = Z.G0() * vs.differentiate() +
                    (Z.Rk(1).scaled(GaussRat(Rat(s - 1))) - Z.G0().differentiate()) * vs;
      TrigPoly rhs = res.count(s) ? res.at(s) : TrigPoly();
      CHECK(Ls + Qs.base == rhs);
    }
  }
}

TEST_CASE("descending forcing matches the direct expansion") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  auto rnd_trig = [&](int h) {
    TrigPoly t = TrigPoly::constant(rat(coef(rng)));
    for (int k = 1; k <= h; ++k) {
      t += TrigPoly::cos_k(k).scaled(GaussRat(rat(coef(rng), 2)));
      t += TrigPoly::sin_k(k).scaled(GaussRat(rat(coef(rng), 2)));
    }
    return t;
  };
  PolarField Z = blow_up(family10(rat(1), rat(-1), rat(1), rat(1)), {1, 1});
  int n = Z.r_top();
  REQUIRE(Z.g_top() == n - 1);
  int m = 5;
  std::map<int, CoefficientFn> coeffs;
  GradedTrig V;
  for (int j = m; j > m - 4; --j) {
    TrigPoly vj = rnd_trig(2);
    CoefficientFn fn;
    fn.exact = true;
    fn.closed.base = vj;
    coeffs[j] = fn;
    if (!vj.is_zero()) V[j] = vj;
  }
  GradedTrig res = pde_residual(Z, V);
  for (int j = m; j > m - 4; --j) {
    bool exact = true;
    AffineTrig Qj = descending_forcing(Z, coeffs, n, j, exact);
    REQUIRE(exact);
    TrigPoly vj = coeffs.at(j).closed.base;
    TrigPoly Lj = Z.Gk(n - 1) * vj.differentiate() +
                  (Z.Rk(n).scaled(GaussRat(Rat(j - n))) - Z.Gk(n - 1).differentiate()) * vj;
    int level = j + n - 1;
    TrigPoly rhs = res.count(level) ? res.at(level) : TrigPoly();
    CHECK(Lj + Qj.base == rhs);
  }
}

TEST_CASE("solve_periodic_ode on a regular circle") {
  OdeConfig cfg;
  ConstantBook book;
  {
    // case (ii): A = 1, P = cos, Q = cos: mu(2pi) = 1 and
    // zeta(2pi) = int cos e^{sin} = 0, so all solutions are periodic
    PeriodicODE eq;
    eq.A = TrigPoly::constant(rat(1));
    eq.P = TrigPoly::cos_k(1);
    eq.Q.base = TrigPoly::cos_k(1);
    eq.q_exact = true;
    eq.index = 1;
    StepResult res = solve_periodic_ode(eq, book, cfg);
    REQUIRE(res.status == StepStatus::Solved);
    CHECK(res.mu_is_one);
    if (!res.fn.exact) {
      AffineValue a0 = res.fn.eval(1e-9);
      AffineValue a1 = res.fn.eval(2 * M_PI - 1e-9);
      CHECK(std::abs(a0.base - a1.base) < 1e-8 * (1 + std::abs(a0.base)));
      for (double phi : {0.5, 1.7, 3.3, 5.1}) {
        AffineValue v = res.fn.eval(phi), dv = res.fn.eval_deriv(phi);
        double resid = dv.base + std::cos(phi) * v.base + std::cos(phi);
        CHECK(std::abs(resid) < 1e-7);
      }
    }
  }
  {
    // case (ii) with a nonzero zeta: A = 1, P = cos, Q = sin has
    // zeta(2pi) = int sin e^{sin} != 0; no periodic solution exists
    PeriodicODE eq;
    eq.A = TrigPoly::constant(rat(1));
    eq.P = TrigPoly::cos_k(1);
    eq.Q.base = TrigPoly::sin_k(1);
    eq.q_exact = true;
    eq.index = 1;
    StepResult res = solve_periodic_ode(eq, book, cfg);
    REQUIRE(res.status == StepStatus::Obstructed);
    CHECK(res.obstruction->kind == ObstructionKind::ZetaNonzero);
  }
  {
    // case (i): A = 1, P = 1/2 + cos: mu(2pi) = e^pi != 1, unique solution;
    // perturbing v(0) breaks periodicity by a detectable margin
    PeriodicODE eq;
    eq.A = TrigPoly::constant(rat(1));
    eq.P = TrigPoly::constant(rat(1, 2)) + TrigPoly::cos_k(1);
    eq.Q.base = TrigPoly::sin_k(1);
    eq.q_exact = true;
    eq.index = 1;
    StepResult res = solve_periodic_ode(eq, book, cfg);
    REQUIRE(res.status == StepStatus::Solved);
    CHECK(!res.mu_is_one);
    CHECK(std::abs(res.mu_value - std::exp(M_PI)) < 1e-6);
    if (!res.fn.exact) {
      double v0 = res.fn.eval(1e-9).base;
      double v1 = res.fn.eval(2 * M_PI - 1e-9).base;
      CHECK(std::abs(v0 - v1) < 1e-8 * (1 + std::abs(v0)));
      double vp = v0 + 1e-3;
      double t = 0, h = 1e-4;
      double y = vp;
      while (t < 2 * M_PI) {
        auto f = [](double tt, double yy) {
          return -((0.5 + std::cos(tt)) * yy + std::sin(tt));
        };
        double k1 = f(t, y);
        double k2 = f(t + h / 2, y + h / 2 * k1);
        double k3 = f(t + h / 2, y + h / 2 * k2);
        double k4 = f(t + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
      }
      CHECK(std::abs(y - vp) > 1e-4);
    }
  }
}

TEST_CASE("analyze_weight verdicts") {
  ExpansionConfig cfg;
  WeightAnalysis wm = analyze_weight(manosa(rat(-31, 25)), {1, 1}, cfg);
  CHECK(wm.verdict.outcome == Outcome::Focus);
  CHECK(wm.m_status == MStatus::Fixed);

  WeightAnalysis wt = analyze_weight(linear_toy(rat(1, 10)), {1, 1}, cfg);
  CHECK(wt.verdict.outcome == Outcome::MaximalOrderFocusCandidate);
  REQUIRE(wt.constructed_V.has_value());
  CHECK(wt.constructed_m == 1);
}
