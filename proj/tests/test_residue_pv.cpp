#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monodromic/pv.hpp"

using namespace monodromic;

namespace {

GPoly gp(std::initializer_list<long> ints) {
  std::vector<GaussRat> v;
  for (long n : ints) v.push_back(GaussRat(Rat(n)));
  return GPoly(std::move(v));
}

TrigPoly rt(long c0) { return TrigPoly::constant(rat(c0)); }

TrigPoly random_trig(std::mt19937& rng, int max_harmonic) {
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  TrigPoly t;
  t += TrigPoly::constant(rat(num(rng), den(rng)));
  for (int k = 1; k <= max_harmonic; ++k) {
    t += TrigPoly::cos_k(k).scaled(GaussRat(rat(num(rng), den(rng))));
    t += TrigPoly::sin_k(k).scaled(GaussRat(rat(num(rng), den(rng))));
  }
  return t;
}

}  // namespace

TEST_CASE("find_roots fixtures") {
  // z^2 - 1: both on contour
  RootSet r1 = find_roots(gp({-1, 0, 1}));
  REQUIRE(r1.roots.size() == 2);
  for (auto& r : r1.roots) CHECK(r.circle_class == CircleClass::OnContour);

  // 3z^4 + 10z^2 + 3 = (3z^2+1)(z^2+3): two inside (+-i/sqrt3), two outside
  RootSet r2 = find_roots(gp({3, 0, 10, 0, 3}));
  int inside = 0, outside = 0;
  for (auto& r : r2.roots) {
    if (r.circle_class == CircleClass::Inside) ++inside;
    if (r.circle_class == CircleClass::Outside) ++outside;
    CHECK(std::abs(r.location.real()) < 1e-9);
  }
  CHECK(inside == 2);
  CHECK(outside == 2);

  // z^3 - z: 0 inside, +-1 on contour
  RootSet r3 = find_roots(gp({0, -1, 0, 1}));
  inside = 0;
  int on = 0;
  for (auto& r : r3.roots) {
    if (r.circle_class == CircleClass::Inside) ++inside;
    if (r.circle_class == CircleClass::OnContour) ++on;
  }
  CHECK(inside == 1);
  CHECK(on == 2);
}

TEST_CASE("root certification") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> c(-9, 9);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<GaussRat> v;
    int deg = 3 + rep % 9;
    for (int k = 0; k <= deg; ++k) v.push_back(GaussRat(Rat(c(rng)), Rat(c(rng))));
    GPoly p(std::move(v));
    if (p.degree() < 1) continue;
    RootSet rs = find_roots(p);
    for (auto& r : rs.roots)
      if (r.multiplicity == 1) CHECK(r.residual < 1e-10);
  }
}

TEST_CASE("residue_simple fixtures") {
  // 1/(z-2) at 2 -> 1
  CHECK(residue_simple(gp({1}), gp({-2, 1}), {2, 0}).real() == doctest::Approx(1.0));
  // (z^2+1)/(z^3-z) at 0 -> -1, at 1 -> 1
  GPoly N = gp({1, 0, 1}), D = gp({0, -1, 0, 1});
  CHECK(residue_simple(N, D, {0, 0}).real() == doctest::Approx(-1.0));
  CHECK(residue_simple(N, D, {1, 0}).real() == doctest::Approx(1.0));
  // multiple pole refused
  CHECK_THROWS_AS(residue_simple(gp({1}), gp({1, -2, 1}), {1, 0}), PVUndefined);
}

TEST_CASE("pv_contour_integral fixtures") {
  // constant 1 -> 2pi
  PVResult c = pv_contour_integral(RationalTrig::from_trig(rt(1)));
  CHECK(c.real_checked() == doctest::Approx(2 * M_PI).epsilon(1e-14));

  // (2 + 3 sin 2phi)/(5 + 3 cos 2phi) -> pi  (no on-contour poles)
  TrigPoly num = TrigPoly::constant(rat(2)) + TrigPoly::sin_k(2).scaled(GaussRat(rat(3)));
  TrigPoly den = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  PVResult manosa = pv_contour_integral(RationalTrig(num, den));
  CHECK(manosa.exact);
  CHECK(std::abs(manosa.real_checked() - M_PI) < 1e-12);

  // cot phi -> 0 (simple on-contour poles at 0 and pi)
  RationalTrig cot(TrigPoly::cos_k(1), TrigPoly::sin_k(1));
  PVResult pc = pv_contour_integral(cot);
  CHECK(std::abs(pc.real_checked()) < 1e-12);
  CHECK(pc.on_contour_poles.size() == 2);
}

TEST_CASE("paper f2 contour integral equals pi") {
  // f2(z) = -(15 + (17-4i) z^2 + (17+4i) z^4 + 15 z^6)
  //         / (z (z+1)(z-1)(3+z^2)(1+3z^2))
  GPoly N({GaussRat(Rat(-15)), GaussRat(0), GaussRat(Rat(-17), Rat(4)), GaussRat(0),
           GaussRat(Rat(-17), Rat(-4)), GaussRat(0), GaussRat(Rat(-15))});
  GPoly D = gp({0, -1, 0, 1}) * gp({3, 0, 1}) * gp({1, 0, 3});

  // exact residues: inside z=0 and the (3z^2+1) pair; on-contour +-1 at half
  GaussRat res0 = residue_sum_over_factor(N, D, gp({0, 1}));
  GaussRat res_pair = residue_sum_over_factor(N, D, gp({1, 0, 3}));
  GaussRat res_pm1 = residue_sum_over_factor(N, D, gp({-1, 0, 1}));
  // value = 2 pi i (res0 + res_pair + res_pm1 / 2)
  GaussRat sum = res0 + res_pair + res_pm1 * GaussRat(rat(1, 2));
  std::complex<double> val = std::complex<double>(0, 2 * M_PI) * sum.to_complex();
  CHECK(std::abs(val.imag()) < 1e-14);
  CHECK(std::abs(val.real() - M_PI) < 1e-10);
}

TEST_CASE("pv_quadrature fixtures") {
  // Manosa integrand, no poles -> pi within 1e-6
  TrigPoly num = TrigPoly::constant(rat(2)) + TrigPoly::sin_k(2).scaled(GaussRat(rat(3)));
  TrigPoly den = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  PVResult q1 = pv_quadrature(
      [&](double s) { return num.evaluate_real(s) / den.evaluate_real(s); }, {});
  CHECK(std::abs(q1.value.real() - M_PI) < 1e-6);

  // cot with poles {0, pi} -> 0 within 1e-6
  PVResult q2 = pv_quadrature([](double s) { return std::cos(s) / std::sin(s); }, {0.0, M_PI});
  CHECK(std::abs(q2.value.real()) < 1e-6);
  CHECK(!q2.diverges);

  // constant -> 2pi
  PVResult q3 = pv_quadrature([](double) { return 1.0; }, {});
  CHECK(q3.value.real() == doctest::Approx(2 * M_PI));
}

TEST_CASE("pv_quadrature flags divergent integrands") {
  // 1/sin^2 has a double pole at 0 and pi: symmetric excision diverges
  PVResult q = pv_quadrature(
      [](double s) {
        double x = std::sin(s);
        return 1.0 / (x * x);
      },
      {0.0, M_PI});
  CHECK(q.diverges);
}

TEST_CASE("residue path flags non-simple on-contour poles") {
  // 1/sin^2 phi in exact form
  TrigPoly s2 = TrigPoly::sin_k(1) * TrigPoly::sin_k(1);
  PVResult r = pv_contour_integral(RationalTrig(TrigPoly::constant(rat(1)), s2));
  CHECK(r.diverges);
  CHECK(!r.divergences.empty());
}

TEST_CASE("oracle equivalence on random integrands") {
  std::mt19937 rng(20250809);
  int done = 0;
  for (int rep = 0; rep < 250 && done < 100; ++rep) {
    TrigPoly num = random_trig(rng, 3);
    // keep denominators safely nonvanishing: positive constant + small wiggle
    TrigPoly den = TrigPoly::constant(rat(9)) + random_trig(rng, 2);
    if (num.is_zero()) continue;
    if (sign_on_circle(den) != CircleSign::Positive) continue;
    RationalTrig W(num, den);
    PVResult res = pv_contour_integral(W);
    if (res.diverges) continue;
    PVResult quad = pv_quadrature([&](double s) { return W.evaluate_real(s); },
                                  res.on_contour_poles);
    CHECK(std::abs(res.real_checked() - quad.value.real()) < 1e-6);
    ++done;
  }
  CHECK(done >= 100);
}

TEST_CASE("residue theorem sanity for inside-pole rational functions") {
  // f = 1/((z-a)(z-b)) with |a|,|b| < 1 vanishes at infinity faster than 1/z,
  // so the contour integral equals 2 pi i (sum of inside residues); checked
  // against a direct contour quadrature.
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int rep = 0; rep < 20; ++rep) {
    double ar = u(rng), ai = u(rng), br = u(rng), bi = u(rng);
    std::complex<double> a{ar, ai}, b{br, bi};
    if (std::abs(a - b) < 0.1) continue;
    auto f = [&](std::complex<double> z) { return 1.0 / ((z - a) * (z - b)); };
    std::complex<double> expected =
        std::complex<double>(0, 2 * M_PI) * (1.0 / (a - b) + 1.0 / (b - a));
    int N = 4096;
    std::complex<double> acc{0, 0};
    for (int k = 0; k < N; ++k) {
      double phi = 2 * M_PI * k / N;
      std::complex<double> z = std::polar(1.0, phi);
      acc += f(z) * std::complex<double>(0, 1) * z * (2 * M_PI / N);
    }
    CHECK(std::abs(acc - expected) < 1e-8);
  }
}

TEST_CASE("reality check of PV values") {
  std::mt19937 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    TrigPoly num = random_trig(rng, 3);
    TrigPoly den = TrigPoly::constant(rat(8)) + random_trig(rng, 2);
    if (sign_on_circle(den) == CircleSign::SignChanging) continue;
    PVResult r = pv_contour_integral(RationalTrig(num, den));
    if (!r.diverges) CHECK(std::abs(r.value.imag()) < 1e-9);
  }
}
