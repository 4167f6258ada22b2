#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monodromic/trig.hpp"

using namespace monodromic;

namespace {

TrigPoly random_trig(std::mt19937& rng, int max_harmonic) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  TrigPoly t;
  for (int k = 0; k <= max_harmonic; ++k) {
    Rat a = rat(num(rng), den(rng));
    Rat b = rat(num(rng), den(rng));
    if (k == 0) {
      t += TrigPoly::constant(a);
    } else {
      t += TrigPoly::cos_k(k).scaled(GaussRat(a));
      t += TrigPoly::sin_k(k).scaled(GaussRat(b));
    }
  }
  return t;
}

}  // namespace

TEST_CASE("trig_to_laurent on the fixtures") {
  // cos phi -> (z + 1/z)/2
  LaurentPoly l = trig_to_laurent(TrigPoly::cos_k(1));
  CHECK(l.c.at(1) == GaussRat(rat(1, 2)));
  CHECK(l.c.at(-1) == GaussRat(rat(1, 2)));

  // 5 + 3 cos 2phi -> {-2: 3/2, 0: 5, 2: 3/2}
  TrigPoly t = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  LaurentPoly l2 = trig_to_laurent(t);
  CHECK(l2.c.at(-2) == GaussRat(rat(3, 2)));
  CHECK(l2.c.at(0) == GaussRat(rat(5)));
  CHECK(l2.c.at(2) == GaussRat(rat(3, 2)));

  // zero maps to zero
  CHECK(trig_to_laurent(TrigPoly()).is_zero());
}

TEST_CASE("round trip and homomorphism properties") {
  std::mt19937 rng(20240811);
  for (int rep = 0; rep < 40; ++rep) {
    TrigPoly a = random_trig(rng, 12);
    TrigPoly b = random_trig(rng, 12);
    CHECK(laurent_to_trig(trig_to_laurent(a)) == a);
    LaurentPoly prod = trig_to_laurent(a) * trig_to_laurent(b);
    CHECK(laurent_to_trig(prod) == a * b);
  }
}

TEST_CASE("differentiation identities") {
  // d/dphi sin^2 = sin 2phi
  TrigPoly s = TrigPoly::sin_k(1);
  CHECK((s * s).differentiate() == TrigPoly::sin_k(2));

  // d/dphi (5 + 3 cos 2phi) = -6 sin 2phi
  TrigPoly t = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  CHECK(t.differentiate() == TrigPoly::sin_k(2).scaled(GaussRat(rat(-6))));

  // sin * sin at pi/2 evaluates to 1
  CHECK((s * s).evaluate_quarter(1) == GaussRat(rat(1)));
}

TEST_CASE("derivative consistency against finite differences") {
  std::mt19937 rng(7);
  TrigPoly t = random_trig(rng, 8);
  TrigPoly dt = t.differentiate();
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int i = 0; i < 64; ++i) {
    double phi = ang(rng);
    double h = 1e-5;
    double fd = (t.evaluate_real(phi + h) - t.evaluate_real(phi - h)) / (2 * h);
    CHECK(std::abs(fd - dt.evaluate_real(phi)) < 1e-8 * (1 + std::abs(fd)));
  }
}

TEST_CASE("reality of real series") {
  std::mt19937 rng(99);
  TrigPoly t = random_trig(rng, 10);
  CHECK(t.is_real());
  // exact reality at quarter angles
  for (int q = 0; q < 4; ++q) CHECK(t.evaluate_quarter(q).im == 0);
  for (double phi : {0.3, 1.1, 2.9, 4.7, 6.1})
    CHECK(std::abs(t.evaluate(phi).imag()) < 1e-14);
}

TEST_CASE("zeros_on_circle") {
  // sin phi -> {0, pi}, multiplicity 1
  auto z1 = zeros_on_circle(TrigPoly::sin_k(1));
  REQUIRE(z1.size() == 2);
  CHECK(z1[0].angle == doctest::Approx(0.0));
  CHECK(z1[1].angle == doctest::Approx(M_PI));
  CHECK(z1[0].multiplicity == 1);

  // 5 + 3 cos 2phi has no zeros (z-roots off the circle)
  TrigPoly t = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  CHECK(zeros_on_circle(t).empty());

  // sin^2 -> double zeros
  TrigPoly s2 = TrigPoly::sin_k(1) * TrigPoly::sin_k(1);
  auto z2 = zeros_on_circle(s2);
  REQUIRE(z2.size() == 2);
  CHECK(z2[0].multiplicity == 2);
  CHECK(z2[1].multiplicity == 2);

  CHECK_THROWS(zeros_on_circle(TrigPoly()));
}

TEST_CASE("sign_on_circle") {
  // cos^4 * positive factor: nonnegative with zeros at pi/2, 3pi/2
  TrigPoly c = TrigPoly::cos_k(1);
  TrigPoly c4 = c * c * c * c;
  TrigPoly pos = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  CHECK(sign_on_circle(c4 * pos) == CircleSign::NonnegWithZeros);

  CHECK(sign_on_circle(pos) == CircleSign::Positive);
  CHECK(sign_on_circle(TrigPoly::sin_k(1)) == CircleSign::SignChanging);
  CHECK(sign_on_circle(pos.scaled(GaussRat(rat(-1)))) == CircleSign::Negative);
}

TEST_CASE("rational trig reduction cancels common factors exactly") {
  // (sin^2 * A) / (sin^2 * B) must reduce so evaluation at the zeros works
  TrigPoly s2 = TrigPoly::sin_k(1) * TrigPoly::sin_k(1);
  TrigPoly A = TrigPoly::constant(rat(2)) + TrigPoly::sin_k(2).scaled(GaussRat(rat(3)));
  TrigPoly B = TrigPoly::constant(rat(5)) + TrigPoly::cos_k(2).scaled(GaussRat(rat(3)));
  RationalTrig W(s2 * A, s2 * B);
  // after reduction the denominator has no zero on the circle
  CHECK(zeros_on_circle(W.den).empty());
  for (double phi : {0.0, 0.7, M_PI_2, 3.0}) {
    double direct = A.evaluate_real(phi) / B.evaluate_real(phi);
    CHECK(W.evaluate_real(phi) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("harmonic cap guards runaway support") {
  long saved = trig_harmonic_cap();
  trig_harmonic_cap() = 16;
  TrigPoly t = TrigPoly::cos_k(10);
  CHECK_THROWS_AS(t * t, TrigCapExceeded);
  trig_harmonic_cap() = saved;
}
