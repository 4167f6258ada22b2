#ifndef MONODROMIC_PARSER_HPP
#define MONODROMIC_PARSER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monodromic/field.hpp"
#include "monodromic/newton.hpp"
#include "monodromic/polar.hpp"

namespace monodromic {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
        line(l),
        col(c) {}
};

/// Expression AST; the printer and parser round-trip through this shape.
struct Expr {
  enum class Kind { Num, Var, Add, Sub, Mul, Pow, Neg };
  Kind kind = Kind::Num;
  Rat value;         // Num
  std::string name;  // Var
  int exponent = 0;  // Pow
  std::vector<Expr> kids;

  friend bool operator==(const Expr& a, const Expr& b);
};

enum class RunMode { Auto, AscendingOnly, DescendingOnly, OracleOnly };

struct ProblemSpec {
  std::string source;
  std::optional<Expr> dx, dy;
  std::map<std::string, Rat> params;
  std::optional<Weight> weight_override;
  std::optional<Expr> V;
  struct Sweep {
    std::string name;
    Rat from, to;
    int steps = 0;
  };
  std::optional<Sweep> sweep;
};

ProblemSpec parse_input(const std::string& text);

std::string pretty_print(const ProblemSpec& spec);
std::string pretty_print(const Expr& e);

/// Expand the dx/dy expressions into the vector field with every parameter
/// bound; unbound names are an error. Extra bindings override file params.
PolyVectorField build_field(const ProblemSpec& spec,
                            const std::map<std::string, Rat>& overrides = {});

/// A user-supplied closed-form V: either a polynomial in x, y (to be routed
/// through the blow-up transform) or a polar form in rho, cos, sin.
struct UserV {
  bool cartesian = false;
  BivarPoly xy;       // when cartesian
  GradedTrig polar;   // otherwise: rho-graded trig coefficients
};
UserV build_user_v(const Expr& e, const std::map<std::string, Rat>& params);

}  // namespace monodromic

#endif
