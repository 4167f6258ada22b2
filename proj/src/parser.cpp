#include "monodromic/parser.hpp"

#include <cctype>
#include <sstream>

namespace monodromic {

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Num: return a.value == b.value;
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::Pow: return a.exponent == b.exponent && a.kids == b.kids;
    default: return a.kids == b.kids;
  }
}

namespace {

struct Token {
  enum class Type { Ident, Int, Sym, End } type = Type::End;
  std::string text;
  long num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token cur;

  explicit Lexer(const std::string& s) : src(s) { advance(); }

  void bump(char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void advance() {
    while (pos < src.size() && (std::isspace(static_cast<unsigned char>(src[pos])) || src[pos] == '#')) {
      if (src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
      } else {
        bump(src[pos]);
      }
    }
    cur = {};
    cur.line = line;
    cur.col = col;
    if (pos >= src.size()) {
      cur.type = Token::Type::End;
      return;
    }
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        id += src[pos];
        bump(src[pos]);
      }
      cur.type = Token::Type::Ident;
      cur.text = id;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        digits += src[pos];
        bump(src[pos]);
      }
      if (pos < src.size() && src[pos] == '.')
        throw ParseError("floating-point literals are not allowed; use exact rationals a/b", line, col);
      cur.type = Token::Type::Int;
      cur.text = digits;
      cur.num = std::stol(digits);
      return;
    }
    cur.type = Token::Type::Sym;
    cur.text = std::string(1, c);
    bump(c);
  }

  bool accept_sym(const std::string& s) {
    if (cur.type == Token::Type::Sym && cur.text == s) {
      advance();
      return true;
    }
    return false;
  }
  void expect_sym(const std::string& s) {
    if (!accept_sym(s))
      throw ParseError("expected '" + s + "', found '" + cur.text + "'", cur.line, cur.col);
  }
  bool accept_ident(const std::string& s) {
    if (cur.type == Token::Type::Ident && cur.text == s) {
      advance();
      return true;
    }
    return false;
  }
  std::string expect_ident() {
    if (cur.type != Token::Type::Ident)
      throw ParseError("expected identifier, found '" + cur.text + "'", cur.line, cur.col);
    std::string s = cur.text;
    advance();
    return s;
  }
  long expect_int() {
    if (cur.type != Token::Type::Int)
      throw ParseError("expected integer, found '" + cur.text + "'", cur.line, cur.col);
    long n = cur.num;
    advance();
    return n;
  }
};

struct Parser {
  Lexer lex;
  explicit Parser(const std::string& s) : lex(s) {}

  Rat parse_rational() {
    bool neg = false;
    while (lex.cur.type == Token::Type::Sym && (lex.cur.text == "-" || lex.cur.text == "+")) {
      if (lex.cur.text == "-") neg = !neg;
      lex.advance();
    }
    long num = lex.expect_int();
    long den = 1;
    if (lex.accept_sym("/")) den = lex.expect_int();
    if (den == 0) throw ParseError("zero denominator", lex.cur.line, lex.cur.col);
    Rat r(num, den);
    r.canonicalize();
    return neg ? Rat(-r) : r;
  }

  // expr := term (('+'|'-') term)*
  Expr parse_expr() {
    Expr e = parse_term();
    while (lex.cur.type == Token::Type::Sym && (lex.cur.text == "+" || lex.cur.text == "-")) {
      bool plus = lex.cur.text == "+";
      lex.advance();
      Expr rhs = parse_term();
      Expr node;
      node.kind = plus ? Expr::Kind::Add : Expr::Kind::Sub;
      node.kids = {std::move(e), std::move(rhs)};
      e = std::move(node);
    }
    return e;
  }

  // term := factor ('*' factor)*
  Expr parse_term() {
    Expr e = parse_factor();
    while (lex.cur.type == Token::Type::Sym && lex.cur.text == "*") {
      lex.advance();
      Expr rhs = parse_factor();
      Expr node;
      node.kind = Expr::Kind::Mul;
      node.kids = {std::move(e), std::move(rhs)};
      e = std::move(node);
    }
    return e;
  }

  // factor := ['-'] atom ['^' int]
  Expr parse_factor() {
    if (lex.cur.type == Token::Type::Sym && lex.cur.text == "-") {
      lex.advance();
      Expr node;
      node.kind = Expr::Kind::Neg;
      node.kids = {parse_factor()};
      return node;
    }
    if (lex.cur.type == Token::Type::Sym && lex.cur.text == "+") {
      lex.advance();
      return parse_factor();
    }
    Expr e = parse_atom();
    if (lex.cur.type == Token::Type::Sym && lex.cur.text == "^") {
      lex.advance();
      long n = lex.expect_int();
      Expr node;
      node.kind = Expr::Kind::Pow;
      node.exponent = static_cast<int>(n);
      node.kids = {std::move(e)};
      return node;
    }
    return e;
  }

  Expr parse_atom() {
    if (lex.cur.type == Token::Type::Int) {
      long n = lex.cur.num;
      lex.advance();
      Expr e;
      e.kind = Expr::Kind::Num;
      if (lex.accept_sym("/")) {
        long d = lex.expect_int();
        if (d == 0) throw ParseError("zero denominator", lex.cur.line, lex.cur.col);
        Rat r(n, d);
        r.canonicalize();
        e.value = r;
      } else {
        e.value = Rat(n);
      }
      return e;
    }
    if (lex.cur.type == Token::Type::Ident) {
      Expr e;
      e.kind = Expr::Kind::Var;
      e.name = lex.cur.text;
      lex.advance();
      return e;
    }
    if (lex.accept_sym("(")) {
      Expr e = parse_expr();
      lex.expect_sym(")");
      return e;
    }
    throw ParseError("expected expression, found '" + lex.cur.text + "'", lex.cur.line,
                     lex.cur.col);
  }

  ProblemSpec parse() {
    ProblemSpec spec;
    while (lex.cur.type != Token::Type::End) {
      if (lex.accept_ident("dx")) {
        lex.expect_sym("=");
        spec.dx = parse_expr();
        lex.expect_sym(";");
      } else if (lex.accept_ident("dy")) {
        lex.expect_sym("=");
        spec.dy = parse_expr();
        lex.expect_sym(";");
      } else if (lex.accept_ident("param")) {
        std::string name = lex.expect_ident();
        lex.expect_sym("=");
        spec.params[name] = parse_rational();
        lex.expect_sym(";");
      } else if (lex.accept_ident("weights")) {
        lex.expect_sym("=");
        lex.expect_sym("(");
        long p = lex.expect_int();
        lex.expect_sym(",");
        long q = lex.expect_int();
        lex.expect_sym(")");
        lex.expect_sym(";");
        spec.weight_override = Weight{static_cast<int>(p), static_cast<int>(q)};
      } else if (lex.accept_ident("V")) {
        lex.expect_sym("=");
        spec.V = parse_expr();
        lex.expect_sym(";");
      } else if (lex.accept_ident("sweep")) {
        ProblemSpec::Sweep sw;
        sw.name = lex.expect_ident();
        if (!lex.accept_ident("from"))
          throw ParseError("expected 'from'", lex.cur.line, lex.cur.col);
        sw.from = parse_rational();
        if (!lex.accept_ident("to")) throw ParseError("expected 'to'", lex.cur.line, lex.cur.col);
        sw.to = parse_rational();
        if (!lex.accept_ident("steps"))
          throw ParseError("expected 'steps'", lex.cur.line, lex.cur.col);
        sw.steps = static_cast<int>(lex.expect_int());
        lex.expect_sym(";");
        spec.sweep = sw;
      } else {
        throw ParseError("unknown statement '" + lex.cur.text + "'", lex.cur.line, lex.cur.col);
      }
    }
    return spec;
  }
};

void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
  // precedence: Add/Sub 1, Mul 2, Neg 3, Pow 4, atoms 5
  auto paren = [&](int prec, auto&& body) {
    if (prec < parent_prec) {
      os << "(";
      body();
      os << ")";
    } else {
      body();
    }
  };
  switch (e.kind) {
    case Expr::Kind::Num: {
      Rat v = e.value;
      if (v < 0) {
        paren(3, [&] { os << v.get_str(); });
      } else {
        os << v.get_str();
      }
      break;
    }
    case Expr::Kind::Var: os << e.name; break;
    case Expr::Kind::Add:
      paren(1, [&] {
        print_expr(os, e.kids[0], 1);
        os << " + ";
        print_expr(os, e.kids[1], 2);
      });
      break;
    case Expr::Kind::Sub:
      paren(1, [&] {
        print_expr(os, e.kids[0], 1);
        os << " - ";
        print_expr(os, e.kids[1], 2);
      });
      break;
    case Expr::Kind::Mul:
      paren(2, [&] {
        print_expr(os, e.kids[0], 2);
        os << "*";
        print_expr(os, e.kids[1], 3);
      });
      break;
    case Expr::Kind::Neg:
      paren(2, [&] {
        os << "-";
        print_expr(os, e.kids[0], 3);
      });
      break;
    case Expr::Kind::Pow:
      paren(4, [&] {
        print_expr(os, e.kids[0], 5);
        os << "^" << e.exponent;
      });
      break;
  }
}

}  // namespace

ProblemSpec parse_input(const std::string& text) {
  Parser p(text);
  ProblemSpec spec = p.parse();
  spec.source = text;
  return spec;
}

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const ProblemSpec& spec) {
  std::ostringstream os;
  if (spec.dx) os << "dx = " << pretty_print(*spec.dx) << ";\n";
  if (spec.dy) os << "dy = " << pretty_print(*spec.dy) << ";\n";
  for (auto& [name, val] : spec.params) os << "param " << name << " = " << val.get_str() << ";\n";
  if (spec.weight_override)
    os << "weights = (" << spec.weight_override->p << "," << spec.weight_override->q << ");\n";
  if (spec.V) os << "V = " << pretty_print(*spec.V) << ";\n";
  if (spec.sweep)
    os << "sweep " << spec.sweep->name << " from " << spec.sweep->from.get_str() << " to "
       << spec.sweep->to.get_str() << " steps " << spec.sweep->steps << ";\n";
  return os.str();
}

namespace {

/// Multivariate monomial expansion over an arbitrary variable list.
struct MPoly {
  // exponent vector over the symbol table -> coefficient
  std::map<std::vector<int>, Rat> terms;
  static MPoly constant(const Rat& c, size_t nvars) {
    MPoly p;
    if (c != 0) p.terms[std::vector<int>(nvars, 0)] = c;
    return p;
  }
};

MPoly mp_add(const MPoly& a, const MPoly& b, int sign) {
  MPoly r = a;
  for (auto& [e, c] : b.terms) {
    auto it = r.terms.find(e);
    Rat v = sign > 0 ? c : Rat(-c);
    if (it == r.terms.end())
      r.terms[e] = v;
    else {
      it->second += v;
      if (it->second == 0) r.terms.erase(it);
    }
  }
  return r;
}

MPoly mp_mul(const MPoly& a, const MPoly& b) {
  MPoly r;
  for (auto& [ea, ca] : a.terms)
    for (auto& [eb, cb] : b.terms) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      auto it = r.terms.find(e);
      Rat v = ca * cb;
      if (it == r.terms.end())
        r.terms[e] = v;
      else {
        it->second += v;
        if (it->second == 0) r.terms.erase(it);
      }
    }
  return r;
}

MPoly expand(const Expr& e, const std::vector<std::string>& vars,
             const std::map<std::string, Rat>& params) {
  switch (e.kind) {
    case Expr::Kind::Num: return MPoly::constant(e.value, vars.size());
    case Expr::Kind::Var: {
      auto pv = params.find(e.name);
      if (pv != params.end()) return MPoly::constant(pv->second, vars.size());
      for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == e.name) {
          MPoly p;
          std::vector<int> exp(vars.size(), 0);
          exp[i] = 1;
          p.terms[exp] = Rat(1);
          return p;
        }
      throw std::domain_error("unbound parameter or unknown variable '" + e.name + "'");
    }
    case Expr::Kind::Add: return mp_add(expand(e.kids[0], vars, params), expand(e.kids[1], vars, params), +1);
    case Expr::Kind::Sub: return mp_add(expand(e.kids[0], vars, params), expand(e.kids[1], vars, params), -1);
    case Expr::Kind::Mul: return mp_mul(expand(e.kids[0], vars, params), expand(e.kids[1], vars, params));
    case Expr::Kind::Neg: {
      MPoly z = MPoly::constant(Rat(0), vars.size());
      return mp_add(z, expand(e.kids[0], vars, params), -1);
    }
    case Expr::Kind::Pow: {
      if (e.exponent < 0) throw std::domain_error("negative exponents are not polynomial");
      MPoly base = expand(e.kids[0], vars, params);
      MPoly acc = MPoly::constant(Rat(1), vars.size());
      for (int k = 0; k < e.exponent; ++k) acc = mp_mul(acc, base);
      return acc;
    }
  }
  throw std::logic_error("unreachable");
}

BivarPoly to_bivar(const MPoly& p) {
  BivarPoly out;
  for (auto& [e, c] : p.terms) out.add(e[0], e[1], c);
  return out;
}

}  // namespace

PolyVectorField build_field(const ProblemSpec& spec, const std::map<std::string, Rat>& overrides) {
  if (!spec.dx || !spec.dy) throw std::domain_error("input must define both dx and dy");
  std::map<std::string, Rat> params = spec.params;
  for (auto& [k, v] : overrides) params[k] = v;
  std::vector<std::string> vars = {"x", "y"};
  PolyVectorField X;
  X.P = to_bivar(expand(*spec.dx, vars, params));
  X.Q = to_bivar(expand(*spec.dy, vars, params));
  X.bindings = params;
  if (!X.singular_at_origin())
    throw std::domain_error("the origin is not a singular point (constant terms present)");
  return X;
}

UserV build_user_v(const Expr& e, const std::map<std::string, Rat>& params) {
  // try the cartesian reading first, then the polar one
  UserV out;
  try {
    std::vector<std::string> vars = {"x", "y"};
    out.xy = to_bivar(expand(e, vars, params));
    out.cartesian = true;
    return out;
  } catch (const std::domain_error&) {
  }
  std::vector<std::string> vars = {"rho", "cos", "sin"};
  MPoly p = expand(e, vars, params);
  for (auto& [exp, c] : p.terms) {
    int jrho = exp[0], ic = exp[1], is = exp[2];
    TrigPoly t = cos_sin_pow(ic, is).scaled(GaussRat(c));
    auto it = out.polar.find(jrho);
    if (it == out.polar.end())
      out.polar[jrho] = t;
    else {
      it->second += t;
      if (it->second.is_zero()) out.polar.erase(it);
    }
  }
  out.cartesian = false;
  if (out.polar.empty()) throw std::domain_error("V expression vanishes identically");
  return out;
}

}  // namespace monodromic
