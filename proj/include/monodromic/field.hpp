#ifndef MONODROMIC_FIELD_HPP
#define MONODROMIC_FIELD_HPP

#include <map>
#include <string>
#include <utility>

#include "monodromic/rational.hpp"

namespace monodromic {

/// Bivariate polynomial over exact rationals, sparse in (i,j) = x^i y^j.
struct BivarPoly {
  std::map<std::pair<int, int>, Rat> terms;

  void add(int i, int j, const Rat& c) {
    if (c == 0) return;
    auto key = std::make_pair(i, j);
    auto it = terms.find(key);
    if (it == terms.end())
      terms[key] = c;
    else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
  bool is_zero() const { return terms.empty(); }
  int degree() const {
    int d = 0;
    for (auto& [ij, c] : terms) d = std::max(d, ij.first + ij.second);
    return d;
  }
  Rat eval(const Rat& x, const Rat& y) const;
  double eval(double x, double y) const;

  friend BivarPoly operator+(const BivarPoly& a, const BivarPoly& b);
  friend BivarPoly operator-(const BivarPoly& a, const BivarPoly& b);
  friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b);
  BivarPoly scaled(const Rat& s) const;
};

/// The planar polynomial vector field X = P dx + Q dy with all parameters
/// already bound to rationals.
struct PolyVectorField {
  BivarPoly P, Q;
  std::map<std::string, Rat> bindings;  // parameter values used

  bool is_zero() const { return P.is_zero() && Q.is_zero(); }
  bool singular_at_origin() const {
    return !P.terms.count({0, 0}) && !Q.terms.count({0, 0});
  }
};

}  // namespace monodromic

#endif
