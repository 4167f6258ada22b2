#ifndef MONODROMIC_NEWTON_HPP
#define MONODROMIC_NEWTON_HPP

#include <set>
#include <vector>

#include "monodromic/field.hpp"

namespace monodromic {

struct Weight {
  int p = 1, q = 1;
  friend bool operator==(const Weight&, const Weight&) = default;
  friend bool operator<(const Weight& a, const Weight& b) {
    return std::pair(a.p, a.q) < std::pair(b.p, b.q);
  }
};

/// Newton diagram of a vector field: support points (i-1, j) from x^i y^j in
/// P and (i, j-1) from Q; edges are the lower-left convex boundary, each with
/// slope -p/q for coprime (p,q).
struct NewtonDiagram {
  std::set<std::pair<int, int>> support;
  struct Edge {
    std::pair<int, int> from, to;
    Weight weight;
  };
  std::vector<Edge> edges;
  std::vector<Weight> weights;  // W(N(X)), sorted
};

NewtonDiagram compute_diagram(const PolyVectorField& X);

/// The (p,q)-quasihomogeneous degree r of the leading part: the minimum over
/// P of (p i + q j - p) and over Q of (p i + q j - q).
int quasi_degree(const PolyVectorField& X, Weight w);

}  // namespace monodromic

#endif
