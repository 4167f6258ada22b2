#include "monodromic/newton.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace monodromic {

Rat BivarPoly::eval(const Rat& x, const Rat& y) const {
  Rat acc(0);
  for (auto& [ij, c] : terms) {
    Rat t = c;
    for (int k = 0; k < ij.first; ++k) t *= x;
    for (int k = 0; k < ij.second; ++k) t *= y;
    acc += t;
  }
  return acc;
}

double BivarPoly::eval(double x, double y) const {
  double acc = 0;
  for (auto& [ij, c] : terms)
    acc += to_double(c) * std::pow(x, ij.first) * std::pow(y, ij.second);
  return acc;
}

BivarPoly operator+(const BivarPoly& a, const BivarPoly& b) {
  BivarPoly r = a;
  for (auto& [ij, c] : b.terms) r.add(ij.first, ij.second, c);
  return r;
}
BivarPoly operator-(const BivarPoly& a, const BivarPoly& b) {
  BivarPoly r = a;
  for (auto& [ij, c] : b.terms) r.add(ij.first, ij.second, -c);
  return r;
}
BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
  BivarPoly r;
  for (auto& [ij, c] : a.terms)
    for (auto& [kl, d] : b.terms) r.add(ij.first + kl.first, ij.second + kl.second, c * d);
  return r;
}
BivarPoly BivarPoly::scaled(const Rat& s) const {
  BivarPoly r;
  for (auto& [ij, c] : terms) r.add(ij.first, ij.second, c * s);
  return r;
}

NewtonDiagram compute_diagram(const PolyVectorField& X) {
  if (X.is_zero()) throw std::domain_error("compute_diagram: zero vector field");
  NewtonDiagram d;
  for (auto& [ij, c] : X.P.terms) d.support.insert({ij.first - 1, ij.second});
  for (auto& [ij, c] : X.Q.terms) d.support.insert({ij.first, ij.second - 1});

  // Pareto-minimal staircase: keep points not dominated by another point
  std::vector<std::pair<int, int>> pts(d.support.begin(), d.support.end());
  std::vector<std::pair<int, int>> minimal;
  for (auto& p : pts) {
    bool dominated = false;
    for (auto& q : pts)
      if (q != p && q.first <= p.first && q.second <= p.second) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(p);
  }
  std::sort(minimal.begin(), minimal.end());

  // lower-left convex hull of the minimal staircase (slopes increase)
  std::vector<std::pair<int, int>> hull;
  for (auto& p : minimal) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      // keep b only if it is strictly below segment a-p (cross product test)
      long cross = static_cast<long>(b.first - a.first) * (p.second - a.second) -
                   static_cast<long>(b.second - a.second) * (p.first - a.first);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    int du = hull[k + 1].first - hull[k].first;
    int dv = hull[k].second - hull[k + 1].second;  // positive drop
    if (dv <= 0 || du <= 0) continue;              // only strictly negative slopes
    int g = std::gcd(du, dv);
    NewtonDiagram::Edge e;
    e.from = hull[k];
    e.to = hull[k + 1];
    e.weight = {dv / g, du / g};  // slope -p/q with p = drop, q = run
    d.edges.push_back(e);
    d.weights.push_back(e.weight);
  }
  std::sort(d.weights.begin(), d.weights.end());
  d.weights.erase(std::unique(d.weights.begin(), d.weights.end()), d.weights.end());
  return d;
}

int quasi_degree(const PolyVectorField& X, Weight w) {
  bool any = false;
  long r = 0;
  for (auto& [ij, c] : X.P.terms) {
    long v = static_cast<long>(w.p) * ij.first + static_cast<long>(w.q) * ij.second - w.p;
    if (!any || v < r) r = v;
    any = true;
  }
  for (auto& [ij, c] : X.Q.terms) {
    long v = static_cast<long>(w.p) * ij.first + static_cast<long>(w.q) * ij.second - w.q;
    if (!any || v < r) r = v;
    any = true;
  }
  if (!any) throw std::domain_error("quasi_degree: zero vector field");
  return static_cast<int>(r);
}

}  // namespace monodromic
