#pragma once

#include "dgml/mesh.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace dgml {

/// Piecewise-constant diffusion coefficient: 1 on the two inclusion squares
/// [-0.5,0]^2 and [0,0.5]^2, epsilon elsewhere.
struct CoefficientField {
  std::vector<double> kappa;
  double epsilon = 1.0;

  /// max kappa_T / min kappa_T
  double jump_ratio() const {
    const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
    return *hi / *lo;
  }
};

namespace detail {

inline bool in_closed_square(const Point& p, double lo, double hi) {
  return p.x() >= lo && p.x() <= hi && p.y() >= lo && p.y() <= hi;
}
inline bool in_open_square(const Point& p, double lo, double hi) {
  return p.x() > lo && p.x() < hi && p.y() > lo && p.y() < hi;
}
inline bool in_inclusion_closed(const Point& p) {
  return in_closed_square(p, -0.5, 0.0) || in_closed_square(p, 0.0, 0.5);
}
inline bool in_inclusion_open(const Point& p) {
  return in_open_square(p, -0.5, 0.0) || in_open_square(p, 0.0, 0.5);
}

}  // namespace detail

/// Membership is decided by the barycenter. Throws if a triangle straddles an
/// inclusion boundary.
inline CoefficientField assign_coefficient(const Mesh& mesh, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("assign_coefficient: eps must be positive");
  CoefficientField field;
  field.epsilon = eps;
  field.kappa.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool inside = detail::in_inclusion_open(mesh.barycenter(t));
    for (int k = 0; k < 3; ++k) {
      const Point& p = mesh.vertex(t, k);
      const bool ok = inside ? detail::in_inclusion_closed(p) : !detail::in_inclusion_open(p);
      if (!ok) throw std::invalid_argument("assign_coefficient: triangle straddles the coefficient jump");
    }
    field.kappa[t] = inside ? 1.0 : eps;
  }
  return field;
}

/// beta_e = k-/(k+ + k-) and the harmonic mean kappa_e = 2 k+ k-/(k+ + k-).
/// Boundary edges carry beta = NaN and kappa_e = kappa of their only element.
struct EdgeWeights {
  std::vector<double> beta;
  std::vector<double> kappa_e;
};

inline EdgeWeights edge_weights(const Mesh& mesh, const CoefficientField& coeff) {
  if (coeff.kappa.size() != mesh.triangles.size())
    throw std::invalid_argument("edge_weights: coefficient size does not match mesh");
  for (double k : coeff.kappa)
    if (!(k > 0.0)) throw std::invalid_argument("edge_weights: non-positive coefficient");
  EdgeWeights w;
  w.beta.resize(mesh.edges.size());
  w.kappa_e.resize(mesh.edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const double kp = coeff.kappa[edge.plus];
    if (edge.on_boundary()) {
      w.beta[e] = std::numeric_limits<double>::quiet_NaN();
      w.kappa_e[e] = kp;
      continue;
    }
    const double km = coeff.kappa[edge.minus];
    w.beta[e] = km / (kp + km);
    w.kappa_e[e] = 2.0 * kp * km / (kp + km);
  }
  return w;
}

}  // namespace dgml
