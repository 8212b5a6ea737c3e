#pragma once

#include "dgml/coefficient.hpp"
#include "dgml/common.hpp"
#include "dgml/mesh.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <vector>

namespace dgml {

enum class Variant {
  IP0,  // penalty on the edge mean of the jump only
  IP1,  // penalty on the full jump
};

/// theta = -1 (SIPG), 0 (IIPG), +1 (NIPG).
struct MethodParams {
  int theta = -1;
  double alpha = 8.0;
  Variant variant = Variant::IP0;
};

/// Two algebraically identical ways to evaluate the beta-weighted flux
/// average {kappa grad v}_beta on interior edges.
enum class FluxForm {
  BetaWeighted,  // beta k+ g+ + (1 - beta) k- g-
  HarmonicMean,  // kappa_e (g+ + g-) / 2
};

/// Nodal P1 DG space: global dof = 3 * triangle + local vertex.
struct DGSpaceIndex {
  static constexpr int dof(int triangle, int local) { return 3 * triangle + local; }
  static int dimension(const Mesh& mesh) { return mesh.num_dg_dofs(); }
};

namespace detail {

inline void check_inputs(const Mesh& mesh, const CoefficientField& coeff) {
  if (coeff.kappa.size() != mesh.triangles.size())
    throw std::invalid_argument("assembly: coefficient size does not match mesh");
}

inline void check_inputs(const Mesh& mesh, const CoefficientField& coeff, const EdgeWeights& w) {
  check_inputs(mesh, coeff);
  if (w.beta.size() != mesh.edges.size() || w.kappa_e.size() != mesh.edges.size())
    throw std::invalid_argument("assembly: edge weights do not match mesh");
}

// Values of the three local P1 basis functions of triangle t at x.
inline std::array<double, 3> p1_values(const Mesh& mesh, int t, const Point& x) {
  return mesh.barycentric(t, x);
}

// One side of an edge as seen by the face integrals.
struct FaceSide {
  int triangle = kBoundary;
  double jump_sign = 0.0;      // +1 on T+, -1 on T-
  double flux_weight = 0.0;    // weight of this side in {kappa grad v}_beta
  std::array<Point, 3> grad;   // basis gradients
};

inline SparseMatrix from_triplets(Index n, Index m, const std::vector<Triplet>& trip) {
  SparseMatrix a(n, m);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

}  // namespace detail

/// Matrix of the weighted interior penalty form
///   (k grad v, grad w) - <{k grad v}_beta, [w]> + theta <[v], {k grad w}_beta>
///   + alpha h_e^-1 kappa_e <P([v]), [w]>
/// with P the edge-mean projection (IP0) or the identity (IP1). Row = test,
/// column = trial. All integrals are exact for P1 data.
inline SparseOperator assemble_dg(const Mesh& mesh, const CoefficientField& coeff, const EdgeWeights& weights,
                                  const MethodParams& params, FluxForm form = FluxForm::BetaWeighted) {
  detail::check_inputs(mesh, coeff, weights);
  if (!(params.alpha > 0.0)) throw std::invalid_argument("assemble_dg: alpha must be positive");
  if (params.theta < -1 || params.theta > 1) throw std::invalid_argument("assemble_dg: theta must be -1, 0 or 1");

  const Index n = mesh.num_dg_dofs();
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.triangles.size() + 36 * mesh.edges.size());

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = mesh.barycentric_gradients(t);
    const double scale = coeff.kappa[t] * mesh.area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(DGSpaceIndex::dof(t, i), DGSpaceIndex::dof(t, j), scale * g[i].dot(g[j]));
  }

  const double gauss = 1.0 / std::sqrt(3.0);
  const double theta = params.theta;

  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const Point& n_plus = edge.normal;
    const double len = edge.length;
    const double kappa_e = weights.kappa_e[e];
    const double penalty = params.alpha * kappa_e / len;

    std::array<detail::FaceSide, 2> sides;
    int num_sides = 1;
    sides[0].triangle = edge.plus;
    sides[0].jump_sign = 1.0;
    sides[0].grad = mesh.barycentric_gradients(edge.plus);
    if (edge.on_boundary()) {
      sides[0].flux_weight = coeff.kappa[edge.plus];
    } else {
      num_sides = 2;
      sides[1].triangle = edge.minus;
      sides[1].jump_sign = -1.0;
      sides[1].grad = mesh.barycentric_gradients(edge.minus);
      if (form == FluxForm::BetaWeighted) {
        sides[0].flux_weight = weights.beta[e] * coeff.kappa[edge.plus];
        sides[1].flux_weight = (1.0 - weights.beta[e]) * coeff.kappa[edge.minus];
      } else {
        sides[0].flux_weight = sides[1].flux_weight = 0.5 * kappa_e;
      }
    }

    const Point a = mesh.vertices[edge.vertices[0]];
    const Point b = mesh.vertices[edge.vertices[1]];
    const std::array<Point, 2> qp = {edge.midpoint - 0.5 * gauss * (b - a), edge.midpoint + 0.5 * gauss * (b - a)};
    const double qw = 0.5 * len;

    // vals[s][q][k]: basis k of side s at quadrature point q; mid[s][k] at m_e.
    std::array<std::array<std::array<double, 3>, 2>, 2> vals{};
    std::array<std::array<double, 3>, 2> mid{};
    for (int s = 0; s < num_sides; ++s) {
      for (int q = 0; q < 2; ++q) vals[s][q] = detail::p1_values(mesh, sides[s].triangle, qp[q]);
      mid[s] = detail::p1_values(mesh, sides[s].triangle, edge.midpoint);
    }

    for (int si = 0; si < num_sides; ++si) {
      const auto& test = sides[si];
      for (int sj = 0; sj < num_sides; ++sj) {
        const auto& trial = sides[sj];
        for (int i = 0; i < 3; ++i) {
          const double test_flux = test.flux_weight * test.grad[i].dot(n_plus);
          for (int j = 0; j < 3; ++j) {
            const double trial_flux = trial.flux_weight * trial.grad[j].dot(n_plus);
            double v = 0.0;
            for (int q = 0; q < 2; ++q) {
              const double test_jump = test.jump_sign * vals[si][q][i];
              const double trial_jump = trial.jump_sign * vals[sj][q][j];
              v += qw * (-trial_flux * test_jump + theta * trial_jump * test_flux);
              if (params.variant == Variant::IP1) v += qw * penalty * trial_jump * test_jump;
            }
            if (params.variant == Variant::IP0)
              v += penalty * len * (trial.jump_sign * mid[sj][j]) * (test.jump_sign * mid[si][i]);
            trip.emplace_back(DGSpaceIndex::dof(test.triangle, i), DGSpaceIndex::dof(trial.triangle, j), v);
          }
        }
      }
    }
  }

  SparseOperator out{detail::from_triplets(n, n, trip), params.theta == -1};
  drop_small(out.matrix);
  return out;
}

inline SparseOperator assemble_ip0(const Mesh& mesh, const CoefficientField& coeff, const EdgeWeights& weights,
                                   MethodParams params) {
  if (params.variant != Variant::IP0) throw std::invalid_argument("assemble_ip0: variant must be IP0");
  return assemble_dg(mesh, coeff, weights, params);
}

inline SparseOperator assemble_ip1(const Mesh& mesh, const CoefficientField& coeff, const EdgeWeights& weights,
                                   MethodParams params) {
  if (params.variant != Variant::IP1) throw std::invalid_argument("assemble_ip1: variant must be IP1");
  return assemble_dg(mesh, coeff, weights, params);
}

/// Numbering of the interior vertices of a mesh: the unknowns of the
/// conforming P1 space with homogeneous Dirichlet conditions.
struct ConformingSpace {
  std::vector<int> dof_of_vertex;  // -1 on boundary vertices
  std::vector<int> vertex_of_dof;

  int dimension() const { return static_cast<int>(vertex_of_dof.size()); }
};

inline ConformingSpace conforming_space(const Mesh& mesh) {
  ConformingSpace s;
  s.dof_of_vertex.assign(mesh.vertices.size(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex[v]) continue;
    s.dof_of_vertex[v] = s.dimension();
    s.vertex_of_dof.push_back(v);
  }
  return s;
}

/// P1 conforming stiffness (kappa grad u, grad w) on interior vertices.
inline SparseOperator assemble_conforming(const Mesh& mesh, const CoefficientField& coeff) {
  detail::check_inputs(mesh, coeff);
  const ConformingSpace space = conforming_space(mesh);
  std::vector<Triplet> trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = mesh.barycentric_gradients(t);
    const double scale = coeff.kappa[t] * mesh.area(t);
    for (int i = 0; i < 3; ++i) {
      const int di = space.dof_of_vertex[mesh.triangles[t][i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = space.dof_of_vertex[mesh.triangles[t][j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, scale * g[i].dot(g[j]));
      }
    }
  }
  SparseOperator out{detail::from_triplets(space.dimension(), space.dimension(), trip), true};
  drop_small(out.matrix);
  return out;
}

/// Load vector (f, phi_i) by the edge-midpoint rule (exact for quadratics).
inline Vector assemble_rhs(const Mesh& mesh, const std::function<double(const Point&)>& f) {
  Vector rhs = Vector::Zero(mesh.num_dg_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    std::array<double, 3> fm;
    for (int k = 0; k < 3; ++k)
      fm[k] = f(0.5 * (mesh.vertex(t, (k + 1) % 3) + mesh.vertex(t, (k + 2) % 3)));
    // Basis i is 1/2 at the two midpoints adjacent to vertex i, 0 at the third.
    const double w = mesh.area(t) / 3.0;
    for (int i = 0; i < 3; ++i)
      rhs[DGSpaceIndex::dof(t, i)] = w * 0.5 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]);
  }
  return rhs;
}

enum class EnergyNorm {
  DG0,  // jumps through their edge means
  DG1,  // full jumps
};

/// Gram matrix G of the energy norm, |||u|||^2 = u^T G u.
inline SparseOperator energy_gram(const Mesh& mesh, const CoefficientField& coeff, const EdgeWeights& weights,
                                  EnergyNorm which) {
  detail::check_inputs(mesh, coeff, weights);
  std::vector<Triplet> trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = mesh.barycentric_gradients(t);
    const double scale = coeff.kappa[t] * mesh.area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(DGSpaceIndex::dof(t, i), DGSpaceIndex::dof(t, j), scale * g[i].dot(g[j]));
  }
  const double gauss = 1.0 / std::sqrt(3.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    const double w = weights.kappa_e[e] / edge.length;
    const Point a = mesh.vertices[edge.vertices[0]];
    const Point b = mesh.vertices[edge.vertices[1]];
    std::vector<Point> pts;
    std::vector<double> qw;
    if (which == EnergyNorm::DG0) {
      pts = {edge.midpoint};
      qw = {edge.length};
    } else {
      pts = {edge.midpoint - 0.5 * gauss * (b - a), edge.midpoint + 0.5 * gauss * (b - a)};
      qw = {0.5 * edge.length, 0.5 * edge.length};
    }
    std::vector<std::pair<int, double>> sides = {{edge.plus, 1.0}};
    if (!edge.on_boundary()) sides.emplace_back(edge.minus, -1.0);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      for (const auto& [ti, si] : sides) {
        const auto vi = detail::p1_values(mesh, ti, pts[q]);
        for (const auto& [tj, sj] : sides) {
          const auto vj = detail::p1_values(mesh, tj, pts[q]);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              trip.emplace_back(DGSpaceIndex::dof(ti, i), DGSpaceIndex::dof(tj, j), w * qw[q] * si * vi[i] * sj * vj[j]);
        }
      }
    }
  }
  const Index n = mesh.num_dg_dofs();
  return SparseOperator{detail::from_triplets(n, n, trip), true};
}

inline double energy_norm(const Vector& u, const Mesh& mesh, const CoefficientField& coeff,
                          const EdgeWeights& weights, EnergyNorm which) {
  if (u.size() != mesh.num_dg_dofs()) throw std::invalid_argument("energy_norm: dimension mismatch");
  const SparseOperator g = energy_gram(mesh, coeff, weights, which);
  return std::sqrt(std::max(0.0, u.dot(g.matrix * u)));
}

/// Coordinate text export: "row col value" per stored entry, 0-based.
inline void write_coo(std::ostream& os, const SparseMatrix& a) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace dgml
