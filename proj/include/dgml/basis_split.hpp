#pragma once

#include "dgml/assembly.hpp"
#include "dgml/coefficient.hpp"
#include "dgml/common.hpp"
#include "dgml/mesh.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace dgml {

/// Change of basis from split coefficients [z; v] to nodal DG coefficients.
///
/// Column e (0 <= e < #edges) is psi_e^z: beta phi_{e,T+} - (1 - beta) phi_{e,T-}
/// on interior edges and phi_{e,T} on boundary edges. Column #edges + c is
/// the Crouzeix-Raviart function phi_{e,T+} + phi_{e,T-} of the c-th
/// interior edge. phi_{e,T} is the local CR function 1 - 2 lambda_k of the
/// edge opposite vertex k: nodal values -1 at vertex k and +1 elsewhere.
struct SplitBasis {
  SparseMatrix transform;
  int num_z = 0;
  int num_v = 0;
  std::vector<int> v_edge;       // v column -> edge
  std::vector<int> v_of_edge;    // edge -> v column, -1 on boundary edges
  // Closed-form inverse data: nodal dofs of the edge endpoints on each side.
  std::vector<std::array<int, 2>> plus_dofs;
  std::vector<std::array<int, 2>> minus_dofs;
  std::vector<double> beta;

  int dimension() const { return num_z + num_v; }
};

struct SplitVector {
  Vector z;
  Vector v;
};

namespace detail {

inline std::array<int, 2> endpoint_dofs(const Mesh& mesh, int t, const Edge& edge) {
  std::array<int, 2> d{};
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < 3; ++k)
      if (mesh.triangles[t][k] == edge.vertices[s]) d[s] = DGSpaceIndex::dof(t, k);
  }
  return d;
}

// Nodal values of the local CR function of local edge k.
inline std::array<double, 3> cr_nodal(int k) {
  std::array<double, 3> v{1.0, 1.0, 1.0};
  v[k] = -1.0;
  return v;
}

}  // namespace detail

inline SplitBasis build_transform(const Mesh& mesh, const EdgeWeights& weights) {
  if (weights.beta.size() != mesh.edges.size())
    throw std::invalid_argument("build_transform: edge weights do not match mesh");
  SplitBasis basis;
  basis.num_z = mesh.num_edges();
  basis.v_of_edge.assign(mesh.edges.size(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edges[e].on_boundary()) continue;
    basis.v_of_edge[e] = static_cast<int>(basis.v_edge.size());
    basis.v_edge.push_back(e);
  }
  basis.num_v = static_cast<int>(basis.v_edge.size());
  basis.beta = weights.beta;
  basis.plus_dofs.resize(mesh.edges.size());
  basis.minus_dofs.resize(mesh.edges.size(), {-1, -1});

  std::vector<Triplet> trip;
  trip.reserve(12 * mesh.edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    basis.plus_dofs[e] = detail::endpoint_dofs(mesh, edge.plus, edge);
    const int kp = mesh.local_edge(edge.plus, e);
    const auto np = detail::cr_nodal(kp);
    if (edge.on_boundary()) {
      for (int i = 0; i < 3; ++i) trip.emplace_back(DGSpaceIndex::dof(edge.plus, i), e, np[i]);
      continue;
    }
    basis.minus_dofs[e] = detail::endpoint_dofs(mesh, edge.minus, edge);
    const int km = mesh.local_edge(edge.minus, e);
    const auto nm = detail::cr_nodal(km);
    const double bp = weights.beta[e];
    const double bm = 1.0 - weights.beta[e];
    const int vc = basis.num_z + basis.v_of_edge[e];
    for (int i = 0; i < 3; ++i) {
      trip.emplace_back(DGSpaceIndex::dof(edge.plus, i), e, bp * np[i]);
      trip.emplace_back(DGSpaceIndex::dof(edge.minus, i), e, -bm * nm[i]);
      trip.emplace_back(DGSpaceIndex::dof(edge.plus, i), vc, np[i]);
      trip.emplace_back(DGSpaceIndex::dof(edge.minus, i), vc, nm[i]);
    }
  }
  const Index n = mesh.num_dg_dofs();
  if (basis.dimension() != n)
    throw std::logic_error("build_transform: split dimension differs from the DG dimension");
  basis.transform.resize(n, n);
  basis.transform.setFromTriplets(trip.begin(), trip.end());
  return basis;
}

/// Closed-form split: v_e = (1 - beta) u+(m_e) + beta u-(m_e),
/// z_e = u+(m_e) - u-(m_e) on interior edges and z_e = u(m_e) on the boundary.
inline SplitVector to_split(const Vector& u, const SplitBasis& basis) {
  if (u.size() != basis.dimension()) throw std::invalid_argument("to_split: dimension mismatch");
  SplitVector out{Vector::Zero(basis.num_z), Vector::Zero(basis.num_v)};
  for (int e = 0; e < basis.num_z; ++e) {
    const auto& p = basis.plus_dofs[e];
    const double up = 0.5 * (u[p[0]] + u[p[1]]);
    if (basis.v_of_edge[e] < 0) {
      out.z[e] = up;
      continue;
    }
    const auto& m = basis.minus_dofs[e];
    const double um = 0.5 * (u[m[0]] + u[m[1]]);
    out.z[e] = up - um;
    out.v[basis.v_of_edge[e]] = (1.0 - basis.beta[e]) * up + basis.beta[e] * um;
  }
  return out;
}

inline Vector concat(const SplitVector& s) {
  Vector x(s.z.size() + s.v.size());
  x << s.z, s.v;
  return x;
}

inline SplitVector split_parts(const Vector& x, const SplitBasis& basis) {
  if (x.size() != basis.dimension()) throw std::invalid_argument("split_parts: dimension mismatch");
  return {x.head(basis.num_z), x.tail(basis.num_v)};
}

inline Vector from_split(const SplitVector& s, const SplitBasis& basis) {
  if (s.z.size() != basis.num_z || s.v.size() != basis.num_v)
    throw std::invalid_argument("from_split: dimension mismatch");
  return basis.transform * concat(s);
}

/// T^T A T, the operator in the split basis (z block first).
inline SparseOperator split_operator(const SparseOperator& a, const SplitBasis& basis) {
  if (a.rows() != basis.dimension() || a.cols() != basis.dimension())
    throw std::invalid_argument("split_operator: dimension mismatch");
  const SparseMatrix at = a.matrix * basis.transform;
  SparseMatrix tt = basis.transform.transpose();
  SparseOperator out{tt * at, a.symmetric};
  drop_small(out.matrix);
  return out;
}

/// Blocks of the split IP0 operator. The block coupling CR trial functions
/// to Z test functions vanishes; it is measured on extraction, not stored.
struct BlockOperator {
  SparseOperator zz;
  SparseOperator vz;  // rows: CR tests, columns: Z trials
  SparseOperator vv;
  int theta = -1;
  Variant variant = Variant::IP0;
  double zero_block_max = 0.0;  // max |entry| of the vanishing block / max |entry| of the split matrix
};

inline SparseMatrix sub_block(const SparseMatrix& a, Index r0, Index c0, Index nr, Index nc) {
  return SparseMatrix(a.block(r0, c0, nr, nc));
}

inline BlockOperator blocks_of(const SparseOperator& split, const SplitBasis& basis, int theta, Variant variant) {
  const int nz = basis.num_z, nv = basis.num_v;
  BlockOperator b;
  b.theta = theta;
  b.variant = variant;
  const bool sym_zz = split.symmetric || variant == Variant::IP0;
  b.zz = SparseOperator{sub_block(split.matrix, 0, 0, nz, nz), sym_zz};
  b.vz = SparseOperator{sub_block(split.matrix, nz, 0, nv, nz), false};
  b.vv = SparseOperator{sub_block(split.matrix, nz, nz, nv, nv), true};
  const double scale = max_abs(split.matrix);
  b.zero_block_max = scale > 0.0 ? max_abs(sub_block(split.matrix, 0, nz, nz, nv)) / scale : 0.0;
  return b;
}

/// Splits an IP0 operator and verifies its block lower-triangular structure.
inline BlockOperator extract_blocks(const SparseOperator& a_nodal, const SplitBasis& basis, int theta,
                                    double zero_tol = 1e-11) {
  const SparseOperator split = split_operator(a_nodal, basis);
  BlockOperator b = blocks_of(split, basis, theta, Variant::IP0);
  if (b.zero_block_max > zero_tol) {
    std::ostringstream msg;
    msg << "extract_blocks: CR-Z coupling block is not zero (relative max " << b.zero_block_max << ")";
    throw NumericalError(msg.str());
  }
  return b;
}

/// (z1, z2)_* = sum_e |e|/h_e kappa_e z1_e z2_e; h_e = |e| here.
inline double star_product(const Vector& z1, const Vector& z2, const Mesh& mesh, const EdgeWeights& weights) {
  if (z1.size() != mesh.num_edges() || z2.size() != mesh.num_edges())
    throw std::invalid_argument("star_product: dimension mismatch");
  double s = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e) s += weights.kappa_e[e] * z1[e] * z2[e];
  return s;
}

/// Diagonal of the star product in the psi^z basis.
inline Vector star_diagonal(const Mesh& mesh, const EdgeWeights& weights) {
  Vector d(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) d[e] = weights.kappa_e[e];
  return d;
}

}  // namespace dgml
