#pragma once

#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/coefficient.hpp"
#include "dgml/krylov.hpp"
#include "dgml/mesh.hpp"
#include "dgml/precond.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace dgml {

struct PropertyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;  // pass when value <= threshold
  bool pass = false;
};

namespace detail {

inline double relative_difference(const SparseMatrix& a, const SparseMatrix& b) {
  const double scale = std::max(max_abs(a), max_abs(b));
  const SparseMatrix d = a - b;
  return scale > 0.0 ? max_abs(d) / scale : 0.0;
}

inline PropertyCheck at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

inline double off_diagonal_ratio(const SparseMatrix& a) {
  double off = 0.0, diag = 0.0;
  for (Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      if (it.row() == it.col())
        diag = std::max(diag, std::abs(it.value()));
      else
        off = std::max(off, std::abs(it.value()));
    }
  return diag > 0.0 ? off / diag : 0.0;
}

}  // namespace detail

/// Structural properties of the IP(beta)-0 discretization on one mesh level:
/// vanishing CR-Z coupling for every theta, block-diagonal SIPG-0 matrix,
/// diagonal IIPG-0 zz block, symmetric zz blocks, theta-independent CR block,
/// the Galerkin identity with the conforming stiffness matrix, the split
/// round trip and, when the dimension allows a dense solve, the spectral
/// bounds of (A, A0) for SIPG.
inline std::vector<PropertyCheck> verify_properties(const Mesh& mesh, double eps, double alpha = 8.0,
                                                    std::uint64_t seed = 7) {
  std::vector<PropertyCheck> out;
  const CoefficientField coeff = assign_coefficient(mesh, eps);
  const EdgeWeights w = edge_weights(mesh, coeff);
  const SplitBasis basis = build_transform(mesh, w);

  out.push_back(detail::at_most("dimension identity |2 nE - nBE - 3 nT|",
                                std::abs(2.0 * mesh.num_edges() - mesh.num_boundary_edges() - 3.0 * mesh.num_triangles()),
                                0.0));

  std::vector<BlockOperator> blocks;
  for (int theta : {-1, 0, 1}) {
    const SparseOperator a = assemble_ip0(mesh, coeff, w, {theta, alpha, Variant::IP0});
    const BlockOperator b = blocks_of(split_operator(a, basis), basis, theta, Variant::IP0);
    out.push_back(detail::at_most("theta=" + std::to_string(theta) + " CR-trial/Z-test block max / max|A|",
                                  b.zero_block_max, 1e-12));
    out.push_back(detail::at_most("theta=" + std::to_string(theta) + " A_zz asymmetry",
                                  detail::relative_difference(b.zz.matrix, SparseMatrix(b.zz.matrix.transpose())),
                                  1e-12));
    blocks.push_back(b);
  }
  {
    const SparseOperator a = assemble_ip0(mesh, coeff, w, {-1, alpha, Variant::IP0});
    const SparseOperator s = split_operator(a, basis);
    const double scale = max_abs(s.matrix);
    out.push_back(detail::at_most("theta=-1 A_vz max / max|A|", max_abs(blocks[0].vz.matrix) / scale, 1e-12));
  }
  out.push_back(detail::at_most("theta=0 A_zz off-diagonal / max diagonal", detail::off_diagonal_ratio(blocks[1].zz.matrix),
                                1e-12));
  out.push_back(detail::at_most("A_vv independent of theta",
                                std::max(detail::relative_difference(blocks[0].vv.matrix, blocks[1].vv.matrix),
                                         detail::relative_difference(blocks[0].vv.matrix, blocks[2].vv.matrix)),
                                1e-12));

  const Prolongation pi = cr_inclusion(mesh);
  const SparseMatrix pt = pi.matrix.transpose();
  const SparseMatrix galerkin = pt * (blocks[0].vv.matrix * pi.matrix);
  out.push_back(detail::at_most("Galerkin identity P^T A_vv P vs conforming stiffness",
                                detail::relative_difference(galerkin, assemble_conforming(mesh, coeff).matrix), 1e-12));

  const Vector u = random_vector(mesh.num_dg_dofs(), seed);
  const Vector back = from_split(to_split(u, basis), basis);
  out.push_back(detail::at_most("split round trip error", (back - u).norm() / u.norm(), 1e-13));

  if (mesh.num_dg_dofs() <= kDenseSpectrumLimit) {
    const DenseMatrix a1 = DenseMatrix(assemble_ip1(mesh, coeff, w, {-1, alpha, Variant::IP1}).matrix);
    const DenseMatrix a0 = DenseMatrix(assemble_ip0(mesh, coeff, w, {-1, alpha, Variant::IP0}).matrix);
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(a1, a0, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    out.push_back(detail::at_most("SIPG 1 - lambda_min(A, A0)", 1.0 - lo, 1e-10));
    const double hi = es.eigenvalues().maxCoeff();
    out.push_back({"SIPG lambda_max(A, A0) finite", hi, std::numeric_limits<double>::infinity(), std::isfinite(hi)});
  }
  return out;
}

}  // namespace dgml
