// Solves an SIPG-0 problem with a coefficient jump by block forward
// substitution: diagonal PCG on the Z block, two-level PCG on the CR block.

#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/coefficient.hpp"
#include "dgml/krylov.hpp"
#include "dgml/mesh.hpp"
#include "dgml/precond.hpp"

#include <cstdio>

int main() {
  using namespace dgml;
  const int level = 2;
  const double eps = 1e-3;

  const MeshHierarchy h = build_hierarchy(level);
  const Mesh& mesh = h.finest();
  const CoefficientField coeff = assign_coefficient(mesh, eps);
  const EdgeWeights w = edge_weights(mesh, coeff);
  const SplitBasis basis = build_transform(mesh, w);

  const SparseOperator a = assemble_ip0(mesh, coeff, w, {-1, 8.0, Variant::IP0});
  const BlockOperator blocks = extract_blocks(a, basis, -1);
  const Vector f = assemble_rhs(mesh, [](const Point& x) { return 1.0 + x.x() * x.y(); });

  auto zz = [](const SparseOperator& op, const Vector& b) {
    const SolveResult r = pcg(op.matrix, b, diag_precond(op), 1e-10, 1000);
    std::printf("zz block: %d iterations\n", r.report.iterations);
    return r.x;
  };
  auto vv = [&](const SparseOperator& op, const Vector& b) {
    const Preconditioner prec = two_level(op, cr_prolongation(h, level, level), SmootherSpec{});
    const SolveResult r = pcg(op.matrix, b, prec, 1e-10, 1000);
    std::printf("CR block: %d iterations, Ritz K = %.3g\n", r.report.iterations, r.report.K);
    return r.x;
  };
  const Vector fs = basis.transform.transpose() * f;
  const SplitVector u = forward_substitution_solve(blocks, split_parts(fs, basis), zz, vv);
  const Vector x = from_split(u, basis);

  std::printf("dofs %d, relative residual %.2e, energy norm %.6f\n", mesh.num_dg_dofs(),
              (a.matrix * x - f).norm() / f.norm(), energy_norm(x, mesh, coeff, w, EnergyNorm::DG0));
  return 0;
}
