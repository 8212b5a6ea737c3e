#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/coefficient.hpp"
#include "dgml/krylov.hpp"
#include "dgml/mesh.hpp"
#include "dgml/precond.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dgml;

namespace {

struct Problem {
  const Mesh* mesh;
  CoefficientField coeff;
  EdgeWeights w;
  SplitBasis basis;
  Problem(const Mesh& m, double eps)
      : mesh(&m), coeff(assign_coefficient(m, eps)), w(edge_weights(m, coeff)), basis(build_transform(m, w)) {}
  SparseOperator ip0(int theta = -1) const { return assemble_ip0(*mesh, coeff, w, {theta, 8.0, Variant::IP0}); }
  BlockOperator blocks(int theta = -1) const { return extract_blocks(ip0(theta), basis, theta); }
};

DenseMatrix matrix_of(const Preconditioner& p) {
  return oracle::matrix_of([&](const Vector& x) { return p.apply(x); }, p.size());
}

void expect_spd(const Preconditioner& p, double sym_tol = 1e-10) {
  const DenseMatrix b = matrix_of(p);
  EXPECT_LE(oracle::rel_diff(b, b.transpose()), sym_tol) << p.name();
  EXPECT_GT(oracle::eigenvalues(0.5 * (b + b.transpose())).front(), 0.0) << p.name();
}

void expect_linear(const Preconditioner& p) {
  const Vector r = random_vector(p.size(), 1), s = random_vector(p.size(), 2);
  const Vector lhs = p.apply(Vector(2.5 * r - s));
  const Vector rhs = 2.5 * p.apply(r) - p.apply(s);
  EXPECT_LE((lhs - rhs).norm(), 1e-12 * rhs.norm()) << p.name();
  EXPECT_EQ(p.apply(Vector::Zero(p.size())).norm(), 0.0) << p.name();
}

// Coarse P1 hat of vertex v at x, by locating x in the coarse mesh.
double hat(const Mesh& m, int v, const Point& x) {
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto lam = m.barycentric(t, x);
    if (lam[0] < -1e-12 || lam[1] < -1e-12 || lam[2] < -1e-12) continue;
    for (int k = 0; k < 3; ++k)
      if (m.triangles[t][k] == v) return lam[k];
    return 0.0;
  }
  return 0.0;
}

}  // namespace

TEST(Diagonal, IipgZBlockSolvedInOneStep) {
  const Mesh m = refine(build_initial_mesh());
  const Problem p(m, 1e-3);
  const BlockOperator b = p.blocks(0);
  const SolveResult r = pcg(b.zz.matrix, random_vector(b.zz.rows(), 1), diag_precond(b.zz), 1e-10, 10);
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(Diagonal, SipgZBlockConditionAtLevelZero) {
  const Mesh m = build_initial_mesh();
  const Problem p(m, 1.0);
  const BlockOperator b = p.blocks();
  const DenseMatrix zz(b.zz.matrix);
  const DenseMatrix d = zz.diagonal().asDiagonal();
  const auto ev = oracle::generalized_eigenvalues(zz, d);
  EXPECT_NEAR(ev.back() / ev.front(), 1.73, 0.2);
}

TEST(Diagonal, ScalingInvariantAndChecksDiagonal) {
  const Mesh m = build_initial_mesh();
  const Problem p(m, 1e-3);
  const BlockOperator b = p.blocks();
  SparseOperator s = b.zz;
  s.matrix *= 5.0;
  const Vector r = random_vector(b.zz.rows(), 3);
  EXPECT_LE((diag_precond(s).apply(r) * 5.0 - diag_precond(b.zz).apply(r)).norm(), 1e-13 * r.norm());
  SparseOperator bad = b.zz;
  bad.matrix.coeffRef(0, 0) = -1.0;
  EXPECT_THROW(diag_precond(bad), std::invalid_argument);
  expect_linear(diag_precond(b.zz));
}

TEST(Smoother, ManySweepsApproachTheInverse) {
  const Mesh m = build_initial_mesh();
  const Problem p(m, 1.0);
  const BlockOperator b = p.blocks();
  const Preconditioner s = smoother(b.vv, {SmootherKind::SymGS, 200});
  const Vector r = random_vector(b.vv.rows(), 4);
  const Vector exact = DenseMatrix(b.vv.matrix).llt().solve(r);
  EXPECT_LE((s.apply(r) - exact).norm() / exact.norm(), 1e-6);
}

TEST(Smoother, OneJacobiSweepIsDiagonalScaling) {
  const Mesh m = build_initial_mesh();
  const Problem p(m, 1e-3);
  const BlockOperator b = p.blocks();
  const Vector r = random_vector(b.vv.rows(), 5);
  const Vector x = smoother(b.vv, {SmootherKind::Jacobi, 1}).apply(r);
  EXPECT_LE((x - r.cwiseQuotient(Vector(b.vv.matrix.diagonal()))).norm(), 1e-15 * x.norm());
}

TEST(Smoother, SymmetricPositiveDefinite) {
  const Mesh m = refine(build_initial_mesh());
  const Problem p(m, 1e-3);
  const BlockOperator b = p.blocks();
  for (SmootherSpec spec : {SmootherSpec{SmootherKind::SymGS, 1}, SmootherSpec{SmootherKind::SymGS, 5},
                            SmootherSpec{SmootherKind::Jacobi, 3}}) {
    const Preconditioner s = smoother(b.vv, spec);
    expect_spd(s);
    expect_linear(s);
  }
}

TEST(Smoother, RejectsBadInput) {
  SparseMatrix a(2, 2);
  a.insert(0, 1) = 1.0;
  a.insert(1, 0) = 1.0;
  EXPECT_THROW(Smoother(a, SmootherSpec{}), std::invalid_argument);
  EXPECT_THROW(Smoother(a, SmootherSpec{SmootherKind::SymGS, 0}), std::invalid_argument);
}

TEST(Smoother, SmoothingBoundStableInEps) {
  const Mesh m = refine(build_initial_mesh());
  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-5, 1e-3, 1.0, 1e3, 1e5}) {
    const Problem p(m, eps);
    const BlockOperator b = p.blocks();
    const DenseMatrix s = matrix_of(smoother(b.vv, {SmootherKind::SymGS, 1}));
    const DenseMatrix a(b.vv.matrix);
    // lambda_max(S A) from the generalized problem (A, S^{-1}).
    const DenseMatrix sinv = s.inverse();
    const double top = oracle::generalized_eigenvalues(a, 0.5 * (sinv + sinv.transpose())).back();
    lo = std::min(lo, top);
    hi = std::max(hi, top);
  }
  EXPECT_LE(hi / lo, 1.1);
}

TEST(Prolongation, CrInclusionIsHatAtMidpoints) {
  const Mesh m = refine(build_initial_mesh());
  const Prolongation pi = cr_inclusion(m);
  const ConformingSpace cs = conforming_space(m);
  const DenseMatrix p(pi.matrix);
  int row = 0;
  for (const Edge& e : m.edges) {
    if (e.on_boundary()) continue;
    for (int d = 0; d < cs.dimension(); ++d) EXPECT_NEAR(p(row, d), hat(m, cs.vertex_of_dof[d], e.midpoint), 1e-14);
    ++row;
  }
}

TEST(Prolongation, CoarseHatsAtFineMidpoints) {
  const MeshHierarchy h = build_hierarchy(2);
  const Mesh& fine = h[2];
  for (int coarse_level : {1, 0}) {
    const Mesh& coarse = h[coarse_level];
    const Prolongation pi = cr_prolongation(h, 2, coarse_level);
    const ConformingSpace cs = conforming_space(coarse);
    ASSERT_EQ(pi.matrix.cols(), cs.dimension());
    const DenseMatrix p(pi.matrix);
    int row = 0;
    for (const Edge& e : fine.edges) {
      if (e.on_boundary()) continue;
      for (int d = 0; d < cs.dimension(); ++d)
        EXPECT_NEAR(p(row, d), hat(coarse, cs.vertex_of_dof[d], e.midpoint), 1e-14);
      ++row;
    }
    Eigen::FullPivLU<DenseMatrix> lu(p);
    EXPECT_EQ(lu.rank(), cs.dimension());
  }
}

TEST(Prolongation, GalerkinCoarseOperatorIsConformingStiffness) {
  const MeshHierarchy h = build_hierarchy(2);
  const Problem p(h[2], 1e-3);
  const BlockOperator b = p.blocks();
  for (int coarse_level : {2, 1, 0}) {
    const SparseMatrix pi = cr_prolongation(h, 2, coarse_level).matrix;
    const DenseMatrix g = DenseMatrix(pi).transpose() * DenseMatrix(b.vv.matrix) * DenseMatrix(pi);
    const DenseMatrix c(assemble_conforming(h[coarse_level], assign_coefficient(h[coarse_level], 1e-3)).matrix);
    EXPECT_LE(oracle::rel_diff(g, c), 1e-12) << coarse_level;
  }
}

TEST(Prolongation, RejectsNonNestedMeshes) {
  const MeshHierarchy h = build_hierarchy(2);
  EXPECT_THROW(conforming_prolongation(h[0], h[2]), std::invalid_argument);
}

TEST(TwoLevel, SymmetricPositiveDefiniteAndLinear) {
  const MeshHierarchy h = build_hierarchy(1);
  const Problem p(h[1], 1e-5);
  const BlockOperator b = p.blocks();
  for (int coarse : {1, 0}) {
    const Preconditioner t = two_level(b.vv, cr_prolongation(h, 1, coarse), SmootherSpec{});
    expect_spd(t);
    expect_linear(t);
  }
  EXPECT_THROW(two_level(b.vv, cr_inclusion(h[0]), SmootherSpec{}), std::invalid_argument);
}

TEST(TwoLevel, RobustAfterRemovingOneEigenvalue) {
  const MeshHierarchy h = build_hierarchy(2);
  for (double eps : {1e-5, 1.0}) {
    const Problem p(h[2], eps);
    const BlockOperator b = p.blocks();
    const Preconditioner t = two_level(b.vv, cr_prolongation(h, 2, 2), SmootherSpec{});
    const DenseMatrix bi = matrix_of(t).inverse();
    const auto ev = oracle::generalized_eigenvalues(DenseMatrix(b.vv.matrix), 0.5 * (bi + bi.transpose()));
    EXPECT_LT(ev.back() / ev[1], 4.0) << eps;
    if (eps == 1.0) {
      EXPECT_LT(ev[1] / ev[0], 10.0);
    }
  }
}

TEST(Bpx, SingleLevelEqualsTwoLevel) {
  const MeshHierarchy h = build_hierarchy(1);
  const Problem p(h[0], 1e-3);
  const BlockOperator b = p.blocks();
  const Preconditioner x = bpx(b.vv, h, SmootherSpec{}, 0);
  const Preconditioner t = two_level(b.vv, cr_prolongation(h, 0, 0), SmootherSpec{});
  const Vector r = random_vector(b.vv.rows(), 6);
  EXPECT_LE((x.apply(r) - t.apply(r)).norm(), 1e-12 * t.apply(r).norm());
}

TEST(Bpx, SymmetricPositiveDefiniteAndLinear) {
  const MeshHierarchy h = build_hierarchy(2);
  const Problem p(h[2], 1e-3);
  const BlockOperator b = p.blocks();
  const Preconditioner x = bpx(b.vv, h, SmootherSpec{});
  expect_spd(x);
  expect_linear(x);
  EXPECT_THROW(bpx(b.vv, h, SmootherSpec{}, 3), std::invalid_argument);
}

TEST(Bpx, ConditionGrowsSlowlyWithLevel) {
  const MeshHierarchy h = build_hierarchy(3);
  std::vector<double> k1;
  for (int level = 1; level <= 3; ++level) {
    const Problem p(h[level], 1.0);
    const BlockOperator b = p.blocks();
    const Preconditioner x = bpx(b.vv, h, SmootherSpec{}, level);
    const LinearMap op = [&](const Vector& v) { return x.apply(Vector(b.vv.matrix * v)); };
    const SpectrumEstimate s = estimate_spectrum(op, b.vv.matrix);
    k1.push_back(s.values.back() / s.values[1]);
  }
  for (std::size_t i = 1; i < k1.size(); ++i) EXPECT_LE(k1[i] / k1[i - 1], 1.6);
}

TEST(BlockJacobi, SymmetricPositiveDefinite) {
  const MeshHierarchy h = build_hierarchy(1);
  const Problem p(h[1], 1e-3);
  const SparseOperator a = assemble_ip1(*p.mesh, p.coeff, p.w, {-1, 8.0, Variant::IP1});
  const SparseOperator split = split_operator(a, p.basis);
  const BlockOperator b = blocks_of(split, p.basis, -1, Variant::IP1);
  const Preconditioner bj = block_jacobi_dg(split, p.basis.num_z, bpx(b.vv, h, SmootherSpec{}, 1));
  expect_spd(bj);
  expect_linear(bj);
  // Z part is the inverse diagonal, CR part is the CR preconditioner.
  Vector r = Vector::Zero(split.rows());
  r[3] = 2.0;
  EXPECT_NEAR(bj.apply(r)[3], 2.0 / split.matrix.coeff(3, 3), 1e-15);
  EXPECT_LE(bj.apply(r).tail(p.basis.num_v).norm(), 0.0);
  EXPECT_THROW(block_jacobi_dg(split, p.basis.num_z + 1, bpx(b.vv, h, SmootherSpec{}, 1)), std::invalid_argument);
}

TEST(ForwardSubstitution, MatchesDirectSolve) {
  const MeshHierarchy h = build_hierarchy(1);
  for (int theta : {-1, 0, 1}) {
    const Problem p(h[1], 1e-3);
    const SparseOperator a = p.ip0(theta);
    const BlockOperator b = extract_blocks(a, p.basis, theta);
    const Vector f = assemble_rhs(*p.mesh, [](const Point&) { return 1.0; });
    const SplitVector fs = split_parts(Vector(p.basis.transform.transpose() * f), p.basis);
    const BlockSolver zz = pcg_block_solver([](const SparseOperator& op) { return diag_precond(op); }, 1e-13, 1000);
    const BlockSolver vv = pcg_block_solver(
        [&](const SparseOperator& op) { return two_level(op, cr_prolongation(h, 1, 1), SmootherSpec{}); }, 1e-13, 1000);
    const Vector x = from_split(forward_substitution_solve(b, fs, zz, vv), p.basis);
    const Vector exact = DenseMatrix(a.matrix).partialPivLu().solve(f);
    EXPECT_LE((x - exact).norm() / exact.norm(), 1e-9) << theta;
  }
}

TEST(ForwardSubstitution, ZeroZLoadGivesZeroZPart) {
  const MeshHierarchy h = build_hierarchy(0);
  const Problem p(h[0], 1e-3);
  const BlockOperator b = p.blocks(-1);
  SplitVector f{Vector::Zero(p.basis.num_z), random_vector(p.basis.num_v, 2)};
  const BlockSolver direct = [](const SparseOperator& op, const Vector& r) { return direct_inverse(op.matrix).apply(r); };
  const SplitVector u = forward_substitution_solve(b, f, direct, direct);
  EXPECT_EQ(u.z.norm(), 0.0);
  EXPECT_LE((b.vv.matrix * u.v - f.v).norm(), 1e-12 * f.v.norm());
}
