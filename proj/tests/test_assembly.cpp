#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/coefficient.hpp"
#include "dgml/mesh.hpp"
#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace dgml;

namespace {

struct Fixture {
  Mesh mesh;
  CoefficientField coeff;
  EdgeWeights w;
  Fixture(const Mesh& m, double eps) : mesh(m), coeff(assign_coefficient(m, eps)), w(edge_weights(m, coeff)) {}
  SparseOperator ip0(int theta, double alpha = 8.0) const { return assemble_ip0(mesh, coeff, w, {theta, alpha, Variant::IP0}); }
  SparseOperator ip1(int theta, double alpha = 8.0) const { return assemble_ip1(mesh, coeff, w, {theta, alpha, Variant::IP1}); }
};

DenseMatrix dense(const SparseOperator& a) { return DenseMatrix(a.matrix); }

// DG vector of a continuous P1 function given at the mesh vertices.
Vector continuous(const Mesh& m, const std::function<double(const Point&)>& g) {
  Vector u(m.num_dg_dofs());
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) u[3 * t + k] = g(m.vertex(t, k));
  return u;
}

}  // namespace

TEST(Assembly, SipgIsSymmetric) {
  for (double eps : {1.0, 1e-3}) {
    const Fixture s(refine(build_initial_mesh()), eps);
    for (const SparseOperator& a : {s.ip0(-1), s.ip1(-1)}) {
      EXPECT_TRUE(a.symmetric);
      EXPECT_LE(oracle::rel_diff(dense(a), dense(a).transpose()), 1e-13);
    }
    EXPECT_FALSE(s.ip0(0).symmetric);
  }
}

TEST(Assembly, ConstantOnOneElementSeesOnlyPenalties) {
  const Fixture s(build_initial_mesh(), 1e-2);
  const double alpha = 8.0;
  for (int theta : {-1, 0, 1}) {
    const SparseOperator a = s.ip0(theta, alpha);
    for (int t : {0, 5, 13}) {
      Vector u = Vector::Zero(s.mesh.num_dg_dofs());
      u.segment(3 * t, 3).setOnes();
      double expected = 0.0;
      for (int e : s.mesh.triangle_edges[t]) expected += alpha * s.w.kappa_e[e];
      EXPECT_NEAR(u.dot(a.matrix * u), expected, 1e-12 * expected) << "theta " << theta << " t " << t;
    }
  }
}

TEST(Assembly, SipgPositiveDefinite) {
  for (double eps : {1.0, 1e-5, 1e5}) {
    const Fixture s(build_initial_mesh(), eps);
    for (const SparseOperator& a : {s.ip0(-1), s.ip1(-1)}) {
      const auto ev = oracle::eigenvalues(dense(a));
      EXPECT_GT(ev.front(), 0.0) << "eps " << eps;
    }
  }
}

TEST(Assembly, Ip1DominatesIp0) {
  const Fixture s(refine(build_initial_mesh()), 1e-3);
  const DenseMatrix d = dense(s.ip1(-1)) - dense(s.ip0(-1));
  const auto ev = oracle::eigenvalues(d);
  EXPECT_GE(ev.front(), -1e-12 * std::abs(ev.back()));
  const auto gen = oracle::generalized_eigenvalues(dense(s.ip1(-1)), dense(s.ip0(-1)));
  EXPECT_GE(gen.front(), 1.0 - 1e-10);
  EXPECT_TRUE(std::isfinite(gen.back()));
}

TEST(Assembly, ContinuousFunctionsDoNotSeeTheDifference) {
  const Fixture s(refine(build_initial_mesh()), 1e-3);
  const Vector u = continuous(s.mesh, [](const Point& x) { return (1 - x.x() * x.x()) * (1 - x.y() * x.y()); });
  // P1 interpolant of a function vanishing on the boundary: all jumps vanish.
  const DenseMatrix d = dense(s.ip1(-1)) - dense(s.ip0(-1));
  EXPECT_NEAR(u.dot(d * u), 0.0, 1e-12 * u.squaredNorm());
}

TEST(Assembly, Ip1OverIp0RatioStableInEps) {
  const Mesh m = refine(build_initial_mesh());
  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-5, 1e-3, 1.0, 1e3, 1e5}) {
    const Fixture s(m, eps);
    const double top = oracle::generalized_eigenvalues(dense(s.ip1(-1)), dense(s.ip0(-1))).back();
    lo = std::min(lo, top);
    hi = std::max(hi, top);
  }
  EXPECT_LE(hi / lo, 1.1);
}

TEST(Assembly, FluxFormsAgree) {
  const Fixture s(refine(build_initial_mesh()), 1e-3);
  for (int theta : {-1, 0, 1})
    for (Variant v : {Variant::IP0, Variant::IP1}) {
      const MethodParams p{theta, 8.0, v};
      const SparseOperator a = assemble_dg(s.mesh, s.coeff, s.w, p, FluxForm::BetaWeighted);
      const SparseOperator b = assemble_dg(s.mesh, s.coeff, s.w, p, FluxForm::HarmonicMean);
      EXPECT_LE(oracle::rel_diff(dense(a), dense(b)), 1e-13);
    }
}

TEST(Assembly, ScalingTheCoefficientScalesTheMatrix) {
  const Mesh m = build_initial_mesh();
  const CoefficientField c = assign_coefficient(m, 1e-3);
  for (double scale : {4.0, 3.0}) {
    CoefficientField cs = c;
    for (double& k : cs.kappa) k *= scale;
    const SparseOperator a = assemble_ip0(m, c, edge_weights(m, c), {-1, 8.0, Variant::IP0});
    const SparseOperator b = assemble_ip0(m, cs, edge_weights(m, cs), {-1, 8.0, Variant::IP0});
    const DenseMatrix da = scale * dense(a), db = dense(b);
    if (scale == 4.0)
      EXPECT_EQ(da, db);
    else
      EXPECT_LE(oracle::rel_diff(da, db), 1e-14);
  }
}

TEST(Assembly, ConformingStencil) {
  const Mesh m = build_initial_mesh();
  const SparseOperator a = assemble_conforming(m, assign_coefficient(m, 1.0));
  const ConformingSpace cs = conforming_space(m);
  EXPECT_EQ(cs.dimension(), 9);
  const int center = cs.dof_of_vertex[12];  // (0, 0)
  ASSERT_GE(center, 0);
  const DenseMatrix d = dense(a);
  EXPECT_NEAR(d(center, center), 4.0, 1e-14);
  EXPECT_NEAR(d.row(center).sum(), 0.0, 1e-14);
  for (int v : {7, 11, 13, 17}) EXPECT_NEAR(d(center, cs.dof_of_vertex[v]), -1.0, 1e-14);
  for (int v : {6, 18}) EXPECT_NEAR(d(center, cs.dof_of_vertex[v]), 0.0, 1e-14);
}

TEST(Assembly, ConformingPositiveDefinite) {
  for (double eps : {1e-5, 1.0, 1e5}) {
    const Mesh m = refine(build_initial_mesh());
    const DenseMatrix d = dense(assemble_conforming(m, assign_coefficient(m, eps)));
    Eigen::LLT<DenseMatrix> llt(d);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Assembly, CrBlockEqualsIndependentCrStiffness) {
  for (int level : {0, 1}) {
    const MeshHierarchy h = build_hierarchy(level);
    const Fixture s(h.finest(), 1e-3);
    const SplitBasis basis = build_transform(s.mesh, s.w);
    const BlockOperator b = extract_blocks(s.ip0(-1), basis, -1);
    EXPECT_LE(oracle::rel_diff(DenseMatrix(b.vv.matrix), oracle::cr_stiffness(s.mesh, s.coeff.kappa)), 1e-12);
  }
}

TEST(Assembly, GalerkinIdentityWithConformingStiffness) {
  for (int level : {0, 1}) {
    const MeshHierarchy h = build_hierarchy(level);
    const Fixture s(h.finest(), 1e-3);
    const DenseMatrix cr = oracle::cr_stiffness(s.mesh, s.coeff.kappa);
    // Hat function of each interior vertex evaluated at interior edge midpoints.
    const ConformingSpace cs = conforming_space(s.mesh);
    DenseMatrix pi = DenseMatrix::Zero(cr.rows(), cs.dimension());
    int row = 0;
    for (const Edge& e : s.mesh.edges) {
      if (e.on_boundary()) continue;
      for (int v : e.vertices)
        if (cs.dof_of_vertex[v] >= 0) pi(row, cs.dof_of_vertex[v]) = 0.5;
      ++row;
    }
    EXPECT_LE(oracle::rel_diff(pi.transpose() * cr * pi, dense(assemble_conforming(s.mesh, s.coeff))), 1e-12);
  }
}

TEST(Rhs, ZeroOneAndLinear) {
  const Mesh m = refine(build_initial_mesh());
  EXPECT_EQ(assemble_rhs(m, [](const Point&) { return 0.0; }).norm(), 0.0);
  EXPECT_NEAR(assemble_rhs(m, [](const Point&) { return 1.0; }).sum(), 4.0, 1e-13);
  const Vector fx = assemble_rhs(m, [](const Point& x) { return x.x(); });
  EXPECT_NEAR(fx.sum(), 0.0, 1e-13);
  // Point reflection maps the mesh onto itself; x is odd under it.
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) {
      const Point p = -m.vertex(t, k);
      const Point c = -m.barycenter(t);
      bool found = false;
      for (int s = 0; s < m.num_triangles() && !found; ++s) {
        if ((m.barycenter(s) - c).norm() > 1e-12) continue;
        for (int j = 0; j < 3; ++j)
          if ((m.vertex(s, j) - p).norm() < 1e-12) {
            EXPECT_NEAR(fx[3 * s + j], -fx[3 * t + k], 1e-15);
            found = true;
          }
      }
      EXPECT_TRUE(found);
    }
}

TEST(Rhs, ExactForQuadratics) {
  const Mesh m = build_initial_mesh();
  // sum of all entries = integral of f; int x^2 over [-1,1]^2 = 4/3.
  EXPECT_NEAR(assemble_rhs(m, [](const Point& x) { return x.x() * x.x(); }).sum(), 4.0 / 3.0, 1e-13);
}

TEST(EnergyNorm, ZeroAndConstant) {
  const Fixture s(build_initial_mesh(), 1e-2);
  const Vector zero = Vector::Zero(s.mesh.num_dg_dofs());
  const Vector one = Vector::Ones(s.mesh.num_dg_dofs());
  for (EnergyNorm which : {EnergyNorm::DG0, EnergyNorm::DG1}) {
    EXPECT_EQ(energy_norm(zero, s.mesh, s.coeff, s.w, which), 0.0);
    double expected = 0.0;
    for (int e = 0; e < s.mesh.num_edges(); ++e)
      if (s.mesh.edges[e].on_boundary()) expected += s.w.kappa_e[e];
    EXPECT_NEAR(energy_norm(one, s.mesh, s.coeff, s.w, which), std::sqrt(expected), 1e-13);
    EXPECT_NEAR(expected, 16 * 1e-2, 1e-15);
  }
  EXPECT_THROW(energy_norm(Vector::Ones(3), s.mesh, s.coeff, s.w, EnergyNorm::DG0), std::invalid_argument);
}

TEST(EnergyNorm, CoercivityAndBoundednessStableUnderRefinement) {
  const MeshHierarchy h = build_hierarchy(2);
  std::vector<double> lo, hi;
  for (int level = 0; level <= 2; ++level) {
    const Fixture s(h[level], 1e-3);
    const DenseMatrix g = DenseMatrix(energy_gram(s.mesh, s.coeff, s.w, EnergyNorm::DG0).matrix);
    const auto ev = oracle::generalized_eigenvalues(dense(s.ip0(-1)), g);
    EXPECT_GT(ev.front(), 0.0);
    lo.push_back(ev.front());
    hi.push_back(ev.back());
  }
  for (int level = 1; level <= 2; ++level) {
    EXPECT_NEAR(lo[level] / lo[0], 1.0, 0.2);
    EXPECT_NEAR(hi[level] / hi[0], 1.0, 0.2);
  }
}

TEST(Assembly, SymmetricPartOfIipg) {
  const Fixture s(build_initial_mesh(), 1.0);
  const SparseOperator a = s.ip1(0, 32.0);
  const SparseOperator as = symmetric_part(a);
  EXPECT_LE(oracle::rel_diff(dense(as), dense(as).transpose()), 0.0);
  EXPECT_GT(oracle::eigenvalues(dense(as)).front(), 0.0);
  const SparseOperator sip = s.ip1(-1);
  EXPECT_EQ(max_abs(skew_part(sip).matrix), 0.0);
  EXPECT_LE(oracle::rel_diff(dense(symmetric_part(sip)), dense(sip)), 0.0);
}

TEST(Assembly, CooRoundTrip) {
  const Fixture s(build_initial_mesh(), 1e-3);
  const SparseOperator a = s.ip0(-1);
  std::ostringstream os;
  write_coo(os, a.matrix);
  std::istringstream is(os.str());
  DenseMatrix back = DenseMatrix::Zero(a.rows(), a.cols());
  int r, c, lines = 0;
  double v;
  while (is >> r >> c >> v) {
    back(r, c) = v;
    ++lines;
  }
  EXPECT_EQ(lines, a.matrix.nonZeros());
  EXPECT_EQ(back, dense(a));
}

TEST(Assembly, Deterministic) {
  const Fixture s(refine(build_initial_mesh()), 1e-3);
  EXPECT_EQ(dense(s.ip1(0)), dense(s.ip1(0)));
}

TEST(Assembly, RejectsMismatchedInputs) {
  const Fixture s(build_initial_mesh(), 1.0);
  CoefficientField c = s.coeff;
  c.kappa.pop_back();
  EXPECT_THROW(assemble_ip0(s.mesh, c, s.w, {}), std::invalid_argument);
}
