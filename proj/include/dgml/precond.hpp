#pragma once

#include "dgml/assembly.hpp"
#include "dgml/basis_split.hpp"
#include "dgml/common.hpp"
#include "dgml/krylov.hpp"
#include "dgml/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dgml {

/// Diagonal (point Jacobi) preconditioner r -> r ./ diag(A).
inline Preconditioner diag_precond(const SparseOperator& a) {
  Vector d = a.matrix.diagonal();
  if ((d.array() <= 0.0).any()) throw std::invalid_argument("diag_precond: non-positive diagonal entry");
  auto inv = std::make_shared<Vector>(d.cwiseInverse());
  return Preconditioner("diagonal", a.rows(), [inv](const Vector& r, Vector& out) { out = r.cwiseProduct(*inv); });
}

enum class SmootherKind { Jacobi, SymGS };

struct SmootherSpec {
  SmootherKind kind = SmootherKind::SymGS;
  int sweeps = 5;
};

/// `sweeps` iterations of Jacobi or symmetric Gauss-Seidel on A x = r from
/// x = 0. Symmetric GS runs a forward then a backward sweep in index order.
/// Multi-sweep Jacobi is damped by 1/2; a single Jacobi sweep is r ./ diag(A).
class Smoother {
 public:
  Smoother(const SparseMatrix& a, SmootherSpec spec) : a_(a), spec_(spec) {
    if (spec.sweeps < 1) throw std::invalid_argument("smoother: sweeps must be >= 1");
    diag_ = a_.diagonal();
    if ((diag_.array() == 0.0).any()) throw std::invalid_argument("smoother: zero diagonal entry");
  }

  void apply(const Vector& r, Vector& x) const {
    const Index n = a_.rows();
    x.setZero(n);
    if (spec_.kind == SmootherKind::Jacobi) {
      const double omega = spec_.sweeps == 1 ? 1.0 : 0.5;
      for (int s = 0; s < spec_.sweeps; ++s) {
        const Vector res = r - a_ * x;
        x += omega * res.cwiseQuotient(diag_);
      }
      return;
    }
    for (int s = 0; s < spec_.sweeps; ++s) {
      for (Index i = 0; i < n; ++i) relax(i, r, x);
      for (Index i = n - 1; i >= 0; --i) relax(i, r, x);
    }
  }

  Index size() const { return a_.rows(); }

 private:
  void relax(Index i, const Vector& r, Vector& x) const {
    double s = r[i];
    for (SparseMatrix::InnerIterator it(a_, i); it; ++it)
      if (it.col() != i) s -= it.value() * x[it.col()];
    x[i] = s / diag_[i];
  }

  SparseMatrix a_;
  Vector diag_;
  SmootherSpec spec_;
};

inline Preconditioner smoother(const SparseOperator& a, SmootherSpec spec) {
  auto s = std::make_shared<Smoother>(a.matrix, spec);
  const std::string name = spec.kind == SmootherKind::Jacobi ? "jacobi" : "symmetric-gauss-seidel";
  return Preconditioner(name, a.rows(), [s](const Vector& r, Vector& out) { s->apply(r, out); });
}

enum class ProlongationKind { ConformingToConforming, ConformingToCR };

/// Sparse matrix whose columns are coarse basis functions expressed in a fine basis.
struct Prolongation {
  SparseMatrix matrix;
  ProlongationKind kind = ProlongationKind::ConformingToCR;
};

/// Interior-vertex P1 space of `coarse` into that of `fine` (fine = refine(coarse)).
inline Prolongation conforming_prolongation(const Mesh& coarse, const Mesh& fine) {
  if (fine.level != coarse.level + 1 || fine.vertex_parents.size() != fine.vertices.size() ||
      fine.parent_triangle.size() != 4 * coarse.triangles.size())
    throw std::invalid_argument("conforming_prolongation: meshes are not nested");
  const ConformingSpace cs = conforming_space(coarse);
  const ConformingSpace fs = conforming_space(fine);
  std::vector<Triplet> trip;
  for (int d = 0; d < fs.dimension(); ++d) {
    const auto [a, b] = fine.vertex_parents[fs.vertex_of_dof[d]];
    if (a == b) {
      if (cs.dof_of_vertex[a] >= 0) trip.emplace_back(d, cs.dof_of_vertex[a], 1.0);
      continue;
    }
    for (int p : {a, b})
      if (cs.dof_of_vertex[p] >= 0) trip.emplace_back(d, cs.dof_of_vertex[p], 0.5);
  }
  Prolongation out;
  out.kind = ProlongationKind::ConformingToConforming;
  out.matrix.resize(fs.dimension(), cs.dimension());
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Conforming P1 hats of a mesh as CR functions on the same mesh: the value at
/// each interior edge midpoint. Rows follow ascending interior edge index.
inline Prolongation cr_inclusion(const Mesh& mesh) {
  const ConformingSpace cs = conforming_space(mesh);
  std::vector<Triplet> trip;
  int row = 0;
  for (const auto& e : mesh.edges) {
    if (e.on_boundary()) continue;
    for (int v : e.vertices)
      if (cs.dof_of_vertex[v] >= 0) trip.emplace_back(row, cs.dof_of_vertex[v], 0.5);
    ++row;
  }
  Prolongation out;
  out.kind = ProlongationKind::ConformingToCR;
  out.matrix.resize(row, cs.dimension());
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  return out;
}

/// Conforming space of hierarchy level `coarse_level` into the CR space of
/// level `fine_level` (mesh-size ratio 2^(fine_level - coarse_level)).
inline Prolongation cr_prolongation(const MeshHierarchy& hierarchy, int fine_level, int coarse_level) {
  if (coarse_level < 0 || coarse_level > fine_level || fine_level > hierarchy.finest_level())
    throw std::invalid_argument("cr_prolongation: levels are not nested in the hierarchy");
  Prolongation out = cr_inclusion(hierarchy[fine_level]);
  for (int j = fine_level; j > coarse_level; --j) {
    const Prolongation step = conforming_prolongation(hierarchy[j - 1], hierarchy[j]);
    out.matrix = SparseMatrix(out.matrix * step.matrix);
  }
  return out;
}

namespace detail {

inline std::shared_ptr<Eigen::SimplicialLDLT<ColSparseMatrix>> factorize_spd(const SparseMatrix& a, const char* who) {
  auto f = std::make_shared<Eigen::SimplicialLDLT<ColSparseMatrix>>();
  f->compute(ColSparseMatrix(a));
  if (f->info() != Eigen::Success || (f->vectorD().array() <= 0.0).any())
    throw NumericalError(std::string(who) + ": coarse matrix is singular or indefinite");
  return f;
}

inline SparseMatrix galerkin(const SparseMatrix& a, const SparseMatrix& p) {
  const SparseMatrix ap = a * p;
  const SparseMatrix pt = p.transpose();
  SparseMatrix c = pt * ap;
  SparseMatrix ct = c.transpose();
  return SparseMatrix(0.5 * (c + ct));
}

}  // namespace detail

/// Additive two-level preconditioner B = S + P (P^T A P)^{-1} P^T with S the
/// CR smoother and P the conforming-to-CR prolongation.
inline Preconditioner two_level(const SparseOperator& a_vv, const Prolongation& pi, SmootherSpec spec) {
  if (pi.matrix.rows() != a_vv.rows()) throw std::invalid_argument("two_level: prolongation does not match A_vv");
  struct State {
    Smoother smooth;
    SparseMatrix p, pt;
    std::shared_ptr<Eigen::SimplicialLDLT<ColSparseMatrix>> coarse;
  };
  auto st = std::make_shared<State>(State{Smoother(a_vv.matrix, spec), pi.matrix, pi.matrix.transpose(), nullptr});
  st->coarse = detail::factorize_spd(detail::galerkin(a_vv.matrix, pi.matrix), "two_level");
  return Preconditioner("two-level", a_vv.rows(), [st](const Vector& r, Vector& out) {
    st->smooth.apply(r, out);
    const Vector rc = st->pt * r;
    out += st->p * st->coarse->solve(rc);
  });
}

/// Additive BPX preconditioner on the CR space of the finest hierarchy level:
///   exact solve on conforming level 0, smoothers on conforming levels 1..J,
///   and a smoother on the CR space itself. Coarse operators are Galerkin
///   products P_j^T A_vv P_j.
class MultilevelPreconditioner {
 public:
  struct Level {
    SparseMatrix prolong;      // conforming level j -> CR space
    SparseMatrix restriction;  // transpose
    SparseMatrix op;           // P_j^T A_vv P_j
    std::optional<Smoother> smooth;
  };

  /// `top_level` selects the CR level inside the hierarchy (default: finest).
  MultilevelPreconditioner(const SparseOperator& a_vv, const MeshHierarchy& hierarchy, SmootherSpec spec,
                           int top_level = -1)
      : fine_(a_vv.matrix, spec) {
    const int top = top_level < 0 ? hierarchy.finest_level() : top_level;
    if (top > hierarchy.finest_level()) throw std::invalid_argument("bpx: level outside the hierarchy");
    Prolongation p = cr_inclusion(hierarchy[top]);
    if (p.matrix.rows() != a_vv.rows()) throw std::invalid_argument("bpx: A_vv does not live on the finest level");
    levels_.resize(top + 1);
    for (int j = top; j >= 0; --j) {
      if (j < top) p.matrix = SparseMatrix(p.matrix * conforming_prolongation(hierarchy[j], hierarchy[j + 1]).matrix);
      Level& lv = levels_[j];
      lv.prolong = p.matrix;
      lv.restriction = p.matrix.transpose();
      lv.op = detail::galerkin(a_vv.matrix, p.matrix);
      if (j > 0) lv.smooth.emplace(lv.op, spec);
    }
    coarse_ = detail::factorize_spd(levels_[0].op, "bpx");
  }

  void apply(const Vector& r, Vector& out) const {
    fine_.apply(r, out);
    Vector corr;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const Level& lv = levels_[j];
      const Vector rj = lv.restriction * r;
      if (j == 0)
        corr = coarse_->solve(rj);
      else
        lv.smooth->apply(rj, corr);
      out += lv.prolong * corr;
    }
  }

  Vector apply(const Vector& r) const {
    Vector out;
    apply(r, out);
    return out;
  }

  Index size() const { return fine_.size(); }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Level& level(int j) const { return levels_.at(j); }

 private:
  Smoother fine_;
  std::vector<Level> levels_;
  std::shared_ptr<Eigen::SimplicialLDLT<ColSparseMatrix>> coarse_;
};

inline Preconditioner bpx(const SparseOperator& a_vv, const MeshHierarchy& hierarchy, SmootherSpec spec,
                          int top_level = -1) {
  auto ml = std::make_shared<MultilevelPreconditioner>(a_vv, hierarchy, spec, top_level);
  return Preconditioner("bpx", a_vv.rows(), [ml](const Vector& r, Vector& out) { ml->apply(r, out); });
}

/// Block-Jacobi preconditioner for a split-basis DG operator: the inverse
/// diagonal on the Z block and `b_cr` on the CR block.
inline Preconditioner block_jacobi_dg(const SparseOperator& a_split, Index num_z, Preconditioner b_cr) {
  const Index n = a_split.rows();
  if (num_z + b_cr.size() != n) throw std::invalid_argument("block_jacobi_dg: block sizes do not match");
  Vector d = a_split.matrix.diagonal().head(num_z);
  if ((d.array() <= 0.0).any()) throw std::invalid_argument("block_jacobi_dg: non-positive Z diagonal");
  auto inv = std::make_shared<Vector>(d.cwiseInverse());
  auto cr = std::make_shared<Preconditioner>(std::move(b_cr));
  return Preconditioner("block-jacobi-dg", n, [inv, cr, num_z, n](const Vector& r, Vector& out) {
    out.resize(n);
    out.head(num_z) = r.head(num_z).cwiseProduct(*inv);
    Vector rv = r.tail(n - num_z);
    out.tail(n - num_z) = cr->apply(rv);
  });
}

/// Solver for one diagonal block: (block, rhs) -> solution.
using BlockSolver = std::function<Vector(const SparseOperator&, const Vector&)>;

/// PCG block solver with a preconditioner built from the block itself.
inline BlockSolver pcg_block_solver(std::function<Preconditioner(const SparseOperator&)> make_prec, double tol,
                                    int maxit = 10000) {
  return [make_prec = std::move(make_prec), tol, maxit](const SparseOperator& a, const Vector& b) {
    const Preconditioner prec = make_prec(a);
    SolveResult res = pcg(a.matrix, b, prec, tol, maxit);
    if (!res.report.converged) throw NumericalError("block solver: PCG did not converge");
    return res.x;
  };
}

/// Exact solve of the block lower-triangular split system:
/// z = A_zz^{-1} f_z, then v = A_vv^{-1} (f_v - A_vz z).
inline SplitVector forward_substitution_solve(const BlockOperator& blocks, const SplitVector& f,
                                              const BlockSolver& zz_solver, const BlockSolver& vv_solver) {
  if (f.z.size() != blocks.zz.rows() || f.v.size() != blocks.vv.rows())
    throw std::invalid_argument("forward_substitution_solve: dimension mismatch");
  SplitVector u;
  u.z = zz_solver(blocks.zz, f.z);
  const Vector rhs_v = f.v - blocks.vz.matrix * u.z;
  u.v = vv_solver(blocks.vv, rhs_v);
  return u;
}

}  // namespace dgml
