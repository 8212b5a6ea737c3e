#pragma once

#include "dgml/common.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dgml {

/// Linear map residual -> correction.
///
/// Type-erased so that diagonal, smoother, two-level, BPX and block
/// preconditioners share one interface. Implementations must be linear;
/// `spd()` declares symmetric positive definiteness.
class Preconditioner {
 public:
  using ApplyFn = std::function<void(const Vector&, Vector&)>;

  Preconditioner() = default;
  Preconditioner(std::string name, Index size, ApplyFn fn, bool spd = true)
      : name_(std::move(name)), size_(size), fn_(std::move(fn)), spd_(spd) {}

  void apply(const Vector& r, Vector& out) const {
    if (r.size() != size_) throw std::invalid_argument(name_ + ": dimension mismatch");
    fn_(r, out);
  }
  Vector apply(const Vector& r) const {
    Vector out(size_);
    apply(r, out);
    return out;
  }

  const std::string& name() const { return name_; }
  Index size() const { return size_; }
  bool spd() const { return spd_; }

 private:
  std::string name_;
  Index size_ = 0;
  ApplyFn fn_;
  bool spd_ = true;
};

inline Preconditioner identity_preconditioner(Index n) {
  return Preconditioner("identity", n, [](const Vector& r, Vector& out) { out = r; });
}

/// Exact inverse through a sparse LDL^T factorization.
inline Preconditioner direct_inverse(const SparseMatrix& a, std::string name = "direct") {
  auto solver = std::make_shared<Eigen::SimplicialLDLT<ColSparseMatrix>>();
  solver->compute(ColSparseMatrix(a));
  if (solver->info() != Eigen::Success) throw NumericalError(name + ": factorization failed");
  return Preconditioner(std::move(name), a.rows(), [solver](const Vector& r, Vector& out) { out = solver->solve(r); });
}

struct SolveReport {
  int iterations = 0;
  std::vector<double> rel_residual_history;  // starts with 1
  std::vector<double> energy_decrease;       // ||e_k||_A^2 - ||e_{k+1}||_A^2 per step
  double eig_min = 0.0;
  double eig_max = 0.0;
  std::vector<double> eig_sorted_low;
  double K = 0.0;
  std::map<int, double> K_m;
  bool converged = false;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

/// Condition numbers from ascending positive eigenvalues:
/// K = l_N / l_1 and K_m = l_N / l_{m+1}.
struct ConditionNumbers {
  double K = 0.0;
  std::map<int, double> K_m;
};

inline ConditionNumbers condition_numbers(const std::vector<double>& eigs, const std::vector<int>& m_list) {
  if (eigs.empty()) throw std::invalid_argument("condition_numbers: empty spectrum");
  if (!std::is_sorted(eigs.begin(), eigs.end()))
    throw std::invalid_argument("condition_numbers: eigenvalues must be ascending");
  if (!(eigs.front() > 0.0)) throw std::invalid_argument("condition_numbers: eigenvalues must be positive");
  ConditionNumbers c;
  const double top = eigs.back();
  c.K = top / eigs.front();
  for (int m : m_list) {
    if (m < 0 || m >= static_cast<int>(eigs.size()))
      throw std::invalid_argument("condition_numbers: m must satisfy 0 <= m < N");
    c.K_m[m] = top / eigs[m];
  }
  return c;
}

/// Number m of leading eigenvalues separated from the rest by a relative gap
/// of at least `gap` (l_{m+1} / l_m >= gap), searching m up to `max_m`.
inline int count_isolated_small(const std::vector<double>& eigs, double gap = 100.0, int max_m = 8) {
  int m = 0;
  const int limit = std::min<int>(max_m, static_cast<int>(eigs.size()) - 1);
  for (int i = 0; i < limit; ++i)
    if (eigs[i + 1] >= gap * eigs[i]) m = i + 1;
  return m;
}

namespace detail {

inline std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& off) {
  const Index k = static_cast<Index>(diag.size());
  if (k == 0) return {};
  Vector d = Eigen::Map<const Vector>(diag.data(), k);
  Vector o = k > 1 ? Vector(Eigen::Map<const Vector>(off.data(), k - 1)) : Vector();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
  es.computeFromTridiagonal(d, o, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
  const Vector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace detail

/// Preconditioned conjugate gradients from x0 = 0; stops once
/// ||r_k|| / ||r_0|| < tol. The Lanczos matrix built from the CG scalars
/// provides Ritz values of B A.
template <class Prec>
SolveResult pcg(const SparseMatrix& a, const Vector& b, const Prec& prec, double tol, int maxit) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("pcg: dimension mismatch");
  SolveResult res{Vector::Zero(n), {}};
  SolveReport& rep = res.report;
  Vector r = b;
  const double r0 = r.norm();
  rep.rel_residual_history.push_back(1.0);
  if (r0 == 0.0) {
    rep.converged = true;
    return res;
  }
  Vector z = prec.apply(r);
  double rz = r.dot(z);
  if (!(rz > 0.0)) throw NumericalError("pcg: preconditioner is not positive definite");
  Vector p = z;
  Vector q(n);
  std::vector<double> alphas, betas;
  for (int k = 0; k < maxit; ++k) {
    q.noalias() = a * p;
    const double pap = p.dot(q);
    if (!(pap > 0.0)) throw NumericalError("pcg: operator is not positive definite");
    const double alpha = rz / pap;
    alphas.push_back(alpha);
    res.x += alpha * p;
    r -= alpha * q;
    rep.energy_decrease.push_back(alpha * rz);
    ++rep.iterations;
    const double rel = r.norm() / r0;
    rep.rel_residual_history.push_back(rel);
    if (rel < tol) {
      rep.converged = true;
      break;
    }
    prec.apply(r, z);
    const double rz_new = r.dot(z);
    if (!(rz_new > 0.0)) throw NumericalError("pcg: preconditioner is not positive definite");
    const double beta = rz_new / rz;
    betas.push_back(beta);
    rz = rz_new;
    p = z + beta * p;
  }

  const std::size_t k = alphas.size();
  std::vector<double> diag(k), off(k > 0 ? k - 1 : 0);
  for (std::size_t j = 0; j < k; ++j) {
    diag[j] = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
    if (j + 1 < k) off[j] = std::sqrt(betas[j]) / alphas[j];
  }
  const auto ritz = detail::tridiagonal_eigenvalues(diag, off);
  if (!ritz.empty()) {
    rep.eig_min = ritz.front();
    rep.eig_max = ritz.back();
    rep.eig_sorted_low.assign(ritz.begin(), ritz.begin() + std::min<std::size_t>(ritz.size(), 5));
    if (ritz.front() > 0.0) {
      const auto c = condition_numbers(ritz, ritz.size() > 1 ? std::vector<int>{0, 1} : std::vector<int>{0});
      rep.K = c.K;
      rep.K_m = c.K_m;
    }
  }
  return res;
}

using LinearMap = std::function<Vector(const Vector&)>;

enum class SpectrumMethod { Auto, Dense, Lanczos };

struct SpectrumEstimate {
  std::vector<double> values;  // ascending
  bool dense = false;
  int steps = 0;
  bool orthogonality_lost = false;
};

inline constexpr Index kDenseSpectrumLimit = 2500;

/// Spectrum of `op`, assumed self-adjoint in the inner product of the SPD
/// matrix `inner` (e.g. op = B A and inner = A).
///
/// Dense: all eigenvalues of the symmetric matrix L^T op L^-T, inner = L L^T.
/// Lanczos: `steps` iterations in the `inner` product with full
/// reorthogonalization (two Gram-Schmidt passes); Ritz values returned.
inline SpectrumEstimate estimate_spectrum(const LinearMap& op, const SparseMatrix& inner, int steps = 400,
                                          SpectrumMethod method = SpectrumMethod::Auto, std::uint64_t seed = 12345) {
  const Index n = inner.rows();
  SpectrumEstimate out;
  const bool dense = method == SpectrumMethod::Dense || (method == SpectrumMethod::Auto && n <= kDenseSpectrumLimit);
  if (dense) {
    DenseMatrix opm(n, n);
    Vector e = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      opm.col(j) = op(e);
      e[j] = 0.0;
    }
    const Eigen::LLT<DenseMatrix> llt{DenseMatrix(inner)};
    if (llt.info() != Eigen::Success) throw NumericalError("estimate_spectrum: inner product is not SPD");
    // L^T op L^-T with inner = L L^T; avoids squaring the conditioning of inner.
    const DenseMatrix l = llt.matrixL();
    const DenseMatrix right = llt.matrixL().solve(opm.transpose()).transpose();
    DenseMatrix g = l.transpose() * right;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("estimate_spectrum: dense eigensolver failed");
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(out.values.begin(), out.values.end());
    out.dense = true;
    out.steps = static_cast<int>(n);
    return out;
  }

  const int k = static_cast<int>(std::min<Index>(steps, n));
  if (k < 1) throw std::invalid_argument("estimate_spectrum: need at least one step");
  DenseMatrix basis(n, k), m_basis(n, k);
  Vector v = random_vector(n, seed);
  Vector mv = inner * v;
  double nrm = std::sqrt(v.dot(mv));
  v /= nrm;
  mv /= nrm;
  std::vector<double> diag, off;
  double beta_prev = 0.0;
  for (int j = 0; j < k; ++j) {
    basis.col(j) = v;
    m_basis.col(j) = mv;
    Vector w = op(v);
    const double alpha = mv.dot(w);
    diag.push_back(alpha);
    w -= alpha * v;
    if (j > 0) w -= beta_prev * basis.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = m_basis.leftCols(j + 1).transpose() * w;
      w -= basis.leftCols(j + 1) * c;
      if (pass == 1) {
        const Vector mw = inner * w;
        const double wn = std::sqrt(std::max(0.0, w.dot(mw)));
        if (wn > 0.0 && c.cwiseAbs().maxCoeff() > 1e-8 * wn) out.orthogonality_lost = true;
      }
    }
    mv = inner * w;
    const double beta = std::sqrt(std::max(0.0, w.dot(mv)));
    out.steps = j + 1;
    if (j + 1 == k || beta <= 1e-13 * std::abs(alpha)) break;
    off.push_back(beta);
    v = w / beta;
    mv /= beta;
    beta_prev = beta;
  }
  off.resize(diag.size() > 0 ? diag.size() - 1 : 0);
  out.values = detail::tridiagonal_eigenvalues(diag, off);
  return out;
}

/// u_{k+1} = u_k + B (f - A u_k) until the relative residual drops below tol.
/// Throws when the residual grows tenfold over the initial one.
template <class Prec>
SolveResult stationary_iteration(const SparseMatrix& a, const Prec& prec, const Vector& f, const Vector& u0, int maxit,
                                 double tol) {
  if (a.rows() != f.size() || u0.size() != f.size()) throw std::invalid_argument("stationary_iteration: dimension mismatch");
  SolveResult res{u0, {}};
  Vector r = f - a * res.x;
  const double r0 = r.norm();
  res.report.rel_residual_history.push_back(1.0);
  if (r0 == 0.0) {
    res.report.converged = true;
    return res;
  }
  for (int k = 0; k < maxit; ++k) {
    res.x += prec.apply(r);
    r = f - a * res.x;
    ++res.report.iterations;
    const double rel = r.norm() / r0;
    res.report.rel_residual_history.push_back(rel);
    if (rel > 10.0) throw NumericalError("stationary_iteration: divergence");
    if (rel < tol) {
      res.report.converged = true;
      break;
    }
  }
  return res;
}

struct PropagatorNorm {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// ||I - A_S^{-1} A|| in the A_S energy norm, A_S = (A + A^T) / 2.
///
/// Block power iteration on E* E, where E* = I - A_S^{-1} A^T is the
/// A_S-adjoint of E, with a Rayleigh-Ritz step on `block` vectors so that
/// nearly repeated top eigenvalues do not stall convergence. Stops when the
/// top Ritz value changes by less than tol (relative).
inline PropagatorNorm error_propagator_norm(const SparseOperator& a, double tol = 1e-10, int maxit = 5000,
                                            std::uint64_t seed = 2024, int block = 8) {
  if (a.rows() != a.cols()) throw std::invalid_argument("error_propagator_norm: matrix must be square");
  const SparseOperator as = symmetric_part(a);
  Eigen::SimplicialLDLT<ColSparseMatrix> ldlt(ColSparseMatrix(as.matrix));
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw NumericalError("error_propagator_norm: symmetric part is not positive definite");
  const SparseMatrix at = a.matrix.transpose();
  const Index n = a.rows();
  const Index p = std::min<Index>(std::max(block, 1), n);

  DenseMatrix x(n, p);
  for (Index j = 0; j < p; ++j) x.col(j) = random_vector(n, seed + static_cast<std::uint64_t>(j));

  PropagatorNorm out;
  double lambda = 0.0;
  for (int k = 0; k < maxit; ++k) {
    // A_S-orthonormalize the block.
    const DenseMatrix gram = x.transpose() * (as.matrix * x);
    Eigen::LLT<DenseMatrix> llt(0.5 * (gram + gram.transpose()));
    if (llt.info() != Eigen::Success) throw NumericalError("error_propagator_norm: block lost rank");
    x = llt.matrixU().solve<Eigen::OnTheRight>(x);
    DenseMatrix y(n, p);
    for (Index j = 0; j < p; ++j) {
      const Vector ex = x.col(j) - ldlt.solve(Vector(a.matrix * x.col(j)));
      y.col(j) = ex - ldlt.solve(Vector(at * ex));
    }
    DenseMatrix h = x.transpose() * (as.matrix * y);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    const double next = std::max(0.0, es.eigenvalues()(p - 1));
    out.iterations = k + 1;
    if (next == 0.0) {
      lambda = 0.0;
      out.converged = true;
      break;
    }
    const bool done = k > 0 && std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (done) {
      out.converged = true;
      break;
    }
    if (y.norm() == 0.0) break;
    x = y * es.eigenvectors();
  }
  out.norm = std::sqrt(lambda);
  return out;
}

}  // namespace dgml
