#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseLU>

#include "rkcare/errors.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

struct ThinQr {
  Matrix Q;  // a x b, orthonormal columns
  Matrix R;  // b x b upper triangular, real nonnegative diagonal
};

// Thin QR with the diagonal of R normalized to be real and nonnegative.
inline ThinQr thin_qr(const Matrix& M) {
  const Eigen::Index a = M.rows(), b = M.cols();
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ() * Matrix::Identity(a, b);
  Matrix R = qr.matrixQR().topRows(b).template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < b; ++i) {
    const double mag = std::abs(R(i, i));
    if (mag > 0.0) {
      const Complex phase = R(i, i) / mag;
      Q.col(i) *= phase;
      R.row(i) *= std::conj(phase);
    }
  }
  return {std::move(Q), std::move(R)};
}

struct HermitianEig {
  RealVector eigenvalues;  // sorted descending
  Matrix Q;                // unitary, columns match eigenvalue order
};

inline HermitianEig hermitian_eig(const Matrix& M, double tol_herm = 1e-10) {
  const double scale = M.norm();
  if ((M - M.adjoint()).norm() > tol_herm * std::max(scale, 1e-300))
    throw NonHermitianInput("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + Matrix(M.adjoint())));
  const Eigen::Index d = M.rows();
  HermitianEig out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.Q.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) out.Q.col(i) = es.eigenvectors().col(d - 1 - i);
  return out;
}

struct OrderedSchur {
  Matrix Q;        // unitary
  Matrix T;        // upper triangular, selected eigenvalues leading
  Eigen::Index k;  // number of selected eigenvalues
};

// Complex Schur form with the eigenvalues satisfying `select` moved to the
// top-left of T by unitary similarity (Givens-based adjacent swaps).
inline OrderedSchur ordered_schur(const Matrix& M,
                                  const std::function<bool(Complex)>& select) {
  Eigen::ComplexSchur<Matrix> schur(M, /*computeU=*/true);
  Matrix T = schur.matrixT();
  Matrix Q = schur.matrixU();
  const Eigen::Index d = M.rows();
  const double tnorm = std::max(T.norm(), 1e-300);

  auto swap_adjacent = [&](Eigen::Index i) {
    const Complex t11 = T(i, i), t12 = T(i, i + 1), t22 = T(i + 1, i + 1);
    // Eigenvector of [t11 t12; 0 t22] for t22 is (t12, t22-t11).
    const Complex x1 = t12, x2 = t22 - t11;
    if (std::abs(x1) == 0.0 && std::abs(x2) == 0.0) return;  // equal, nothing to move
    Eigen::JacobiRotation<Complex> rot;
    rot.makeGivens(x1, x2);
    T.applyOnTheLeft(i, i + 1, rot.adjoint());
    T.applyOnTheRight(i, i + 1, rot);
    Q.applyOnTheRight(i, i + 1, rot);
    if (std::abs(T(i + 1, i)) > 1e-10 * tnorm)
      throw ReorderingFailure("ordered_schur: unstable eigenvalue swap");
    if (std::abs(T(i, i) - t22) > 1e-8 * tnorm || std::abs(T(i + 1, i + 1) - t11) > 1e-8 * tnorm)
      throw ReorderingFailure("ordered_schur: eigenvalues perturbed by swap");
    T(i + 1, i) = Complex(0, 0);
  };

  // Bubble selected eigenvalues upward.
  bool moved = true;
  while (moved) {
    moved = false;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      if (!select(T(i, i)) && select(T(i + 1, i + 1))) {
        swap_adjacent(i);
        moved = true;
      }
    }
  }
  Eigen::Index k = 0;
  while (k < d && select(T(k, k))) ++k;
  return {std::move(Q), std::move(T), k};
}

// Sparse LU wrapper reusable for arbitrary right-hand-side blocks.
class SparseSolver {
 public:
  explicit SparseSolver(const SparseMatrix& M) : lu_(std::make_shared<Eigen::SparseLU<SparseMatrix>>()) {
    SparseMatrix Mc = M;
    Mc.makeCompressed();
    lu_->compute(Mc);
    ok_ = (lu_->info() == Eigen::Success);
  }
  bool ok() const { return ok_; }
  Matrix solve(const Matrix& rhs) const { return lu_->solve(rhs); }

 private:
  std::shared_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
  bool ok_ = false;
};

// Factorization of (A^H - s E^H), re-solvable for arbitrary blocks.
class ShiftedFactorization {
 public:
  ShiftedFactorization(const SparseMatrix& A, const std::optional<SparseMatrix>& E, Complex s)
      : shift_(s), n_(A.rows()), solver_(make(A, E, s)) {
    if (!solver_.ok())
      throw ShiftHitsSpectrum("shifted factorization singular at s = (" +
                              std::to_string(s.real()) + "," + std::to_string(s.imag()) + ")");
  }

  Complex shift() const { return shift_; }
  Eigen::Index order() const { return n_; }
  Matrix solve(const Matrix& rhs) const { return solver_.solve(rhs); }

 private:
  static SparseSolver make(const SparseMatrix& A, const std::optional<SparseMatrix>& E, Complex s) {
    SparseMatrix M = A.adjoint();
    if (E) {
      M -= s * SparseMatrix(E->adjoint());
    } else {
      SparseMatrix I(A.rows(), A.cols());
      I.setIdentity();
      M -= s * I;
    }
    return SparseSolver(M);
  }

  Complex shift_;
  Eigen::Index n_;
  SparseSolver solver_;
};

inline ShiftedFactorization make_shifted_factorization(const SparseMatrix& A,
                                                       const std::optional<SparseMatrix>& E,
                                                       Complex s) {
  return ShiftedFactorization(A, E, s);
}

// Orthonormal basis of range(M)^perp, taken from the trailing columns of a
// full QR of M. Throws RankDeficient if M loses column rank.
inline Matrix orth_complement_basis(const Matrix& M, double rank_tol = 1e-12) {
  const Eigen::Index d = M.rows(), q = M.cols();
  if (q >= d) throw RankDeficient("orth_complement_basis: no complement, q >= d");
  Eigen::HouseholderQR<Matrix> qr(M);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q; ++i) {
    const double v = std::abs(qr.matrixQR()(i, i));
    rmax = std::max(rmax, v);
    rmin = std::min(rmin, v);
  }
  if (rmin < rank_tol * rmax)
    throw RankDeficient("orth_complement_basis: input is numerically rank deficient");
  Matrix Qfull = qr.householderQ() * Matrix::Identity(d, d);
  return Qfull.rightCols(d - q);
}

inline double fro_norm(const Matrix& M) { return M.norm(); }

inline double spectral_radius(const Matrix& M) {
  Eigen::ComplexEigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace rkcare
