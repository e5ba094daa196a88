#pragma once

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

enum class SolutionReport { Accurate, IllConditioned };

struct DenseCareSolution {
  Matrix Y;  // Hermitian stabilizing solution
  Vector closed_loop_spectrum;
  SolutionReport report = SolutionReport::Accurate;
};

// Bartels-Stewart for F^H P + P F + W = 0 with stable F and Hermitian W.
inline Matrix solve_lyapunov_dense(const Matrix& F, const Matrix& W) {
  const Eigen::Index d = F.rows();
  Eigen::ComplexSchur<Matrix> schur(F, /*computeU=*/true);
  const Matrix& T = schur.matrixT();
  const Matrix& Q = schur.matrixU();
  Matrix Wt = Q.adjoint() * W * Q;
  Matrix Pt = Matrix::Zero(d, d);
  const double scale = std::max(T.norm(), 1e-300);
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector rhs = -Wt.col(k);
    for (Eigen::Index i = 0; i < k; ++i) rhs -= T(i, k) * Pt.col(i);
    // (T^H + T(k,k) I) is lower triangular; forward substitution
    Vector col(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      Complex acc = rhs(r);
      for (Eigen::Index i = 0; i < r; ++i) acc -= std::conj(T(i, r)) * col(i);
      const Complex diag = std::conj(T(r, r)) + T(k, k);
      if (std::abs(diag) < 1e-14 * scale)
        throw SpectrumCollision("solve_lyapunov_dense: Lambda(F) meets -Lambda(F^H)");
      col(r) = acc / diag;
    }
    Pt.col(k) = col;
  }
  Matrix P = Q * Pt * Q.adjoint();
  return 0.5 * (P + Matrix(P.adjoint()));
}

// Stabilizing CARE solution A^H Y + Y A + C^H C - Y B B^H Y = 0 via the
// ordered Schur form of the 2d x 2d Hamiltonian matrix.
inline DenseCareSolution solve_care_dense(const Matrix& A, const Matrix& B, const Matrix& C,
                                          Eigen::Index dense_cap = 2000) {
  const Eigen::Index d = A.rows();
  if (d > dense_cap) throw CapExceeded("solve_care_dense: order exceeds the dense cap");
  const Matrix BBt = B * B.adjoint();
  const Matrix CtC = C.adjoint() * C;

  Matrix Ham(2 * d, 2 * d);
  Ham << A, -BBt, -CtC, -Matrix(A.adjoint());

  OrderedSchur sch = ordered_schur(Ham, [](Complex z) { return z.real() < 0.0; });
  for (Eigen::Index i = 0; i < 2 * d; ++i)
    if (std::abs(sch.T(i, i).real()) < 1e-10)
      throw NoStabilizingSolution("solve_care_dense: Hamiltonian eigenvalue on the imaginary axis");
  if (sch.k != d)
    throw NoStabilizingSolution("solve_care_dense: stable invariant subspace has wrong dimension");

  const Matrix U1 = sch.Q.topLeftCorner(d, d);
  const Matrix U2 = sch.Q.bottomLeftCorner(d, d);
  Eigen::JacobiSVD<Matrix> svd(U1);
  const double smin = svd.singularValues()(d - 1), smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw IllConditionedU1("solve_care_dense: invariant subspace basis ill conditioned");

  Matrix Y = U1.adjoint().partialPivLu().solve(U2.adjoint());  // (U2 U1^{-1})^H, then symmetrize
  Y = 0.5 * (Y + Matrix(Y.adjoint()));

  DenseCareSolution sol;
  sol.Y = Y;
  Eigen::ComplexEigenSolver<Matrix> es(A - BBt * Y, /*computeEigenvectors=*/false);
  sol.closed_loop_spectrum = es.eigenvalues();

  const Matrix res = A.adjoint() * Y + Y * A + CtC - Y * BBt * Y;
  const double bound = 1e-8 * std::max(1.0, Y.squaredNorm() * BBt.norm());
  const bool stable = (sol.closed_loop_spectrum.real().maxCoeff() < 0.0);
  sol.report = (res.norm() <= bound && stable && smax / smin < 1e8)
                   ? SolutionReport::Accurate
                   : SolutionReport::IllConditioned;
  return sol;
}

// Independent test oracle: Newton-Kleinman iteration started at Y = 0
// (valid for stable A), each step a dense Lyapunov solve.
inline Matrix newton_kleinman_oracle(const Matrix& A, const Matrix& B, const Matrix& C,
                                     int iters = 50) {
  const Eigen::Index d = A.rows();
  const Matrix BBt = B * B.adjoint();
  const Matrix CtC = C.adjoint() * C;
  Matrix Y = Matrix::Zero(d, d);
  for (int it = 0; it < iters; ++it) {
    const Matrix F = A - BBt * Y;
    const Matrix W = CtC + Y * BBt * Y;
    Y = solve_lyapunov_dense(F, W);
    const Matrix res = A.adjoint() * Y + Y * A + CtC - Y * BBt * Y;
    if (res.norm() < 1e-12 * std::max(1.0, CtC.norm())) break;
  }
  return Y;
}

}  // namespace rkcare
