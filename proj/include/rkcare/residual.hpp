#pragma once

#include <cmath>
#include <optional>

#include "rkcare/brad.hpp"
#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/problem.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

enum class NormChoice { Frobenius, Spectral };

namespace residual_detail {

inline double norm_of(const Matrix& M, NormChoice norm) {
  if (norm == NormChoice::Frobenius) return M.norm();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + Matrix(M.adjoint())),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Compressed residual factor: R(X) = V (U T^H + T U^H) V^H with
// U, T of (j+1)p x d_c. Returns [U T] and d_c.
struct Compression {
  Matrix UT;          // (j+1)p x 2 d_c, columns [U T]
  Eigen::Index dc;    // complement dimension
};

inline Compression compress(const Matrix& K, const Matrix& H, const Matrix& L,
                            const Matrix& Ctilde, const Matrix& Y) {
  Matrix U = orth_complement_basis(L);
  Matrix W = orth_complement_basis(K);
  const Eigen::Index dc = U.cols();

  Matrix UW = U.adjoint() * W;  // dc x dc
  Eigen::JacobiSVD<Matrix> svd(UW);
  const double smin = svd.singularValues()(dc - 1), smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw SingularUW("residual: complement spaces are degenerately aligned");
  Matrix Gamma = UW.partialPivLu().solve(Matrix::Identity(dc, dc));
  Gamma = W * Gamma;                    // W (U^H W)^{-1}
  Matrix Psi = Ctilde.adjoint() * Gamma;  // p x dc

  Matrix T = K * (Y * (H.adjoint() * Gamma)) + (Ctilde - 0.5 * U * Psi.adjoint()) * Psi;
  Compression out;
  out.dc = dc;
  out.UT.resize(U.rows(), 2 * dc);
  out.UT << U, T;
  return out;
}

// ||R J R^H|| from the economy QR factor of [U T] (or E^H V [U T]).
inline Matrix swapped_gram(const Matrix& R, Eigen::Index dc) {
  Matrix J = Matrix::Zero(2 * dc, 2 * dc);
  J.topRightCorner(dc, dc) = Matrix::Identity(dc, dc);
  J.bottomLeftCorner(dc, dc) = Matrix::Identity(dc, dc);
  return R * J * R.adjoint();
}

inline double norm_from_factor(const Matrix& tall, Eigen::Index dc, NormChoice norm) {
  ThinQr qr = thin_qr(tall);
  return norm_of(swapped_gram(qr.R, dc), norm);
}

}  // namespace residual_detail

// ||R(X_j)||, X_j = V K Y K^H V^H, through the (j+1)p-sized compression and
// the final 2p x 2p matrix. No n-sized object is touched.
inline double residual_norm_small(const Matrix& K, const Matrix& H, const Matrix& L,
                                  const Matrix& Ctilde, const Matrix& Y,
                                  NormChoice norm = NormChoice::Frobenius) {
  auto c = residual_detail::compress(K, H, L, Ctilde, Y);
  return residual_detail::norm_from_factor(c.UT, c.dc, norm);
}

inline double residual_norm(const Brad& brad, const Matrix& L, const Matrix& Y,
                            NormChoice norm = NormChoice::Frobenius) {
  return residual_norm_small(brad.K, brad.H, L, brad.ctilde(), Y, norm);
}

// Generalized variant: one tall-skinny product E^H V [U T] and its economy QR.
inline double residual_norm_generalized(const Brad& brad, const Matrix& L, const Matrix& Y,
                                        const SparseMatrix& E,
                                        NormChoice norm = NormChoice::Frobenius) {
  auto c = residual_detail::compress(brad.K, brad.H, L, brad.ctilde(), Y);
  Matrix tall = SparseMatrix(E.adjoint()) * (brad.V * c.UT);
  return residual_detail::norm_from_factor(tall, c.dc, norm);
}

// Singular values of R J R^H; the numerical residual rank is the count
// above a relative cutoff (rank at most 2p, 0 for an exact solution).
inline RealVector residual_rank_profile_small(const Matrix& K, const Matrix& H, const Matrix& L,
                                              const Matrix& Ctilde, const Matrix& Y) {
  auto c = residual_detail::compress(K, H, L, Ctilde, Y);
  ThinQr qr = thin_qr(c.UT);
  Eigen::JacobiSVD<Matrix> svd(residual_detail::swapped_gram(qr.R, c.dc));
  return svd.singularValues();
}

inline RealVector residual_rank_profile(const Brad& brad, const Matrix& L, const Matrix& Y) {
  return residual_rank_profile_small(brad.K, brad.H, L, brad.ctilde(), Y);
}

inline Eigen::Index numerical_rank(const RealVector& sv, double rel_cutoff = 1e-12) {
  if (sv.size() == 0) return 0;
  const double cut = rel_cutoff * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

// Test-only dense evaluation of ||R(X)||_F (generalized form when E present).
inline double dense_residual_oracle(const CareProblem& problem, const Matrix& X,
                                    Eigen::Index dense_cap = 500) {
  if (problem.A.rows() > dense_cap)
    throw CapExceeded("dense_residual_oracle: n exceeds the dense cap");
  const Matrix A = Matrix(problem.A);
  const Matrix CtC = problem.C.adjoint() * problem.C;
  const Matrix BBt = problem.B * problem.B.adjoint();
  if (problem.E) {
    const Matrix E = Matrix(*problem.E);
    return (A.adjoint() * X * E + E.adjoint() * X * A + CtC -
            E.adjoint() * X * BBt * X * E)
        .norm();
  }
  return (A.adjoint() * X + X * A + CtC - X * BBt * X).norm();
}

}  // namespace rkcare
