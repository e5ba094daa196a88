#pragma once

#include <utility>

#include "rkcare/brad.hpp"
#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/residual.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

struct TruncationPolicy {
  // keep eigenvalues of K Y K^H strictly above tau * rho(K Y K^H); all
  // non-positive ones are always dropped
  double tau = 1e-12;
};

// Spectral truncation of X_j = V (K Y K^H) V^H: the kept eigenpairs define
// Xhat = (V Qhat) Yhat (V Qhat)^H, which solves the Riccati equation
// projected onto range(V Qhat).
struct TruncatedSolution {
  Matrix Qhat;        // (j+1)p x r orthonormal
  RealVector Yhat;    // kept eigenvalues, descending, all > 0
  Matrix Hhat;        // H * (K^+ Qhat)
  Matrix Lhat;        // = Qhat (an orthonormal basis of range(Qcheck)^perp)
  Eigen::Index r = 0;
  RealVector dropped;  // discarded spectrum, for reporting
};

inline TruncatedSolution truncate(const Brad& brad, const Matrix& Y,
                                  const TruncationPolicy& policy = {}) {
  Matrix M = brad.K * Y * brad.K.adjoint();
  M = 0.5 * (M + Matrix(M.adjoint()));
  HermitianEig eig = hermitian_eig(M);
  const double rho = eig.eigenvalues.cwiseAbs().maxCoeff();
  const double cut = policy.tau * rho;

  Eigen::Index r = 0;
  while (r < eig.eigenvalues.size() && eig.eigenvalues(r) > cut) ++r;
  if (r == 0) throw AllTruncated("truncate: no eigenvalue above the threshold");

  TruncatedSolution out;
  out.r = r;
  out.Qhat = eig.Q.leftCols(r);
  out.Yhat = eig.eigenvalues.head(r);
  out.dropped = eig.eigenvalues.tail(eig.eigenvalues.size() - r);
  // T1 = K^+ Qhat via least squares; K has full column rank
  Matrix T1 = Eigen::HouseholderQR<Matrix>(brad.K).solve(out.Qhat);
  out.Hhat = brad.H * T1;
  out.Lhat = out.Qhat;  // range(Qcheck)^perp = range(Qhat) for the unitary eigenbasis
  return out;
}

// Algorithm 2 pipeline with K <- Qhat, H <- Hhat, L <- Lhat, Y <- diag(Yhat);
// the complement bases have (j+1)p - r columns each.
inline double truncated_residual_norm(const Brad& brad, const TruncatedSolution& trunc,
                                      NormChoice norm = NormChoice::Frobenius) {
  const Matrix Yd = trunc.Yhat.cast<Complex>().asDiagonal();
  return residual_norm_small(trunc.Qhat, trunc.Hhat, trunc.Lhat, brad.ctilde(), Yd, norm);
}

inline double truncated_residual_norm_generalized(const Brad& brad,
                                                  const TruncatedSolution& trunc,
                                                  const SparseMatrix& E,
                                                  NormChoice norm = NormChoice::Frobenius) {
  const Matrix Yd = trunc.Yhat.cast<Complex>().asDiagonal();
  auto c = residual_detail::compress(trunc.Qhat, trunc.Hhat, trunc.Lhat, brad.ctilde(), Yd);
  Matrix tall = SparseMatrix(E.adjoint()) * (brad.V * c.UT);
  return residual_detail::norm_from_factor(tall, c.dc, norm);
}

inline RealVector truncated_residual_rank_profile(const Brad& brad,
                                                  const TruncatedSolution& trunc) {
  const Matrix Yd = trunc.Yhat.cast<Complex>().asDiagonal();
  return residual_rank_profile_small(trunc.Qhat, trunc.Hhat, trunc.Lhat, brad.ctilde(), Yd);
}

}  // namespace rkcare
