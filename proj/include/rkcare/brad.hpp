#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/problem.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

// Generalized orthonormal block rational Arnoldi decomposition
//   A^H V_{j+1} K_j = E^H V_{j+1} H_j
// with orthonormal V, block upper Hessenberg K and H, and
// C^H = E^H V Ctilde, Ctilde = [R0; 0].
struct Brad {
  Matrix V;   // n x (j+1)p
  Matrix K;   // (j+1)p x jp
  Matrix H;   // (j+1)p x jp
  Matrix R0;  // p x p upper triangular from the initial QR
  std::vector<Complex> poles;       // shifts consumed so far
  std::vector<double> subdiag_cond; // condition of each subdiagonal block of K
  Eigen::Index j = 0;               // completed blocks
  Eigen::Index p = 0;

  Matrix ctilde() const {
    Matrix Ct = Matrix::Zero(V.cols(), p);
    Ct.topRows(p) = R0;
    return Ct;
  }
  Matrix Z() const { return V * K; }  // n x jp, spans the projection space
};

inline Brad brad_init(const CareProblem& problem) {
  Matrix W = problem.C.adjoint();
  if (problem.E) {
    SparseSolver elu(SparseMatrix(problem.E->adjoint()));
    if (!elu.ok()) throw SingularE("brad_init: E^H factorization failed");
    W = elu.solve(W);
  }
  ThinQr qr = thin_qr(W);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < qr.R.rows(); ++i) {
    rmax = std::max(rmax, std::abs(qr.R(i, i)));
    rmin = std::min(rmin, std::abs(qr.R(i, i)));
  }
  if (rmin < 1e-12 * rmax)
    throw RankDeficientC("brad_init: C^H has numerically dependent columns");
  Brad brad;
  brad.p = problem.C.rows();
  brad.V = std::move(qr.Q);
  brad.R0 = std::move(qr.R);
  brad.K.resize(brad.p, 0);
  brad.H.resize(brad.p, 0);
  return brad;
}

// One rational Arnoldi step with identity (last-block) continuation. The new
// direction is (A^H - s E^H)^{-1} E^H V t, orthogonalized against V by
// classical Gram-Schmidt applied twice.
inline Brad extend(const Brad& brad, const CareProblem& problem,
                   const ShiftedFactorization& fact) {
  const Eigen::Index p = brad.p;
  const Eigen::Index jc = brad.V.cols();  // (j+1)p
  const Complex s = fact.shift();

  Matrix rhs = brad.V.rightCols(p);
  if (problem.E) rhs = SparseMatrix(problem.E->adjoint()) * rhs;
  Matrix q_raw = fact.solve(rhs);
  const double scale = q_raw.norm();

  Matrix coeff = brad.V.adjoint() * q_raw;
  Matrix rem = q_raw - brad.V * coeff;
  Matrix coeff2 = brad.V.adjoint() * rem;
  rem -= brad.V * coeff2;
  coeff += coeff2;

  ThinQr qr = thin_qr(rem);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p; ++i) {
    rmax = std::max(rmax, std::abs(qr.R(i, i)));
    rmin = std::min(rmin, std::abs(qr.R(i, i)));
  }
  if (rmin <= 1e-12 * std::max(scale, rmax))
    throw Breakdown("extend: new block is numerically rank deficient");

  Brad out;
  out.p = p;
  out.j = brad.j + 1;
  out.poles = brad.poles;
  out.poles.push_back(s);
  out.subdiag_cond = brad.subdiag_cond;
  out.subdiag_cond.push_back(rmax / rmin);
  out.R0 = brad.R0;

  out.V.resize(brad.V.rows(), jc + p);
  out.V << brad.V, qr.Q;

  // c so that (A^H - s E^H)^{-1} E^H V t = [V V_new] c
  Matrix c(jc + p, p);
  c << coeff, qr.R;
  // t selects the last p columns of the old V, zero padded
  Matrix t_hat = Matrix::Zero(jc + p, p);
  t_hat.block(jc - p, 0, p, p) = Matrix::Identity(p, p);

  out.K = Matrix::Zero(jc + p, brad.K.cols() + p);
  out.K.topLeftCorner(jc, brad.K.cols()) = brad.K;
  out.K.rightCols(p) = c;
  out.H = Matrix::Zero(jc + p, brad.H.cols() + p);
  out.H.topLeftCorner(jc, brad.H.cols()) = brad.H;
  out.H.rightCols(p) = t_hat + s * c;
  return out;
}

inline Brad extend(const Brad& brad, const CareProblem& problem, Complex s) {
  return extend(brad, problem, make_shifted_factorization(problem.A, problem.E, s));
}

// Equivalent BRAD with orthonormal K (Remark: K = QR, H <- H R^{-1}), so
// Z = V K has orthonormal columns.
inline Brad orthonormalize_K(const Brad& brad) {
  ThinQr qr = thin_qr(brad.K);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < qr.R.rows(); ++i) {
    rmax = std::max(rmax, std::abs(qr.R(i, i)));
    rmin = std::min(rmin, std::abs(qr.R(i, i)));
  }
  if (qr.R.rows() > 0 && rmin < 1e-14 * rmax)
    throw RankDeficient("orthonormalize_K: K lost full rank (corrupted BRAD)");
  Brad out = brad;
  out.K = qr.Q;
  out.H = qr.R.template triangularView<Eigen::Upper>()
              .template solve<Eigen::OnTheRight>(brad.H);
  return out;
}

}  // namespace rkcare
