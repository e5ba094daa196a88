#pragma once

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rkcare/brad.hpp"
#include "rkcare/dense_care.hpp"
#include "rkcare/errors.hpp"
#include "rkcare/problem.hpp"
#include "rkcare/residual.hpp"
#include "rkcare/shifts.hpp"
#include "rkcare/truncation.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

// L = K (Galerkin), L = H (Petrov-Galerkin onto A^H K_j), or
// L = alpha H - beta K.
struct ProjectorChoice {
  enum class Variant { GalerkinK, PetrovH, Combo };
  Variant variant = Variant::GalerkinK;
  Complex alpha{1.0, 0.0}, beta{1.0, 0.0};

  static ProjectorChoice galerkin_k() { return {Variant::GalerkinK, {}, {}}; }
  static ProjectorChoice petrov_h() { return {Variant::PetrovH, {}, {}}; }
  static ProjectorChoice combo(Complex a, Complex b) {
    if (std::abs(a) + std::abs(b) == 0.0) throw Error("combo: |alpha|+|beta| must be nonzero");
    return {Variant::Combo, a, b};
  }
  std::string name() const {
    switch (variant) {
      case Variant::GalerkinK: return "K";
      case Variant::PetrovH: return "H";
      default: return "combo";
    }
  }
};

inline Matrix build_L_small(const Matrix& K, const Matrix& H, const ProjectorChoice& choice) {
  switch (choice.variant) {
    case ProjectorChoice::Variant::GalerkinK: return K;
    case ProjectorChoice::Variant::PetrovH: return H;
    default: return choice.alpha * H - choice.beta * K;
  }
}

inline Matrix build_L(const Brad& brad, const ProjectorChoice& choice) {
  return build_L_small(brad.K, brad.H, choice);
}

// Reduced triple A_j = H^H L (K^H L)^{-1}, B_j = K^H (V^H B),
// C_j = Ctilde^H L (K^H L)^{-1}.
struct ProjectedCare {
  Matrix Aj;  // jp x jp
  Matrix Bj;  // jp x m
  Matrix Cj;  // p x jp
  double cond_LtK = 0.0;
};

namespace projector_detail {

// X = M * KtL^{-1}
inline Matrix right_solve(const Matrix& M, const Eigen::PartialPivLU<Matrix>& lu_t) {
  return lu_t.solve(M.transpose()).transpose();
}

}  // namespace projector_detail

inline ProjectedCare project_small(const Matrix& K, const Matrix& H, const Matrix& L,
                                   const Matrix& Ctilde, const Matrix& VtB) {
  const Eigen::Index q = K.cols();
  Matrix KtL = K.adjoint() * L;
  Eigen::JacobiSVD<Matrix> svd(KtL);
  const double smin = svd.singularValues()(q - 1), smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e14)
    throw SingularLtK("project: K^H L is numerically singular for this subspace");
  Eigen::PartialPivLU<Matrix> lu_t(KtL.transpose());

  ProjectedCare out;
  out.cond_LtK = smax / smin;
  out.Aj = projector_detail::right_solve(H.adjoint() * L, lu_t);
  out.Bj = K.adjoint() * VtB;
  out.Cj = projector_detail::right_solve(Ctilde.adjoint() * L, lu_t);
  return out;
}

inline ProjectedCare project(const Brad& brad, const CareProblem& problem, const Matrix& L) {
  return project_small(brad.K, brad.H, L, brad.ctilde(), brad.V.adjoint() * problem.B);
}

inline Matrix solve_step(const ProjectedCare& projected) {
  return solve_care_dense(projected.Aj, projected.Bj, projected.Cj).Y;
}

// X_j = Z Y_j Z^H, Z = V K, held in factored form. When the Arnoldi
// extension saturates the whole space (lucky breakdown with V square),
// the solve falls back to the full-space basis and Z = V.
struct LowRankSolution {
  Brad brad;
  Matrix Yj;  // jp x jp Hermitian (n x n in the full-space case)
  bool full_space = false;

  Matrix Z() const { return full_space ? brad.V : brad.Z(); }
  Matrix dense(Eigen::Index dense_cap = 500) const {
    if (brad.V.rows() > dense_cap) throw CapExceeded("LowRankSolution: n exceeds the dense cap");
    const Matrix Zm = Z();
    return Zm * Yj * Zm.adjoint();
  }
};

struct StepRecord {
  Eigen::Index j = 0;
  Eigen::Index dim = 0;               // subspace dimension jp
  double rel_residual = std::numeric_limits<double>::quiet_NaN();
  Eigen::Index trunc_rank = -1;       // -1 when truncation inactive
  double trunc_rel_residual = std::numeric_limits<double>::quiet_NaN();
  double cond_LtK = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  bool solve_failed = false;       // reduced CARE had no stabilizing solution
  bool shift_skipped = false;      // shift hit the spectrum and was skipped
  bool projection_failed = false;  // K^H L singular for this subspace
};

using ConvergenceHistory = std::vector<StepRecord>;

struct RunOptions {
  double tol = 1e-10;
  std::size_t max_blocks = 100000;
  bool truncate = false;
  double trunc_threshold = 1e-12;
  NormChoice norm = NormChoice::Frobenius;
  // Project through the equivalent BRAD with orthonormal K. The spanned
  // trial and test spaces are unchanged for every L choice (L R^{-1} spans
  // range(L)), but cond(K^H L) stays moderate when nearby shifts make the
  // raw K ill conditioned.
  bool orthonormalize = true;
};

struct RunResult {
  LowRankSolution solution;
  std::optional<TruncatedSolution> truncated;
  ConvergenceHistory history;
  bool converged = false;
  double final_rel_residual = std::numeric_limits<double>::quiet_NaN();
  double final_trunc_rel_residual = std::numeric_limits<double>::quiet_NaN();
};

inline double residual_denominator(const CareProblem& problem) {
  // ||C C^H||_F, a p x p product
  return (problem.C * problem.C.adjoint()).norm();
}

// Algorithm: extend -> build_L -> project -> solve -> residual
// (-> truncate -> truncated residual) until the relative residual meets tol
// or the shifts are exhausted.
inline RunResult run(const CareProblem& problem, const ShiftSequence& shifts,
                     const ProjectorChoice& choice, const RunOptions& options = {}) {
  if (!problem.validated) throw Error("run: problem must be validated");
  const double denom = residual_denominator(problem);

  RunResult result;
  Brad brad = brad_init(problem);
  Matrix VtB = brad.V.adjoint() * problem.B;
  Matrix Y;
  Brad proj_brad;       // basis the current Y lives in
  bool have_iterate = false;
  const std::size_t budget = std::min<std::size_t>(shifts.size(), options.max_blocks);

  for (std::size_t step = 0; step < budget; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    StepRecord rec;
    rec.j = brad.j + 1;

    try {
      brad = extend(brad, problem, shifts[step]);
    } catch (const ShiftHitsSpectrum& e) {
      std::cerr << "warning: " << e.what() << "; skipping shift\n";
      rec.shift_skipped = true;
      rec.j = brad.j;
      result.history.push_back(rec);
      continue;
    } catch (const Breakdown&) {
      // Lucky termination. If V already spans the whole space, solve the
      // projected (= original) equation directly in that basis.
      if (brad.V.cols() == problem.n) {
        const Matrix Vf = brad.V;
        Matrix Ad = Matrix(problem.A);
        Matrix Cd = problem.C;
        if (problem.E) {
          const Matrix Einv = Matrix(*problem.E).partialPivLu().inverse();
          Ad = Ad * Einv;
          Cd = Cd * Einv;
        }
        const Matrix Ared = Vf.adjoint() * Ad * Vf;
        const Matrix Bred = Vf.adjoint() * problem.B;
        const Matrix Cred = Cd * Vf;
        Y = solve_care_dense(Ared, Bred, Cred).Y;
        const Matrix X = Vf * Y * Vf.adjoint();
        StepRecord full;
        full.j = brad.j + 1;
        full.dim = problem.n;
        full.rel_residual = dense_residual_oracle(problem, X, problem.n) / denom;
        result.final_rel_residual = full.rel_residual;
        result.history.push_back(full);
        result.converged = full.rel_residual <= options.tol;
        result.solution.full_space = true;
        break;
      }
      break;  // invariant subspace; return the best iterate so far
    }
    VtB.conservativeResize(brad.V.cols(), Eigen::NoChange);
    VtB.bottomRows(brad.p) = brad.V.rightCols(brad.p).adjoint() * problem.B;

    rec.dim = brad.K.cols();
    Brad pb = options.orthonormalize ? orthonormalize_K(brad) : brad;
    const Matrix L = build_L(pb, choice);
    ProjectedCare projected;
    try {
      projected = project_small(pb.K, pb.H, L, pb.ctilde(), VtB);
    } catch (const SingularLtK& e) {
      std::cerr << "warning: step " << rec.j << ": " << e.what() << "\n";
      rec.projection_failed = true;
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.history.push_back(rec);
      continue;
    }
    rec.cond_LtK = projected.cond_LtK;

    try {
      Y = solve_care_dense(projected.Aj, projected.Bj, projected.Cj).Y;
    } catch (const NoStabilizingSolution& e) {
      std::cerr << "warning: step " << rec.j << ": " << e.what() << "\n";
      rec.solve_failed = true;
      // keep the previous iterate, zero-padded to the new dimension (phase-
      // normalized QR makes the leading basis columns nested across steps)
      Matrix Ypad = Matrix::Zero(rec.dim, rec.dim);
      if (have_iterate && Y.size() > 0) Ypad.topLeftCorner(Y.rows(), Y.cols()) = Y;
      Y = Ypad;
    }
    have_iterate = true;

    const double res = problem.E
                           ? residual_norm_generalized(pb, L, Y, *problem.E, options.norm)
                           : residual_norm(pb, L, Y, options.norm);
    rec.rel_residual = res / denom;
    result.final_rel_residual = rec.rel_residual;

    if (options.truncate) {
      try {
        TruncationPolicy policy{options.trunc_threshold};
        TruncatedSolution trunc = truncate(pb, Y, policy);
        const double tres =
            problem.E ? truncated_residual_norm_generalized(pb, trunc, *problem.E, options.norm)
                      : truncated_residual_norm(pb, trunc, options.norm);
        rec.trunc_rank = trunc.r;
        rec.trunc_rel_residual = tres / denom;
        result.truncated = std::move(trunc);
        result.final_trunc_rel_residual = rec.trunc_rel_residual;
      } catch (const AllTruncated&) {
        result.truncated.reset();
      }
    }

    proj_brad = std::move(pb);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);

    const double best = options.truncate && std::isfinite(rec.trunc_rel_residual)
                            ? std::min(rec.rel_residual, rec.trunc_rel_residual)
                            : rec.rel_residual;
    if (best <= options.tol) {
      result.converged = true;
      break;
    }
  }

  if (result.solution.full_space || !have_iterate)
    result.solution.brad = std::move(brad);
  else
    result.solution.brad = std::move(proj_brad);
  result.solution.Yj = std::move(Y);
  return result;
}

}  // namespace rkcare
