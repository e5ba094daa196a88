#include <catch2/catch_amalgamated.hpp>

#include "rkcare/dense_care.hpp"
#include "test_helpers.hpp"

using namespace rkcare;
using rkcare::testing::random_complex;

namespace {

double care_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& Y) {
  return (A.adjoint() * Y + Y * A + C.adjoint() * C - Y * B * B.adjoint() * Y).norm();
}

Matrix random_stable_dense(Eigen::Index d, std::mt19937& rng) {
  Matrix M = random_complex(d, d, rng);
  return M - (M.norm() + 1.0) * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("scalar Riccati equation", "[dense_care]") {
  // -2y + 1 - y^2 = 0 with a = -1, b = c = 1: y = sqrt(2) - 1
  Matrix a = -Matrix::Identity(1, 1), b = Matrix::Identity(1, 1), c = Matrix::Identity(1, 1);
  DenseCareSolution sol = solve_care_dense(a, b, c);
  REQUIRE(std::abs(sol.Y(0, 0) - Complex(std::sqrt(2.0) - 1.0, 0)) < 1e-14);
  REQUIRE(sol.closed_loop_spectrum.size() == 1);
  REQUIRE(std::abs(sol.closed_loop_spectrum(0) - Complex(-std::sqrt(2.0), 0)) < 1e-13);
}

TEST_CASE("zero C gives the zero solution", "[dense_care]") {
  std::mt19937 rng(2);
  Matrix A = random_stable_dense(6, rng);
  Matrix B = random_complex(6, 2, rng);
  DenseCareSolution sol = solve_care_dense(A, B, Matrix::Zero(1, 6));
  REQUIRE(sol.Y.norm() < 1e-12);
}

TEST_CASE("dense solver agrees with a Newton-Kleinman oracle", "[dense_care]") {
  for (unsigned seed = 0; seed < 60; ++seed) {
    std::mt19937 rng(1000 + seed);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(seed % 11);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % 3);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>((seed / 3) % 3);
    Matrix A = random_stable_dense(d, rng);
    Matrix B = random_complex(d, m, rng);
    Matrix C = random_complex(p, d, rng);

    DenseCareSolution sol = solve_care_dense(A, B, C);
    Matrix oracle = newton_kleinman_oracle(A, B, C);

    INFO("seed " << seed << " d " << d);
    REQUIRE((sol.Y - oracle).norm() < 1e-8 * std::max(1.0, oracle.norm()));
    // Hermitian positive semidefinite
    REQUIRE((sol.Y - sol.Y.adjoint()).norm() < 1e-12 * std::max(1.0, sol.Y.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(sol.Y);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-10 * std::max(1.0, sol.Y.norm()));
    // closed loop is strictly stable
    for (Eigen::Index i = 0; i < sol.closed_loop_spectrum.size(); ++i)
      REQUIRE(sol.closed_loop_spectrum(i).real() < 0.0);
    // tiny residual
    REQUIRE(care_residual(A, B, C, sol.Y) <
            1e-10 * (C.adjoint() * C).norm() + 1e-10 * sol.Y.norm() * A.norm());
  }
}

TEST_CASE("lyapunov solver satisfies F^H P + P F + W = 0", "[dense_care]") {
  std::mt19937 rng(77);
  Matrix F = random_stable_dense(8, rng);
  Matrix G = random_complex(8, 8, rng);
  Matrix W = G * G.adjoint();
  Matrix P = solve_lyapunov_dense(F, W);
  REQUIRE((F.adjoint() * P + P * F + W).norm() < 1e-11 * W.norm());
  REQUIRE((P - P.adjoint()).norm() < 1e-11 * P.norm());
}

TEST_CASE("hamiltonian eigenvalues on the imaginary axis are rejected", "[dense_care]") {
  // a = 0, b = 0: Hamiltonian is [[0, 0], [-c^2, 0]], eigenvalues at 0
  Matrix a = Matrix::Zero(1, 1), b = Matrix::Zero(1, 1), c = Matrix::Identity(1, 1);
  REQUIRE_THROWS_AS(solve_care_dense(a, b, c), NoStabilizingSolution);
}

TEST_CASE("dimension cap guards the dense path", "[dense_care]") {
  std::mt19937 rng(5);
  Matrix A = random_stable_dense(4, rng);
  Matrix B = random_complex(4, 1, rng);
  Matrix C = random_complex(1, 4, rng);
  REQUIRE_THROWS_AS(solve_care_dense(A, B, C, /*cap=*/3), CapExceeded);
}
