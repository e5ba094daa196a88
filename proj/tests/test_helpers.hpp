#pragma once

#include <random>

#include "rkcare/problem.hpp"

namespace rkcare::testing {

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = Complex(dist(rng), dist(rng));
  return M;
}

inline Matrix random_real(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = Complex(dist(rng), 0.0);
  return M;
}

// Dense random stable A (shifted so its field of values sits in the open left
// half-plane), stored sparse, with dense random B and C.
inline CareProblem random_stable_problem(Eigen::Index n, Eigen::Index p, Eigen::Index m,
                                         unsigned seed, bool complex_data = true) {
  std::mt19937 rng(seed);
  Matrix M = complex_data ? random_complex(n, n, rng) : random_real(n, n, rng);
  M -= (M.norm() + 1.0) * Matrix::Identity(n, n);
  CareProblem raw;
  raw.A = M.sparseView();
  raw.B = complex_data ? random_complex(n, m, rng) : random_real(n, m, rng);
  raw.C = complex_data ? random_complex(p, n, rng) : random_real(p, n, rng);
  return validate(std::move(raw));
}

inline SparseMatrix identity_sparse(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

// SPD tridiagonal mass matrix (diag 4, off-diag 1).
inline SparseMatrix spd_tridiag(Eigen::Index n) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, Complex(4.0, 0.0));
    if (i + 1 < n) {
      trips.emplace_back(i, i + 1, Complex(1.0, 0.0));
      trips.emplace_back(i + 1, i, Complex(1.0, 0.0));
    }
  }
  SparseMatrix E(n, n);
  E.setFromTriplets(trips.begin(), trips.end());
  return E;
}

}  // namespace rkcare::testing
