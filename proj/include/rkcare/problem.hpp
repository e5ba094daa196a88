#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkcare/errors.hpp"
#include "rkcare/kernels.hpp"
#include "rkcare/matrix_market.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

// The CARE quadruple A^H X E + E^H X A + C^H C - E^H X B B^H X E = 0;
// absent E means the identity.
struct CareProblem {
  SparseMatrix A;               // n x n
  std::optional<SparseMatrix> E;  // n x n, nonsingular
  Matrix B;                     // n x m
  Matrix C;                     // p x n

  Eigen::Index n = 0, m = 0, p = 0;
  bool validated = false;
};

inline CareProblem validate(CareProblem problem) {
  const Eigen::Index n = problem.A.rows();
  if (problem.A.cols() != n)
    throw DimensionMismatch("A must be square");
  if (problem.E && (problem.E->rows() != n || problem.E->cols() != n))
    throw DimensionMismatch("E must match the order of A");
  if (problem.B.rows() != n)
    throw DimensionMismatch("B must have n rows");
  if (problem.C.cols() != n)
    throw DimensionMismatch("C must have n columns");
  const Eigen::Index m = problem.B.cols(), p = problem.C.rows();
  if (m < 1 || p < 1) throw DimensionMismatch("B and C must be nonempty");
  if (10 * std::max(m, p) > n)
    std::cerr << "warning: p or m exceeds n/10; the method targets p,m << n\n";
  if (problem.E) {
    SparseSolver lu(*problem.E);
    if (!lu.ok()) throw SingularE("E is (numerically) singular");
  }
  problem.n = n;
  problem.m = m;
  problem.p = p;
  problem.validated = true;
  return problem;
}

struct Interval {
  double lo = 0.0, hi = 0.0;  // captures lo < x <= hi
  bool contains(double x) const { return lo < x && x <= hi; }
};

struct FdmSpec {
  Eigen::Index g = 30;
  double convection_x = 10.0;   // f_x(x) = convection_x * x
  double convection_y = 100.0;  // f_y(y) = convection_y * y
  Interval b_range{0.1, 0.3};
  Interval c_range{0.7, 0.9};
};

// -Laplace + f_x(x) u_x + f_y(y) u_y on the unit square, homogeneous
// Dirichlet boundary, 5-point stencil, central differences for convection,
// interior nodes of a (g+2)^2 lattice ordered lexicographically, h = 1/(g+1).
// The assembled A is the negated discrete operator, so A is stable.
// B (resp. C^H) is the 0/1 indicator of nodes with x-coordinate in b_range
// (resp. c_range).
inline CareProblem fdm_2d_problem(const FdmSpec& spec) {
  const Eigen::Index g = spec.g;
  if (g < 2) throw Error("fdm_2d_problem: grid must satisfy g >= 2");
  const Eigen::Index n = g * g;
  const double h = 1.0 / static_cast<double>(g + 1);
  const double h2 = h * h;

  auto node = [g](Eigen::Index ix, Eigen::Index iy) { return iy * g + ix; };

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  Matrix B = Matrix::Zero(n, 1);
  Matrix C = Matrix::Zero(1, n);
  Eigen::Index nb = 0, nc = 0;

  for (Eigen::Index iy = 0; iy < g; ++iy) {
    const double y = static_cast<double>(iy + 1) * h;
    const double fy = spec.convection_y * y;
    for (Eigen::Index ix = 0; ix < g; ++ix) {
      const double x = static_cast<double>(ix + 1) * h;
      const double fx = spec.convection_x * x;
      const Eigen::Index k = node(ix, iy);
      trips.emplace_back(k, k, Complex(-4.0 / h2, 0.0));
      if (ix + 1 < g) trips.emplace_back(k, node(ix + 1, iy), Complex(1.0 / h2 - fx / (2 * h), 0.0));
      if (ix > 0) trips.emplace_back(k, node(ix - 1, iy), Complex(1.0 / h2 + fx / (2 * h), 0.0));
      if (iy + 1 < g) trips.emplace_back(k, node(ix, iy + 1), Complex(1.0 / h2 - fy / (2 * h), 0.0));
      if (iy > 0) trips.emplace_back(k, node(ix, iy - 1), Complex(1.0 / h2 + fy / (2 * h), 0.0));
      if (spec.b_range.contains(x)) {
        B(k, 0) = 1.0;
        ++nb;
      }
      if (spec.c_range.contains(x)) {
        C(0, k) = 1.0;
        ++nc;
      }
    }
  }
  if (nb == 0) throw EmptyIndicator("fdm_2d_problem: b_range captures no grid node");
  if (nc == 0) throw EmptyIndicator("fdm_2d_problem: c_range captures no grid node");

  CareProblem problem;
  problem.A.resize(n, n);
  problem.A.setFromTriplets(trips.begin(), trips.end());
  problem.B = std::move(B);
  problem.C = std::move(C);
  return validate(std::move(problem));
}

// Problem manifest: JSON naming the Matrix Market paths (relative to the
// manifest) or an fdm generator spec.
inline CareProblem load_problem_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  if (j.contains("fdm")) {
    const auto& f = j["fdm"];
    FdmSpec spec;
    spec.g = f.value("g", 30);
    spec.convection_x = f.value("fx", 10.0);
    spec.convection_y = f.value("fy", 100.0);
    if (f.contains("b")) spec.b_range = {f["b"][0].get<double>(), f["b"][1].get<double>()};
    if (f.contains("c")) spec.c_range = {f["c"][0].get<double>(), f["c"][1].get<double>()};
    return fdm_2d_problem(spec);
  }
  const auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) { return (dir / p).string(); };
  CareProblem problem;
  problem.A = load_matrix_market(resolve(j.at("A").get<std::string>()));
  problem.B = load_matrix_market_dense(resolve(j.at("B").get<std::string>()));
  problem.C = load_matrix_market_dense(resolve(j.at("C").get<std::string>()));
  if (j.contains("E")) problem.E = load_matrix_market(resolve(j["E"].get<std::string>()));
  return validate(std::move(problem));
}

inline void write_problem(const CareProblem& problem, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_matrix_market((fs::path(dir) / "A.mtx").string(), problem.A);
  write_matrix_market_dense((fs::path(dir) / "B.mtx").string(), problem.B);
  write_matrix_market_dense((fs::path(dir) / "C.mtx").string(), problem.C);
  nlohmann::json j;
  j["A"] = "A.mtx";
  j["B"] = "B.mtx";
  j["C"] = "C.mtx";
  if (problem.E) {
    write_matrix_market((fs::path(dir) / "E.mtx").string(), *problem.E);
    j["E"] = "E.mtx";
  }
  std::ofstream os((fs::path(dir) / "manifest.json").string());
  os << j.dump(2) << "\n";
}

}  // namespace rkcare
