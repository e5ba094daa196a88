#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rkcare/matrix_market.hpp"
#include "rkcare/problem.hpp"
#include "test_helpers.hpp"

using namespace rkcare;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("rkcare_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("validate rejects inconsistent dimensions", "[problem]") {
  std::mt19937 rng(3);
  CareProblem p;
  p.A = rkcare::testing::random_complex(5, 5, rng).sparseView();
  p.B = rkcare::testing::random_complex(4, 1, rng);
  p.C = rkcare::testing::random_complex(1, 5, rng);
  REQUIRE_THROWS_AS(validate(p), DimensionMismatch);
  p.B = rkcare::testing::random_complex(5, 1, rng);
  p.C = rkcare::testing::random_complex(1, 4, rng);
  REQUIRE_THROWS_AS(validate(p), DimensionMismatch);
  p.C = rkcare::testing::random_complex(1, 5, rng);
  p.E = rkcare::testing::random_complex(4, 4, rng).sparseView();
  REQUIRE_THROWS_AS(validate(p), DimensionMismatch);
  p.E = SparseMatrix(5, 5);  // exactly singular
  REQUIRE_THROWS_AS(validate(p), SingularE);
}

TEST_CASE("fdm generator matches the 5-point stencil", "[problem]") {
  SECTION("g = 3 interior diagonal is -4/h^2") {
    FdmSpec spec;
    spec.g = 3;
    CareProblem p = fdm_2d_problem(spec);
    const double h = 0.25;
    REQUIRE(p.n == 9);
    for (Eigen::Index k = 0; k < 9; ++k)
      REQUIRE(std::abs(Matrix(p.A)(k, k) - Complex(-4.0 / (h * h), 0)) < 1e-12);
  }
  SECTION("g = 10 against a brute-force assembly") {
    FdmSpec spec;
    spec.g = 10;
    CareProblem p = fdm_2d_problem(spec);
    const Eigen::Index g = 10;
    const double h = 1.0 / 11.0;
    Matrix A = Matrix::Zero(100, 100);
    Matrix B = Matrix::Zero(100, 1), C = Matrix::Zero(1, 100);
    for (Eigen::Index iy = 0; iy < g; ++iy) {
      for (Eigen::Index ix = 0; ix < g; ++ix) {
        const double x = (ix + 1) * h, y = (iy + 1) * h;
        const Eigen::Index k = iy * g + ix;
        A(k, k) = -4.0 / (h * h);
        const double fx = spec.convection_x * x, fy = spec.convection_y * y;
        if (ix + 1 < g) A(k, k + 1) = 1.0 / (h * h) - fx / (2 * h);
        if (ix > 0) A(k, k - 1) = 1.0 / (h * h) + fx / (2 * h);
        if (iy + 1 < g) A(k, k + g) = 1.0 / (h * h) - fy / (2 * h);
        if (iy > 0) A(k, k - g) = 1.0 / (h * h) + fy / (2 * h);
        if (spec.b_range.lo < x && x <= spec.b_range.hi) B(k, 0) = 1.0;
        if (spec.c_range.lo < x && x <= spec.c_range.hi) C(0, k) = 1.0;
      }
    }
    REQUIRE((Matrix(p.A) - A).norm() < 1e-12 * A.norm());
    REQUIRE((p.B - B).norm() == 0.0);
    REQUIRE((p.C - C).norm() == 0.0);
    REQUIRE(p.B.cwiseAbs().sum() > 0.0);
    REQUIRE(p.C.cwiseAbs().sum() > 0.0);
  }
  SECTION("zero convection gives a Hermitian negative-definite operator") {
    FdmSpec spec;
    spec.g = 5;
    spec.convection_x = 0.0;
    spec.convection_y = 0.0;
    CareProblem p = fdm_2d_problem(spec);
    Matrix A = Matrix(p.A);
    REQUIRE((A - A.adjoint()).norm() < 1e-12 * A.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    REQUIRE(es.eigenvalues().maxCoeff() < 0.0);
  }
  SECTION("an indicator interval missing every node is rejected") {
    FdmSpec spec;
    spec.g = 4;
    spec.b_range = {0.01, 0.02};
    REQUIRE_THROWS_AS(fdm_2d_problem(spec), EmptyIndicator);
  }
  SECTION("large grid sizes assemble") {
    FdmSpec spec;
    spec.g = 100;
    CareProblem p = fdm_2d_problem(spec);
    REQUIRE(p.n == 10000);
    REQUIRE(p.A.nonZeros() > 4 * 10000);
  }
}

TEST_CASE("matrix market round trips", "[problem]") {
  auto dir = temp_dir("mm");
  std::mt19937 rng(17);

  SECTION("sparse complex") {
    SparseMatrix M = rkcare::testing::random_complex(7, 5, rng).sparseView();
    const std::string path = (dir / "m.mtx").string();
    write_matrix_market(path, M);
    SparseMatrix back = load_matrix_market(path);
    REQUIRE((Matrix(back) - Matrix(M)).norm() < 1e-12 * Matrix(M).norm());
  }
  SECTION("dense real") {
    Matrix M = rkcare::testing::random_real(4, 6, rng);
    const std::string path = (dir / "d.mtx").string();
    write_matrix_market_dense(path, M);
    Matrix back = load_matrix_market_dense(path);
    REQUIRE((back - M).norm() < 1e-12 * M.norm());
  }
  SECTION("a broken header reports the line") {
    const std::string path = (dir / "bad.mtx").string();
    std::ofstream(path) << "%%MatrixMarket matrix nonsense real general\n1 1 1\n1 1 1.0\n";
    try {
      load_matrix_market(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
}

TEST_CASE("problem manifest round trip", "[problem]") {
  auto dir = temp_dir("manifest");
  CareProblem p = rkcare::testing::random_stable_problem(20, 2, 1, 42);
  p.E = rkcare::testing::spd_tridiag(20);
  p = validate(std::move(p));

  write_problem(p, dir.string());
  CareProblem back = load_problem_manifest((dir / "manifest.json").string());
  REQUIRE(back.validated);
  REQUIRE(back.n == 20);
  REQUIRE(back.m == 1);
  REQUIRE(back.p == 2);
  REQUIRE(back.E.has_value());
  REQUIRE((Matrix(back.A) - Matrix(p.A)).norm() < 1e-12 * Matrix(p.A).norm());
  REQUIRE((Matrix(*back.E) - Matrix(*p.E)).norm() < 1e-12);
  REQUIRE((back.B - p.B).norm() < 1e-12 * p.B.norm());
  REQUIRE((back.C - p.C).norm() < 1e-12 * p.C.norm());
}

TEST_CASE("manifest with an fdm spec generates the problem", "[problem]") {
  auto dir = temp_dir("fdmspec");
  const std::string path = (dir / "problem.json").string();
  std::ofstream(path) << R"({"fdm": {"g": 6, "fx": 10.0, "fy": 100.0}})";
  CareProblem p = load_problem_manifest(path);
  CareProblem ref = fdm_2d_problem({.g = 6});
  REQUIRE((Matrix(p.A) - Matrix(ref.A)).norm() < 1e-12 * Matrix(ref.A).norm());
}
