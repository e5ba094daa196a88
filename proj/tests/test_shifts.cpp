#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rkcare/shifts.hpp"
#include "test_helpers.hpp"

using namespace rkcare;

TEST_CASE("shift sequence construction rules", "[shifts]") {
  REQUIRE_THROWS_AS(ShiftSequence::from_list({}), EmptyList);
  REQUIRE_THROWS_AS(
      ShiftSequence::from_list({Complex(1, std::numeric_limits<double>::infinity())}),
      InfiniteShift);
  REQUIRE_THROWS_AS(ShiftSequence::from_list({Complex(2, 0), Complex(2, 0)}), Error);
  REQUIRE_NOTHROW(ShiftSequence::from_list({Complex(2, 0), Complex(2, 0)}, true));

  ShiftSequence seq = ShiftSequence::from_list({Complex(3, 0), Complex(1, 2), Complex(1, -2)});
  REQUIRE(seq.size() == 3);
  REQUIRE(seq[1] == Complex(1, 2));
  REQUIRE(seq.conjugate_closed());
  ShiftSequence open = ShiftSequence::from_list({Complex(1, 2)});
  REQUIRE_FALSE(open.conjugate_closed());
}

TEST_CASE("heuristic shifts bracket the mirrored spectral extent", "[shifts]") {
  SECTION("diagonal two-pole problem") {
    Matrix Ad = Matrix::Zero(2, 2);
    Ad(0, 0) = Complex(-1, 0);
    Ad(1, 1) = Complex(-100, 0);
    CareProblem p;
    p.A = Ad.sparseView();
    p.B = Matrix::Ones(2, 1);
    p.C = Matrix::Ones(1, 2);
    p = validate(std::move(p));
    ShiftSequence seq = heuristic_shifts(p, 2);
    REQUIRE(seq.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      REQUIRE(seq[i].imag() == 0.0);
      REQUIRE(seq[i].real() > 0.0);
    }
    // the sequence covers both ends of |Re lambda| in [1, 100]
    REQUIRE(std::abs(seq[0]) < 10.0);
    REQUIRE(std::abs(seq[1]) > 10.0);
  }
  SECTION("scalar problem collapses to one positive shift") {
    Matrix Ad = Matrix::Zero(1, 1);
    Ad(0, 0) = Complex(-4, 0);
    CareProblem p;
    p.A = Ad.sparseView();
    p.B = Matrix::Ones(1, 1);
    p.C = Matrix::Ones(1, 1);
    p = validate(std::move(p));
    ShiftSequence seq = heuristic_shifts(p, 1);
    REQUIRE(seq.size() == 1);
    REQUIRE(seq[0].imag() == 0.0);
    REQUIRE(seq[0].real() == Catch::Approx(4.0).epsilon(0.2));
  }
}

TEST_CASE("heuristic shifts on the convection-diffusion problem are usable", "[shifts]") {
  CareProblem p = fdm_2d_problem({.g = 10});
  ShiftSequence seq = heuristic_shifts(p, 8);
  REQUIRE(seq.size() == 8);

  // Gershgorin bound on the magnitude of the spectrum
  Matrix A = Matrix(p.A);
  double gersh = 0.0;
  for (Eigen::Index i = 0; i < p.n; ++i) gersh = std::max(gersh, A.row(i).cwiseAbs().sum());

  for (std::size_t i = 0; i < seq.size(); ++i) {
    REQUIRE(seq[i].imag() == 0.0);
    REQUIRE(seq[i].real() > 0.0);
    REQUIRE(std::abs(seq[i]) <= 2.0 * gersh);
    // every shift admits a factorization (A is stable, shifts lie right of it)
    REQUIRE_NOTHROW(make_shifted_factorization(p.A, p.E, seq[i]));
  }
}

TEST_CASE("heuristic shifts are deterministic for a fixed seed", "[shifts]") {
  CareProblem p = fdm_2d_problem({.g = 8});
  ShiftSequence a = heuristic_shifts(p, 5, 7);
  ShiftSequence b = heuristic_shifts(p, 5, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("shift files parse in both formats", "[shifts]") {
  auto dir = std::filesystem::temp_directory_path() / "rkcare_test_shifts";
  std::filesystem::create_directories(dir);

  SECTION("text: one 're [im]' pair per line") {
    const std::string path = (dir / "s.txt").string();
    std::ofstream(path) << "1.5\n\n2.0 -3.0\n";
    ShiftSequence seq = load_shifts(path);
    REQUIRE(seq.size() == 2);
    REQUIRE(seq[0] == Complex(1.5, 0));
    REQUIRE(seq[1] == Complex(2.0, -3.0));
  }
  SECTION("JSON array of numbers and pairs") {
    const std::string path = (dir / "s.json").string();
    std::ofstream(path) << "[4, [1.0, 2.0], [1.0, -2.0]]";
    ShiftSequence seq = load_shifts(path);
    REQUIRE(seq.size() == 3);
    REQUIRE(seq[0] == Complex(4, 0));
    REQUIRE(seq.conjugate_closed());
  }
  SECTION("missing file") {
    REQUIRE_THROWS_AS(load_shifts((dir / "nope.txt").string()), Error);
  }
}
