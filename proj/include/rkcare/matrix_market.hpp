#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rkcare/errors.hpp"
#include "rkcare/types.hpp"

namespace rkcare {

namespace mm_detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline void fail(std::size_t line, const std::string& what) {
  throw ParseError("matrix market parse error at line " + std::to_string(line) + ": " + what);
}

}  // namespace mm_detail

// Reads a Matrix Market file (coordinate or array; real, complex, integer or
// pattern; general, symmetric or hermitian). Symmetric/hermitian storage is
// expanded to the full matrix. Pattern entries are stored as 1.0.
inline SparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::size_t lineno = 0;
  std::string line;
  if (!std::getline(in, line)) mm_detail::fail(1, "empty file");
  ++lineno;

  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") mm_detail::fail(lineno, "bad banner '" + banner + "'");
  object = mm_detail::lower(object);
  format = mm_detail::lower(format);
  field = mm_detail::lower(field);
  symmetry = mm_detail::lower(symmetry);
  if (object != "matrix") mm_detail::fail(lineno, "unsupported object '" + object + "'");
  if (format != "coordinate" && format != "array")
    mm_detail::fail(lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "complex" && field != "integer" && field != "pattern")
    mm_detail::fail(lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    mm_detail::fail(lineno, "unsupported symmetry '" + symmetry + "'");
  if (format == "array" && field == "pattern")
    throw UnsupportedField("pattern field is invalid with array format");

  // skip comments / blank lines
  auto next_data_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t i = line.find_first_not_of(" \t\r");
      if (i == std::string::npos) continue;
      if (line[i] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line()) mm_detail::fail(lineno + 1, "missing size line");
  std::istringstream sz(line);
  long rows = 0, cols = 0, nnz = 0;
  if (format == "coordinate") {
    if (!(sz >> rows >> cols >> nnz)) mm_detail::fail(lineno, "bad size line");
  } else {
    if (!(sz >> rows >> cols)) mm_detail::fail(lineno, "bad size line");
    nnz = rows * cols;
  }
  if (rows < 0 || cols < 0) mm_detail::fail(lineno, "negative dimensions");

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(nnz) * (symmetry == "general" ? 1 : 2));

  auto parse_value = [&](std::istringstream& ss) -> Complex {
    if (field == "pattern") return Complex(1.0, 0.0);
    double re = 0, im = 0;
    if (!(ss >> re)) mm_detail::fail(lineno, "missing value");
    if (field == "complex" && !(ss >> im)) mm_detail::fail(lineno, "missing imaginary part");
    return Complex(re, im);
  };

  auto push = [&](long i, long j, Complex v) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    if (i != j) {
      if (symmetry == "symmetric") trips.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
      if (symmetry == "hermitian")
        trips.emplace_back(static_cast<int>(j), static_cast<int>(i), std::conj(v));
    }
  };

  if (format == "coordinate") {
    for (long e = 0; e < nnz; ++e) {
      if (!next_data_line()) mm_detail::fail(lineno + 1, "unexpected end of file");
      std::istringstream ss(line);
      long i = 0, j = 0;
      if (!(ss >> i >> j)) mm_detail::fail(lineno, "bad coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols) mm_detail::fail(lineno, "index out of range");
      push(i - 1, j - 1, parse_value(ss));
    }
  } else {
    // column-major dense listing; symmetric/hermitian stores the lower triangle
    for (long j = 0; j < cols; ++j) {
      const long i0 = (symmetry == "general") ? 0 : j;
      for (long i = i0; i < rows; ++i) {
        if (!next_data_line()) mm_detail::fail(lineno + 1, "unexpected end of file");
        std::istringstream ss(line);
        push(i, j, parse_value(ss));
      }
    }
  }

  SparseMatrix M(rows, cols);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

inline Matrix load_matrix_market_dense(const std::string& path) {
  return Matrix(load_matrix_market(path));
}

namespace mm_detail {

inline bool all_real(const SparseMatrix& M) {
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
      if (it.value().imag() != 0.0) return false;
  return true;
}

inline void write_value(std::ostream& os, Complex v, bool complex_field) {
  os.precision(17);
  os << v.real();
  if (complex_field) os << " " << v.imag();
}

}  // namespace mm_detail

// Coordinate-format writer; 17 significant digits, general symmetry. The
// field is real when every stored entry has zero imaginary part.
inline void write_matrix_market(const std::string& path, const SparseMatrix& M) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  const bool complex_field = !mm_detail::all_real(M);
  os << "%%MatrixMarket matrix coordinate " << (complex_field ? "complex" : "real")
     << " general\n";
  os << M.rows() << " " << M.cols() << " " << M.nonZeros() << "\n";
  for (int k = 0; k < M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(M, k); it; ++it) {
      os << (it.row() + 1) << " " << (it.col() + 1) << " ";
      mm_detail::write_value(os, it.value(), complex_field);
      os << "\n";
    }
}

// Array-format writer for dense blocks.
inline void write_matrix_market_dense(const std::string& path, const Matrix& M) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  const bool complex_field = (M.imag().norm() != 0.0);
  os << "%%MatrixMarket matrix array " << (complex_field ? "complex" : "real") << " general\n";
  os << M.rows() << " " << M.cols() << "\n";
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      mm_detail::write_value(os, M(i, j), complex_field);
      os << "\n";
    }
}

}  // namespace rkcare
