#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rkcare {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

}  // namespace rkcare
