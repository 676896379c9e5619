#ifndef BMFL_COMMON_HPP
#define BMFL_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace bmfl {

using cxd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using SparseC = Eigen::SparseMatrix<cxd, Eigen::RowMajor>;

// Bad input: malformed files, non-hermitian matrices, out-of-range arguments.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested basis or dense solve would exceed the configured size budget.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine ran out of budget before reaching its tolerance.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest many-body dimension we are willing to enumerate.  Overridable via
// the BMFL_DIM_CAP environment variable.
std::size_t dimension_cap();

}  // namespace bmfl

#endif
