#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace unplab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;
using Indices = std::vector<std::size_t>;

namespace tol {
// Hermiticity, PSD and trace checks on constructed states.
inline constexpr double state = 1e-10;
// Eigenvalues at or below this are dropped from entropy sums.
inline constexpr double entropy_cutoff = 1e-14;
// Default primal-dual gap for the guessing solver.
inline constexpr double solver_gap = 1e-7;
// Dual feasibility threshold reported by the guessing solver.
inline constexpr double dual_feasibility = 1e-8;
}  // namespace tol

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class HypothesisError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent serialized input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::size_t product(const Dims& dims);

}  // namespace unplab
