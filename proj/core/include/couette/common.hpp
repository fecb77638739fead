#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace couette {

using Real = double;
using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Complex-valued function of y sampled on the Chebyshev nodes, at one
/// fixed x-wavenumber (a vorticity or stream-function mode).
using ModeField = Eigen::VectorXcd;

inline constexpr Real kPi = 3.14159265358979323846;
inline const Complex kI{0.0, 1.0};

/// Invalid configuration or precondition violation supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: NaN, singular solve, infeasible calibration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configured resolution cannot answer the question (CFL violation).
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace couette
