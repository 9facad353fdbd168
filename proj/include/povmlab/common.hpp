#ifndef POVMLAB_COMMON_HPP
#define POVMLAB_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace povmlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Residual tolerance for equality-style checks.
inline constexpr double kEqualityTol = 1e-9;
// Pass/fail tolerance when classifying physical conditions.
inline constexpr double kConditionTol = 1e-6;
// Eigenvalues in [-kPsdClamp, 0) are treated as exact zeros.
inline constexpr double kPsdClamp = 1e-9;
// Pointer cells with probability at or below this are "unread".
inline constexpr double kUnreadThreshold = 1e-12;

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct not_psd_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct gram_mismatch_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace povmlab

#endif  // POVMLAB_COMMON_HPP
