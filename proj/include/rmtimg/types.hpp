// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rmtimg {

using cxd = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using VecX = Eigen::VectorXd;
using VecXc = Eigen::VectorXcd;
using MatX = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Bad input (dimensions, ranges, malformed files). Maps to CLI exit code 2.
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (quadrature, conditioning, non-convergence). CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Nothing rises above the noise floor (effective rank zero or all weights
/// vanish). CLI exit code 4.
struct detection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rmtimg
