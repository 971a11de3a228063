// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "rmtimg/ellipsoid.hpp"
#include "rmtimg/response.hpp"

namespace rmtimg {

struct ReflectivityEstimate {
    Mat3c raw;            // Gamma R~ Gamma^T, unsymmetrized, complex
    Mat3 symmetric_real;  // symmetrized real part, the reported tensor
    double complex_residual = 0;  // max |Im| after symmetrization, a noise diagnostic
    Vec3 greens_sigma = Vec3::Zero();  // conditioning of G(y^e)

    /// Filled when ground truth is supplied: per-component relative errors
    /// (order 11, 22, 33, 12, 13, 23) and the location/noise error split.
    std::optional<Eigen::Matrix<double, 6, 1>> relative_errors;
    std::optional<Mat3> error_total;      // rho^e - rho
    std::optional<Mat3> error_location;   // part that vanishes at the true location
};

/// rho^e = Gamma(y^e) H(y^e)^H D~ conj(H(y^e)) Gamma(y^e)^T with
/// Gamma = V Sigma^{-1} from the internally consistent thin factor of the
/// Green's column matrix. Exact on noiseless data at the true location.
ReflectivityEstimate estimate_reflectivity(
    const ResponseMatrix& noisy, const Vec3& y_estimate, const ArrayGeometry& geom,
    const SensingMatrix& sensing, double k, GreensKind greens = GreensKind::exact,
    std::optional<Inclusion> ground_truth = std::nullopt);

/// Relative errors of est vs truth in component order 11, 22, 33, 12, 13, 23.
Eigen::Matrix<double, 6, 1> component_errors(const Mat3& est, const Mat3& truth);

}  // namespace rmtimg
