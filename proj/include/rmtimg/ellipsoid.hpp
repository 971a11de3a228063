// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rmtimg/types.hpp"

namespace rmtimg {

/// Penetrable ellipsoidal inclusion: scaled semiaxes (the small size factor is
/// divided out everywhere), relative permittivity contrast, and the rotation
/// taking the ellipsoid principal frame to the array frame.
struct Ellipsoid {
    Vec3 semiaxes = Vec3::Ones();
    double contrast = 2.0;  // eps_p / eps_o, > 0 and != 1
    Mat3 rotation = Mat3::Identity();

    double volume() const { return 4.0 * kPi / 3.0 * semiaxes.prod(); }
    void validate() const;
};

/// Shape integrals D_q in (0,1) with sum 1:
///   D_q = (a1 a2 a3 / 2) * Int_0^inf ds / [(s + a_q^2) sqrt(prod_l (s + a_l^2))]
/// evaluated after the substitution s = tan^2(t), which maps the half-line to
/// (0, pi/2). Adaptive Gauss-Kronrod to relative tolerance 1e-12.
Vec3 depolarization_factors(const Ellipsoid& e);

/// M = |Omega| R diag( 1 / (1 + (contrast - 1) D_q) ) R^T.
/// Symmetric positive definite for contrast > 1.
Mat3 polarization_tensor(const Ellipsoid& e);

/// Reflectivity tensor with the cubed size factor divided out:
/// rho = (contrast - 1) * M.
Mat3 reflectivity_from_ellipsoid(const Ellipsoid& e);

/// Point inclusion as the forward model sees it: a center and a real
/// symmetric reflectivity tensor.
struct Inclusion {
    Vec3 center = Vec3::Zero();
    Mat3 reflectivity = Mat3::Zero();

    Inclusion() = default;
    Inclusion(const Vec3& y, const Mat3& rho);
    Inclusion(const Vec3& y, const Ellipsoid& e)
        : Inclusion(y, reflectivity_from_ellipsoid(e)) {}
};

}  // namespace rmtimg
