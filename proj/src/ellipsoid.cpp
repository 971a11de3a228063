// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/ellipsoid.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rmtimg {

void Ellipsoid::validate() const {
    if (!(semiaxes.array() > 0).all())
        throw parameter_error("Ellipsoid: semiaxes must be positive");
    if (contrast <= 0 || contrast == 1.0)
        throw parameter_error("Ellipsoid: contrast must be positive and != 1");
    if ((rotation.transpose() * rotation - Mat3::Identity()).norm() > 1e-12 ||
        rotation.determinant() < 0)
        throw parameter_error("Ellipsoid: rotation must be proper orthogonal");
}

Vec3 depolarization_factors(const Ellipsoid& e) {
    e.validate();
    const Vec3 a2 = e.semiaxes.array().square();
    const double front = 0.5 * e.semiaxes.prod();
    Vec3 d;
    for (int q = 0; q < 3; ++q) {
        auto integrand = [&](double t) {
            const double tn = std::tan(t);
            const double s = tn * tn;
            const double sec2 = 1.0 + s;
            const double root =
                std::sqrt((s + a2[0]) * (s + a2[1]) * (s + a2[2]));
            return 2.0 * tn * sec2 / ((s + a2[q]) * root);
        };
        double err = 0;
        const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            integrand, 0.0, kPi / 2.0, 12, 1e-12, &err);
        if (!std::isfinite(val) || err > 1e-8 * std::max(1.0, std::abs(val)))
            throw numerical_error("depolarization_factors: quadrature did not converge");
        d[q] = front * val;
    }
    return d;
}

Mat3 polarization_tensor(const Ellipsoid& e) {
    const Vec3 d = depolarization_factors(e);
    Vec3 diag;
    for (int q = 0; q < 3; ++q) {
        const double denom = 1.0 + (e.contrast - 1.0) * d[q];
        if (std::abs(denom) < 1e-14)
            throw numerical_error("polarization_tensor: degenerate contrast, 1 + (eps_r - 1) D_q vanishes");
        diag[q] = 1.0 / denom;
    }
    Mat3 m = e.volume() * e.rotation * diag.asDiagonal() * e.rotation.transpose();
    return 0.5 * (m + m.transpose());  // exact symmetry as stored
}

Mat3 reflectivity_from_ellipsoid(const Ellipsoid& e) {
    return (e.contrast - 1.0) * polarization_tensor(e);
}

Inclusion::Inclusion(const Vec3& y, const Mat3& rho) : center(y), reflectivity(rho) {
    if ((rho - rho.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw parameter_error("Inclusion: reflectivity tensor must be exactly symmetric");
}

}  // namespace rmtimg
