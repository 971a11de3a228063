// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/reflectivity.hpp"

#include <cmath>
#include <sstream>

namespace rmtimg {

Eigen::Matrix<double, 6, 1> component_errors(const Mat3& est, const Mat3& truth) {
    static const int ii[6] = {0, 1, 2, 0, 0, 1};
    static const int jj[6] = {0, 1, 2, 1, 2, 2};
    Eigen::Matrix<double, 6, 1> e;
    for (int c = 0; c < 6; ++c) {
        const double t = truth(ii[c], jj[c]);
        e[c] = std::abs(est(ii[c], jj[c]) - t) / std::abs(t);
    }
    return e;
}

ReflectivityEstimate estimate_reflectivity(const ResponseMatrix& noisy,
                                           const Vec3& y_estimate,
                                           const ArrayGeometry& geom,
                                           const SensingMatrix& sensing, double k,
                                           GreensKind greens,
                                           std::optional<Inclusion> ground_truth) {
    if (noisy.dim() != sensing.size() * geom.sensor_count())
        throw parameter_error("estimate_reflectivity: matrix/geometry dimension mismatch");

    const MatXc gcol = greens_column(geom, y_estimate, sensing, k, greens);
    const GreensFactor f = greens_factor(gcol);
    if (!(f.sigma[2] > 1e-14 * f.sigma[0])) {
        std::ostringstream msg;
        msg << "estimate_reflectivity: Green's column matrix is rank deficient at the "
               "estimate (sigma3/sigma1 = "
            << f.sigma[2] / f.sigma[0] << ")";
        throw numerical_error(msg.str());
    }

    const Mat3c core = f.H.adjoint() * noisy.data * f.H.conjugate();
    const Mat3c gamma = f.V * f.sigma.cwiseInverse().asDiagonal();

    ReflectivityEstimate out;
    out.raw = gamma * core * gamma.transpose();
    const Mat3c sym = 0.5 * (out.raw + out.raw.transpose());
    out.symmetric_real = sym.real();
    out.complex_residual = sym.imag().cwiseAbs().maxCoeff();
    out.greens_sigma = f.sigma;

    if (ground_truth) {
        out.relative_errors = component_errors(out.symmetric_real, ground_truth->reflectivity);
        out.error_total = out.symmetric_real - ground_truth->reflectivity;
        // Part of the error that vanishes when y_estimate hits the true
        // location: Gamma(y^e) R(y_p) Gamma(y^e)^T - rho with the noiseless
        // single-inclusion core R(y_p) built from the true tensor.
        const MatXc gcol_true =
            greens_column(geom, ground_truth->center, sensing, k, greens);
        const GreensFactor ft = greens_factor(gcol_true);
        const Mat3c rho_c = ground_truth->reflectivity.cast<cxd>();
        const Mat3c core_true = ft.sigma.cast<cxd>().asDiagonal() *
                                (ft.V.adjoint() * rho_c * ft.V.conjugate()) *
                                ft.sigma.cast<cxd>().asDiagonal();
        const Mat3c displaced = gamma * (f.H.adjoint() * ft.H * core_true *
                                         (f.H.adjoint() * ft.H).transpose()) *
                                gamma.transpose();
        const Mat3c delta2 = displaced - rho_c;
        out.error_location = 0.5 * (delta2 + delta2.transpose()).real();
    }
    return out;
}

}  // namespace rmtimg
