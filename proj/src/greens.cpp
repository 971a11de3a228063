// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/greens.hpp"

#include <cmath>

namespace rmtimg {

Mat3c greens_tensor(const Vec3& x, const Vec3& z, double k, GreensKind kind) {
    const Vec3 d = x - z;
    const double r = d.norm();
    if (r == 0.0)
        throw numerical_error("greens_tensor: coincident evaluation points");
    const Vec3 rhat = d / r;
    const double kr = k * r;
    const cxd amp = std::polar(1.0 / (4.0 * kPi * r), kr);
    cxd ci(1.0, 0.0), co(1.0, 0.0);
    if (kind == GreensKind::exact) {
        ci = cxd(1.0 - 1.0 / (kr * kr), 1.0 / kr);
        co = cxd(1.0 - 3.0 / (kr * kr), 3.0 / kr);
    }
    Mat3c g = (-amp * co) * (rhat * rhat.transpose()).cast<cxd>();
    g.diagonal().array() += amp * ci;
    return g;
}

MatXc greens_column(const ArrayGeometry& geom, const Vec3& y,
                    const SensingMatrix& sensing, double k, GreensKind kind) {
    const int n = geom.sensor_count();
    const int ns = sensing.size();
    MatXc out(std::int64_t(ns) * n, 3);
    const auto& comps = sensing.components();
    for (int r = 0; r < n; ++r) {
        const Mat3c block = greens_tensor(geom.positions()[r], y, k, kind);
        for (int c = 0; c < ns; ++c) out.row(std::int64_t(ns) * r + c) = block.row(comps[c] - 1);
    }
    return out;
}

GreensFactor greens_factor(const MatXc& gcol) {
    Eigen::JacobiSVD<MatXc> svd(gcol, Eigen::ComputeThinU | Eigen::ComputeThinV);
    GreensFactor f;
    f.H = svd.matrixU();
    f.sigma = svd.singularValues();
    f.V = svd.matrixV();
    return f;
}

Vec3 conditioning_diagnostics(const ArrayGeometry& geom, const Vec3& y,
                              const SensingMatrix& sensing, double k, GreensKind kind) {
    Eigen::JacobiSVD<MatXc> svd(greens_column(geom, y, sensing, k, kind));
    return svd.singularValues();
}

}  // namespace rmtimg
