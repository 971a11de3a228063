// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/imaging.hpp"

#include <cmath>
#include <ostream>

#include "rmtimg/parallel.hpp"

namespace rmtimg {

const char* imaging_kind_name(ImagingKind k) {
    switch (k) {
        case ImagingKind::music: return "music";
        case ImagingKind::robust_single: return "single";
        case ImagingKind::robust_multi: return "multi";
    }
    return "?";
}

ImagingKind imaging_kind_from_name(const std::string& name) {
    if (name == "music") return ImagingKind::music;
    if (name == "single") return ImagingKind::robust_single;
    if (name == "multi") return ImagingKind::robust_multi;
    throw parameter_error("unknown imaging kind: " + name);
}

std::int64_t ImageVolume::argmax() const {
    std::int64_t best = 0;
    for (std::int64_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

GridImager::GridImager(const ArrayGeometry& geom, const SensingMatrix& sensing,
                       const SearchGrid& grid, double k, GreensKind greens,
                       ImagingOptions opt)
    : geom_(geom), sensing_(sensing), grid_(grid), k_(k), greens_(greens), opt_(opt) {}

namespace {

// Internally consistent thin factor of the M x 3 Green's column via the 3x3
// Gram matrix: H Sigma V^H reproduces the input exactly because V is unitary.
// Cheap enough to recompute per grid point.
struct PointFactor {
    Mat3c v;
    Vec3 sigma;
};

PointFactor gram_factor(const MatXc& gcol, MatXc& h_out) {
    const Mat3c gram = gcol.adjoint() * gcol;
    Eigen::SelfAdjointEigenSolver<Mat3c> eig(gram);
    PointFactor f;
    // ascending eigenvalues -> descending singular values
    for (int i = 0; i < 3; ++i) {
        const int src = 2 - i;
        f.sigma[i] = std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
        f.v.col(i) = eig.eigenvectors().col(src);
    }
    h_out.noalias() = gcol * (f.v * f.sigma.cwiseMax(1e-300).cwiseInverse().asDiagonal());
    return f;
}

}  // namespace

template <class PointFn>
ImageVolume GridImager::sweep(const SpectralData& sd, ImagingKind kind,
                              PointFn&& fn) const {
    if (sd.rank < 1)
        throw detection_error("imaging: effective rank is zero, nothing above the noise");
    const std::int64_t n = grid_.point_count();
    ImageVolume vol{grid_, VecX(n), kind, sd.rank, sd.sigma_e, sd.theta};
    const MatXc ut = sd.leading_vectors();

    parallel_for_chunks(0, n, opt_.chunk, [&](std::int64_t lo, std::int64_t hi) {
        MatXc h(ut.rows(), 3);
        MatXc c;  // R x 3 projected factor
        for (std::int64_t i = lo; i < hi; ++i) {
            const MatXc gcol = greens_column(geom_, grid_.point(i), sensing_, k_, greens_);
            const PointFactor f = gram_factor(gcol, h);
            c.noalias() = ut.adjoint() * h;
            vol.values[i] = fn(c, f);
        }
    });
    return vol;
}

ImageVolume GridImager::music(const SpectralData& sd) const {
    return sweep(sd, ImagingKind::music, [&](const MatXc& c, const PointFactor& f) {
        // || (I - U U^H) G(y) e1 ||^(-1), with G e1 = H (Sigma V^H e1).
        const Eigen::Vector3cd w = f.sigma.cast<cxd>().asDiagonal() * f.v.adjoint().col(0);
        const double total = w.squaredNorm();
        const double captured = (c * w).squaredNorm();
        const double resid = total - captured;
        if (resid <= 0) return opt_.cap;
        return std::min(opt_.cap, 1.0 / std::sqrt(resid));
    });
}

ImageVolume GridImager::robust_single(const SpectralData& sd) const {
    if (sd.rank >= 1 && sd.weights.maxCoeff() <= 0.0)
        throw detection_error("robust_single: all detection weights vanish");
    return sweep(sd, ImagingKind::robust_single,
                 [&](const MatXc& c, const PointFactor&) {
        // T = C C^H approximates delta_jq cos^2(theta_j) at inclusion points.
        double misfit = 0;
        for (int j = 0; j < sd.rank; ++j) {
            const double gj2 = sd.weights[j] * sd.weights[j];
            for (int q = 0; q < sd.rank; ++q) {
                cxd t = c.row(j).dot(c.row(q));  // conj(c_j) . c_q = T_qj
                if (j == q) t -= sd.cos2[j];
                misfit += gj2 * std::norm(t);
            }
        }
        if (misfit <= 1e-16 / (opt_.cap * opt_.cap)) return opt_.cap;
        return std::min(opt_.cap, 1.0 / std::sqrt(misfit));
    });
}

ImageVolume GridImager::robust_multi(const SpectralData& sd) const {
    return sweep(sd, ImagingKind::robust_multi,
                 [&](const MatXc& c, const PointFactor&) {
        double sum = 0;
        for (int j = 0; j < sd.rank; ++j) {
            const double cos2 = std::max(sd.cos2[j], 1e-12);
            sum += std::norm(c(j, 0)) / cos2;
        }
        const double bracket = std::max(1.0 - sum, opt_.bracket_floor);
        return 1.0 / std::sqrt(bracket);
    });
}

ImageVolume GridImager::image(ImagingKind kind, const SpectralData& sd) const {
    switch (kind) {
        case ImagingKind::music: return music(sd);
        case ImagingKind::robust_single: return robust_single(sd);
        case ImagingKind::robust_multi: return robust_multi(sd);
    }
    throw parameter_error("GridImager::image: bad kind");
}

ImageVolume music_image(const SpectralData& sd, const SearchGrid& grid,
                        const ArrayGeometry& geom, const SensingMatrix& sensing,
                        double k, GreensKind greens) {
    return GridImager(geom, sensing, grid, k, greens).music(sd);
}

ImageVolume robust_image_single(const SpectralData& sd, const SearchGrid& grid,
                                const ArrayGeometry& geom, const SensingMatrix& sensing,
                                double k, GreensKind greens) {
    return GridImager(geom, sensing, grid, k, greens).robust_single(sd);
}

ImageVolume robust_image_multi(const SpectralData& sd, const SearchGrid& grid,
                               const ArrayGeometry& geom, const SensingMatrix& sensing,
                               double k, GreensKind greens) {
    return GridImager(geom, sensing, grid, k, greens).robust_multi(sd);
}

void write_image_csv(const ImageVolume& v, std::ostream& os) {
    os << "y1,y2,y3,value\n";
    os.precision(17);
    for (std::int64_t i = 0; i < v.values.size(); ++i) {
        const Vec3 p = v.grid.point(i);
        os << p[0] << ',' << p[1] << ',' << p[2] << ',' << v.values[i] << '\n';
    }
}

void write_image_slice_csv(const ImageVolume& v, int axis, double value,
                           std::ostream& os) {
    if (axis < 0 || axis > 2) throw parameter_error("write_image_slice_csv: bad axis");
    const SearchGrid& g = v.grid;
    int fixed = int(std::lround((value - g.lo()[axis]) / g.step()));
    fixed = std::clamp(fixed, 0, g.count(axis) - 1);
    os << "y1,y2,y3,value\n";
    os.precision(17);
    for (std::int64_t i = 0; i < v.values.size(); ++i) {
        const Vec3 p = g.point(i);
        const int idx = int(std::lround((p[axis] - g.lo()[axis]) / g.step()));
        if (idx != fixed) continue;
        os << p[0] << ',' << p[1] << ',' << p[2] << ',' << v.values[i] << '\n';
    }
}

}  // namespace rmtimg
