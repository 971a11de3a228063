// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rmtimg {

ArrayGeometry::ArrayGeometry(std::vector<Vec3> positions, double aperture,
                             double range_scale)
    : positions_(std::move(positions)), aperture_(aperture), range_scale_(range_scale) {
    if (positions_.size() < 2)
        throw parameter_error("ArrayGeometry: need at least two sensors");
    if (aperture_ <= 0 || range_scale_ <= 0)
        throw parameter_error("ArrayGeometry: aperture and range scale must be positive");
    for (const auto& p : positions_)
        if (p[2] != 0.0)
            throw parameter_error("ArrayGeometry: sensors must lie in the y3 = 0 plane");
    for (std::size_t i = 0; i < positions_.size(); ++i)
        for (std::size_t j = i + 1; j < positions_.size(); ++j)
            if ((positions_[i] - positions_[j]).norm() == 0.0)
                throw parameter_error("ArrayGeometry: sensor positions must be distinct");
}

ArrayGeometry build_square_array(int side_count, double spacing, double range_scale) {
    if (side_count < 2)
        throw parameter_error("build_square_array: side_count must be >= 2");
    if (spacing <= 0)
        throw parameter_error("build_square_array: spacing must be positive");
    const double c = 0.5 * (side_count - 1);
    std::vector<Vec3> pos;
    pos.reserve(std::size_t(side_count) * side_count);
    for (int j = 0; j < side_count; ++j)
        for (int i = 0; i < side_count; ++i)
            pos.emplace_back((i - c) * spacing, (j - c) * spacing, 0.0);
    return ArrayGeometry(std::move(pos), (side_count - 1) * spacing, range_scale);
}

SensingMatrix::SensingMatrix(std::vector<int> component_set)
    : components_(std::move(component_set)) {
    if (components_.empty() || components_.size() > 3)
        throw parameter_error("SensingMatrix: component set must have 1..3 entries");
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (components_[i] < 1 || components_[i] > 3)
            throw parameter_error("SensingMatrix: component indices must be in {1,2,3}");
        if (i > 0 && components_[i] <= components_[i - 1])
            throw parameter_error("SensingMatrix: components must be strictly increasing");
    }
}

Eigen::Matrix<double, 3, Eigen::Dynamic> SensingMatrix::matrix() const {
    Eigen::Matrix<double, 3, Eigen::Dynamic> S =
        Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, size());
    for (int c = 0; c < size(); ++c) S(components_[c] - 1, c) = 1.0;
    return S;
}

SearchGrid::SearchGrid(Vec3 lo, Vec3 hi, double step) : lo_(lo), hi_(hi), step_(step) {
    if (step_ <= 0) throw parameter_error("SearchGrid: step must be positive");
    for (int a = 0; a < 3; ++a) {
        if (hi_[a] < lo_[a]) throw parameter_error("SearchGrid: box is empty");
        counts_[a] = int(std::floor((hi_[a] - lo_[a]) / step_ + 0.5)) + 1;
    }
}

Vec3 SearchGrid::point(std::int64_t flat) const {
    const int i1 = int(flat % counts_[0]);
    const int i2 = int((flat / counts_[0]) % counts_[1]);
    const int i3 = int(flat / (std::int64_t(counts_[0]) * counts_[1]));
    return Vec3(lo_[0] + i1 * step_, lo_[1] + i2 * step_, lo_[2] + i3 * step_);
}

std::int64_t SearchGrid::nearest_index(const Vec3& y) const {
    int idx[3];
    for (int a = 0; a < 3; ++a) {
        int i = int(std::floor((y[a] - lo_[a]) / step_ + 0.5));
        idx[a] = std::clamp(i, 0, counts_[a] - 1);
    }
    return flat_index(idx[0], idx[1], idx[2]);
}

}  // namespace rmtimg
