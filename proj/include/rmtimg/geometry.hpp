// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rmtimg/types.hpp"

namespace rmtimg {

/// All lengths in this library are expressed in units of the wavelength, so
/// the wavenumber is fixed at k = 2*pi. The struct keeps both so data files
/// can restate the convention.
struct PhysicalConfig {
    double wavelength = 1.0;
    double wavenumber = 2.0 * kPi;

    static PhysicalConfig unit_wavelength() { return PhysicalConfig{}; }
};

/// Planar sensor array in the y3 = 0 plane. e1, e2 span the cross-range
/// plane, e3 is the range direction toward the targets.
class ArrayGeometry {
  public:
    ArrayGeometry(std::vector<Vec3> positions, double aperture, double range_scale);

    const std::vector<Vec3>& positions() const { return positions_; }
    int sensor_count() const { return static_cast<int>(positions_.size()); }
    double aperture() const { return aperture_; }
    double range_scale() const { return range_scale_; }

    /// lambda * L / a, the cross-range resolution length.
    double cross_range_resolution() const { return range_scale_ / aperture_; }
    /// lambda * L^2 / a^2, the range resolution length.
    double range_resolution() const {
        return range_scale_ * range_scale_ / (aperture_ * aperture_);
    }

  private:
    std::vector<Vec3> positions_;
    double aperture_;
    double range_scale_;
};

/// Regular side_count x side_count grid centered on the origin with the given
/// spacing; aperture a = (side_count - 1) * spacing.
ArrayGeometry build_square_array(int side_count, double spacing, double range_scale);

/// Which Cartesian field components are driven and recorded. Columns of S are
/// the unit vectors e_q for q in the (strictly increasing, 1-based) index set.
class SensingMatrix {
  public:
    explicit SensingMatrix(std::vector<int> component_set);
    static SensingMatrix complete() { return SensingMatrix({1, 2, 3}); }

    const std::vector<int>& components() const { return components_; }
    int size() const { return static_cast<int>(components_.size()); }
    bool is_complete() const { return size() == 3; }

    /// The 3 x |S| selection matrix with columns e_q.
    Eigen::Matrix<double, 3, Eigen::Dynamic> matrix() const;

  private:
    std::vector<int> components_;
};

/// Axis-aligned search box sampled with a fixed step. Points are enumerated
/// deterministically with y3 outermost, then y2, then y1 (y1 fastest), so
/// exported volumes are reproducible byte for byte.
class SearchGrid {
  public:
    SearchGrid(Vec3 lo, Vec3 hi, double step);

    int count(int axis) const { return counts_[axis]; }
    std::int64_t point_count() const {
        return std::int64_t(counts_[0]) * counts_[1] * counts_[2];
    }
    double step() const { return step_; }
    const Vec3& lo() const { return lo_; }
    const Vec3& hi() const { return hi_; }

    Vec3 point(std::int64_t flat_index) const;
    std::int64_t flat_index(int i1, int i2, int i3) const {
        return (std::int64_t(i3) * counts_[1] + i2) * counts_[0] + i1;
    }
    /// Nearest grid point to y (clamped to the box).
    std::int64_t nearest_index(const Vec3& y) const;

  private:
    Vec3 lo_, hi_;
    double step_;
    int counts_[3];
};

}  // namespace rmtimg
