// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rmtimg/imaging.hpp"

namespace rmtimg {

struct Peak {
    std::int64_t index = 0;
    Vec3 location = Vec3::Zero();
    double value = 0;
};

struct LocalizationResult {
    std::vector<Peak> peaks;   // descending value
    bool exhausted = false;    // fewer maxima existed than requested
    Vec3 min_separation = Vec3::Zero();
};

/// Greedy local-maximum extraction. A candidate is suppressed when it falls
/// inside the cross-range box (|d1| < s1 and |d2| < s2) of an accepted peak;
/// range offsets never rescue a cross-range collision because range
/// resolution is the weaker one. Ties break toward the earlier grid index.
/// Default separation: (lambda L/a, lambda L/a, lambda L^2/a^2).
LocalizationResult extract_peaks(const ImageVolume& volume, int count,
                                 const Vec3& min_separation);
LocalizationResult extract_peaks(const ImageVolume& volume, int count,
                                 const ArrayGeometry& geom);

/// Resolution-based separation test: the pair is well separated when the
/// cross-range distance reaches multiplier * lambda L/a or the range offset
/// reaches multiplier * lambda L^2/a^2.
bool well_separated(const Vec3& a, const Vec3& b, const ArrayGeometry& geom,
                    double multiplier = 1.0);

}  // namespace rmtimg
