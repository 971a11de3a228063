// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/peaks.hpp"

#include <algorithm>
#include <cmath>

namespace rmtimg {

namespace {

bool is_local_max(const ImageVolume& v, int i1, int i2, int i3) {
    const SearchGrid& g = v.grid;
    const double val = v.values[g.flat_index(i1, i2, i3)];
    for (int d3 = -1; d3 <= 1; ++d3)
        for (int d2 = -1; d2 <= 1; ++d2)
            for (int d1 = -1; d1 <= 1; ++d1) {
                if (d1 == 0 && d2 == 0 && d3 == 0) continue;
                const int j1 = i1 + d1, j2 = i2 + d2, j3 = i3 + d3;
                if (j1 < 0 || j2 < 0 || j3 < 0 || j1 >= g.count(0) ||
                    j2 >= g.count(1) || j3 >= g.count(2))
                    continue;
                if (v.values[g.flat_index(j1, j2, j3)] > val) return false;
            }
    return true;
}

}  // namespace

LocalizationResult extract_peaks(const ImageVolume& volume, int count,
                                 const Vec3& min_separation) {
    if (count < 1) throw parameter_error("extract_peaks: count must be >= 1");
    const SearchGrid& g = volume.grid;

    std::vector<Peak> candidates;
    for (int i3 = 0; i3 < g.count(2); ++i3)
        for (int i2 = 0; i2 < g.count(1); ++i2)
            for (int i1 = 0; i1 < g.count(0); ++i1)
                if (is_local_max(volume, i1, i2, i3)) {
                    const std::int64_t flat = g.flat_index(i1, i2, i3);
                    candidates.push_back({flat, g.point(flat), volume.values[flat]});
                }
    // Descending value, ties toward earlier grid index.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) {
                         if (a.value != b.value) return a.value > b.value;
                         return a.index < b.index;
                     });

    LocalizationResult out;
    out.min_separation = min_separation;
    for (const Peak& c : candidates) {
        if (int(out.peaks.size()) >= count) break;
        bool suppressed = false;
        for (const Peak& p : out.peaks) {
            if (std::abs(c.location[0] - p.location[0]) < min_separation[0] &&
                std::abs(c.location[1] - p.location[1]) < min_separation[1]) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) out.peaks.push_back(c);
    }
    out.exhausted = int(out.peaks.size()) < count;
    return out;
}

LocalizationResult extract_peaks(const ImageVolume& volume, int count,
                                 const ArrayGeometry& geom) {
    const double cr = geom.cross_range_resolution();
    return extract_peaks(volume, count, Vec3(cr, cr, geom.range_resolution()));
}

bool well_separated(const Vec3& a, const Vec3& b, const ArrayGeometry& geom,
                    double multiplier) {
    const double cross = std::hypot(a[0] - b[0], a[1] - b[1]);
    const double range = std::abs(a[2] - b[2]);
    return cross >= multiplier * geom.cross_range_resolution() ||
           range >= multiplier * geom.range_resolution();
}

}  // namespace rmtimg
