// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rmtimg/acquisition.hpp"
#include "rmtimg/ellipsoid.hpp"
#include "rmtimg/geometry.hpp"
#include "rmtimg/response.hpp"

namespace rmtimg {

/// Complete description of one measurement configuration. All lengths are in
/// units of the wavelength field (so the wavenumber is 2 pi / wavelength).
struct Scene {
    double wavelength = 1.0;
    int side_count = 21;
    double spacing = 0.5;
    double range_scale = 10.0;
    SensingMatrix sensing = SensingMatrix::complete();
    GreensKind greens = GreensKind::exact;
    std::vector<Inclusion> inclusions;
    Vec3 grid_lo = Vec3(-3, -3, 7);
    Vec3 grid_hi = Vec3(3, 3, 13);
    double grid_step = 0.5;
    NoiseSpec noise;
    /// When true, the noise level references sigma_1 of the complete-data
    /// matrix even for incomplete sensing; default references the matrix
    /// actually measured, so "50% noise" is comparable across sensing sets.
    bool normalize_against_complete = false;
    double theta = 0.01;

    double wavenumber() const { return 2.0 * kPi / wavelength; }
    ArrayGeometry array() const {
        return build_square_array(side_count, spacing, range_scale);
    }
    SearchGrid grid() const { return SearchGrid(grid_lo, grid_hi, grid_step); }

    /// sigma_1 of the noiseless matrix the noise level is defined against.
    double reference_sigma1() const;
    /// Absolute noise level sigma = fraction * reference_sigma1().
    double noise_sigma() const { return noise.fraction * reference_sigma1(); }

    ResponseMatrix forward() const;
    void validate() const;
};

/// JSON (de)serialization. The schema is documented in the repository README.
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);
Scene scene_from_json_text(const std::string& text);
std::string scene_to_json_text(const Scene& scene);

/// Built-in configurations reproducing the bundled experiments; resolves
/// either a bundled name or a path to a scene file.
std::vector<std::string> bundled_scene_names();
Scene bundled_scene(const std::string& name);
Scene resolve_scene(const std::string& name_or_path);

}  // namespace rmtimg
