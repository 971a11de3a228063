// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/scene.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rmtimg {

using nlohmann::json;

void Scene::validate() const {
    if (wavelength <= 0) throw parameter_error("scene: wavelength must be positive");
    if (inclusions.empty()) throw parameter_error("scene: inclusions list is empty");
    noise.validate();
    if (!(theta > 0 && theta < 1)) throw parameter_error("scene: theta must lie in (0,1)");
    (void)array();
    (void)grid();
}

double Scene::reference_sigma1() const {
    const SensingMatrix ref =
        normalize_against_complete ? SensingMatrix::complete() : sensing;
    return noiseless_spectrum(array(), inclusions, ref, wavenumber(), greens)[0];
}

ResponseMatrix Scene::forward() const {
    return forward_response(array(), inclusions, sensing, wavenumber(), greens);
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw parameter_error("scene: " + where + " must be a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3 mat3_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw parameter_error("scene: " + where + " must be a 3x3 array");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        if (!j[r].is_array() || j[r].size() != 3)
            throw parameter_error("scene: " + where + " must be a 3x3 array");
        for (int c = 0; c < 3; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

Mat3 rotation_from_axis_angle(const Vec3& aa) {
    const double angle = aa.norm();
    if (angle == 0) return Mat3::Identity();
    return Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
}

}  // namespace

Scene scene_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw parameter_error(std::string("scene: JSON parse error: ") + e.what());
    }
    Scene s;
    try {
        s.wavelength = j.value("wavelength", 1.0);
        const json& arr = j.at("array");
        s.side_count = arr.at("side_count").get<int>();
        s.spacing = arr.at("spacing").get<double>();
        s.range_scale = arr.at("range_scale").get<double>();
        if (j.contains("sensing"))
            s.sensing = SensingMatrix(j["sensing"].get<std::vector<int>>());
        if (j.contains("greens")) {
            const std::string g = j["greens"].get<std::string>();
            if (g == "exact") s.greens = GreensKind::exact;
            else if (g == "far_field") s.greens = GreensKind::far_field;
            else throw parameter_error("scene: greens must be 'exact' or 'far_field'");
        }
        for (const json& inc : j.at("inclusions")) {
            const Vec3 center = vec3_from_json(inc.at("center"), "inclusions[].center");
            if (inc.contains("reflectivity")) {
                Mat3 rho = mat3_from_json(inc["reflectivity"], "inclusions[].reflectivity");
                if ((rho - rho.transpose()).cwiseAbs().maxCoeff() > 0)
                    throw parameter_error("scene: reflectivity must be symmetric");
                s.inclusions.emplace_back(center, rho);
            } else if (inc.contains("ellipsoid")) {
                const json& el = inc["ellipsoid"];
                Ellipsoid e;
                e.semiaxes = vec3_from_json(el.at("semiaxes"), "ellipsoid.semiaxes");
                e.contrast = el.at("contrast").get<double>();
                if (el.contains("rotation_axis_angle"))
                    e.rotation = rotation_from_axis_angle(
                        vec3_from_json(el["rotation_axis_angle"], "rotation_axis_angle"));
                s.inclusions.emplace_back(center, e);
            } else {
                throw parameter_error(
                    "scene: inclusions[] needs 'reflectivity' or 'ellipsoid'");
            }
        }
        const json& grid = j.at("grid");
        s.grid_lo = vec3_from_json(grid.at("lo"), "grid.lo");
        s.grid_hi = vec3_from_json(grid.at("hi"), "grid.hi");
        s.grid_step = grid.value("step", s.wavelength / 2.0);
        if (j.contains("noise")) {
            const json& nz = j["noise"];
            s.noise.fraction = nz.value("fraction", 0.0);
            s.noise.seed = nz.value("seed", std::uint64_t(0));
            const std::string scheme = nz.value("scheme", "direct");
            if (scheme == "direct") s.noise.scheme = AcquisitionScheme::direct;
            else if (scheme == "hadamard") s.noise.scheme = AcquisitionScheme::hadamard;
            else throw parameter_error("scene: noise.scheme must be 'direct' or 'hadamard'");
            s.normalize_against_complete = nz.value("normalize_against_complete", false);
        }
        s.theta = j.value("theta", 0.01);
    } catch (const json::exception& e) {
        throw parameter_error(std::string("scene: schema violation: ") + e.what());
    }
    s.validate();
    return s;
}

std::string scene_to_json_text(const Scene& s) {
    json j;
    j["wavelength"] = s.wavelength;
    j["array"] = {{"side_count", s.side_count},
                  {"spacing", s.spacing},
                  {"range_scale", s.range_scale}};
    j["sensing"] = s.sensing.components();
    j["greens"] = s.greens == GreensKind::exact ? "exact" : "far_field";
    json incs = json::array();
    for (const auto& inc : s.inclusions) {
        json one;
        one["center"] = vec3_to_json(inc.center);
        json rho = json::array();
        for (int r = 0; r < 3; ++r)
            rho.push_back(json::array({inc.reflectivity(r, 0), inc.reflectivity(r, 1),
                                       inc.reflectivity(r, 2)}));
        one["reflectivity"] = rho;
        incs.push_back(one);
    }
    j["inclusions"] = incs;
    j["grid"] = {{"lo", vec3_to_json(s.grid_lo)},
                 {"hi", vec3_to_json(s.grid_hi)},
                 {"step", s.grid_step}};
    j["noise"] = {
        {"fraction", s.noise.fraction},
        {"seed", s.noise.seed},
        {"scheme", s.noise.scheme == AcquisitionScheme::direct ? "direct" : "hadamard"},
        {"normalize_against_complete", s.normalize_against_complete}};
    j["theta"] = s.theta;
    return j.dump(2) + "\n";
}

Scene load_scene(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parameter_error("load_scene: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return scene_from_json_text(buf.str());
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw parameter_error("save_scene: cannot open " + path);
    os << scene_to_json_text(scene);
}

namespace {

// Reference reflectivity tensors of the demo inclusions (array-frame
// components; built from triaxial ellipsoids with contrast 10).
Mat3 demo_rho(int which) {
    Mat3 m;
    switch (which) {
        case 1:
            m << 55.4, -7.28, 13.43,
                 -7.28, 70.82, 22.64,
                 13.43, 22.64, 70.75;
            break;
        case 2:
            m << 91.12, -29.43, 12.04,
                 -29.43, 69.99, 8.53,
                 12.04, 8.53, 111.60;
            break;
        default:
            m << 99.37, 5.35, 26.89,
                 5.35, 101.12, 10.37,
                 26.89, 10.37, 137.06;
            break;
    }
    return m;
}

Scene single_scene(double range_scale) {
    Scene s;
    s.range_scale = range_scale;
    s.inclusions.emplace_back(Vec3(1, -1, range_scale), demo_rho(1));
    s.grid_lo = Vec3(-3, -3, range_scale - 3);
    s.grid_hi = Vec3(3, 3, range_scale + 3);
    if (range_scale > 50) {  // small-aperture regime: range is unresolved, widen the box
        s.grid_lo[2] = range_scale - 10;
        s.grid_hi[2] = range_scale + 10;
    }
    return s;
}

Scene three_scene(double range_scale) {
    Scene s;
    s.range_scale = range_scale;
    s.inclusions.emplace_back(Vec3(1, -1, range_scale), demo_rho(1));
    s.inclusions.emplace_back(Vec3(-10, 6, range_scale), demo_rho(2));
    s.inclusions.emplace_back(Vec3(5, 4, range_scale), demo_rho(3));
    s.grid_lo = Vec3(-12, -4, range_scale - 3);
    s.grid_hi = Vec3(8, 9, range_scale + 3);
    if (range_scale > 50) {
        s.grid_lo[2] = range_scale - 10;
        s.grid_hi[2] = range_scale + 10;
    }
    return s;
}

}  // namespace

std::vector<std::string> bundled_scene_names() {
    return {"single_large", "single_small", "three_large", "three_small"};
}

Scene bundled_scene(const std::string& name) {
    if (name == "single_large") return single_scene(10.0);
    if (name == "single_small") return single_scene(100.0);
    if (name == "three_large") return three_scene(10.0);
    if (name == "three_small") return three_scene(100.0);
    throw parameter_error("bundled_scene: unknown scene '" + name + "'");
}

Scene resolve_scene(const std::string& name_or_path) {
    for (const auto& n : bundled_scene_names())
        if (n == name_or_path) return bundled_scene(n);
    return load_scene(name_or_path);
}

}  // namespace rmtimg
