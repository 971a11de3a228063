// SPDX-License-Identifier: Apache-2.0
//
// rmtimg command line: forward synthesis, noisy acquisition, inversion and
// Monte Carlo campaigns over scene/plan files or bundled configurations.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 nothing detected above the noise.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmtimg/acquisition.hpp"
#include "rmtimg/imaging.hpp"
#include "rmtimg/montecarlo.hpp"
#include "rmtimg/parallel.hpp"
#include "rmtimg/peaks.hpp"
#include "rmtimg/reflectivity.hpp"
#include "rmtimg/scene.hpp"
#include "rmtimg/spectral.hpp"
#include "rmtimg/tracy_widom.hpp"
#include "rmtimg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmtimg;

namespace {

// FNV-1a 64-bit over the file bytes; recorded next to every output so a
// re-run can be diffed by checksum alone.
std::string file_checksum(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw parameter_error("checksum: cannot open " + p.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (is) {
        is.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < is.gcount(); ++i)
            h = (h ^ std::uint8_t(buf[i])) * 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

class ManifestWriter {
  public:
    ManifestWriter(fs::path out_dir, std::string command)
        : dir_(std::move(out_dir)), start_(std::chrono::system_clock::now()) {
        fs::create_directories(dir_);
        manifest_["command"] = std::move(command);
        manifest_["version"] = kVersion;
    }

    fs::path dir() const { return dir_; }

    void config(const json& j) { manifest_["config"] = j; }
    void note(const std::string& key, const json& value) { manifest_[key] = value; }

    fs::path add_output(const std::string& name) {
        outputs_.push_back(name);
        return dir_ / name;
    }

    void finalize() {
        const auto end = std::chrono::system_clock::now();
        manifest_["started_unix_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                start_.time_since_epoch()).count();
        manifest_["wall_seconds"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(end - start_).count() /
            1000.0;
        json files = json::array();
        for (const auto& name : outputs_) {
            const fs::path p = dir_ / name;
            if (!fs::exists(p))
                throw numerical_error("manifest: declared output missing: " + p.string());
            files.push_back({{"name", name},
                             {"bytes", fs::file_size(p)},
                             {"fnv1a64", file_checksum(p)}});
        }
        manifest_["outputs"] = files;
        std::ofstream os(dir_ / "manifest.json");
        os << manifest_.dump(2) << '\n';
    }

  private:
    fs::path dir_;
    std::chrono::system_clock::time_point start_;
    json manifest_;
    std::vector<std::string> outputs_;
};

struct SceneFlags {
    std::optional<double> noise;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    std::optional<std::string> sensing;
    std::optional<double> theta;
    std::optional<std::string> greens;

    void apply(Scene& s) const {
        if (noise) s.noise.fraction = *noise;
        if (seed) s.noise.seed = *seed;
        if (scheme) {
            if (*scheme == "direct") s.noise.scheme = AcquisitionScheme::direct;
            else if (*scheme == "hadamard") s.noise.scheme = AcquisitionScheme::hadamard;
            else throw parameter_error("--scheme must be direct or hadamard");
        }
        if (sensing) {
            std::vector<int> comps;
            for (char c : *sensing) {
                if (c < '1' || c > '3')
                    throw parameter_error("--sensing must be digits from {1,2,3}, e.g. 12");
                comps.push_back(c - '0');
            }
            s.sensing = SensingMatrix(comps);
        }
        if (theta) s.theta = *theta;
        if (greens) {
            if (*greens == "exact") s.greens = GreensKind::exact;
            else if (*greens == "far_field") s.greens = GreensKind::far_field;
            else throw parameter_error("--greens must be exact or far_field");
        }
    }
};

void add_scene_flags(CLI::App* cmd, SceneFlags& f) {
    cmd->add_option("--noise", f.noise, "Noise fraction p (sigma = p * sigma_1)");
    cmd->add_option("--seed", f.seed, "RNG seed override");
    cmd->add_option("--scheme", f.scheme, "Acquisition scheme: direct | hadamard");
    cmd->add_option("--sensing", f.sensing,
                    "Measured components as digits, e.g. 123, 12, 1, 2, 3");
    cmd->add_option("--theta", f.theta, "Detection false-alarm rate");
    cmd->add_option("--greens", f.greens, "Kernel evaluation: exact | far_field");
}

json scene_summary_json(const Scene& s) {
    return json::parse(scene_to_json_text(s));
}

int cmd_forward(const std::string& scene_name, const SceneFlags& flags,
                const std::string& out_dir, bool with_csv) {
    Scene scene = resolve_scene(scene_name);
    flags.apply(scene);
    scene.validate();
    ManifestWriter mw(out_dir, "forward");
    mw.config(scene_summary_json(scene));

    const ResponseMatrix d = scene.forward();
    save_response(d, mw.add_output("response.bin").string());
    if (with_csv) {
        std::ofstream os(mw.add_output("response.csv"));
        write_response_csv(d, os);
    }
    const VecX sv = noiseless_spectrum(scene.array(), scene.inclusions, scene.sensing,
                                       scene.wavenumber(), scene.greens);
    {
        std::ofstream os(mw.add_output("spectrum.csv"));
        os << "index,value\n";
        os.precision(17);
        for (int i = 0; i < sv.size(); ++i) os << i + 1 << ',' << sv[i] << '\n';
    }
    mw.note("sigma1", sv[0]);
    mw.finalize();
    std::cout << "forward: M = " << d.dim() << ", leading spectrum";
    for (int i = 0; i < std::min<int>(3, int(sv.size())); ++i) std::cout << ' ' << sv[i];
    std::cout << "\nwrote " << mw.dir().string() << '\n';
    return 0;
}

int cmd_acquire(const std::string& data_file, const std::string& scene_name,
                const SceneFlags& flags, const std::string& out_dir) {
    Scene scene = resolve_scene(scene_name);
    flags.apply(scene);
    scene.validate();
    ManifestWriter mw(out_dir, "acquire");
    mw.config(scene_summary_json(scene));

    const ResponseMatrix d = data_file.empty()
                                 ? scene.forward()
                                 : load_response(data_file);
    const double sigma = scene.noise_sigma();
    const ResponseMatrix noisy = acquire(d, scene.noise, sigma);
    save_response(noisy, mw.add_output("noisy.bin").string());
    mw.note("sigma", sigma);
    mw.note("snr", sigma > 0 ? scene.reference_sigma1() / (sigma * std::sqrt(double(d.dim())))
                             : std::numeric_limits<double>::infinity());
    mw.finalize();
    std::cout << "acquire: sigma = " << sigma << ", wrote " << mw.dir().string() << '\n';
    return 0;
}

int cmd_invert(const std::string& data_file, const std::string& scene_name,
               const SceneFlags& flags, const std::string& kind_name,
               const std::string& out_dir, std::optional<int> r_assumed) {
    Scene scene = resolve_scene(scene_name);
    flags.apply(scene);
    scene.validate();
    ManifestWriter mw(out_dir, "invert");
    mw.config(scene_summary_json(scene));

    ResponseMatrix noisy = data_file.empty()
                               ? acquire(scene.forward(), scene.noise, scene.noise_sigma())
                               : load_response(data_file);
    const int expect = scene.sensing.size() * scene.array().sensor_count();
    if (noisy.dim() != expect) {
        std::ostringstream msg;
        msg << "invert: data dimension " << noisy.dim() << " does not match scene (M = "
            << expect << ")";
        throw parameter_error(msg.str());
    }

    AnalysisOptions aopt;
    aopt.theta = scene.theta;
    aopt.r_assumed = r_assumed;
    const SpectralData sd = analyze_response(noisy, aopt);
    mw.note("sigma_e", sd.sigma_e);
    mw.note("effective_rank", sd.rank);
    if (sd.rank < 1) {
        mw.finalize();
        std::cout << "invert: nothing detected above the noise (R~ = 0)\n";
        return 4;
    }

    const ImagingKind kind = imaging_kind_from_name(kind_name);
    const ArrayGeometry geom = scene.array();
    const GridImager imager(geom, scene.sensing, scene.grid(), scene.wavenumber(),
                            scene.greens);
    const ImageVolume vol = imager.image(kind, sd);
    {
        std::ofstream os(mw.add_output("image.csv"));
        write_image_csv(vol, os);
    }
    const int n_peaks = std::max<int>(1, int(scene.inclusions.size()));
    const LocalizationResult loc = extract_peaks(vol, n_peaks, geom);
    {
        std::ofstream os(mw.add_output("peaks.csv"));
        os << "rank,y1,y2,y3,value\n";
        os.precision(17);
        for (std::size_t i = 0; i < loc.peaks.size(); ++i)
            os << i + 1 << ',' << loc.peaks[i].location[0] << ','
               << loc.peaks[i].location[1] << ',' << loc.peaks[i].location[2] << ','
               << loc.peaks[i].value << '\n';
    }
    // Contrast diagnostic: a flat volume means localization failed.
    std::vector<double> vals(vol.values.data(), vol.values.data() + vol.values.size());
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    const double contrast = vol.values[vol.argmax()] / vals[vals.size() / 2];
    mw.note("peak_to_median", contrast);
    mw.note("significant_peak", contrast >= 3.0);

    {
        std::ofstream os(mw.add_output("reflectivity.csv"));
        os << "peak,component,estimate,truth,rel_error_pct\n";
        os.precision(12);
        static const char* comp_names[6] = {"11", "22", "33", "12", "13", "23"};
        static const int ii[6] = {0, 1, 2, 0, 0, 1};
        static const int jj[6] = {0, 1, 2, 1, 2, 2};
        for (std::size_t i = 0; i < loc.peaks.size(); ++i) {
            // Attach ground truth when a scene inclusion sits at this peak's
            // cross-range cell.
            std::optional<Inclusion> truth;
            for (const auto& inc : scene.inclusions)
                if (std::hypot(inc.center[0] - loc.peaks[i].location[0],
                               inc.center[1] - loc.peaks[i].location[1]) <
                    scene.grid_step / 2)
                    truth = inc;
            const auto est = estimate_reflectivity(noisy, loc.peaks[i].location, geom,
                                                   scene.sensing, scene.wavenumber(),
                                                   scene.greens, truth);
            for (int c = 0; c < 6; ++c) {
                os << i + 1 << ',' << comp_names[c] << ','
                   << est.symmetric_real(ii[c], jj[c]) << ',';
                if (truth)
                    os << truth->reflectivity(ii[c], jj[c]) << ','
                       << 100.0 * (*est.relative_errors)[c];
                else
                    os << "," ;
                os << '\n';
            }
        }
    }
    mw.finalize();
    std::cout << "invert: R~ = " << sd.rank << ", sigma_e = " << sd.sigma_e
              << ", peak at (" << loc.peaks[0].location.transpose() << ")"
              << ", contrast " << contrast << "\nwrote " << mw.dir().string() << '\n';
    return 0;
}

int cmd_montecarlo(const std::string& plan_name, const std::string& out_dir,
                   std::optional<std::uint64_t> seed, std::optional<int> trials) {
    TrialPlan plan = resolve_plan(plan_name);
    if (seed) plan.seed = *seed;
    if (trials) plan.trials = *trials;
    plan.validate();
    ManifestWriter mw(out_dir, "montecarlo");
    mw.config(json::parse(plan_to_json_text(plan)));

    const MonteCarloResult result = run_plan(plan);
    {
        std::ofstream os(mw.add_output("summary.csv"));
        write_summary_csv(result, os);
    }
    {
        std::ofstream os(mw.add_output("histograms.csv"));
        write_histogram_csv(result, os);
    }
    if (plan.keep_raw) {
        std::ofstream os(mw.add_output("raw.csv"));
        write_raw_csv(result, os);
    }
    for (std::size_t i = 0; i < result.first_trial_images.size(); ++i) {
        std::ofstream os(mw.add_output("image_" + std::to_string(i) + ".csv"));
        write_image_csv(result.first_trial_images[i], os);
    }
    mw.note("sigma1", result.sigma1);
    mw.finalize();
    std::cout << "montecarlo: " << plan.name << ", " << result.summaries.size()
              << " summaries\nwrote " << mw.dir().string() << '\n';
    return 0;
}

int cmd_tw2(const std::string& out_file) {
    const TracyWidom2& tw = TracyWidom2::instance();
    std::ofstream os(out_file);
    if (!os) throw parameter_error("tw2: cannot open " + out_file);
    tw.write_csv(os);
    std::cout << "tw2: mean = " << tw.mean() << ", variance = " << tw.variance()
              << ", wrote " << out_file << '\n';
    return 0;
}

int cmd_scene(const std::string& name, const std::string& out_file) {
    const Scene s = resolve_scene(name);
    if (out_file.empty()) {
        std::cout << scene_to_json_text(s);
    } else {
        save_scene(s, out_file);
        std::cout << "scene: wrote " << out_file << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Array imaging of small inclusions in noise"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware)");

    std::string scene_name = "single_large", data_file, out_dir = "out";
    std::string kind = "single", plan_name, tw2_out = "tw2.csv", scene_out;
    bool with_csv = false;
    std::optional<int> r_assumed;
    std::optional<std::uint64_t> mc_seed;
    std::optional<int> mc_trials;
    SceneFlags flags;

    auto* fwd = app.add_subcommand("forward", "Synthesize the noiseless response matrix");
    fwd->add_option("--scene", scene_name, "Bundled scene name or scene file")->required();
    fwd->add_option("--out-dir", out_dir, "Output directory");
    fwd->add_flag("--csv", with_csv, "Also export the matrix as CSV");
    add_scene_flags(fwd, flags);

    auto* acq = app.add_subcommand("acquire", "Corrupt a response matrix with noise");
    acq->add_option("--scene", scene_name)->required();
    acq->add_option("--data", data_file, "Response file (default: synthesize)");
    acq->add_option("--out-dir", out_dir);
    add_scene_flags(acq, flags);

    auto* inv = app.add_subcommand("invert", "Localize inclusions and estimate tensors");
    inv->add_option("--scene", scene_name)->required();
    inv->add_option("--data", data_file, "Noisy response file (default: synthesize)");
    inv->add_option("--kind", kind, "Imaging function: music | single | multi");
    inv->add_option("--out-dir", out_dir);
    inv->add_option("--rank", r_assumed, "Known signal rank for the noise estimate");
    add_scene_flags(inv, flags);

    auto* mc = app.add_subcommand("montecarlo", "Run a Monte Carlo campaign");
    mc->add_option("--plan", plan_name, "Bundled plan name or plan file")->required();
    mc->add_option("--out-dir", out_dir);
    mc->add_option("--seed", mc_seed, "Master seed override");
    mc->add_option("--trials", mc_trials, "Trial count override");

    auto* tw = app.add_subcommand("tw2", "Dump the detection distribution table as CSV");
    tw->add_option("--out", tw2_out, "Output CSV path");

    auto* sc = app.add_subcommand("scene", "Print or export a bundled scene");
    sc->add_option("name", scene_name, "Bundled scene name or scene file")->required();
    sc->add_option("--out", scene_out, "Write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);

    try {
        if (fwd->parsed()) return cmd_forward(scene_name, flags, out_dir, with_csv);
        if (acq->parsed()) return cmd_acquire(data_file, scene_name, flags, out_dir);
        if (inv->parsed())
            return cmd_invert(data_file, scene_name, flags, kind, out_dir, r_assumed);
        if (mc->parsed()) return cmd_montecarlo(plan_name, out_dir, mc_seed, mc_trials);
        if (tw->parsed()) return cmd_tw2(tw2_out);
        if (sc->parsed()) return cmd_scene(scene_name, scene_out);
    } catch (const parameter_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const detection_error& e) {
        std::cerr << "nothing detected: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
