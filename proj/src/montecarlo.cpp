// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rmtimg/parallel.hpp"
#include "rmtimg/peaks.hpp"
#include "rmtimg/reflectivity.hpp"
#include "rmtimg/spectral.hpp"

namespace rmtimg {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Histogram make_histogram(const std::vector<double>& samples, double lo, double width,
                         int nbins) {
    Histogram h;
    h.lo = lo;
    h.width = width;
    h.counts.assign(std::max(nbins, 1), 0);
    for (double v : samples) {
        if (std::isnan(v)) continue;
        int b = int(std::floor((v - lo) / width));
        b = std::clamp(b, 0, int(h.counts.size()) - 1);
        ++h.counts[b];
    }
    return h;
}

Histogram auto_histogram(const std::vector<double>& samples, int nbins = 25) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : samples)
        if (!std::isnan(v)) { lo = std::min(lo, v); hi = std::max(hi, v); }
    if (!(lo < hi)) return make_histogram(samples, std::isfinite(lo) ? lo - 0.5 : 0.0, 1.0, 1);
    return make_histogram(samples, lo, (hi - lo) / nbins * (1 + 1e-12), nbins);
}

using HistMaker = std::function<Histogram(const std::vector<double>&)>;

const HistMaker kAutoHist = [](const std::vector<double>& v) { return auto_histogram(v); };

StatSummary summarize(std::string quantity, double fraction, double sigma,
                      std::vector<double> samples, const HistMaker& mk_hist,
                      double predicted = kNaN, double predicted_std = kNaN,
                      bool keep_raw = true) {
    StatSummary s;
    s.quantity = std::move(quantity);
    s.fraction = fraction;
    s.sigma = sigma;
    double sum = 0;
    int n = 0;
    for (double v : samples) {
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
    }
    s.trials = n;
    s.mean = n ? sum / n : kNaN;
    double dev2 = 0;
    for (double v : samples)
        if (!std::isnan(v)) dev2 += (v - s.mean) * (v - s.mean);
    s.stddev = n > 1 ? std::sqrt(dev2 / n) : 0.0;
    s.predicted = predicted;
    s.predicted_std = predicted_std;
    s.hist = mk_hist(samples);
    if (keep_raw) s.raw = std::move(samples);
    return s;
}

struct ScenePack {
    Scene scene;
    ArrayGeometry geom;
    SearchGrid grid;
    double k;
    double sigma1;
    ResponseMatrix noiseless;

    explicit ScenePack(const TrialPlan& plan)
        : scene(apply_overrides(resolve_scene(plan.scene), plan)),
          geom(scene.array()),
          grid(scene.grid()),
          k(scene.wavenumber()),
          sigma1(scene.reference_sigma1()),
          noiseless(scene.forward()) {}

    static Scene apply_overrides(Scene s, const TrialPlan& plan) {
        if (plan.sensing) s.sensing = SensingMatrix(*plan.sensing);
        s.theta = plan.theta;
        return s;
    }

    NoiseSpec trial_spec(const TrialPlan& plan, double fraction, std::uint64_t gidx) const {
        NoiseSpec spec = scene.noise;
        spec.fraction = fraction;
        spec.seed = derive_stream_seed(plan.seed, gidx);
        return spec;
    }
};

AnalysisOptions analysis_options(const TrialPlan& plan) {
    AnalysisOptions opt;
    opt.theta = plan.theta;
    opt.r_assumed = plan.r_assumed;
    opt.top_k = plan.top_k;
    return opt;
}

double volume_median(const ImageVolume& v) {
    std::vector<double> tmp(v.values.data(), v.values.data() + v.values.size());
    const std::size_t mid = tmp.size() / 2;
    std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
    return tmp[mid];
}

const char* kComponentNames[6] = {"11", "22", "33", "12", "13", "23"};

}  // namespace

void TrialPlan::validate() const {
    if (trials < 1) throw parameter_error("plan: trials must be >= 1");
    if (fractions.empty()) throw parameter_error("plan: fractions list is empty");
    for (double f : fractions)
        if (f < 0) throw parameter_error("plan: noise fractions must be >= 0");
    if (!(theta > 0 && theta < 1)) throw parameter_error("plan: theta must lie in (0,1)");
    if (top_k < 1) throw parameter_error("plan: top_k must be >= 1");
}

MonteCarloResult run_spectrum_sweep(const TrialPlan& plan) {
    plan.validate();
    ScenePack pack(plan);
    const NoiselessSvd exact = noiseless_svd(pack.geom, pack.scene.inclusions,
                                             pack.scene.sensing, pack.k,
                                             pack.scene.greens);
    const int m = pack.noiseless.dim();
    const int nvals = std::min<int>(3, int(exact.values.size()));
    const VecXc u1 = exact.left_vectors.col(0);

    MonteCarloResult out;
    out.plan = plan;
    out.sigma1 = pack.sigma1;

    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
        const double p = plan.fractions[fi];
        const double sigma = p * pack.sigma1;
        std::vector<std::vector<double>> sv(nvals, std::vector<double>(plan.trials));
        std::vector<double> cos2(plan.trials), sig_e(plan.trials);

        parallel_for(0, plan.trials, [&](std::int64_t t) {
            const auto spec = pack.trial_spec(plan, p, fi * plan.trials + t);
            const ResponseMatrix noisy = acquire(pack.noiseless, spec, sigma);
            const SvdResult top = svd_top(noisy.data, std::max(plan.top_k, nvals + 2));
            for (int j = 0; j < nvals; ++j) sv[j][t] = top.values[j];
            cos2[t] = std::norm(u1.dot(top.left.col(0)));
            const int r = plan.r_assumed.value_or(nvals);
            sig_e[t] = sigma > 0
                           ? estimate_noise_level(top.frob_sq, top.values, m, r) / sigma
                           : kNaN;
        });

        for (int j = 0; j < nvals; ++j) {
            const double pred = predict_singular_value(exact.values[j], sigma);
            const double pred_std = predict_singular_value_std(exact.values[j], sigma, m);
            out.summaries.push_back(summarize("sv" + std::to_string(j + 1), p, sigma,
                                              std::move(sv[j]), kAutoHist, pred,
                                              pred_std, plan.keep_raw));
        }
        const double pred_cos2 =
            (sigma > 0 && exact.values[0] > sigma) ? predict_cos2(exact.values[0], sigma)
            : (sigma == 0 ? 1.0 : kNaN);
        out.summaries.push_back(summarize("cos2_1", p, sigma, std::move(cos2),
                                          kAutoHist, pred_cos2, kNaN, plan.keep_raw));
        out.summaries.push_back(summarize("sigma_e_over_sigma", p, sigma,
                                          std::move(sig_e), kAutoHist, 1.0, kNaN,
                                          plan.keep_raw));
    }
    return out;
}

MonteCarloResult run_localization_histograms(const TrialPlan& plan) {
    plan.validate();
    ScenePack pack(plan);
    const int n_inc = int(pack.scene.inclusions.size());
    const GridImager imager(pack.geom, pack.scene.sensing, pack.grid, pack.k,
                            pack.scene.greens);
    const AnalysisOptions aopt = analysis_options(plan);

    MonteCarloResult out;
    out.plan = plan;
    out.sigma1 = pack.sigma1;

    std::vector<std::int64_t> true_idx(n_inc);
    for (int i = 0; i < n_inc; ++i)
        true_idx[i] = pack.grid.nearest_index(pack.scene.inclusions[i].center);

    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
        const double p = plan.fractions[fi];
        const double sigma = p * pack.sigma1;
        std::vector<std::vector<double>> peak_axis(3 * n_inc,
                                                   std::vector<double>(plan.trials, kNaN));
        std::vector<double> rank(plan.trials, kNaN);
        std::vector<double> robust_contrast(plan.trials, kNaN);
        std::vector<double> music_contrast(plan.trials, kNaN);
        std::vector<double> music_weaker(plan.trials, kNaN);
        std::vector<double> found_all(plan.trials, kNaN);
        std::vector<std::vector<double>> true_vals(n_inc,
                                                   std::vector<double>(plan.trials, kNaN));
        std::vector<double> weakest_is_2(plan.trials, kNaN);

        parallel_for(0, plan.trials, [&](std::int64_t t) {
            const auto spec = pack.trial_spec(plan, p, fi * plan.trials + t);
            const ResponseMatrix noisy = acquire(pack.noiseless, spec, sigma);
            const SpectralData sd = analyze_response(noisy, aopt);
            rank[t] = sd.rank;
            if (sd.rank < 1) return;
            const ImageVolume vol = imager.image(plan.kind, sd);
            const LocalizationResult loc = extract_peaks(vol, n_inc, pack.geom);
            // Match every inclusion to its nearest accepted peak (cross-range).
            for (int i = 0; i < n_inc; ++i) {
                const Vec3 truth = pack.scene.inclusions[i].center;
                double best = std::numeric_limits<double>::infinity();
                const Peak* match = nullptr;
                for (const Peak& pk : loc.peaks) {
                    const double d = std::hypot(pk.location[0] - truth[0],
                                                pk.location[1] - truth[1]);
                    if (d < best) { best = d; match = &pk; }
                }
                if (match)
                    for (int a = 0; a < 3; ++a)
                        peak_axis[3 * i + a][t] = match->location[a];
                true_vals[i][t] = vol.values[true_idx[i]];
            }
            if (n_inc > 1) {
                std::vector<std::int64_t> got;
                for (const Peak& pk : loc.peaks) got.push_back(pk.index);
                std::sort(got.begin(), got.end());
                std::vector<std::int64_t> want = true_idx;
                std::sort(want.begin(), want.end());
                found_all[t] = (got == want) ? 1.0 : 0.0;
                int weakest = 0;
                for (int i = 1; i < n_inc; ++i)
                    if (true_vals[i][t] < true_vals[weakest][t]) weakest = i;
                weakest_is_2[t] = (weakest == 1) ? 1.0 : 0.0;
            }
            if (plan.with_music) {
                const ImageVolume mv = imager.music(sd);
                robust_contrast[t] = vol.values[vol.argmax()] / volume_median(vol);
                music_contrast[t] = mv.values[mv.argmax()] / volume_median(mv);
                music_weaker[t] = music_contrast[t] < robust_contrast[t] ? 1.0 : 0.0;
            }
        });

        auto axis_hist = [&](int axis) {
            return HistMaker([&, axis](const std::vector<double>& v) {
                return make_histogram(v, pack.grid.lo()[axis] - pack.grid.step() / 2,
                                      pack.grid.step(), pack.grid.count(axis));
            });
        };
        for (int i = 0; i < n_inc; ++i) {
            const std::string suffix = n_inc > 1 ? "_p" + std::to_string(i + 1) : "";
            for (int a = 0; a < 3; ++a)
                out.summaries.push_back(summarize(
                    "peak_y" + std::to_string(a + 1) + suffix, p, sigma,
                    std::move(peak_axis[3 * i + a]), axis_hist(a), kNaN, kNaN,
                    plan.keep_raw));
            if (n_inc > 1)
                out.summaries.push_back(summarize("true_value" + suffix, p, sigma,
                                                  std::move(true_vals[i]), kAutoHist,
                                                  kNaN, kNaN, plan.keep_raw));
        }
        out.summaries.push_back(summarize("effective_rank", p, sigma, std::move(rank),
                                          kAutoHist, kNaN, kNaN, plan.keep_raw));
        if (n_inc > 1) {
            out.summaries.push_back(summarize("found_all", p, sigma, std::move(found_all),
                                              kAutoHist, kNaN, kNaN, plan.keep_raw));
            out.summaries.push_back(summarize("weakest_is_p2", p, sigma,
                                              std::move(weakest_is_2), kAutoHist, kNaN,
                                              kNaN, plan.keep_raw));
        }
        if (plan.with_music) {
            out.summaries.push_back(summarize("robust_contrast", p, sigma,
                                              std::move(robust_contrast), kAutoHist,
                                              kNaN, kNaN, plan.keep_raw));
            out.summaries.push_back(summarize("music_contrast", p, sigma,
                                              std::move(music_contrast), kAutoHist,
                                              kNaN, kNaN, plan.keep_raw));
            out.summaries.push_back(summarize("music_weaker", p, sigma,
                                              std::move(music_weaker), kAutoHist, kNaN,
                                              kNaN, plan.keep_raw));
        }
        if (plan.dump_images && !plan.fractions.empty()) {
            const auto spec = pack.trial_spec(plan, p, fi * plan.trials + 0);
            const ResponseMatrix noisy = acquire(pack.noiseless, spec, sigma);
            const SpectralData sd = analyze_response(noisy, aopt);
            if (sd.rank >= 1) {
                out.first_trial_images.push_back(imager.image(plan.kind, sd));
                if (plan.with_music) out.first_trial_images.push_back(imager.music(sd));
            }
        }
    }
    return out;
}

MonteCarloResult run_reflectivity_errors(const TrialPlan& plan) {
    plan.validate();
    ScenePack pack(plan);
    const int n_inc = int(pack.scene.inclusions.size());
    const GridImager imager(pack.geom, pack.scene.sensing, pack.grid, pack.k,
                            pack.scene.greens);
    const AnalysisOptions aopt = analysis_options(plan);

    MonteCarloResult out;
    out.plan = plan;
    out.sigma1 = pack.sigma1;

    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
        const double p = plan.fractions[fi];
        const double sigma = p * pack.sigma1;
        std::vector<std::vector<double>> err(6 * n_inc,
                                             std::vector<double>(plan.trials, kNaN));

        parallel_for(0, plan.trials, [&](std::int64_t t) {
            const auto spec = pack.trial_spec(plan, p, fi * plan.trials + t);
            const ResponseMatrix noisy = acquire(pack.noiseless, spec, sigma);
            const SpectralData sd = analyze_response(noisy, aopt);
            if (sd.rank < 1) return;
            const ImageVolume vol = imager.image(plan.kind, sd);
            const LocalizationResult loc = extract_peaks(vol, n_inc, pack.geom);
            for (int i = 0; i < n_inc; ++i) {
                const Inclusion& truth = pack.scene.inclusions[i];
                double best = std::numeric_limits<double>::infinity();
                const Peak* match = nullptr;
                for (const Peak& pk : loc.peaks) {
                    const double d = std::hypot(pk.location[0] - truth.center[0],
                                                pk.location[1] - truth.center[1]);
                    if (d < best) { best = d; match = &pk; }
                }
                if (!match) continue;
                const auto est = estimate_reflectivity(noisy, match->location, pack.geom,
                                                       pack.scene.sensing, pack.k,
                                                       pack.scene.greens, truth);
                for (int c = 0; c < 6; ++c)
                    err[6 * i + c][t] = 100.0 * (*est.relative_errors)[c];
            }
        });

        for (int i = 0; i < n_inc; ++i)
            for (int c = 0; c < 6; ++c) {
                const std::string name = "rho_err_" + std::string(kComponentNames[c]) +
                                         (n_inc > 1 ? "_p" + std::to_string(i + 1) : "");
                const HistMaker pct_hist = [](const std::vector<double>& v) {
                    double mx = 1.0;
                    for (double x : v)
                        if (!std::isnan(x)) mx = std::max(mx, x);
                    const int bins = std::min(int(std::ceil(mx)) + 1, 400);
                    return make_histogram(v, 0.0, 1.0, bins);
                };
                out.summaries.push_back(summarize(name, p, sigma,
                                                  std::move(err[6 * i + c]), pct_hist,
                                                  kNaN, kNaN, plan.keep_raw));
            }
    }
    return out;
}

MonteCarloResult run_plan(const TrialPlan& plan) {
    switch (plan.experiment) {
        case ExperimentKind::spectrum: return run_spectrum_sweep(plan);
        case ExperimentKind::localization: return run_localization_histograms(plan);
        case ExperimentKind::reflectivity: return run_reflectivity_errors(plan);
    }
    throw parameter_error("run_plan: bad experiment kind");
}

namespace {

std::vector<double> svd_sweep_fractions() {
    // Geometric grid so every exact singular value crosses the detectable
    // window sigma_j / sigma in [1.2, 10].
    std::vector<double> f;
    const double lo = 0.0105, hi = 0.85;
    for (int i = 0; i < 25; ++i) f.push_back(lo * std::pow(hi / lo, i / 24.0));
    return f;
}

}  // namespace

std::vector<std::string> bundled_plan_names() {
    return {"fig_svd1", "fig_nlev",     "fig_music",   "fig_imagesnf",
            "hist_nf",  "hist_ff",      "hist_nf_rho", "hist_nf_partu1",
            "hist_nfrho_partu1",        "table1",      "fig_3t_near",
            "fig_3t_far"};
}

TrialPlan bundled_plan(const std::string& name) {
    TrialPlan p;
    p.name = name;
    if (name == "fig_svd1") {
        p.scene = "single_large";
        p.experiment = ExperimentKind::spectrum;
        p.fractions = svd_sweep_fractions();
        p.trials = 40;
        p.r_assumed = 3;
    } else if (name == "fig_nlev") {
        p.scene = "single_large";
        p.experiment = ExperimentKind::spectrum;
        p.fractions = {0.25, 0.5, 1.0, 2.0};
        p.trials = 100;
        p.r_assumed = 3;
    } else if (name == "fig_music") {
        p.scene = "single_large";
        p.fractions = {0.25, 0.75};
        p.trials = 100;
        p.with_music = true;
        p.dump_images = true;
    } else if (name == "fig_imagesnf") {
        p.scene = "single_large";
        p.fractions = {0.75};
        p.trials = 1;
        p.dump_images = true;
    } else if (name == "hist_nf") {
        p.scene = "single_large";
        p.fractions = {0.25, 0.5, 0.75};
        p.trials = 100;
    } else if (name == "hist_ff") {
        p.scene = "single_small";
        p.fractions = {0.1, 0.25, 0.5};
        p.trials = 100;
    } else if (name == "hist_nf_rho") {
        p.scene = "single_large";
        p.experiment = ExperimentKind::reflectivity;
        p.fractions = {0.25, 0.5};
        p.trials = 100;
    } else if (name == "hist_nf_partu1") {
        p.scene = "single_large";
        p.sensing = std::vector<int>{1};
        p.fractions = {0.25, 0.5, 0.75};
        p.trials = 100;
    } else if (name == "hist_nfrho_partu1") {
        p.scene = "single_large";
        p.sensing = std::vector<int>{1};
        p.experiment = ExperimentKind::reflectivity;
        p.fractions = {0.25};
        p.trials = 100;
    } else if (name == "table1") {
        p.scene = "three_large";
        p.experiment = ExperimentKind::reflectivity;
        p.kind = ImagingKind::robust_multi;
        p.fractions = {0.0, 0.25, 0.75};
        p.trials = 1;
        p.r_assumed = 9;
        p.top_k = 20;
    } else if (name == "fig_3t_near") {
        p.scene = "three_large";
        p.kind = ImagingKind::robust_multi;
        p.fractions = {0.25, 0.75};
        p.trials = 100;
        p.r_assumed = 9;
        p.top_k = 20;
        p.dump_images = true;
    } else if (name == "fig_3t_far") {
        p.scene = "three_small";
        p.kind = ImagingKind::robust_multi;
        p.fractions = {0.25, 0.5};
        p.trials = 1;
        p.r_assumed = 9;
        p.top_k = 20;
        p.dump_images = true;
    } else {
        throw parameter_error("bundled_plan: unknown plan '" + name + "'");
    }
    return p;
}

TrialPlan plan_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw parameter_error(std::string("plan: JSON parse error: ") + e.what());
    }
    TrialPlan p;
    try {
        if (j.contains("base")) p = bundled_plan(j["base"].get<std::string>());
        p.name = j.value("name", p.name);
        p.scene = j.value("scene", p.scene);
        if (j.contains("experiment")) {
            const std::string e = j["experiment"].get<std::string>();
            if (e == "spectrum") p.experiment = ExperimentKind::spectrum;
            else if (e == "localization") p.experiment = ExperimentKind::localization;
            else if (e == "reflectivity") p.experiment = ExperimentKind::reflectivity;
            else throw parameter_error("plan: unknown experiment '" + e + "'");
        }
        if (j.contains("fractions"))
            p.fractions = j["fractions"].get<std::vector<double>>();
        p.trials = j.value("trials", p.trials);
        p.seed = j.value("seed", p.seed);
        if (j.contains("kind"))
            p.kind = imaging_kind_from_name(j["kind"].get<std::string>());
        if (j.contains("r_assumed")) {
            if (j["r_assumed"].is_null()) p.r_assumed.reset();
            else p.r_assumed = j["r_assumed"].get<int>();
        }
        if (j.contains("sensing")) p.sensing = j["sensing"].get<std::vector<int>>();
        p.theta = j.value("theta", p.theta);
        p.top_k = j.value("top_k", p.top_k);
        p.with_music = j.value("with_music", p.with_music);
        p.keep_raw = j.value("keep_raw", p.keep_raw);
        p.dump_images = j.value("dump_images", p.dump_images);
    } catch (const json::exception& e) {
        throw parameter_error(std::string("plan: schema violation: ") + e.what());
    }
    p.validate();
    return p;
}

std::string plan_to_json_text(const TrialPlan& p) {
    json j;
    j["name"] = p.name;
    j["scene"] = p.scene;
    j["experiment"] = p.experiment == ExperimentKind::spectrum ? "spectrum"
                      : p.experiment == ExperimentKind::localization ? "localization"
                                                                     : "reflectivity";
    j["fractions"] = p.fractions;
    j["trials"] = p.trials;
    j["seed"] = p.seed;
    j["kind"] = imaging_kind_name(p.kind);
    if (p.r_assumed) j["r_assumed"] = *p.r_assumed;
    else j["r_assumed"] = nullptr;
    if (p.sensing) j["sensing"] = *p.sensing;
    j["theta"] = p.theta;
    j["top_k"] = p.top_k;
    j["with_music"] = p.with_music;
    j["keep_raw"] = p.keep_raw;
    j["dump_images"] = p.dump_images;
    return j.dump(2) + "\n";
}

TrialPlan resolve_plan(const std::string& name_or_path) {
    for (const auto& n : bundled_plan_names())
        if (n == name_or_path) return bundled_plan(n);
    std::ifstream is(name_or_path);
    if (!is) throw parameter_error("resolve_plan: no bundled plan or file '" +
                                   name_or_path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return plan_from_json_text(buf.str());
}

void write_summary_csv(const MonteCarloResult& result, std::ostream& os) {
    os << "quantity,fraction,sigma,trials,mean,std,predicted,predicted_std\n";
    os.precision(17);
    for (const auto& s : result.summaries)
        os << s.quantity << ',' << s.fraction << ',' << s.sigma << ',' << s.trials << ','
           << s.mean << ',' << s.stddev << ',' << s.predicted << ',' << s.predicted_std
           << '\n';
}

void write_histogram_csv(const MonteCarloResult& result, std::ostream& os) {
    os << "quantity,fraction,bin_lo,bin_hi,count\n";
    os.precision(17);
    for (const auto& s : result.summaries)
        for (std::size_t b = 0; b < s.hist.counts.size(); ++b)
            os << s.quantity << ',' << s.fraction << ',' << s.hist.lo + b * s.hist.width
               << ',' << s.hist.lo + (b + 1) * s.hist.width << ',' << s.hist.counts[b]
               << '\n';
}

void write_raw_csv(const MonteCarloResult& result, std::ostream& os) {
    os << "quantity,fraction,trial,value\n";
    os.precision(17);
    for (const auto& s : result.summaries)
        for (std::size_t t = 0; t < s.raw.size(); ++t)
            os << s.quantity << ',' << s.fraction << ',' << t << ',' << s.raw[t] << '\n';
}

}  // namespace rmtimg
