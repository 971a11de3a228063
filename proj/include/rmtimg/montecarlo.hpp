// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmtimg/imaging.hpp"
#include "rmtimg/scene.hpp"

namespace rmtimg {

enum class ExperimentKind { spectrum, localization, reflectivity };

/// One Monte Carlo campaign: a scene, a list of noise fractions, a trial
/// count per fraction, and what to record. Per-trial RNG streams derive from
/// (seed, fraction_index * trials + trial), so results are independent of
/// execution order and worker count.
struct TrialPlan {
    std::string name = "custom";
    std::string scene = "single_large";
    ExperimentKind experiment = ExperimentKind::localization;
    std::vector<double> fractions = {0.25};
    int trials = 100;
    std::uint64_t seed = 20240801;
    ImagingKind kind = ImagingKind::robust_single;
    std::optional<int> r_assumed = 3;  // rank fed to the noise estimate; nullopt = iterate
    std::optional<std::vector<int>> sensing;  // override the scene's sensing set
    double theta = 0.01;
    int top_k = 16;
    bool with_music = false;   // also evaluate the MUSIC baseline per trial
    bool keep_raw = true;      // retain raw per-trial samples in summaries
    bool dump_images = false;  // export the first trial's image volume

    void validate() const;
};

struct Histogram {
    double lo = 0;
    double width = 1;
    std::vector<std::int64_t> counts;
};

struct StatSummary {
    std::string quantity;
    double fraction = 0;  // noise level p
    double sigma = 0;     // absolute noise level
    int trials = 0;
    double mean = 0;
    double stddev = 0;
    double predicted = std::numeric_limits<double>::quiet_NaN();
    double predicted_std = std::numeric_limits<double>::quiet_NaN();
    Histogram hist;
    std::vector<double> raw;  // per-trial samples in trial order (if kept)
};

struct MonteCarloResult {
    TrialPlan plan;
    double sigma1 = 0;  // reference sigma_1 of the scene
    std::vector<StatSummary> summaries;
    std::vector<ImageVolume> first_trial_images;  // when plan.dump_images
};

/// Statistics of the leading singular values, the first principal angle and
/// the noise-level estimate, with asymptotic predictions attached.
MonteCarloResult run_spectrum_sweep(const TrialPlan& plan);

/// Histograms of the imaging-function peak location; with plan.with_music the
/// peak-to-median contrast of both methods; for multi-inclusion scenes the
/// per-inclusion image values and exact-recovery indicator.
MonteCarloResult run_localization_histograms(const TrialPlan& plan);

/// Per-component relative errors of the reflectivity estimates against the
/// scene ground truth.
MonteCarloResult run_reflectivity_errors(const TrialPlan& plan);

MonteCarloResult run_plan(const TrialPlan& plan);

/// Bundled plans mirroring the shipped experiment set; resolves bundled
/// names or plan-file paths.
std::vector<std::string> bundled_plan_names();
TrialPlan bundled_plan(const std::string& name);
TrialPlan resolve_plan(const std::string& name_or_path);
TrialPlan plan_from_json_text(const std::string& text);
std::string plan_to_json_text(const TrialPlan& plan);

/// CSV with documented header:
/// quantity,fraction,sigma,trials,mean,std,predicted.
void write_summary_csv(const MonteCarloResult& result, std::ostream& os);
/// Histograms: quantity,fraction,bin_lo,bin_hi,count.
void write_histogram_csv(const MonteCarloResult& result, std::ostream& os);
/// Raw samples (when kept): quantity,fraction,trial,value.
void write_raw_csv(const MonteCarloResult& result, std::ostream& os);

}  // namespace rmtimg
