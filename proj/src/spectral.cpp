// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace rmtimg {

double predict_singular_value(double sigma_j, double sigma) {
    if (sigma < 0) throw parameter_error("predict_singular_value: sigma must be >= 0");
    if (sigma_j > sigma && sigma_j > 0)
        return sigma_j * (1.0 + (sigma * sigma) / (sigma_j * sigma_j));
    return 2.0 * sigma;
}

double predict_singular_value_std(double sigma_j, double sigma, int m) {
    if (sigma < 0 || m < 1)
        throw parameter_error("predict_singular_value_std: bad arguments");
    if (sigma_j > sigma) {
        const double r = sigma * sigma / (sigma_j * sigma_j);
        return sigma * std::sqrt((1.0 - r) / (2.0 * m));
    }
    // Tracy-Widom fluctuation of the bulk edge, std(Z2) = sqrt(0.813).
    return sigma * std::sqrt(0.813) / std::cbrt(4.0 * double(m) * double(m));
}

double predict_cos2(double sigma_j, double sigma) {
    if (!(sigma_j > sigma))
        throw parameter_error("predict_cos2: undefined at or below the noise level");
    if (sigma == 0) return 1.0;
    return 1.0 - (sigma * sigma) / (sigma_j * sigma_j);
}

double estimate_noise_level(const VecX& spectrum, int r_assumed) {
    const int m = int(spectrum.size());
    if (r_assumed < 0 || 4 * r_assumed >= m)
        throw parameter_error("estimate_noise_level: need 0 <= R < M/4");
    double tail = 0;
    for (int j = r_assumed; j < m; ++j) tail += spectrum[j] * spectrum[j];
    return std::sqrt(tail / double(m - 4 * r_assumed));
}

double estimate_noise_level(double frob_sq, const VecX& top_values, int m,
                            int r_assumed) {
    if (r_assumed < 0 || 4 * r_assumed >= m)
        throw parameter_error("estimate_noise_level: need 0 <= R < M/4");
    if (r_assumed > top_values.size())
        throw parameter_error("estimate_noise_level: R exceeds available leading values");
    double head = 0;
    for (int j = 0; j < r_assumed; ++j) head += top_values[j] * top_values[j];
    const double tail = std::max(frob_sq - head, 0.0);
    return std::sqrt(tail / double(m - 4 * r_assumed));
}

double detection_threshold(const TracyWidom2& tw, int m, double theta) {
    if (!(theta > 0 && theta < 1))
        throw parameter_error("detection_threshold: theta must lie in (0,1)");
    return 2.0 + tw.quantile(1.0 - theta) / std::cbrt(4.0 * double(m) * double(m));
}

int effective_rank(const VecX& spectrum, double sigma_e, int m, double theta,
                   const TracyWidom2& tw) {
    const double cut = sigma_e * detection_threshold(tw, m, theta);
    int r = 0;
    for (int j = 0; j < spectrum.size(); ++j)
        if (spectrum[j] > cut) r = j + 1;
    return r;
}

void correct_spectrum(SpectralData& sd) {
    const int r = sd.rank;
    sd.corrected.resize(r);
    sd.cos2.resize(r);
    sd.weights.resize(r);
    for (int j = 0; j < r; ++j) {
        const double s = sd.values[j];
        if (sd.sigma_e == 0.0) {
            sd.corrected[j] = s;
            sd.cos2[j] = 1.0;
            sd.weights[j] = 1.0;
            continue;
        }
        const double rad = std::max(s * s - 4.0 * sd.sigma_e * sd.sigma_e, 0.0);
        sd.corrected[j] = 0.5 * (s + std::sqrt(rad));
        const double q = sd.sigma_e / sd.corrected[j];
        sd.cos2[j] = std::max(1.0 - q * q, 0.0);
        sd.weights[j] =
            std::clamp(3.0 * (sd.corrected[j] - sd.sigma_e) / sd.sigma_e, 0.0, 1.0);
    }
}

SpectralData analyze_svd(const SvdResult& svd, const AnalysisOptions& opt) {
    SpectralData sd;
    sd.m = svd.dim;
    sd.values = svd.values;
    sd.frob_sq = svd.frob_sq;
    sd.vectors = svd.left;
    sd.theta = opt.theta;

    const auto& tw = TracyWidom2::instance();
    const int max_r = std::min<int>(int(sd.values.size()), (sd.m - 1) / 4);
    if (opt.r_assumed) {
        const int r = std::min(*opt.r_assumed, max_r);
        sd.sigma_e = estimate_noise_level(sd.frob_sq, sd.values, sd.m, r);
        sd.rank = effective_rank(sd.values, sd.sigma_e, sd.m, sd.theta, tw);
    } else {
        // Estimate -> detect -> re-estimate until the rank stabilizes.
        int r = 0;
        for (int it = 0; it < 5; ++it) {
            sd.sigma_e = estimate_noise_level(sd.frob_sq, sd.values, sd.m, r);
            const int detected =
                std::min(effective_rank(sd.values, sd.sigma_e, sd.m, sd.theta, tw), max_r);
            if (detected == r) break;
            r = detected;
        }
        sd.rank = effective_rank(sd.values, sd.sigma_e, sd.m, sd.theta, tw);
    }
    if (sd.rank > sd.vectors.cols())
        throw numerical_error(
            "analyze_svd: detected rank exceeds the computed leading subspace; "
            "raise top_k");
    correct_spectrum(sd);
    return sd;
}

SpectralData analyze_response(const ResponseMatrix& noisy, const AnalysisOptions& opt) {
    const int k = std::min(opt.top_k, noisy.dim());
    return analyze_svd(svd_top(noisy.data, k, opt.lanczos), opt);
}

}  // namespace rmtimg
