// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "rmtimg/response.hpp"
#include "rmtimg/svd.hpp"
#include "rmtimg/tracy_widom.hpp"
#include "rmtimg/types.hpp"

namespace rmtimg {

/// Asymptotic predictions for a rank-R signal of singular value sigma_j under
/// additive noise with per-entry std sigma/sqrt(M).

/// Mean of the perturbed singular value: sigma_j (1 + sigma^2/sigma_j^2)
/// above the threshold, 2 sigma below it.
double predict_singular_value(double sigma_j, double sigma);

/// Std of the perturbed singular value: sigma sqrt((1 - sigma^2/sigma_j^2)/2M)
/// above the threshold; sigma * sqrt(0.813) / (2M)^{2/3} * 2^... below, i.e.
/// the Tracy-Widom fluctuation sigma 2^{-2/3} sqrt(0.813) M^{-2/3}.
double predict_singular_value_std(double sigma_j, double sigma, int m);

/// Squared cosine of the angle between noisy and noiseless leading singular
/// vectors: 1 - sigma^2/sigma_j^2. Defined only above the threshold.
double predict_cos2(double sigma_j, double sigma);

/// Unbiased noise-level estimate from the tail of the spectrum:
///   sigma_e = sqrt( sum_{j>R} s_j^2 / (M - 4R) ).
double estimate_noise_level(const VecX& spectrum, int r_assumed);
/// Same using the exact Frobenius identity, so only the leading values are
/// needed: sum_{j>R} s_j^2 = frob_sq - sum_{j<=R} s_j^2.
double estimate_noise_level(double frob_sq, const VecX& top_values, int m,
                            int r_assumed);

/// Detection threshold r_theta = 2 + (2M)^{-2/3} PhiTW2^{-1}(1 - theta).
double detection_threshold(const TracyWidom2& tw, int m, double theta);

/// Effective rank: largest j with s_j > sigma_e * r_theta (0 if none).
int effective_rank(const VecX& spectrum, double sigma_e, int m, double theta,
                   const TracyWidom2& tw = TracyWidom2::instance());

/// Everything inversion needs from one noisy matrix.
struct SpectralData {
    int m = 0;
    VecX values;          // leading singular values, descending
    double frob_sq = 0;   // exact squared Frobenius norm of the matrix
    MatXc vectors;        // left singular vectors for the leading values
    double sigma_e = 0;   // estimated noise level
    int rank = 0;         // effective rank R~
    double theta = 0.01;  // false-alarm rate used for detection
    VecX corrected;       // sigma_j^e, j <= rank
    VecX cos2;            // cos^2 theta_j^e, j <= rank
    VecX weights;         // gamma_j, j <= rank

    MatXc leading_vectors() const { return vectors.leftCols(rank); }
};

/// Fill corrected values, angles and weights for the detected part of the
/// spectrum:
///   sigma_j^e = (s_j + sqrt(max(s_j^2 - 4 sigma_e^2, 0))) / 2,
///   cos^2     = 1 - (sigma_e / sigma_j^e)^2,
///   gamma_j   = clamp(3 (sigma_j^e - sigma_e) / sigma_e, 0, 1).
void correct_spectrum(SpectralData& sd);

struct AnalysisOptions {
    double theta = 0.01;
    std::optional<int> r_assumed;  // known rank for the noise estimate; else iterate
    int top_k = 16;                // leading triplets to resolve
    LanczosOptions lanczos{};
};

/// Top-k SVD, noise level (iterating estimate -> detect -> re-estimate when
/// the rank is unknown, at most 5 rounds), effective rank, and corrected
/// spectrum, in one pass.
SpectralData analyze_response(const ResponseMatrix& noisy,
                              const AnalysisOptions& opt = {});

/// Same pipeline starting from a precomputed decomposition.
SpectralData analyze_svd(const SvdResult& svd, const AnalysisOptions& opt = {});

}  // namespace rmtimg
