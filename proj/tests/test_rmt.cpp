// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rmtimg/acquisition.hpp"
#include "rmtimg/spectral.hpp"
#include "rmtimg/tracy_widom.hpp"

using namespace rmtimg;

TEST_CASE("tracy-widom table: tails, monotonicity, moments") {
    const auto& tw = TracyWidom2::instance();
    CHECK(tw.cdf(-10.0) < 1e-12);
    CHECK(tw.cdf(6.0) >= 1.0 - 1e-10);
    double prev = -1;
    for (double z = -10; z <= 6.0; z += 0.05) {
        const double c = tw.cdf(z);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(tw.mean() == doctest::Approx(-1.771).epsilon(0.003));
    CHECK(tw.variance() == doctest::Approx(0.813).epsilon(0.006));
}

TEST_CASE("tracy-widom quantile: inverse contract and monotonicity") {
    const auto& tw = TracyWidom2::instance();
    for (double q : {0.01, 0.1, 0.5, 0.9, 0.99}) {
        const double z = tw.quantile(q);
        CHECK(tw.cdf(z) == doctest::Approx(q).epsilon(1e-6));
    }
    CHECK(tw.quantile(0.2) < tw.quantile(0.6));
    CHECK(tw.quantile(0.6) < tw.quantile(0.95));
    CHECK_THROWS_AS(tw.quantile(0.0), parameter_error);
    CHECK_THROWS_AS(tw.quantile(1.0), parameter_error);

    // bisection oracle for q = 0.9 on the same table
    double a = tw.table_lo(), b = tw.table_hi();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        (tw.cdf(mid) < 0.9 ? a : b) = mid;
    }
    CHECK(tw.quantile(0.9) == doctest::Approx(0.5 * (a + b)).epsilon(1e-8));
}

TEST_CASE("spiked predictions: closed-form spot values") {
    CHECK(predict_singular_value(2.0, 1.0) == doctest::Approx(2.5));
    CHECK(predict_singular_value(0.0, 1.0) == doctest::Approx(2.0));
    CHECK(predict_singular_value(0.5, 1.0) == doctest::Approx(2.0));

    // above-threshold std tends to sigma/sqrt(2M) far from the edge
    const int m = 1323;
    CHECK(predict_singular_value_std(100.0, 1.0, m) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * m)).epsilon(1e-3));
    // at the edge the leading-order std vanishes
    CHECK(predict_singular_value_std(1.0 + 1e-9, 1.0, m) < 1e-4);
    // below threshold: Tracy-Widom scale
    CHECK(predict_singular_value_std(0.5, 1.0, m) ==
          doctest::Approx(std::sqrt(0.813) / std::cbrt(4.0 * m * m)).epsilon(1e-6));

    CHECK(predict_cos2(2.0, 1.0) == doctest::Approx(0.75));
    CHECK(predict_cos2(5.0, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(predict_cos2(0.9, 1.0), parameter_error);
}

TEST_CASE("noise estimator on synthetic spectra") {
    // zero matrix
    CHECK(estimate_noise_level(VecX::Zero(100), 0) == 0.0);
    // known tail: all tail values c -> sigma_e = c * sqrt((M-R)/(M-4R))
    const int m = 100;
    VecX s = VecX::Constant(m, 2.0);
    s[0] = 50;
    s[1] = 40;
    const double est = estimate_noise_level(s, 2);
    CHECK(est == doctest::Approx(2.0 * std::sqrt((m - 2.0) / (m - 8.0))).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_noise_level(s, 25), parameter_error);

    // frobenius variant agrees with the full-spectrum variant
    const double frob = s.squaredNorm();
    CHECK(estimate_noise_level(frob, s.head(6), m, 2) == doctest::Approx(est));
}

TEST_CASE("noise estimator is unbiased on pure noise") {
    const int m = 300, trials = 40;
    const double sigma = 0.8;
    double acc = 0;
    for (int t = 0; t < trials; ++t) {
        const MatXc w = synthesize_noise(m, sigma, 31000 + t);
        acc += estimate_noise_level(w.squaredNorm(), VecX(), m, 0);
    }
    CHECK(acc / trials == doctest::Approx(sigma).epsilon(0.01));
}

TEST_CASE("effective rank detection and threshold scale") {
    const auto& tw = TracyWidom2::instance();
    const int m = 1323;
    const double r_theta = detection_threshold(tw, m, 0.01);
    // (2M)^{2/3} = 191.3: the correction beyond 2 is the quantile over that
    CHECK(r_theta - 2.0 ==
          doctest::Approx(tw.quantile(0.99) / std::cbrt(4.0 * m * m)).epsilon(1e-12));
    CHECK(std::abs(r_theta - 2.0) <= std::abs(tw.quantile(0.99)) / 191.2);

    VecX s(6);
    s << 10, 3, 2.1, 2.0, 1.9, 1.5;
    CHECK(effective_rank(s, 1.0, m, 0.01, tw) == 3);
    CHECK(effective_rank(s, 6.0, m, 0.01, tw) == 0);
}

TEST_CASE("spectrum correction inverts the prediction") {
    SpectralData sd;
    sd.m = 1000;
    sd.sigma_e = 1.0;
    sd.rank = 3;
    sd.values.resize(3);
    sd.values << 2.5, 2.0, 3.7;
    correct_spectrum(sd);
    CHECK(sd.corrected[0] == doctest::Approx(2.0));
    CHECK(sd.cos2[0] == doctest::Approx(0.75));
    CHECK(sd.weights[0] == doctest::Approx(1.0));
    CHECK(sd.corrected[1] == doctest::Approx(1.0));
    CHECK(sd.cos2[1] == doctest::Approx(0.0));
    CHECK(sd.weights[1] == doctest::Approx(0.0));
    // round trip above the threshold
    for (int j = 0; j < 3; ++j) {
        if (sd.values[j] <= 2.0) continue;
        CHECK(predict_singular_value(sd.corrected[j], sd.sigma_e) ==
              doctest::Approx(sd.values[j]).epsilon(1e-12));
    }
}

TEST_CASE("analysis pipeline on a small spiked matrix") {
    const int m = 400;
    const double sigma = 0.6;
    std::mt19937_64 eng(5);
    std::normal_distribution<double> n01;
    VecXc u(m), v(m);
    for (int i = 0; i < m; ++i) {
        u[i] = cxd(n01(eng), n01(eng));
        v[i] = cxd(n01(eng), n01(eng));
    }
    u /= u.norm();
    v /= v.norm();
    ResponseMatrix noisy{3.0 * u * v.adjoint() + synthesize_noise(m, sigma, 99),
                         SensingMatrix::complete(), true};

    AnalysisOptions opt;
    opt.r_assumed = 1;
    const SpectralData sd = analyze_response(noisy, opt);
    CHECK(sd.rank == 1);
    CHECK(sd.sigma_e == doctest::Approx(sigma).epsilon(0.05));
    CHECK(sd.values[0] == doctest::Approx(predict_singular_value(3.0, sigma)).epsilon(0.05));
    CHECK(sd.corrected[0] == doctest::Approx(3.0).epsilon(0.05));
    CHECK(sd.cos2[0] == doctest::Approx(predict_cos2(3.0, sigma)).epsilon(0.1));
    CHECK((sd.leading_vectors().adjoint() * sd.leading_vectors() -
           MatXc::Identity(1, 1)).norm() < 1e-10);

    // auto-detected rank agrees
    AnalysisOptions auto_opt;
    auto_opt.r_assumed.reset();
    const SpectralData sd2 = analyze_response(noisy, auto_opt);
    CHECK(sd2.rank == 1);
}
