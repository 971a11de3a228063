// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmtimg/acquisition.hpp"

using namespace rmtimg;

TEST_CASE("complex hadamard: unit modulus and scaled unitarity") {
    const auto h1 = make_complex_hadamard(1);
    CHECK(std::abs(h1.J(0, 0) - cxd(1, 0)) < 1e-15);

    const auto h2 = make_complex_hadamard(2);
    CHECK(std::abs(h2.J(0, 0) - cxd(1, 0)) < 1e-12);
    CHECK(std::abs(h2.J(0, 1) - cxd(1, 0)) < 1e-12);
    CHECK(std::abs(h2.J(1, 1) - cxd(-1, 0)) < 1e-12);

    for (int m : {4, 33, 128}) {
        const auto h = make_complex_hadamard(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                CHECK(std::abs(std::abs(h.J(i, j)) - 1.0) < 1e-12);
        const MatXc jj = h.J.adjoint() * h.J;
        CHECK((jj - double(m) * MatXc::Identity(m, m)).norm() < 1e-9 * m);
    }
}

TEST_CASE("hadamard round trip without noise is exact") {
    const int m = 48;
    MatXc d(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) d(i, j) = cxd(std::sin(0.1 * i * j), std::cos(0.3 * j));
    const auto h = make_complex_hadamard(m);
    const MatXc back = (d * h.J) * h.J.adjoint() / double(m);
    CHECK((back - d).norm() < 1e-10 * d.norm());
}

TEST_CASE("noise synthesis: zero level, determinism, moments") {
    CHECK(synthesize_noise(16, 0.0, 7).norm() == 0.0);

    const MatXc a = synthesize_noise(40, 1.3, 123);
    const MatXc b = synthesize_noise(40, 1.3, 123);
    CHECK((a - b).norm() == 0.0);
    const MatXc c = synthesize_noise(40, 1.3, 124);
    CHECK((a - c).norm() != 0.0);

    // E ||W||_F^2 = sigma^2 M
    const int m = 200;
    const double sigma = 0.7;
    double acc = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t)
        acc += synthesize_noise(m, sigma, 1000 + t).squaredNorm();
    acc /= trials;
    CHECK(acc == doctest::Approx(sigma * sigma * m).epsilon(0.05));
}

TEST_CASE("noise whiteness: E[W^H W] is close to sigma^2 I") {
    const int m = 40, trials = 500;
    const double sigma = 1.0;
    MatXc acc = MatXc::Zero(m, m);
    for (int t = 0; t < trials; ++t) {
        const MatXc w = synthesize_noise(m, sigma, 5000 + t);
        acc += w.adjoint() * w;
    }
    acc /= trials;
    const double diag_mean = acc.diagonal().real().mean();
    CHECK(diag_mean == doctest::Approx(sigma * sigma).epsilon(0.1));
    double off = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) off += std::abs(acc(i, j));
    off /= m * (m - 1);
    CHECK(off < 0.1 * diag_mean);
}

TEST_CASE("direct and hadamard schemes yield the same noise statistics") {
    const int m = 48, trials = 200;
    const double sigma = 0.5;
    ResponseMatrix d{MatXc::Zero(m, m), SensingMatrix::complete(), false};
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) d.data(i, j) = cxd(0.01 * (i - j), 0.02);

    double var_direct = 0, var_hadamard = 0;
    for (int t = 0; t < trials; ++t) {
        NoiseSpec sd{1.0, std::uint64_t(900 + t), AcquisitionScheme::direct};
        NoiseSpec sh{1.0, std::uint64_t(900 + t), AcquisitionScheme::hadamard};
        var_direct += (acquire(d, sd, sigma).data - d.data).squaredNorm();
        var_hadamard += (acquire(d, sh, sigma).data - d.data).squaredNorm();
    }
    // per-entry variance sigma^2 / M, summed over M^2 entries
    const double expect = sigma * sigma * m;
    var_direct /= trials;
    var_hadamard /= trials;
    CHECK(var_direct == doctest::Approx(expect).epsilon(0.05));
    CHECK(var_hadamard == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("acquire with zero fraction returns the input exactly") {
    const int m = 12;
    ResponseMatrix d{MatXc::Random(m, m), SensingMatrix::complete(), false};
    NoiseSpec spec{0.0, 5, AcquisitionScheme::hadamard};
    const auto out = acquire(d, spec, 0.0);
    CHECK((out.data - d.data).norm() == 0.0);
    CHECK(out.noisy);
}

TEST_CASE("derived streams differ per trial and are order independent") {
    const auto s0 = derive_stream_seed(42, 0);
    const auto s1 = derive_stream_seed(42, 1);
    const auto s2 = derive_stream_seed(43, 0);
    CHECK(s0 != s1);
    CHECK(s0 != s2);
    CHECK(derive_stream_seed(42, 0) == s0);
}
