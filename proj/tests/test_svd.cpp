// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rmtimg/svd.hpp"

using namespace rmtimg;

namespace {

MatXc random_gaussian(int m, std::uint64_t seed, double scale) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> n01;
    MatXc a(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) a(i, j) = scale * cxd(n01(eng), n01(eng));
    return a;
}

MatXc low_rank_plus_noise(int m, int r, double noise, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> n01;
    MatXc u(m, r), v(m, r);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < m; ++i) {
            u(i, j) = cxd(n01(eng), n01(eng));
            v(i, j) = cxd(n01(eng), n01(eng));
        }
    Eigen::HouseholderQR<MatXc> qu(u), qv(v);
    MatXc uo = qu.householderQ() * MatXc::Identity(m, r);
    MatXc vo = qv.householderQ() * MatXc::Identity(m, r);
    VecX s(r);
    for (int j = 0; j < r; ++j) s[j] = 10.0 / (j + 1);
    MatXc a = uo * s.asDiagonal() * vo.adjoint();
    if (noise > 0) a += random_gaussian(m, seed + 1, noise / std::sqrt(2.0 * m));
    return a;
}

}  // namespace

TEST_CASE("lanczos matches the full SVD on noisy matrices") {
    const int m = 260;
    const MatXc a = low_rank_plus_noise(m, 4, 1.0, 11);
    const SvdResult full = svd_full(a);
    const SvdResult top = svd_top(a, 8);
    for (int j = 0; j < 8; ++j)
        CHECK(top.values[j] == doctest::Approx(full.values[j]).epsilon(1e-9));
    // left vectors agree up to phase
    for (int j = 0; j < 4; ++j) {
        const double overlap = std::abs(full.left.col(j).dot(top.left.col(j)));
        CHECK(overlap == doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK(top.frob_sq == doctest::Approx(full.frob_sq).epsilon(1e-13));
}

TEST_CASE("lanczos resolves the bulk edge of a pure-noise matrix") {
    const int m = 300;
    const MatXc a = random_gaussian(m, 5, 1.0 / std::sqrt(2.0 * m));
    const SvdResult full = svd_full(a, false);
    const SvdResult top = svd_top(a, 6);
    for (int j = 0; j < 6; ++j)
        CHECK(top.values[j] == doctest::Approx(full.values[j]).epsilon(1e-8));
}

TEST_CASE("lanczos terminates exactly on low-rank input") {
    const int m = 200;
    const MatXc a = low_rank_plus_noise(m, 3, 0.0, 23);
    const SvdResult top = svd_top(a, 10);
    CHECK(top.full);  // breakdown: the whole nonzero spectrum is caught
    CHECK(top.values[0] == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(top.values[1] == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(top.values[2] == doctest::Approx(10.0 / 3).epsilon(1e-10));
    for (int j = 3; j < 10; ++j) CHECK(top.values[j] < 1e-10);
}

TEST_CASE("lanczos is deterministic") {
    const MatXc a = low_rank_plus_noise(150, 2, 0.5, 99);
    const SvdResult r1 = svd_top(a, 5);
    const SvdResult r2 = svd_top(a, 5);
    CHECK((r1.values - r2.values).norm() == 0.0);
    CHECK((r1.left - r2.left).norm() == 0.0);
}

TEST_CASE("svd_full reports tiny trailing values for rank-deficient input") {
    const MatXc a = low_rank_plus_noise(120, 3, 0.0, 3);
    const SvdResult full = svd_full(a, false);
    CHECK(full.values[3] < 1e-12 * full.values[0]);
}

TEST_CASE("triplet residuals are small") {
    const MatXc a = low_rank_plus_noise(220, 3, 0.8, 41);
    const SvdResult top = svd_top(a, 6);
    for (int j = 0; j < 6; ++j) {
        const VecXc lhs = a * top.right.col(j);
        const VecXc rhs = top.values[j] * top.left.col(j);
        CHECK((lhs - rhs).norm() < 1e-7 * top.values[0]);
    }
    // orthonormal bases
    CHECK((top.left.adjoint() * top.left - MatXc::Identity(6, 6)).norm() < 1e-10);
    CHECK((top.right.adjoint() * top.right - MatXc::Identity(6, 6)).norm() < 1e-10);
}
