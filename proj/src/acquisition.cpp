// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/acquisition.hpp"

#include <cmath>
#include <random>

namespace rmtimg {

namespace {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ ((index + 1) * 0x9E3779B97F4A7C15ULL)));
}

MatXc synthesize_noise(int m, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw parameter_error("synthesize_noise: sigma must be >= 0");
    MatXc w(m, m);
    if (sigma == 0.0) {
        w.setZero();
        return w;
    }
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> n01;
    const double s = sigma / std::sqrt(2.0 * m);
    cxd* data = w.data();  // column-major fill order, part of the format contract
    for (std::int64_t i = 0; i < std::int64_t(m) * m; ++i) {
        const double re = n01(eng);
        const double im = n01(eng);
        data[i] = cxd(s * re, s * im);
    }
    return w;
}

HadamardExcitation make_complex_hadamard(int m) {
    if (m < 1) throw parameter_error("make_complex_hadamard: M must be >= 1");
    MatXc j(m, m);
    for (int col = 0; col < m; ++col)
        for (int row = 0; row < m; ++row) {
            // exp(2 pi i row col / M) with the product reduced mod M to keep
            // the angle small and the matrix exactly symmetric.
            const std::int64_t e = (std::int64_t(row) * col) % m;
            j(row, col) = std::polar(1.0, 2.0 * kPi * double(e) / double(m));
        }
    return HadamardExcitation{std::move(j)};
}

ResponseMatrix acquire(const ResponseMatrix& noiseless, const NoiseSpec& spec,
                       double sigma) {
    spec.validate();
    if (sigma < 0) throw parameter_error("acquire: sigma must be >= 0");
    const int m = noiseless.dim();
    ResponseMatrix out = noiseless;
    out.noisy = true;
    if (sigma == 0.0) return out;

    if (spec.scheme == AcquisitionScheme::direct) {
        out.data += synthesize_noise(m, sigma, spec.seed);
        return out;
    }
    // Hadamard: raw measurements D J + WW with per-entry noise std sigma,
    // demultiplexed by J^{-1} = J^H / M.
    const HadamardExcitation h = make_complex_hadamard(m);
    MatXc raw = noiseless.data * h.J;
    raw += synthesize_noise(m, sigma * std::sqrt(double(m)), spec.seed);
    out.data.noalias() = raw * h.J.adjoint() / double(m);
    return out;
}

}  // namespace rmtimg
