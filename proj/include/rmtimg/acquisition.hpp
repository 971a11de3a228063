// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "rmtimg/response.hpp"
#include "rmtimg/types.hpp"

namespace rmtimg {

enum class AcquisitionScheme { direct, hadamard };

/// Additive-noise description. The level sigma = fraction * sigma_1 of the
/// noiseless matrix the run measures (see normalize_against_complete for the
/// alternative normalization).
struct NoiseSpec {
    double fraction = 0.0;   // p >= 0
    std::uint64_t seed = 0;
    AcquisitionScheme scheme = AcquisitionScheme::direct;

    void validate() const {
        if (fraction < 0) throw parameter_error("NoiseSpec: noise fraction must be >= 0");
    }
};

/// Per-trial RNG stream derivation (documented contract): the trial stream
/// seed is splitmix64(splitmix64(master XOR (index+1)*0x9E3779B97F4A7C15)),
/// so Monte Carlo results do not depend on execution order or thread count.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

/// M x M matrix of i.i.d. complex Gaussians with standard deviation
/// sigma/sqrt(M) per entry (real and imaginary parts each N(0, sigma^2/2M)).
/// Entries are drawn in column-major order from an mt19937_64 stream, so a
/// fixed seed gives a bit-identical matrix.
MatXc synthesize_noise(int m, double sigma, std::uint64_t seed);

/// Fourier-type complex Hadamard excitation J_{mn} = exp(2 pi i m n / M):
/// unit-modulus entries, J^H J = M I, |det J| = M^{M/2}.
struct HadamardExcitation {
    MatXc J;
    int dim() const { return int(J.rows()); }
};

HadamardExcitation make_complex_hadamard(int m);

/// Noisy acquisition. direct: D + W with W = synthesize_noise(M, sigma).
/// hadamard: per-measurement noise of std sigma enters D J + WW; the returned
/// matrix is (D J + WW) J^{-1}, whose effective noise matches the direct
/// scheme (std sigma/sqrt(M) per entry).
ResponseMatrix acquire(const ResponseMatrix& noiseless, const NoiseSpec& spec,
                       double sigma);

}  // namespace rmtimg
