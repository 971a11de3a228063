// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rmtimg/types.hpp"

namespace rmtimg {

struct SvdResult {
    VecX values;       // descending
    MatXc left;        // columns are left singular vectors (may be fewer than M)
    MatXc right;       // columns are right singular vectors (empty if not requested)
    double frob_sq = 0;  // ||A||_F^2 of the input, exact
    int dim = 0;       // M
    bool full = false; // whether `values` lists the whole spectrum
};

/// Full SVD via LAPACK (zgesdd). Accurate for small singular values; used
/// where rank tests at 1e-10 scale matter and in cross-checks.
SvdResult svd_full(const MatXc& a, bool want_vectors = true);

struct LanczosOptions {
    int max_steps = 260;      // Krylov dimension cap
    int min_steps = 48;       // steps before the first convergence check
    double tol = 1e-10;       // residual tolerance relative to sigma_1
    int check_every = 24;
};

/// Top-k singular triplets by Golub-Kahan-Lanczos bidiagonalization with full
/// reorthogonalization. Deterministic (fixed start vector derived from a
/// constant seed), independent of thread count. frob_sq carries the exact
/// squared Frobenius norm so tail sums of sigma^2 need no full spectrum:
///   sum_{j>k} s_j^2 = frob_sq - sum_{j<=k} s_j^2.
SvdResult svd_top(const MatXc& a, int k, const LanczosOptions& opt = {});

}  // namespace rmtimg
