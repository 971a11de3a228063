// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

namespace rmtimg {

SvdResult svd_full(const MatXc& a, bool want_vectors) {
    if (a.rows() != a.cols())
        throw parameter_error("svd_full: matrix must be square");
    const int m = int(a.rows());
    SvdResult out;
    out.dim = m;
    out.full = true;
    out.frob_sq = a.squaredNorm();
    out.values.resize(m);
    MatXc work = a;  // zgesdd overwrites
    lapack_int info;
    if (want_vectors) {
        out.left.resize(m, m);
        MatXc vt(m, m);
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, m, work.data(), m,
                              out.values.data(), out.left.data(), m, vt.data(), m);
        out.right = vt.adjoint();
    } else {
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, m, work.data(), m,
                              out.values.data(), nullptr, m, nullptr, m);
    }
    if (info != 0)
        throw numerical_error("svd_full: zgesdd failed with info " + std::to_string(info));
    return out;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Fixed start vector makes the Lanczos result a pure function of the matrix.
VecXc start_vector(int m) {
    VecXc v(m);
    std::uint64_t s = 0x5DEECE66DULL;
    for (int i = 0; i < m; ++i) {
        s = splitmix64(s);
        const double re = double(s >> 11) / double(1ULL << 53) - 0.5;
        s = splitmix64(s);
        const double im = double(s >> 11) / double(1ULL << 53) - 0.5;
        v[i] = cxd(re, im);
    }
    v /= v.norm();
    return v;
}

// Classical Gram-Schmidt against the first n basis columns, applied twice.
void reorthogonalize(const MatXc& basis, int n, VecXc& w) {
    if (n <= 0) return;
    auto b = basis.leftCols(n);
    w.noalias() -= b * (b.adjoint() * w);
    w.noalias() -= b * (b.adjoint() * w);
}

// Dense SVD of the (possibly rectangular) upper bidiagonal factor: j rows
// with diagonal alpha, superdiagonal beta. beta.size() == j-1 gives the
// square case; beta.size() == j adds the trailing column produced when the
// left basis runs out first. Sizes stay small.
void bidiag_svd(const std::vector<double>& alpha, const std::vector<double>& beta,
                VecX& s, MatX& p, MatX& q) {
    const int j = int(alpha.size());
    const int cols = j + (int(beta.size()) == j ? 1 : 0);
    MatX b = MatX::Zero(j, cols);
    for (int i = 0; i < j; ++i) {
        b(i, i) = alpha[i];
        if (i < int(beta.size())) b(i, i + 1) = beta[i];
    }
    s.resize(j);
    p.resize(j, j);
    MatX vt(j, cols);
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', j, cols, b.data(), j,
                                           s.data(), p.data(), j, vt.data(), j);
    if (info != 0) throw numerical_error("svd_top: bidiagonal SVD failed");
    q = vt.transpose();
}

}  // namespace

SvdResult svd_top(const MatXc& a, int k, const LanczosOptions& opt) {
    if (a.rows() != a.cols())
        throw parameter_error("svd_top: matrix must be square");
    const int m = int(a.rows());
    if (k < 1) throw parameter_error("svd_top: k must be >= 1");
    k = std::min(k, m);

    SvdResult out;
    out.dim = m;
    out.frob_sq = a.squaredNorm();
    if (out.frob_sq == 0.0) {
        out.values = VecX::Zero(k);
        out.left = MatXc::Identity(m, k);
        out.full = true;
        return out;
    }

    const int cap = std::clamp(opt.max_steps, std::min(k + 2, m), m);
    const double scale = std::sqrt(out.frob_sq);
    const int first_check = std::max(k + 2, opt.min_steps);

    MatXc u_basis(m, cap), v_basis(m, cap);
    std::vector<double> alpha, beta;
    alpha.reserve(cap);
    beta.reserve(cap);

    // Filter the start vector through A^H so v_1 lies in the row space; the
    // bases then exhaust cleanly on rank-deficient input.
    {
        VecXc seed = a.adjoint() * start_vector(m);
        const double n = seed.norm();
        v_basis.col(0) = n > 1e-280 * scale ? VecXc(seed / n) : start_vector(m);
    }
    VecXc w = a * v_basis.col(0);
    alpha.push_back(w.norm());
    u_basis.col(0) = w / alpha[0];

    int steps = 1;       // Krylov vectors committed per side
    bool breakdown = false;
    VecX s;
    MatX p, q;

    while (steps < cap) {
        // Candidate v_{steps+1}; its pre-normalization norm is the exact
        // residual scale of the current Ritz triplets:
        //   A^H u_i = s_i v_i + P(steps-1, i) * w.
        w.noalias() = a.adjoint() * u_basis.col(steps - 1);
        w -= alpha[steps - 1] * v_basis.col(steps - 1);
        reorthogonalize(v_basis, steps, w);
        const double bn = w.norm();
        if (bn <= 1e-14 * scale) {
            breakdown = true;  // invariant subspace: nonzero spectrum captured exactly
            break;
        }
        if (steps >= first_check &&
            (steps % opt.check_every == 0 || steps + 1 >= cap)) {
            bidiag_svd(alpha, beta, s, p, q);
            bool done = true;
            for (int i = 0; i < std::min(k, steps) && done; ++i)
                if (bn * std::abs(p(steps - 1, i)) > opt.tol * s[0]) done = false;
            if (done) break;
        }
        beta.push_back(bn);
        v_basis.col(steps) = w / bn;

        w.noalias() = a * v_basis.col(steps);
        w -= bn * u_basis.col(steps - 1);
        reorthogonalize(u_basis, steps, w);
        const double an = w.norm();
        if (an <= 1e-14 * scale) {
            breakdown = true;
            break;
        }
        alpha.push_back(an);
        u_basis.col(steps) = w / an;
        ++steps;
    }

    bidiag_svd(alpha, beta, s, p, q);
    const int got = std::min<int>(k, int(s.size()));
    out.values = VecX::Zero(k);
    out.values.head(got) = s.head(got);
    out.left.noalias() = u_basis.leftCols(int(p.rows())) * p.leftCols(got).cast<cxd>();
    out.right.noalias() = v_basis.leftCols(int(q.rows())) * q.leftCols(got).cast<cxd>();
    // After a breakdown every remaining singular value is exactly zero, so
    // the padded values describe the whole spectrum.
    out.full = breakdown;
    return out;
}

}  // namespace rmtimg
