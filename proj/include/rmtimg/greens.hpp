// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rmtimg/geometry.hpp"
#include "rmtimg/types.hpp"

namespace rmtimg {

/// Which evaluation of the free-space dyadic kernel to use. The exact form
/// keeps the near-field 1/(kr) and 1/(kr)^2 terms; far_field drops them.
enum class GreensKind { exact, far_field };

/// Free-space dyadic Green's tensor (I + grad grad^T / k^2) e^{ikr}/(4 pi r):
///   G = e^{ikr}/(4 pi r) [ (1 + i/(kr) - 1/(kr)^2) I
///                        - (1 + 3i/(kr) - 3/(kr)^2) rhat rhat^T ].
/// The matrix is symmetric, so reciprocity G(x,z) = G(z,x)^T holds exactly.
Mat3c greens_tensor(const Vec3& x, const Vec3& z, double k,
                    GreensKind kind = GreensKind::exact);

/// Stacked matrix of Green's tensors from every sensor to the point y, with
/// the sensing selection applied per block: |S| N x 3.
MatXc greens_column(const ArrayGeometry& geom, const Vec3& y,
                    const SensingMatrix& sensing, double k,
                    GreensKind kind = GreensKind::exact);

/// Internally consistent thin SVD of a greens_column matrix: the three
/// factors reproduce the input to machine precision, so downstream products
/// cancel singular-vector phases exactly.
struct GreensFactor {
    MatXc H;        // M x 3, orthonormal columns
    Vec3 sigma;     // descending
    Mat3c V;        // 3 x 3 unitary
};

GreensFactor greens_factor(const MatXc& gcol);

/// Singular values of greens_column(geom, y, sensing), descending.
Vec3 conditioning_diagnostics(const ArrayGeometry& geom, const Vec3& y,
                              const SensingMatrix& sensing, double k,
                              GreensKind kind = GreensKind::exact);

}  // namespace rmtimg
