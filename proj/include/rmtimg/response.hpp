// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rmtimg/ellipsoid.hpp"
#include "rmtimg/geometry.hpp"
#include "rmtimg/greens.hpp"
#include "rmtimg/types.hpp"

namespace rmtimg {

/// Dense M x M array data. M = |S| N. Noiseless responses synthesized by
/// forward_response are complex symmetric.
struct ResponseMatrix {
    MatXc data;
    SensingMatrix sensing = SensingMatrix::complete();
    bool noisy = false;

    int dim() const { return int(data.rows()); }
    bool is_complete() const { return sensing.is_complete(); }
};

/// D = sum_p G(y_p) rho_p G(y_p)^T, with the sensing selection applied to
/// every Green's block for incomplete measurements.
ResponseMatrix forward_response(const ArrayGeometry& geom,
                                const std::vector<Inclusion>& inclusions,
                                const SensingMatrix& sensing, double k,
                                GreensKind kind = GreensKind::exact);

/// Exact nonzero spectrum of the noiseless response without assembling the
/// M x M matrix: QR-reduce the stacked M x 3P Green's factor and take the
/// SVD of the 3P x 3P core. Returns values descending (length 3P).
VecX noiseless_spectrum(const ArrayGeometry& geom,
                        const std::vector<Inclusion>& inclusions,
                        const SensingMatrix& sensing, double k,
                        GreensKind kind = GreensKind::exact);

/// Same reduction, but also returns the M x 3P matrix of exact left singular
/// vectors (used as the reference subspace in Monte Carlo studies).
struct NoiselessSvd {
    VecX values;
    MatXc left_vectors;
};
NoiselessSvd noiseless_svd(const ArrayGeometry& geom,
                           const std::vector<Inclusion>& inclusions,
                           const SensingMatrix& sensing, double k,
                           GreensKind kind = GreensKind::exact);

/// Binary container: little-endian header + row-major interleaved re/im
/// doubles. Round-trips exactly.
void save_response(const ResponseMatrix& r, const std::string& path);
ResponseMatrix load_response(const std::string& path);

/// Inspection CSV: row, col, re, im.
void write_response_csv(const ResponseMatrix& r, std::ostream& os);

}  // namespace rmtimg
