// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "rmtimg/geometry.hpp"
#include "rmtimg/greens.hpp"
#include "rmtimg/spectral.hpp"
#include "rmtimg/types.hpp"

namespace rmtimg {

enum class ImagingKind { music, robust_single, robust_multi };

const char* imaging_kind_name(ImagingKind k);
ImagingKind imaging_kind_from_name(const std::string& name);

/// Scalar imaging-function samples over a SearchGrid, in grid enumeration
/// order. Values are finite and positive: reciprocals are capped at `cap`
/// (the functions vanish exactly at perfect range membership).
struct ImageVolume {
    SearchGrid grid;
    VecX values;
    ImagingKind kind = ImagingKind::robust_single;
    int rank = 0;
    double sigma_e = 0;
    double theta = 0;

    std::int64_t argmax() const;
};

struct ImagingOptions {
    double cap = 1e8;            // reciprocal clamp for music/robust_single
    double bracket_floor = 1e-6; // lower clamp of the robust_multi bracket
    std::int64_t chunk = 512;    // grid points per parallel work item
};

/// Sweeps one search grid for many spectral datasets, recomputing the
/// Green's factors chunk by chunk. All evaluations are pure; sweeps are
/// parallel over chunks and deterministic for any worker count.
class GridImager {
  public:
    GridImager(const ArrayGeometry& geom, const SensingMatrix& sensing,
               const SearchGrid& grid, double k,
               GreensKind greens = GreensKind::exact, ImagingOptions opt = {});

    ImageVolume music(const SpectralData& sd) const;
    ImageVolume robust_single(const SpectralData& sd) const;
    ImageVolume robust_multi(const SpectralData& sd) const;
    ImageVolume image(ImagingKind kind, const SpectralData& sd) const;

    const SearchGrid& grid() const { return grid_; }

  private:
    const ArrayGeometry& geom_;
    SensingMatrix sensing_;
    SearchGrid grid_;
    double k_;
    GreensKind greens_;
    ImagingOptions opt_;

    template <class PointFn>
    ImageVolume sweep(const SpectralData& sd, ImagingKind kind, PointFn&& fn) const;
};

/// One-shot conveniences.
ImageVolume music_image(const SpectralData& sd, const SearchGrid& grid,
                        const ArrayGeometry& geom, const SensingMatrix& sensing,
                        double k, GreensKind greens = GreensKind::exact);
ImageVolume robust_image_single(const SpectralData& sd, const SearchGrid& grid,
                                const ArrayGeometry& geom, const SensingMatrix& sensing,
                                double k, GreensKind greens = GreensKind::exact);
ImageVolume robust_image_multi(const SpectralData& sd, const SearchGrid& grid,
                               const ArrayGeometry& geom, const SensingMatrix& sensing,
                               double k, GreensKind greens = GreensKind::exact);

/// CSV export, one row per grid point in enumeration order: y1,y2,y3,value.
void write_image_csv(const ImageVolume& v, std::ostream& os);
/// Planar slice at the grid plane nearest to `value` along `axis` (0,1,2).
void write_image_slice_csv(const ImageVolume& v, int axis, double value,
                           std::ostream& os);

}  // namespace rmtimg
