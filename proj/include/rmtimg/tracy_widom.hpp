// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "rmtimg/types.hpp"

namespace rmtimg {

/// Type-2 Tracy-Widom distribution built from first principles:
///   Phi(z) = exp( - Int_z^inf (x - z) phi^2(x) dx ),
/// where phi is the Hastings-McLeod solution of Painleve II
///   phi'' = x phi + 2 phi^3,  phi(x) ~ Ai(x) as x -> +inf.
///
/// The ODE is integrated once from x0 = 8 (Airy-initialized) down toward
/// -10 with an adaptive high-order scheme; the running integrals of phi^2 and
/// x phi^2 are carried as extra state so the CDF is consistent with the
/// solver tolerance. Below the point where the backward instability of the
/// Hastings-McLeod branch takes over, the CDF has decayed to ~1e-26 and is
/// clamped to zero.
class TracyWidom2 {
  public:
    TracyWidom2();

    /// CDF, clamped to [0,1] outside the tabulated range.
    double cdf(double z) const;
    /// Density, zero outside the tabulated range.
    double pdf(double z) const;
    /// Monotone inverse of the CDF; q must lie strictly in (0,1).
    double quantile(double q) const;

    double mean() const { return mean_; }
    double variance() const { return variance_; }

    double table_lo() const { return lo_; }
    double table_hi() const { return hi_; }

    /// Shared lazily-built instance (the construction is deterministic).
    static const TracyWidom2& instance();

    /// CSV dump of (z, cdf, pdf) rows for external validation plots.
    void write_csv(std::ostream& os, double z_lo = -10, double z_hi = 6,
                   double step = 0.01) const;

  private:
    // Uniform grid from lo_ to hi_ with spacing h_; per node the CDF value
    // and its derivative (for monotone cubic Hermite interpolation).
    double lo_ = 0, hi_ = 0, h_ = 0;
    std::vector<double> cdf_, pdf_;
    double mean_ = 0, variance_ = 0;

    double interp(const std::vector<double>& f, const std::vector<double>& df,
                  double z) const;
};

}  // namespace rmtimg
