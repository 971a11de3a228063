// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/tracy_widom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/numeric/odeint.hpp>

namespace rmtimg {

namespace {

constexpr double kStartX = 8.0;     // Airy initialization point
constexpr double kTargetLo = -10.0; // requested lower end of the table
constexpr double kGrid = 0.005;     // node spacing
constexpr double kBlowup = 8.0;     // |phi| guard: Hastings-McLeod has |phi(-10)| = sqrt(5)

using State = std::array<double, 4>;  // phi, phi', I1 = Int phi^2, I2 = Int x phi^2

void painleve_rhs(const State& y, State& dy, double x) {
    dy[0] = y[1];
    dy[1] = x * y[0] + 2.0 * y[0] * y[0] * y[0];
    // Integrals accumulate while x decreases, hence the signs.
    dy[2] = -y[0] * y[0];
    dy[3] = -x * y[0] * y[0];
}

}  // namespace

TracyWidom2::TracyWidom2() {
    namespace odeint = boost::numeric::odeint;

    // Right tail beyond the initialization point, where phi == Ai to well
    // below double precision.
    double err = 0;
    const double tail1 = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [](double x) { const double a = boost::math::airy_ai(x); return a * a; },
        kStartX, std::numeric_limits<double>::infinity(), 10, 1e-14, &err);
    const double tail2 = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [](double x) { const double a = boost::math::airy_ai(x); return x * a * a; },
        kStartX, std::numeric_limits<double>::infinity(), 10, 1e-14, &err);

    State y{boost::math::airy_ai(kStartX), boost::math::airy_ai_prime(kStartX), 0.0, 0.0};

    auto stepper = odeint::make_controlled(1e-13, 1e-13,
        odeint::runge_kutta_fehlberg78<State>());

    std::vector<double> xs, phis, i1s, i2s;
    const int n_nodes = int(std::round((kStartX - kTargetLo) / kGrid)) + 1;
    xs.reserve(n_nodes);
    double x = kStartX;
    xs.push_back(x);
    phis.push_back(y[0]);
    i1s.push_back(y[2]);
    i2s.push_back(y[3]);
    bool diverged = false;
    for (int node = 1; node < n_nodes && !diverged; ++node) {
        const double x_next = kStartX - node * kGrid;
        odeint::integrate_adaptive(stepper, painleve_rhs, y, x, x_next, -kGrid / 8.0);
        x = x_next;
        if (!std::isfinite(y[0]) || std::abs(y[0]) > kBlowup) {
            diverged = true;  // left the Hastings-McLeod branch; CDF ~ 1e-26 here
            break;
        }
        xs.push_back(x);
        phis.push_back(y[0]);
        i1s.push_back(y[2]);
        i2s.push_back(y[3]);
    }

    // Nodes were collected with x descending; store the table ascending.
    const int n = int(xs.size());
    lo_ = xs.back();
    hi_ = xs.front();
    h_ = kGrid;
    cdf_.resize(n);
    pdf_.resize(n);
    for (int i = 0; i < n; ++i) {
        const int j = n - 1 - i;  // ascending in z
        const double i1 = i1s[j] + tail1;
        const double i2 = i2s[j] + tail2;
        const double fz = i2 - xs[j] * i1;  // Int (x - z) phi^2
        cdf_[i] = std::exp(-fz);
        pdf_[i] = cdf_[i] * i1;  // d/dz of -fz is +I1(z)
    }
    // Clamp the tiny negative-tail garbage the instability could leave.
    for (int i = 1; i < n; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);

    // Moments by composite Simpson on the node grid (h = 0.005 makes the
    // discretization error negligible next to the solver tolerance).
    double m0 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i + 2 < n; i += 2) {
        const double z0 = lo_ + i * h_, z1 = z0 + h_, z2 = z0 + 2 * h_;
        m0 += h_ / 3 * (pdf_[i] + 4 * pdf_[i + 1] + pdf_[i + 2]);
        m1 += h_ / 3 * (z0 * pdf_[i] + 4 * z1 * pdf_[i + 1] + z2 * pdf_[i + 2]);
        m2 += h_ / 3 *
              (z0 * z0 * pdf_[i] + 4 * z1 * z1 * pdf_[i + 1] + z2 * z2 * pdf_[i + 2]);
    }
    // Right-tail mass beyond hi_ is ~4e-12; fold it into the normalization.
    m1 /= m0;
    m2 /= m0;
    mean_ = m1;
    variance_ = m2 - m1 * m1;
}

double TracyWidom2::interp(const std::vector<double>& f, const std::vector<double>& df,
                           double z) const {
    const double t = (z - lo_) / h_;
    const int i = std::clamp(int(std::floor(t)), 0, int(f.size()) - 2);
    const double u = t - i;
    const double f0 = f[i], f1 = f[i + 1];
    const double d0 = df[i] * h_, d1 = df[i + 1] * h_;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * d0 +
           (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * d1;
}

double TracyWidom2::cdf(double z) const {
    if (z <= lo_) return 0.0;
    if (z >= hi_) return 1.0;
    return std::clamp(interp(cdf_, pdf_, z), 0.0, 1.0);
}

double TracyWidom2::pdf(double z) const {
    if (z <= lo_ || z >= hi_) return 0.0;
    const double t = (z - lo_) / h_;
    const int i = std::clamp(int(std::floor(t)), 0, int(pdf_.size()) - 2);
    const double u = t - i;
    return (1 - u) * pdf_[i] + u * pdf_[i + 1];
}

double TracyWidom2::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw parameter_error("TracyWidom2::quantile: q must lie in (0,1)");
    // Bisection on the monotone interpolant, then Newton polish.
    double a = lo_, b = hi_;
    for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
        const double mid = 0.5 * (a + b);
        (cdf(mid) < q ? a : b) = mid;
    }
    double z = 0.5 * (a + b);
    for (int it = 0; it < 4; ++it) {
        const double d = pdf(z);
        if (d <= 0) break;
        const double step = (cdf(z) - q) / d;
        const double z_new = std::clamp(z - step, lo_, hi_);
        if (std::abs(z_new - z) < 1e-14) { z = z_new; break; }
        z = z_new;
    }
    return z;
}

const TracyWidom2& TracyWidom2::instance() {
    static const TracyWidom2 table;
    return table;
}

void TracyWidom2::write_csv(std::ostream& os, double z_lo, double z_hi,
                            double step) const {
    os << "z,cdf,pdf\n";
    os.precision(12);
    for (double z = z_lo; z <= z_hi + 1e-12; z += step)
        os << z << ',' << cdf(z) << ',' << pdf(z) << '\n';
}

}  // namespace rmtimg
