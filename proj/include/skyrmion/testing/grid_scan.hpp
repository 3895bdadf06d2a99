#pragma once

// Exhaustive tensor-grid scans of the reduced energy, independent of the
// Lambert W closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "skyrmion/parallel.hpp"
#include "skyrmion/reduced_energy.hpp"

namespace skyrmion::oracles {

/// Points lo + i * step for i in [0, n).
struct Axis {
    double lo = 0.0;
    double step = 0.0;
    std::size_t n = 0;
    double at(std::size_t i) const { return lo + static_cast<double>(i) * step; }
};

/// rho~ and theta are uniform; the third axis is log L~.
struct ScanAxes {
    Axis rho, theta, log_L;
};

struct ScanResult {
    ReducedPoint best;
    double value = std::numeric_limits<double>::infinity();
};

/// rho~ in (0, 4 gbar / 16 pi], theta in [-pi, pi), L~ log-uniform over
/// [1 / (4 sigma sqrt(pi)), L_factor L~_guess] with L~_guess = 4 |log s| / (gbar s).
inline ScanAxes reduced_scan_axes(double sigma, double lambda, std::size_t n_rho = 400, std::size_t n_theta = 64,
                                  std::size_t n_L = 400, double L_factor = 10.0) {
    using std::numbers::pi;
    const double gb = g_bar(lambda);
    const double ls = std::abs(std::log(sigma));
    const double rho_hi = 4.0 * gb / (16.0 * pi);
    const double lo = std::log(1.0 / (4.0 * sigma * std::sqrt(pi)));
    const double hi = std::log(L_factor * 4.0 * ls / (gb * sigma));
    return {{rho_hi / n_rho, rho_hi / n_rho, n_rho},
            {-pi, 2.0 * pi / n_theta, n_theta},
            {lo, (hi - lo) / static_cast<double>(n_L - 1), n_L}};
}

namespace detail {
struct SliceBest {
    double value = std::numeric_limits<double>::infinity();
    std::size_t i = 0, k = 0;
};

inline Axis zoom(const Axis& a, std::size_t best, double floor) {
    const double step = 4.0 * a.step / static_cast<double>(a.n - 1);
    double lo = a.at(best) - 2.0 * a.step;
    if (lo < floor) lo = floor;
    return {lo, step, a.n};
}
}  // namespace detail

/// Minimum of fn(point) over the grid, followed by `refinements` passes that
/// rescan a +-2 cell window around the incumbent at the same resolution.
template <class Fn>
ScanResult grid_scan_min(Fn&& fn, ScanAxes axes, int refinements = 2) {
    const double rho_floor = 0.5 * axes.rho.lo;
    const double logL_floor = axes.log_L.lo;
    ScanResult out;
    for (int pass = 0; pass <= refinements; ++pass) {
        std::vector<detail::SliceBest> slices(axes.log_L.n);
        parallel_for(axes.log_L.n, [&](std::size_t j) {
            const double L = std::exp(axes.log_L.at(j));
            auto& s = slices[j];
            for (std::size_t k = 0; k < axes.theta.n; ++k)
                for (std::size_t i = 0; i < axes.rho.n; ++i) {
                    const double v = fn(ReducedPoint{axes.rho.at(i), axes.theta.at(k), L});
                    if (v < s.value) s = {v, i, k};
                }
        });
        std::size_t jb = 0;
        for (std::size_t j = 1; j < slices.size(); ++j)
            if (slices[j].value < slices[jb].value) jb = j;
        const auto& b = slices[jb];
        out.value = b.value;
        out.best = {axes.rho.at(b.i), axes.theta.at(b.k), std::exp(axes.log_L.at(jb))};
        if (pass == refinements) break;
        axes.rho = detail::zoom(axes.rho, b.i, rho_floor);
        axes.theta = detail::zoom(axes.theta, b.k, -std::numeric_limits<double>::infinity());
        axes.log_L = detail::zoom(axes.log_L, jb, logL_floor);
    }
    return out;
}

/// Extent of the grid points with fn(point) <= threshold.
struct SublevelExtent {
    std::size_t count = 0;
    double rho_min = std::numeric_limits<double>::infinity(), rho_max = -std::numeric_limits<double>::infinity();
    double L_min = std::numeric_limits<double>::infinity(), L_max = -std::numeric_limits<double>::infinity();
    double abs_theta_min = std::numeric_limits<double>::infinity(), abs_theta_max = 0.0;
    bool touches_edge = false;  // some point of the set lies on the outer layer of the grid
};

template <class Fn>
SublevelExtent grid_sublevel(Fn&& fn, const ScanAxes& axes, double threshold) {
    std::vector<SublevelExtent> slices(axes.log_L.n);
    parallel_for(axes.log_L.n, [&](std::size_t j) {
        const double L = std::exp(axes.log_L.at(j));
        auto& s = slices[j];
        for (std::size_t k = 0; k < axes.theta.n; ++k)
            for (std::size_t i = 0; i < axes.rho.n; ++i) {
                const ReducedPoint p{axes.rho.at(i), axes.theta.at(k), L};
                if (fn(p) > threshold) continue;
                ++s.count;
                s.rho_min = std::min(s.rho_min, p.rho_tilde);
                s.rho_max = std::max(s.rho_max, p.rho_tilde);
                s.L_min = std::min(s.L_min, L);
                s.L_max = std::max(s.L_max, L);
                s.abs_theta_min = std::min(s.abs_theta_min, std::abs(p.theta));
                s.abs_theta_max = std::max(s.abs_theta_max, std::abs(p.theta));
                if (i == 0 || i + 1 == axes.rho.n || j == 0 || j + 1 == axes.log_L.n) s.touches_edge = true;
            }
    });
    SublevelExtent out;
    for (const auto& s : slices) {
        out.count += s.count;
        out.rho_min = std::min(out.rho_min, s.rho_min);
        out.rho_max = std::max(out.rho_max, s.rho_max);
        out.L_min = std::min(out.L_min, s.L_min);
        out.L_max = std::max(out.L_max, s.L_max);
        out.abs_theta_min = std::min(out.abs_theta_min, s.abs_theta_min);
        out.abs_theta_max = std::max(out.abs_theta_max, s.abs_theta_max);
        out.touches_edge = out.touches_edge || s.touches_edge;
    }
    return out;
}

}  // namespace skyrmion::oracles
