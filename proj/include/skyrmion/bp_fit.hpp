#pragma once

// Distance to the Belavin-Polyakov family in the discrete Dirichlet seminorm
//   D^2 = exchange_energy(m - phi),
// minimized over phi = S Phi((x - x0) / rho). The rotation is solved exactly;
// (log rho, x0) are searched by Nelder-Mead.

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/SVD>
#include <gsl/gsl_multimin.h>

#include "skyrmion/bp_profiles.hpp"
#include "skyrmion/field_energy.hpp"

namespace skyrmion {

namespace detail {

// Sum over stencil bonds of w (a_i - a_j)(b_i - b_j)^T, so that
// exchange_energy(a - S b) = E(a) + E(b) - 2 tr(S^T C).
inline Eigen::Matrix3d bond_correlation(const GridGeometry& g, std::span<const Vec3> a, std::span<const Vec3> b) {
    std::vector<Eigen::Matrix3d> rows(g.ny, Eigen::Matrix3d::Zero());
    parallel_for(g.ny, [&](std::size_t j) {
        Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
        auto bond = [&](std::size_t k, std::size_t l, double w) { s.noalias() += w * (a[l] - a[k]) * (b[l] - b[k]).transpose(); };
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (i + 1 < g.nx) bond(k, k + 1, kNear);
            if (i + 2 < g.nx) bond(k, k + 2, kFar);
            if (j + 1 < g.ny) bond(k, k + g.nx, kNear);
            if (j + 2 < g.ny) bond(k, k + 2 * g.nx, kFar);
        }
        rows[j] = s;
    });
    Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
    for (const auto& r : rows) out += r;
    return out;
}

inline std::vector<Vec3> sample_unrotated(const GridGeometry& g, double rho, double x0, double y0) {
    std::vector<Vec3> out(g.size());
    parallel_for(g.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double u = (g.x(i) - x0) / rho, v = (g.y(j) - y0) / rho;
            const double q = 1.0 + u * u + v * v;
            out[g.index(i, j)] = Vec3{-2.0 * u / q, -2.0 * v / q, (2.0 - q) / q};
        }
    });
    return out;
}

}  // namespace detail

class DegenerateFitError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Maximizer over SO(3) of tr(S^T C) for a 3x3 correlation C.
inline Eigen::Matrix3d procrustes_rotation(const Eigen::Matrix3d& C) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s(1) > 1e-12 * s(0))) throw DegenerateFitError("procrustes_rotation: rank below 2");
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    return svd.matrixU() * d * svd.matrixV().transpose();
}

namespace detail {
// min over S of exchange_energy(m - S phi), and the minimizing S.
inline std::pair<double, Eigen::Matrix3d> rotated_distance_sq(const GridGeometry& g, std::span<const Vec3> m,
                                                              std::vector<Vec3> phi) {
    const Eigen::Matrix3d S = procrustes_rotation(bond_correlation(g, m, phi));
    for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = m[k] - S * phi[k];
    return {exchange_energy(FieldView{g, phi}), S};
}
}  // namespace detail

/// Rotation S minimizing the Dirichlet distance from field to S Phi((x - x0) / rho).
inline Eigen::Matrix3d optimal_rotation(const SpinField& field, double rho, double x0, double y0) {
    if (!(rho > 0.0)) throw DomainError("optimal_rotation: rho must be positive");
    const auto& g = field.geometry();
    const auto phi = detail::sample_unrotated(g, rho, x0, y0);
    return procrustes_rotation(detail::bond_correlation(g, field.data(), phi));
}

struct FitResult {
    BPProfile profile;
    double distance_sq = 0.0;
    double excess = 0.0;  // exchange - 8 pi
    double ratio = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<double> trace;  // best objective after each simplex iteration

    /// Angle of S about e3, meaningful when the profile is not tilted.
    double theta() const {
        const auto R = profile.rotation();
        return std::atan2(R(1, 0), R(0, 0));
    }
    /// |S e3 - e3|
    double tilt() const { return (profile.rotation().col(2) - Vec3::UnitZ()).norm(); }
    bool tilted() const { return tilt() > 0.05; }
};

struct FitSeed {
    double rho = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
};

/// x0 at the maximum of m3; rho where the azimuthal average of m3 about x0
/// first drops below zero.
inline FitSeed fit_seed(const SpinField& field) {
    const auto& g = field.geometry();
    const auto m = field.data();
    std::size_t best = 0;
    for (std::size_t k = 1; k < m.size(); ++k)
        if (m[k][2] > m[best][2]) best = k;
    FitSeed s{0.0, g.x(best % g.nx), g.y(best / g.nx)};

    const std::size_t nb = std::max(g.nx, g.ny);
    std::vector<double> sum(nb, 0.0), count(nb, 0.0);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double r = std::hypot(g.x(i) - s.x0, g.y(j) - s.y0);
            const auto b = static_cast<std::size_t>(r / g.h + 0.5);
            if (b >= nb) continue;
            sum[b] += m[g.index(i, j)][2];
            count[b] += 1.0;
        }
    double prev = sum[0] / count[0];
    for (std::size_t b = 1; b < nb; ++b) {
        if (count[b] == 0.0) continue;
        const double cur = sum[b] / count[b];
        if (cur < 0.0) {
            s.rho = g.h * (static_cast<double>(b) - cur / (cur - prev));
            break;
        }
        prev = cur;
    }
    if (!(s.rho > 0.0)) s.rho = 2.0 * g.h;
    return s;
}

struct FitConfig {
    std::size_t max_iter = 2000;
    double size_tol = 1e-8;     // simplex size in (log rho, x0 / rho) units
    double initial_step = 0.1;
};

/// Closest BP profile in the discrete Dirichlet seminorm.
inline FitResult dirichlet_distance(const SpinField& field, const FitConfig& cfg = {}) {
    if (topological_charge(field) != 1) throw DomainError("dirichlet_distance: field must have charge 1");
    const double em = exchange_energy(field);
    if (!(em < 16.0 * std::numbers::pi)) throw DomainError("dirichlet_distance: exchange energy must be below 16 pi");
    const auto& g = field.geometry();
    const FitSeed seed = fit_seed(field);

    struct Ctx {
        const SpinField* f;
        double scale;
    } ctx{&field, seed.rho};

    // Coordinates: log rho, x0 / seed rho, y0 / seed rho.
    auto objective = [](const gsl_vector* v, void* p) -> double {
        auto& c = *static_cast<Ctx*>(p);
        const auto& geo = c.f->geometry();
        const double rho = std::exp(gsl_vector_get(v, 0));
        const auto phi = detail::sample_unrotated(geo, rho, c.scale * gsl_vector_get(v, 1), c.scale * gsl_vector_get(v, 2));
        try {
            return detail::rotated_distance_sq(geo, c.f->data(), phi).first;
        } catch (const DegenerateFitError&) {
            return std::numeric_limits<double>::max();
        }
    };

    gsl_multimin_function fn{objective, 3, &ctx};
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, std::log(seed.rho));
    gsl_vector_set(x, 1, seed.x0 / seed.rho);
    gsl_vector_set(x, 2, seed.y0 / seed.rho);
    gsl_vector_set_all(step, cfg.initial_step);
    gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(nm, &fn, x, step);

    FitResult out;
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
        out.iterations = it + 1;
        out.trace.push_back(gsl_multimin_fminimizer_minimum(nm));
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm), cfg.size_tol) == GSL_SUCCESS) {
            out.converged = true;
            break;
        }
    }
    const gsl_vector* best = gsl_multimin_fminimizer_x(nm);
    const double rho = std::exp(gsl_vector_get(best, 0));
    const double x0 = seed.rho * gsl_vector_get(best, 1), y0 = seed.rho * gsl_vector_get(best, 2);
    gsl_multimin_fminimizer_free(nm);
    gsl_vector_free(x);
    gsl_vector_free(step);

    const auto phi = detail::sample_unrotated(g, rho, x0, y0);
    const auto [d2, S] = detail::rotated_distance_sq(g, field.data(), phi);
    out.profile = BPProfile{rho, 0.0, x0, y0};
    out.profile.S = Eigen::Quaterniond(S).normalized();
    out.distance_sq = d2;
    out.excess = em - 8.0 * std::numbers::pi;
    if (out.distance_sq > 0.0) out.ratio = out.excess / out.distance_sq;
    return out;
}

}  // namespace skyrmion
