#pragma once

// Belavin-Polyakov profiles phi = S Phi((x - x0) / rho) with
//   Phi(y) = (-2y / (1 + |y|^2), (1 - |y|^2) / (1 + |y|^2)),
// and their truncation at scale L, whose radial profile is continued past
// r = sqrt(L) by a K_1 tail decaying on the scale L.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Geometry>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "skyrmion/field.hpp"
#include "skyrmion/field_energy.hpp"
#include "skyrmion/specfun.hpp"

namespace skyrmion {

struct BPProfile {
    double rho = 1.0;
    double theta = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    /// General rotation; when empty the rotation by theta about e3 is used.
    std::optional<Eigen::Quaterniond> S;

    BPProfile() = default;
    BPProfile(double rho_, double theta_ = 0.0, double x0_ = 0.0, double y0_ = 0.0)
        : rho(rho_), theta(theta_), x0(x0_), y0(y0_) {}

    Eigen::Matrix3d rotation() const {
        if (!(rho > 0.0)) throw DomainError("BPProfile: rho must be positive");
        if (S) {
            if (std::abs(S->norm() - 1.0) > 1e-12) throw DomainError("BPProfile: quaternion is not unit");
            return S->toRotationMatrix();
        }
        return Eigen::AngleAxisd(theta, Vec3::UnitZ()).toRotationMatrix();
    }
};

struct TruncatedProfile {
    double rho = 1.0;
    double theta = 0.0;
    double L = 10.0;
    double x0 = 0.0;
    double y0 = 0.0;

    void validate() const {
        if (!(rho > 0.0)) throw DomainError("TruncatedProfile: rho must be positive");
        if (!(L > 1.0)) throw DomainError("TruncatedProfile: L must exceed 1");
    }
};

/// Untruncated radial profile 2r / (1 + r^2).
inline double bp_radial(double r) { return 2.0 * r / (1.0 + r * r); }

/// Truncated radial profile f_L in core units.
inline double truncated_radial(double L, double r) {
    const double rc = std::sqrt(L);
    if (r <= rc) return bp_radial(r);
    return bp_radial(rc) * bessel_k(1, r / L) / bessel_k(1, 1.0 / rc);
}

/// S Phi((x - x0) / rho).
inline Vec3 bp_eval(const BPProfile& p, double x, double y) {
    const double u = (x - p.x0) / p.rho, v = (y - p.y0) / p.rho;
    const double q = 1.0 + u * u + v * v;
    const Vec3 phi{-2.0 * u / q, -2.0 * v / q, (2.0 - q) / q};
    return p.rotation() * phi;
}

/// Columns d/dx and d/dy of bp_eval.
inline std::array<Vec3, 2> bp_gradient(const BPProfile& p, double x, double y) {
    const double u = (x - p.x0) / p.rho, v = (y - p.y0) / p.rho;
    const double q = 1.0 + u * u + v * v;
    const double q2 = q * q;
    const Vec3 du{-2.0 / q + 4.0 * u * u / q2, 4.0 * u * v / q2, -4.0 * u / q2};
    const Vec3 dv{4.0 * u * v / q2, -2.0 / q + 4.0 * v * v / q2, -4.0 * v / q2};
    const auto R = p.rotation();
    return {R * du / p.rho, R * dv / p.rho};
}

inline Vec3 truncated_eval(const TruncatedProfile& p, double x, double y) {
    p.validate();
    const double u = (x - p.x0) / p.rho, v = (y - p.y0) / p.rho;
    const double r = std::hypot(u, v);
    if (r == 0.0) return Vec3::UnitZ();
    const double f = truncated_radial(p.L, r);
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    const double ex = -u / r, ey = -v / r;
    const double m3 = std::sqrt(std::max(0.0, 1.0 - f * f));
    return {f * (c * ex - s * ey), f * (s * ex + c * ey), r < 1.0 ? m3 : -m3};
}

/// Ring tolerance that admits any sampled profile.
inline constexpr double kAnyRing = 2.0 + 1e-9;

/// Samples on [-R, R]^2 with n x n cells. The ring is not forced, since the
/// untruncated profile decays only like 1/r.
inline SpinField sample(const BPProfile& p, double half_width, std::size_t n) {
    if (n < 16) throw DomainError("sample: need n >= 16");
    const auto g = GridGeometry::square(half_width, n);
    std::vector<Vec3> data(g.size());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) data[g.index(i, j)] = bp_eval(p, g.x(i), g.y(j));
    return SpinField(g, std::move(data), kAnyRing);
}

/// Samples a truncated profile with the ring set to -e3. tail_warning, if given,
/// is set when R < 3 rho L, where the cut-off tail is visible in the energies.
inline SpinField sample(const TruncatedProfile& p, double half_width, std::size_t n, bool* tail_warning = nullptr) {
    if (n < 16) throw DomainError("sample: need n >= 16");
    p.validate();
    const auto g = GridGeometry::square(half_width, n);
    std::vector<Vec3> data(g.size());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            data[g.index(i, j)] = g.on_ring(i, j) ? kSouth : truncated_eval(p, g.x(i), g.y(j));
    if (tail_warning) *tail_warning = half_width < 3.0 * p.rho * p.L;
    return SpinField(g, std::move(data));
}

/// Sizes of the neglected remainders in the closed form, constants set to 1.
struct ClosedFormErrors {
    double exchange = 0.0;    // log^2 L / L^3
    double anisotropy = 0.0;  // rho^2 log^2 L / L
    double dmi = 0.0;         // rho L^{-1/2}
    double f_vol = 0.0;       // rho L^{-1/4}
    double f_surf = 0.0;      // rho L^{-1/2}
};

struct ClosedFormEnergy {
    EnergyBreakdown breakdown;
    ClosedFormErrors errors;
};

/// Leading-order energy pieces of a truncated profile.
inline ClosedFormEnergy truncated_energy_closed_form(const TruncatedProfile& p, const EnergyParams& params) {
    p.validate();
    using std::numbers::pi;
    const double L = p.L, rho = p.rho, c = std::cos(p.theta);
    const double exchange = 8.0 * pi + 4.0 * pi / (L * L);
    const double aniso = 4.0 * pi * rho * rho * std::log(4.0 * L * L / std::exp(2.0 * (1.0 + kEulerGamma)));
    const double dmi = 8.0 * pi * rho * c;
    const double vol = 3.0 * pi * pi * pi / 8.0 * rho * c * c;
    const double surf = pi * pi * pi / 8.0 * rho;
    const double lg = std::log(L);
    ClosedFormErrors err{lg * lg / (L * L * L), rho * rho * lg * lg / L, rho / std::sqrt(L), rho / std::pow(L, 0.25),
                         rho / std::sqrt(L)};
    return {EnergyBreakdown::combine(params, exchange, aniso, dmi, vol, surf), err};
}

struct BPConstants {
    double dirichlet = 0.0;
    double dmi = 0.0;
    double f_vol = 0.0;
    double f_surf = 0.0;
    double f_vol_quadrature = 0.0;
    double f_surf_quadrature = 0.0;
};

namespace detail {

template <class F>
double integrate_half_line(F&& f, std::initializer_list<double> breaks) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0, a = 0.0;
    for (double b : breaks) {
        total += gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
        a = b;
    }
    return total;
}

}  // namespace detail

/// Energies of Phi: Dirichlet and DMI 8 pi, F_vol 3 pi^3 / 8, F_surf pi^3 / 8. The
/// nonlocal pair is cross-checked against 4 pi int s^2 K_1^2 and 4 pi int s^2 K_0^2.
inline BPConstants bp_exact_constants() {
    using std::numbers::pi;
    BPConstants c;
    c.dirichlet = 8.0 * pi;
    c.dmi = 8.0 * pi;
    c.f_vol = 3.0 * pi * pi * pi / 8.0;
    c.f_surf = pi * pi * pi / 8.0;
    auto k1 = [](double s) { return s > 0.0 ? s * s * std::pow(bessel_k(1, s), 2) : 1.0; };
    auto k0 = [](double s) { return s > 0.0 ? s * s * std::pow(bessel_k(0, s), 2) : 0.0; };
    c.f_vol_quadrature = 4.0 * pi * detail::integrate_half_line(k1, {0.5, 2.0, 6.0, 15.0, 40.0});
    c.f_surf_quadrature = 4.0 * pi * detail::integrate_half_line(k0, {0.5, 2.0, 6.0, 15.0, 40.0});
    if (std::abs(c.f_vol_quadrature - c.f_vol) > 1e-6 || std::abs(c.f_surf_quadrature - c.f_surf) > 1e-6)
        throw std::logic_error("bp_exact_constants: quadrature disagrees with closed form");
    return c;
}

/// Radial energies of the truncated profile with rho = 1.
struct RadialEnergies {
    double core_dirichlet = 0.0;  // over r < sqrt(L)
    double tail_dirichlet = 0.0;  // over r > sqrt(L)
    double anisotropy = 0.0;      // whole plane
};

inline RadialEnergies truncated_radial_energies(double L) {
    if (!(L > 1.0)) throw DomainError("truncated_radial_energies: L must exceed 1");
    using boost::math::quadrature::gauss_kronrod;
    using std::numbers::pi;
    const double rc = std::sqrt(L);
    const double amp = bp_radial(rc) / bessel_k(1, 1.0 / rc);

    auto core = [](double r) {
        const double q = 1.0 + r * r;
        const double fp = 2.0 * (1.0 - r * r) / (q * q);
        const double m3p = -4.0 * r / (q * q);
        const double f = bp_radial(r);
        return (fp * fp + m3p * m3p) * r + (r > 0.0 ? f * f / r : 0.0);
    };
    auto tail = [L, amp](double r) {
        const double z = r / L;
        const double k0 = bessel_k(0, z), k1 = bessel_k(1, z);
        const double f = amp * k1;
        const double fp = amp * (-k0 - k1 / z) / L;
        return fp * fp / (1.0 - f * f) * r + f * f / r;
    };
    auto aniso = [L](double r) {
        const double f = truncated_radial(L, r);
        return f * f * r;
    };

    RadialEnergies e;
    const double core_breaks[] = {0.0, std::min(1.0, rc), rc};
    for (int k = 0; k < 2; ++k)
        if (core_breaks[k + 1] > core_breaks[k])
            e.core_dirichlet += gauss_kronrod<double, 61>::integrate(core, core_breaks[k], core_breaks[k + 1], 15, 1e-14);
    std::vector<double> tb{rc};
    for (double z : {0.1, 0.5, 1.0, 3.0, 8.0, 20.0, 60.0})
        if (z * L > tb.back()) tb.push_back(z * L);
    for (std::size_t k = 0; k + 1 < tb.size(); ++k) {
        e.tail_dirichlet += gauss_kronrod<double, 61>::integrate(tail, tb[k], tb[k + 1], 15, 1e-14);
        e.anisotropy += gauss_kronrod<double, 61>::integrate(aniso, tb[k], tb[k + 1], 15, 1e-14);
    }
    e.anisotropy += gauss_kronrod<double, 61>::integrate(aniso, 0.0, std::min(1.0, rc), 15, 1e-14);
    if (rc > 1.0) e.anisotropy += gauss_kronrod<double, 61>::integrate(aniso, 1.0, rc, 15, 1e-14);
    e.core_dirichlet *= 2.0 * pi;
    e.tail_dirichlet *= 2.0 * pi;
    e.anisotropy *= 2.0 * pi;
    return e;
}

/// Exact anisotropy of the truncated profile (rho = 1) from the Bessel closed form.
inline double truncated_anisotropy_exact(double L) {
    using std::numbers::pi;
    const double z = 1.0 / std::sqrt(L);
    const double k0 = bessel_k(0, z), k1 = bessel_k(1, z);
    const double core = 4.0 * pi * (1.0 / (L + 1.0) + std::log(L + 1.0) - 1.0);
    const double tail =
        4.0 * pi * L * L * (k0 * k0 + 2.0 * std::sqrt(L) * k1 * k0 - k1 * k1) / ((L + 1.0) * (L + 1.0) * k1 * k1);
    return core + tail;
}

/// Both sides of the excess identity for m against a harmonic profile phi on the box:
///   F(m) - F(phi) = int |grad w|^2 - int |w|^2 |grad phi|^2 + 2 int_{edge} d_nu phi . w,
/// with w = m - phi. The edge term vanishes on R^2, where the left side is F(m) - 8 pi.
inline std::pair<double, double> excess_hessian_identity(const SpinField& field, const BPProfile& profile) {
    const auto& g = field.geometry();
    const auto m = field.data();
    std::vector<Vec3> phi(g.size()), w(g.size());
    double potential = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            phi[k] = bp_eval(profile, g.x(i), g.y(j));
            w[k] = m[k] - phi[k];
            const auto d = bp_gradient(profile, g.x(i), g.y(j));
            potential += w[k].squaredNorm() * (d[0].squaredNorm() + d[1].squaredNorm());
        }
    potential *= g.h * g.h;

    double edge = 0.0;
    const double left = g.origin_x - 0.5 * g.h, right = g.x(g.nx - 1) + 0.5 * g.h;
    const double bottom = g.origin_y - 0.5 * g.h, top = g.y(g.ny - 1) + 0.5 * g.h;
    for (std::size_t j = 0; j < g.ny; ++j) {
        edge -= bp_gradient(profile, left, g.y(j))[0].dot(w[g.index(0, j)]);
        edge += bp_gradient(profile, right, g.y(j))[0].dot(w[g.index(g.nx - 1, j)]);
    }
    for (std::size_t i = 0; i < g.nx; ++i) {
        edge -= bp_gradient(profile, g.x(i), bottom)[1].dot(w[g.index(i, 0)]);
        edge += bp_gradient(profile, g.x(i), top)[1].dot(w[g.index(i, g.ny - 1)]);
    }
    edge *= 2.0 * g.h;

    const double lhs = exchange_energy(field.view()) - exchange_energy(FieldView{g, phi});
    const double rhs = exchange_energy(FieldView{g, w}) - potential + edge;
    return {lhs, rhs};
}

}  // namespace skyrmion
