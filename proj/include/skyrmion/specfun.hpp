#pragma once

// Special functions: modified Bessel functions of the second kind of orders
// 0, 1, 2, both real branches of the Lambert W function, and the integral
// that controls the pinned anisotropy lower bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace skyrmion {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kEulerGamma = 0.5772156649015328606065120900824;

/// Euler-Mascheroni constant.
constexpr double euler_gamma() noexcept { return kEulerGamma; }

namespace detail {

// K0 and K1 for 0 < x <= 2 from the ascending series (A&S 9.6.13, 9.6.11).
inline void bessel_k01_series(double x, double& k0, double& k1) {
    const double y = 0.25 * x * x;
    const double log_half = std::log(0.5 * x);

    // I0, I1 and the harmonic-number sums share the same power of y.
    double term = 1.0;        // y^k / (k!)^2
    double harmonic = 0.0;    // H_k
    double i0 = 0.0, sum0 = 0.0;
    double i1 = 0.0, sum1 = 0.0;
    for (int k = 0; k < 60; ++k) {
        const double t1 = term / (k + 1);  // y^k / (k! (k+1)!)
        i0 += term;
        i1 += t1;
        sum0 += term * harmonic;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        sum1 += t1 * (-2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (k + 1));
        if (term < 1e-18 * i0) break;
        harmonic += 1.0 / (k + 1);
        term *= y / ((k + 1.0) * (k + 1.0));
    }
    k0 = -(log_half + kEulerGamma) * i0 + sum0;
    k1 = 1.0 / x + log_half * (0.5 * x * i1) - 0.25 * x * sum1;
}

// K0 and K1 for x > 2 by Steed's continued fraction (Temme's CF2 at nu = 0).
inline void bessel_k01_cf(double x, double& k0, double& k1) {
    constexpr double eps = 1e-17;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 100000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace detail

/// Modified Bessel function of the second kind K_order(r), order in {0, 1, 2}.
///
/// Series below r = 2, continued fraction above. Values below the smallest
/// normal double are flushed to zero.
inline double bessel_k(int order, double r) {
    if (order < 0 || order > 2) throw DomainError("bessel_k: order must be 0, 1 or 2");
    if (!(r > 0.0)) throw DomainError("bessel_k: argument must be positive");
    if (std::isinf(r)) return 0.0;
    double k0 = 0.0, k1 = 0.0;
    if (r <= 2.0)
        detail::bessel_k01_series(r, k0, k1);
    else
        detail::bessel_k01_cf(r, k0, k1);
    double value = k0;
    if (order == 1) value = k1;
    if (order == 2) value = k0 + 2.0 * k1 / r;
    if (value < std::numeric_limits<double>::min()) return 0.0;
    return value;
}

enum class Branch { Principal, MinusOne };

/// Real branches of the Lambert W function: w e^w = x.
inline double lambert_w(Branch branch, double x) {
    constexpr double inv_e = 0.36787944117144232159552377016146;
    // x = -1/e is not exactly representable; accept a few ulps below it.
    if (std::isnan(x) || x < -inv_e * (1.0 + 8 * std::numeric_limits<double>::epsilon()))
        throw DomainError("lambert_w: argument below -1/e");
    if (branch == Branch::MinusOne && x >= 0.0)
        throw DomainError("lambert_w: branch -1 requires -1/e <= x < 0");
    if (branch == Branch::Principal && x == 0.0) return 0.0;

    const double sign = branch == Branch::Principal ? 1.0 : -1.0;
    const double near = 2.0 * (std::numbers::e * x + 1.0);
    if (near <= 0.0) return -1.0;

    double w;
    if (near < 0.5) {
        // Branch-point series in p = sqrt(2 (e x + 1)).
        const double p = sign * std::sqrt(near);
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
    } else if (branch == Branch::MinusOne) {
        const double l1 = std::log(-x);
        w = l1 - std::log(-l1);
    } else if (x < 3.0) {
        w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    } else {
        const double l1 = std::log(x);
        w = l1 - std::log(l1);
    }

    // Halley iteration.
    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - 0.5 * (wp1 + 1.0) * f / wp1;
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 4 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
    }
    return w;
}

/// Integral of mu r^3 / (1 + mu r^2) K_1(r)^2 over (0, inf).
inline double mu_integral(double mu) {
    if (!(mu > 0.0)) throw DomainError("mu_integral: mu must be positive");
    auto integrand = [mu](double r) {
        if (r <= 0.0) return 0.0;
        const double k1 = bessel_k(1, r);
        return mu * r * r * r / (1.0 + mu * r * r) * k1 * k1;
    };
    // The integrand peaks near r = 1/sqrt(mu) and decays like exp(-2r).
    const double knee = 1.0 / std::sqrt(mu);
    double breaks[] = {0.0,         1e-3 * knee, 1e-2 * knee, 0.1 * knee, knee, 10.0 * knee,
                       100.0 * knee, 0.25,       1.0,        4.0,        12.0, 40.0};
    std::sort(std::begin(breaks), std::end(breaks));
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(breaks); ++i) {
        if (breaks[i + 1] <= breaks[i] || breaks[i] >= 40.0) continue;
        total += gauss_kronrod<double, 31>::integrate(integrand, breaks[i], breaks[i + 1], 12, 1e-12);
    }
    return total;
}

}  // namespace skyrmion
