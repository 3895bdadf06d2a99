#pragma once

// Reduced three-parameter energy in the variables (rho~, theta, L~) with
// rho~ = |log sigma| rho and L~ = L / (2 sqrt(pi)):
//   E(rho~, theta, L~) = |log s| (s L~)^-2 + 4 pi log(K L~^2) rho~^2 / |log s| - g(lambda, theta) rho~
// and its closed-form minimization through the lower Lambert W branch.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "skyrmion/specfun.hpp"

namespace skyrmion {

inline double lambda_c() {
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    return 3.0 * pi2 / (32.0 + 3.0 * pi2);
}

inline double g_bar(double lambda) {
    using std::numbers::pi;
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("g_bar: lambda outside [0, 1]");
    if (lambda >= lambda_c()) return (8.0 + pi * pi / 4.0) * pi * lambda - pi * pi * pi / 4.0;
    return 128.0 * lambda * lambda / (3.0 * pi * (1.0 - lambda)) + pi * pi * pi / 8.0 * (1.0 - lambda);
}

/// DMI plus stray-field coefficient of the linear term in rho~.
inline double g(double lambda, double theta) {
    using std::numbers::pi;
    const double c = std::cos(theta);
    return 8.0 * pi * lambda * c + pi * pi * pi / 8.0 * (1.0 - lambda) * (1.0 - 3.0 * c * c);
}

struct OptimalAngles {
    double plus = 0.0;
    double minus = 0.0;
};

inline OptimalAngles optimal_angles(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("optimal_angles: lambda outside [0, 1]");
    if (lambda >= lambda_c()) return {};
    const double a = 32.0 * lambda / (3.0 * std::numbers::pi * std::numbers::pi * (1.0 - lambda));
    const double t = std::acos(std::min(a, 1.0));
    return {t, -t};
}

/// 16 pi / e^{2(1 + gamma)}.
inline double k_star() { return 16.0 * std::numbers::pi / std::exp(2.0 * (1.0 + kEulerGamma)); }

/// True when K lies in [K*/2, 2 K*], where the asymptotic statements apply.
inline bool k_in_range(double K) { return K >= 0.5 * k_star() && K <= 2.0 * k_star(); }

struct ReducedPoint {
    double rho_tilde = 0.0;
    double theta = 0.0;
    double L_tilde = 0.0;

    /// Membership in V_sigma: rho~ > 0 and L~ >= 1 / (4 sigma sqrt(pi)).
    bool in_domain(double sigma) const {
        return rho_tilde > 0.0 && L_tilde >= 1.0 / (4.0 * sigma * std::sqrt(std::numbers::pi));
    }
};

/// Physical profile parameters of a reduced point.
struct PhysicalParameters {
    double rho = 0.0;
    double theta = 0.0;
    double L = 0.0;
};

inline PhysicalParameters reduced_to_physical(const ReducedPoint& p, double sigma) {
    return {p.rho_tilde / std::abs(std::log(sigma)), p.theta, 2.0 * std::sqrt(std::numbers::pi) * p.L_tilde};
}

inline ReducedPoint physical_to_reduced(const PhysicalParameters& p, double sigma) {
    return {p.rho * std::abs(std::log(sigma)), p.theta, p.L / (2.0 * std::sqrt(std::numbers::pi))};
}

namespace detail {
inline void check_reduced_args(double sigma, double K) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("reduced energy: sigma outside (0, 1)");
    if (!(K > 0.0)) throw DomainError("reduced energy: K must be positive");
}
}  // namespace detail

inline double reduced_energy(const ReducedPoint& p, double sigma, double lambda, double K) {
    detail::check_reduced_args(sigma, K);
    const double kl2 = K * p.L_tilde * p.L_tilde;
    if (!(kl2 > 1.0)) throw DomainError("reduced_energy: K L~^2 <= 1");
    const double ls = std::abs(std::log(sigma));
    const double sl = sigma * p.L_tilde;
    return ls / (sl * sl) + 4.0 * std::numbers::pi * std::log(kl2) * p.rho_tilde * p.rho_tilde / ls -
           g(lambda, p.theta) * p.rho_tilde;
}

/// Partial derivatives in (rho~, theta, L~).
inline std::array<double, 3> reduced_energy_gradient(const ReducedPoint& p, double sigma, double lambda, double K) {
    using std::numbers::pi;
    detail::check_reduced_args(sigma, K);
    const double kl2 = K * p.L_tilde * p.L_tilde;
    if (!(kl2 > 1.0)) throw DomainError("reduced_energy_gradient: K L~^2 <= 1");
    const double ls = std::abs(std::log(sigma));
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    const double dg = -8.0 * pi * lambda * s + 6.0 * pi * pi * pi / 8.0 * (1.0 - lambda) * c * s;
    const double L = p.L_tilde;
    return {8.0 * pi * std::log(kl2) * p.rho_tilde / ls - g(lambda, p.theta), -p.rho_tilde * dg,
            -2.0 * ls / (sigma * sigma * L * L * L) + 8.0 * pi * p.rho_tilde * p.rho_tilde / (ls * L)};
}

struct ExpansionTerms {
    double leading = 0.0;   // -gbar^2 / (32 pi)
    double loglog = 0.0;    // coefficient of log|log s| / |log s|
    double constant = 0.0;  // coefficient of 1 / |log s|

    double evaluate(double sigma) const {
        const double ls = std::abs(std::log(sigma));
        return leading + loglog * std::log(ls) / ls + constant / ls;
    }
};

inline ExpansionTerms expansion_terms(double lambda, double K) {
    using std::numbers::pi;
    const double gb = g_bar(lambda);
    const double g2 = gb * gb;
    return {-g2 / (32.0 * pi), g2 / (32.0 * pi), -g2 / (64.0 * pi) * std::log(g2 / (64.0 * pi * std::numbers::e * K))};
}

inline double minimal_energy_expansion(double sigma, double lambda, double K) {
    detail::check_reduced_args(sigma, K);
    return expansion_terms(lambda, K).evaluate(sigma);
}

struct ReducedMinimum {
    double rho0 = 0.0;
    double theta0_plus = 0.0;
    double theta0_minus = 0.0;
    double L0 = 0.0;
    double min_energy = 0.0;
    double t0 = 0.0;
    double w = 0.0;  // W_{-1} at the Lambert argument
    ExpansionTerms expansion_terms;
    double t_max = 0.0;         // 16 pi sigma^2 / K, upper end of the admissible t range
    double t0_principal = 0.0;  // the other critical point, from W_0; lies above t_max
    bool sigma_warning = false;  // sigma > 0.05
    bool k_warning = false;      // K outside [K*/2, 2 K*]

    ReducedPoint point(bool plus = true) const { return {rho0, plus ? theta0_plus : theta0_minus, L0}; }
};

/// Lambert argument -gbar sigma / (8 sqrt(pi K)).
inline double lambert_argument(double sigma, double lambda, double K) {
    return -g_bar(lambda) * sigma / (8.0 * std::sqrt(std::numbers::pi * K));
}

inline ReducedMinimum reduced_minimize(double sigma, double lambda, double K) {
    using std::numbers::pi;
    detail::check_reduced_args(sigma, K);
    const double a = lambert_argument(sigma, lambda, K);
    if (a < -1.0 / std::numbers::e)
        throw DomainError("reduced_minimize: sigma too large, no W_{-1} solution (argument " + std::to_string(a) +
                          " < -1/e)");
    const double gb = g_bar(lambda);
    const double ls = std::abs(std::log(sigma));

    ReducedMinimum r;
    r.w = lambert_w(Branch::MinusOne, a);
    r.t0 = std::exp(2.0 * r.w);
    r.t0_principal = std::exp(2.0 * lambert_w(Branch::Principal, a));
    r.t_max = 16.0 * pi * sigma * sigma / K;
    r.L0 = 1.0 / std::sqrt(K * r.t0);
    r.rho0 = gb * ls / (8.0 * pi * std::log(K * r.L0 * r.L0));
    const auto th = optimal_angles(lambda);
    r.theta0_plus = th.plus;
    r.theta0_minus = th.minus;
    r.min_energy = gb * gb * ls / (64.0 * pi) * (1.0 / (r.w * r.w) + 2.0 / r.w);
    r.expansion_terms = skyrmion::expansion_terms(lambda, K);
    r.sigma_warning = sigma > 0.05;
    r.k_warning = !k_in_range(K);
    if (!(r.t0 < r.t_max))
        throw DomainError("reduced_minimize: critical point lies outside V_sigma (sigma too large)");
    return r;
}

}  // namespace skyrmion
