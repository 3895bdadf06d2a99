#pragma once

// Total energy, its gradient with respect to the grid values, and a projected
// descent on the product of spheres with the boundary ring frozen.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "skyrmion/bp_profiles.hpp"
#include "skyrmion/field.hpp"
#include "skyrmion/field_energy.hpp"
#include "skyrmion/reduced_energy.hpp"
#include "skyrmion/stray_field.hpp"

namespace skyrmion {

/// Selects energy terms, for checking gradients one term at a time.
struct EnergyTerms {
    bool exchange = true;
    bool anisotropy = true;
    bool dmi = true;
    bool stray = true;

    static EnergyTerms only_exchange() { return {true, false, false, false}; }
    static EnergyTerms only_anisotropy() { return {false, true, false, false}; }
    static EnergyTerms only_dmi() { return {false, false, true, false}; }
    static EnergyTerms only_stray() { return {false, false, false, true}; }
};

inline EnergyBreakdown total_energy(const FieldView& f, const EnergyParams& p, SpectralPlan& plan,
                                    EnergyTerms terms = {}) {
    const double ex = terms.exchange ? exchange_energy(f) : 0.0;
    const double an = terms.anisotropy ? anisotropy_energy(f) : 0.0;
    const double dm = terms.dmi ? dmi_energy(f) : 0.0;
    StrayEnergies st;
    if (terms.stray) st = plan.evaluate(f);
    return EnergyBreakdown::combine(p, ex, an, dm, st.f_vol, st.f_surf);
}

inline EnergyBreakdown total_energy(const SpinField& f, const EnergyParams& p, SpectralPlan& plan,
                                    EnergyTerms terms = {}) {
    return total_energy(f.view(), p, plan, terms);
}

/// Derivative of the total energy with respect to the grid values, before projection.
inline std::vector<Vec3> raw_energy_gradient(const FieldView& f, const EnergyParams& p, SpectralPlan& plan,
                                             EnergyTerms terms = {}) {
    const auto& g = f.geom;
    const double s2 = p.sigma * p.sigma;
    std::vector<Vec3> grad(g.size(), Vec3::Zero());
    if (terms.exchange) add_exchange_gradient(f, 1.0, grad);
    if (terms.anisotropy) add_anisotropy_gradient(f, s2, grad);
    if (terms.dmi && p.lambda != 0.0) add_dmi_gradient(f, -s2 * p.lambda, grad);
    if (terms.stray && p.lambda != 1.0) {
        std::vector<Vec3> st(g.size());
        plan.evaluate(f, st);
        const double c = s2 * (1.0 - p.lambda) * g.h * g.h;
        for (std::size_t k = 0; k < g.size(); ++k) grad[k] += c * st[k];
    }
    return grad;
}

/// Tangential gradient g - (g . m) m at every cell.
inline std::vector<Vec3> energy_gradient(const FieldView& f, const EnergyParams& p, SpectralPlan& plan,
                                         EnergyTerms terms = {}) {
    auto grad = raw_energy_gradient(f, p, plan, terms);
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] -= grad[k].dot(f.m[k]) * f.m[k];
    return grad;
}

inline std::vector<Vec3> energy_gradient(const SpinField& f, const EnergyParams& p, SpectralPlan& plan,
                                         EnergyTerms terms = {}) {
    return energy_gradient(f.view(), p, plan, terms);
}

enum class DescentMethod { Gradient, LBFGS };

struct MinimizeConfig {
    std::size_t max_iter = 20000;
    double grad_tol = 1e-5;  // sup norm of the tangential functional gradient (per unit area)
    double step0 = 0.05;
    double backtrack = 0.5;
    double armijo = 1e-4;
    std::size_t renorm_every = 1;
    DescentMethod method = DescentMethod::LBFGS;
    std::size_t memory = 6;
    std::size_t charge_check_every = 50;
    double stall_tol = 1e-15;  // relative decrease over `stall_window` accepted steps
    std::size_t stall_window = 50;

    void validate() const {
        if (max_iter == 0 || renorm_every == 0 || charge_check_every == 0 || stall_window == 0)
            throw DomainError("MinimizeConfig: counts must be positive");
        if (!(grad_tol > 0.0 && step0 > 0.0)) throw DomainError("MinimizeConfig: tolerances must be positive");
        if (!(backtrack > 0.0 && backtrack < 1.0)) throw DomainError("MinimizeConfig: backtrack must lie in (0, 1)");
        if (!(armijo > 0.0 && armijo < 0.5)) throw DomainError("MinimizeConfig: armijo must lie in (0, 0.5)");
        if (method == DescentMethod::LBFGS && memory == 0) throw DomainError("MinimizeConfig: memory must be positive");
    }
};

enum class StopReason { Converged, Stalled, MaxIterations, LineSearchFailed, LeftAdmissibleClass, ChargeChanged };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "converged";
        case StopReason::Stalled: return "stalled";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::LineSearchFailed: return "line_search_failed";
        case StopReason::LeftAdmissibleClass: return "left_admissible_class";
        case StopReason::ChargeChanged: return "charge_changed";
    }
    return "unknown";
}

struct MinimizeReport {
    std::size_t iterations = 0;
    EnergyBreakdown initial;
    EnergyBreakdown final_energy;
    std::vector<double> trace;  // total energy after each accepted step, starting with the initial value
    int initial_charge = 0;
    int final_charge = 0;
    double grad_norm = 0.0;  // final sup norm of the functional gradient
    StopReason reason = StopReason::MaxIterations;
    bool converged = false;  // Converged or Stalled
};

struct MinimizeResult {
    SpinField field;
    MinimizeReport report;
};

/// Resolution and box-size diagnostics for a run, from the reduced theory.
struct ResolutionAdvice {
    double rho = 0.0;   // predicted physical radius
    double tail = 0.0;  // predicted rho * L
    double min_cells_per_rho = 0.0;
    bool resolved = true;  // rho >= 5 h
    bool box_ok = true;        // box width >= 6 rho L
    double required_h = 0.0;   // h giving rho = 5 h
};

/// Truncated profile at the reduced minimum, or at the leading asymptotics
/// rho = gbar / (16 pi |log s|), L = 8 sqrt(pi) |log s| / (gbar s) when the
/// closed form does not exist.
inline TruncatedProfile reduced_initial_profile(double sigma, double lambda) {
    using std::numbers::pi;
    try {
        const auto m = reduced_minimize(sigma, lambda, k_star());
        const auto phys = reduced_to_physical(m.point(), sigma);
        return {phys.rho, phys.theta, phys.L};
    } catch (const DomainError&) {
        const double ls = std::abs(std::log(sigma));
        const double gb = g_bar(lambda);
        return {gb / (16.0 * pi * ls), optimal_angles(lambda).plus, 8.0 * std::sqrt(pi) * ls / (gb * sigma)};
    }
}

inline ResolutionAdvice advise_resolution(const GridGeometry& g, const EnergyParams& p) {
    ResolutionAdvice a;
    const auto t = reduced_initial_profile(p.sigma, p.lambda);
    a.rho = t.rho;
    const double L = t.L;
    a.tail = a.rho * L;
    a.min_cells_per_rho = a.rho / g.h;
    a.resolved = a.rho >= 5.0 * g.h;
    a.required_h = a.rho / 5.0;
    const double half = 0.5 * g.h * static_cast<double>(std::min(g.nx, g.ny));
    a.box_ok = half >= 3.0 * a.tail;
    return a;
}

namespace detail {

inline double sup_norm(std::span<const Vec3> v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, x.squaredNorm());
    return std::sqrt(s);
}

inline double dot(std::span<const Vec3> a, std::span<const Vec3> b) {
    constexpr std::size_t block = 1024;
    const double* x = a.data()->data();
    const double* y = b.data()->data();
    const std::size_t n = 3 * a.size();
    std::vector<double> part((n + block - 1) / block, 0.0);
    for (std::size_t p = 0; p < part.size(); ++p) {
        double s = 0.0;
        const std::size_t end = std::min(n, (p + 1) * block);
        for (std::size_t k = p * block; k < end; ++k) s += x[k] * y[k];
        part[p] = s;
    }
    return pairwise_sum(part);
}

// y += a x
inline void axpy(double a, std::span<const Vec3> x, std::span<Vec3> y) {
    const double* px = x.data()->data();
    double* py = y.data()->data();
    for (std::size_t k = 0, n = 3 * x.size(); k < n; ++k) py[k] += a * px[k];
}

inline void project(std::span<Vec3> v, std::span<const Vec3> m) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= v[k].dot(m[k]) * m[k];
}

inline int charge_of(const GridGeometry& g, std::span<const Vec3> m, double ring_tol) {
    std::vector<Vec3> u(m.begin(), m.end());
    for (auto& v : u) v.normalize();
    return topological_charge(SpinField(g, std::move(u), ring_tol));
}

}  // namespace detail

/// Projected descent with Armijo backtracking; every accepted step lowers the
/// total energy. Ring cells are never moved.
inline MinimizeResult minimize(const SpinField& init, const EnergyParams& params, const MinimizeConfig& cfg = {}) {
    cfg.validate();
    const auto& g = init.geometry();
    const double h2 = g.h * g.h;
    SpectralPlan plan(g);
    const bool with_stray = params.lambda != 1.0;

    MinimizeReport rep;
    rep.initial = total_energy(init, params, plan);
    rep.initial_charge = topological_charge(init);
    if (rep.initial_charge != 1) throw DomainError("minimize: initial field must have charge 1");
    if (!(rep.initial.exchange < 16.0 * std::numbers::pi))
        throw DomainError("minimize: initial exchange energy must be below 16 pi");

    std::vector<char> frozen(g.size(), 0);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) frozen[g.index(i, j)] = g.on_ring(i, j) ? 1 : 0;

    std::vector<Vec3> m(init.data().begin(), init.data().end());
    const double s2 = params.sigma * params.sigma;
    std::vector<Vec3> stray(with_stray ? g.size() : 0);
    // Energy and projected gradient at x, sharing one stray-field transform.
    auto evaluate = [&](const std::vector<Vec3>& x, std::vector<Vec3>& gr) {
        const FieldView f{g, x};
        StrayEnergies st;
        gr.assign(g.size(), Vec3::Zero());
        if (with_stray) {
            st = plan.evaluate(f, stray);
            const double c = s2 * (1.0 - params.lambda) * h2;
            for (std::size_t k = 0; k < g.size(); ++k) gr[k] = c * stray[k];
        }
        add_exchange_gradient(f, 1.0, gr);
        add_anisotropy_gradient(f, s2, gr);
        const double dmi = params.lambda != 0.0 ? add_dmi_gradient(f, -s2 * params.lambda, gr) : 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (frozen[k])
                gr[k].setZero();
            else
                gr[k] -= gr[k].dot(x[k]) * x[k];
        }
        return EnergyBreakdown::combine(params, exchange_energy(f), anisotropy_energy(f), dmi, st.f_vol, st.f_surf);
    };

    std::vector<Vec3> gr, g_new;
    EnergyBreakdown cur = evaluate(m, gr);
    rep.trace.push_back(cur.total);

    struct Pair {
        std::vector<Vec3> s, y;
        double rho = 0.0;
    };
    std::deque<Pair> mem;
    double alpha_prev = cfg.step0;
    std::size_t since_renorm = 0;
    std::vector<Vec3> trial(g.size()), dir(g.size()), q;

    rep.reason = StopReason::MaxIterations;
    for (std::size_t it = 0; it < cfg.max_iter; ++it) {
        rep.grad_norm = detail::sup_norm(gr) / h2;
        if (rep.grad_norm <= cfg.grad_tol) {
            rep.reason = StopReason::Converged;
            break;
        }

        // Search direction: two-loop recursion, projected to the tangent space.
        bool quasi = cfg.method == DescentMethod::LBFGS && !mem.empty();
        if (quasi) {
            q = gr;
            std::vector<double> a(mem.size());
            for (std::size_t k = mem.size(); k-- > 0;) {
                a[k] = mem[k].rho * detail::dot(mem[k].s, q);
                detail::axpy(-a[k], mem[k].y, q);
            }
            const auto& last = mem.back();
            const double gamma = detail::dot(last.s, last.y) / detail::dot(last.y, last.y);
            for (auto& v : q) v *= gamma;
            for (std::size_t k = 0; k < mem.size(); ++k) {
                const double b = mem[k].rho * detail::dot(mem[k].y, q);
                detail::axpy(a[k] - b, mem[k].s, q);
            }
            for (std::size_t c = 0; c < q.size(); ++c) dir[c] = frozen[c] ? Vec3::Zero() : Vec3(-q[c]);
            detail::project(dir, m);
            if (!(detail::dot(dir, gr) < 0.0)) {
                mem.clear();
                quasi = false;
            }
        }
        if (!quasi)
            for (std::size_t c = 0; c < gr.size(); ++c) dir[c] = -gr[c];
        const double slope = detail::dot(dir, gr);

        // Backtracking line search.
        double alpha = quasi ? 1.0 : std::min(2.0 * alpha_prev, 1e3 * cfg.step0);
        const bool renorm = ++since_renorm >= cfg.renorm_every;
        EnergyBreakdown next;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t c = 0; c < m.size(); ++c) {
                trial[c] = m[c] + alpha * dir[c];
                if (renorm) trial[c].normalize();
            }
            next = evaluate(trial, g_new);
            if (next.total <= cur.total + cfg.armijo * alpha * slope && next.total < cur.total) {
                accepted = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!accepted) {
            if (quasi) {
                mem.clear();
                continue;
            }
            rep.reason = StopReason::LineSearchFailed;
            break;
        }
        if (renorm) since_renorm = 0;
        if (!quasi) alpha_prev = alpha;

        if (!(next.exchange < 16.0 * std::numbers::pi)) {
            rep.reason = StopReason::LeftAdmissibleClass;
            break;
        }

        if (cfg.method == DescentMethod::LBFGS) {
            Pair p;
            if (mem.size() == cfg.memory) {
                p = std::move(mem.front());
                mem.pop_front();
            } else {
                p.s.resize(m.size());
                p.y.resize(m.size());
            }
            for (std::size_t c = 0; c < m.size(); ++c) {
                p.s[c] = trial[c] - m[c];
                p.s[c] -= p.s[c].dot(trial[c]) * trial[c];
                p.y[c] = g_new[c] - (gr[c] - gr[c].dot(trial[c]) * trial[c]);
            }
            const double sy = detail::dot(p.s, p.y);
            if (sy > 1e-14 * std::sqrt(detail::dot(p.s, p.s) * detail::dot(p.y, p.y))) {
                p.rho = 1.0 / sy;
                mem.push_back(std::move(p));
            }
        }

        m.swap(trial);
        gr.swap(g_new);
        cur = next;
        rep.trace.push_back(cur.total);
        rep.iterations = it + 1;

        if (rep.iterations % cfg.charge_check_every == 0 &&
            detail::charge_of(g, m, init.ring_tolerance()) != rep.initial_charge) {
            rep.reason = StopReason::ChargeChanged;
            break;
        }
        if (rep.trace.size() > cfg.stall_window) {
            const double before = rep.trace[rep.trace.size() - 1 - cfg.stall_window];
            if (before - cur.total <= cfg.stall_tol * std::abs(cur.total)) {
                rep.reason = StopReason::Stalled;
                break;
            }
        }
    }

    for (auto& v : m) v.normalize();
    SpinField out(g, std::move(m), init.ring_tolerance());
    rep.final_energy = total_energy(out, params, plan);
    rep.final_charge = topological_charge(out);
    {
        std::vector<Vec3> final_grad;
        evaluate(std::vector<Vec3>(out.data().begin(), out.data().end()), final_grad);
        rep.grad_norm = detail::sup_norm(final_grad) / h2;
    }
    rep.converged = rep.reason == StopReason::Converged || rep.reason == StopReason::Stalled;
    return {std::move(out), std::move(rep)};
}

}  // namespace skyrmion
