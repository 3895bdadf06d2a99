#pragma once

// Local energies of a grid field, their gradients, and the lattice degree.
//
// Exchange uses the bond form
//   sum (4/3)|m(x + h e) - m(x)|^2 - (1/12)|m(x + 2h e) - m(x)|^2
// over in-grid bonds in both axis directions e. It is fourth-order accurate
// for smooth fields and dominates the nearest-neighbour form, so it is
// positive semidefinite and has no checkerboard null modes. Derivatives in
// the DMI term are central in the interior and one-sided on the ring.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "skyrmion/field.hpp"
#include "skyrmion/parallel.hpp"

namespace skyrmion {

class DegenerateTriangleError : public FieldError {
public:
    using FieldError::FieldError;
};

namespace detail {

inline constexpr double kNear = 4.0 / 3.0;
inline constexpr double kFar = -1.0 / 12.0;

// Entry (r, c) of the 1D first-difference matrix on n points.
inline double diff_coef(std::size_t r, std::size_t c, std::size_t n, double h) {
    if (r == 0) return c == 0 ? -1.0 / h : (c == 1 ? 1.0 / h : 0.0);
    if (r + 1 == n) return c + 2 == n ? -1.0 / h : (c + 1 == n ? 1.0 / h : 0.0);
    if (c + 1 == r) return -0.5 / h;
    if (c == r + 1) return 0.5 / h;
    return 0.0;
}

// d/dx (axis 0) or d/dy (axis 1) of component comp at cell (i, j).
inline double diff(const FieldView& f, int axis, int comp, std::size_t i, std::size_t j) {
    const auto& g = f.geom;
    const std::size_t n = axis == 0 ? g.nx : g.ny;
    const std::size_t r = axis == 0 ? i : j;
    double s = 0.0;
    for (std::size_t c = (r == 0 ? 0 : r - 1); c <= std::min(r + 1, n - 1); ++c) {
        const double w = diff_coef(r, c, n, g.h);
        if (w == 0.0) continue;
        s += w * f.m[axis == 0 ? g.index(c, j) : g.index(i, c)][comp];
    }
    return s;
}

// Transpose of diff applied to a scalar grid v.
inline double diff_t(const GridGeometry& g, std::span<const double> v, int axis, std::size_t i, std::size_t j) {
    const std::size_t n = axis == 0 ? g.nx : g.ny;
    const std::size_t c = axis == 0 ? i : j;
    double s = 0.0;
    for (std::size_t r = (c == 0 ? 0 : c - 1); r <= std::min(c + 1, n - 1); ++r) {
        const double w = diff_coef(r, c, n, g.h);
        if (w == 0.0) continue;
        s += w * v[axis == 0 ? g.index(r, j) : g.index(i, r)];
    }
    return s;
}

// Whole-grid versions of diff and diff_t, traversed in storage order.
inline std::vector<double> diff_grid(const FieldView& f, int axis, int comp) {
    const auto& g = f.geom;
    const std::size_t nx = g.nx, ny = g.ny;
    const double ih = 1.0 / g.h, ih2 = 0.5 / g.h;
    std::vector<double> out(g.size());
    auto v = [&](std::size_t k) { return f.m[k][comp]; };
    if (axis == 0) {
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t b = j * nx;
            out[b] = ih * (v(b + 1) - v(b));
            for (std::size_t i = 1; i + 1 < nx; ++i) out[b + i] = ih2 * (v(b + i + 1) - v(b + i - 1));
            out[b + nx - 1] = ih * (v(b + nx - 1) - v(b + nx - 2));
        }
        return out;
    }
    for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t lo = j == 0 ? 0 : j - 1;
        const std::size_t hi = j + 1 == ny ? j : j + 1;
        const double w = (j == 0 || j + 1 == ny) ? ih : ih2;
        for (std::size_t i = 0; i < nx; ++i) out[j * nx + i] = w * (v(hi * nx + i) - v(lo * nx + i));
    }
    return out;
}

// v is read with a stride of `stride` doubles.
inline void add_diff_t_grid(const GridGeometry& g, const double* v0, std::size_t stride, int axis, double scale,
                            std::span<Vec3> out, int comp) {
    auto v = [&](std::size_t k) { return v0[k * stride]; };
    const std::size_t nx = g.nx, ny = g.ny;
    const double ih = scale / g.h, ih2 = 0.5 * scale / g.h;
    // Interior rows r contribute +v_r/2h to column r + 1 and -v_r/2h to column r - 1;
    // the two one-sided end rows contribute -+v/h to their two cells.
    if (axis == 0) {
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t b = j * nx;
            for (std::size_t r = 1; r + 1 < nx; ++r) {
                out[b + r + 1][comp] += ih2 * v(b + r);
                out[b + r - 1][comp] -= ih2 * v(b + r);
            }
            out[b][comp] -= ih * v(b);
            out[b + 1][comp] += ih * v(b);
            out[b + nx - 2][comp] -= ih * v(b + nx - 1);
            out[b + nx - 1][comp] += ih * v(b + nx - 1);
        }
        return;
    }
    for (std::size_t r = 1; r + 1 < ny; ++r)
        for (std::size_t i = 0; i < nx; ++i) {
            out[(r + 1) * nx + i][comp] += ih2 * v(r * nx + i);
            out[(r - 1) * nx + i][comp] -= ih2 * v(r * nx + i);
        }
    for (std::size_t i = 0; i < nx; ++i) {
        out[i][comp] -= ih * v(i);
        out[nx + i][comp] += ih * v(i);
        out[(ny - 2) * nx + i][comp] -= ih * v((ny - 1) * nx + i);
        out[(ny - 1) * nx + i][comp] += ih * v((ny - 1) * nx + i);
    }
}

inline double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    if (std::abs(num) < 1e-12 && std::abs(den) < 1e-12)
        throw DegenerateTriangleError("topological_charge: degenerate triangle of antipodal spins");
    return 2.0 * std::atan2(num, den);
}

}  // namespace detail

/// Discrete Dirichlet energy of arbitrary (not necessarily unit) grid values.
inline double exchange_energy(const FieldView& f) {
    const auto& g = f.geom;
    return row_sum(g.ny, [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Vec3& a = f.m[g.index(i, j)];
            if (i + 1 < g.nx) s += detail::kNear * (f.m[g.index(i + 1, j)] - a).squaredNorm();
            if (i + 2 < g.nx) s += detail::kFar * (f.m[g.index(i + 2, j)] - a).squaredNorm();
            if (j + 1 < g.ny) s += detail::kNear * (f.m[g.index(i, j + 1)] - a).squaredNorm();
            if (j + 2 < g.ny) s += detail::kFar * (f.m[g.index(i, j + 2)] - a).squaredNorm();
        }
        return s;
    });
}
inline double exchange_energy(const SpinField& f) { return exchange_energy(f.view()); }

/// grad += scale * d(exchange)/dm
inline void add_exchange_gradient(const FieldView& f, double scale, std::span<Vec3> grad) {
    const auto& g = f.geom;
    parallel_for(g.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Vec3& a = f.m[g.index(i, j)];
            Vec3 s = Vec3::Zero();
            auto bond = [&](std::size_t ii, std::size_t jj, double w) { s += w * (a - f.m[g.index(ii, jj)]); };
            if (i >= 1) bond(i - 1, j, detail::kNear);
            if (i >= 2) bond(i - 2, j, detail::kFar);
            if (i + 1 < g.nx) bond(i + 1, j, detail::kNear);
            if (i + 2 < g.nx) bond(i + 2, j, detail::kFar);
            if (j >= 1) bond(i, j - 1, detail::kNear);
            if (j >= 2) bond(i, j - 2, detail::kFar);
            if (j + 1 < g.ny) bond(i, j + 1, detail::kNear);
            if (j + 2 < g.ny) bond(i, j + 2, detail::kFar);
            grad[g.index(i, j)] += 2.0 * scale * s;
        }
    });
}

/// Integral of |m'|^2 by the cell sum.
inline double anisotropy_energy(const FieldView& f) {
    const auto& g = f.geom;
    const double h2 = g.h * g.h;
    return row_sum(g.ny, [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Vec3& v = f.m[g.index(i, j)];
            s += v[0] * v[0] + v[1] * v[1];
        }
        return h2 * s;
    });
}
inline double anisotropy_energy(const SpinField& f) { return anisotropy_energy(f.view()); }

inline void add_anisotropy_gradient(const FieldView& f, double scale, std::span<Vec3> grad) {
    const double c = 2.0 * scale * f.geom.h * f.geom.h;
    for (std::size_t k = 0; k < f.m.size(); ++k) {
        grad[k][0] += c * f.m[k][0];
        grad[k][1] += c * f.m[k][1];
    }
}

/// Raw DMI integral of 2 m' . grad m3.
inline double dmi_energy(const FieldView& f) {
    const auto& g = f.geom;
    const auto d1 = detail::diff_grid(f, 0, 2), d2 = detail::diff_grid(f, 1, 2);
    return row_sum(g.ny, [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t k = j * g.nx; k < (j + 1) * g.nx; ++k) s += f.m[k][0] * d1[k] + f.m[k][1] * d2[k];
        return 2.0 * g.h * g.h * s;
    });
}
inline double dmi_energy(const SpinField& f) { return dmi_energy(f.view()); }

/// grad += scale * d(dmi)/dm; returns the raw DMI integral as a by-product.
inline double add_dmi_gradient(const FieldView& f, double scale, std::span<Vec3> grad) {
    const auto& g = f.geom;
    const double c = 2.0 * scale * g.h * g.h;
    const auto d1 = detail::diff_grid(f, 0, 2), d2 = detail::diff_grid(f, 1, 2);
    const double energy = row_sum(g.ny, [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t k = j * g.nx; k < (j + 1) * g.nx; ++k) {
            grad[k][0] += c * d1[k];
            grad[k][1] += c * d2[k];
            s += f.m[k][0] * d1[k] + f.m[k][1] * d2[k];
        }
        return s;
    });
    const double* m = f.m.data()->data();
    detail::add_diff_t_grid(g, m, 3, 0, c, grad, 2);
    detail::add_diff_t_grid(g, m + 1, 3, 1, c, grad, 2);
    return 2.0 * g.h * g.h * energy;
}

/// Sum of lattice solid angles over 4 pi; two triangles per plaquette.
inline double topological_charge_raw(const SpinField& field) {
    const auto& g = field.geometry();
    const auto m = field.data();
    return row_sum(g.ny - 1, [&](std::size_t j) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const Vec3& a = m[g.index(i, j)];
            const Vec3& b = m[g.index(i + 1, j)];
            const Vec3& c = m[g.index(i + 1, j + 1)];
            const Vec3& d = m[g.index(i, j + 1)];
            s += detail::solid_angle(a, b, c) + detail::solid_angle(a, c, d);
        }
        return s;
    }) / (4.0 * std::numbers::pi);
}

/// Integer degree of a field whose ring sits at -e3.
inline int topological_charge(const SpinField& field) {
    return static_cast<int>(std::lround(topological_charge_raw(field)));
}

/// Pointwise m . (d1 m x d2 m) / (4 pi) with the DMI difference stencil.
inline std::vector<double> charge_density(const SpinField& field) {
    const auto f = field.view();
    const auto& g = f.geom;
    std::vector<double> out(g.size());
    parallel_for(g.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Vec3 d1{detail::diff(f, 0, 0, i, j), detail::diff(f, 0, 1, i, j), detail::diff(f, 0, 2, i, j)};
            const Vec3 d2{detail::diff(f, 1, 0, i, j), detail::diff(f, 1, 1, i, j), detail::diff(f, 1, 2, i, j)};
            out[g.index(i, j)] = f.m[g.index(i, j)].dot(d1.cross(d2)) / (4.0 * std::numbers::pi);
        }
    });
    return out;
}

/// Tangent-projected central derivatives at an interior cell.
inline std::array<Vec3, 2> tangent_derivatives(const SpinField& field, std::size_t i, std::size_t j) {
    const auto& g = field.geometry();
    const Vec3& m = field.at(i, j);
    Vec3 d1 = (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * g.h);
    Vec3 d2 = (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * g.h);
    d1 -= m.dot(d1) * m;
    d2 -= m.dot(d2) * m;
    return {d1, d2};
}

/// max over interior cells of | |grad m|^2 + 2 s m.(d1 m x d2 m) - |d1 m - s m x d2 m|^2 |.
inline double completed_square_residual(const SpinField& field, int sign) {
    if (sign != 1 && sign != -1) throw DomainError("completed_square_residual: sign must be +1 or -1");
    const auto& g = field.geometry();
    std::vector<double> row_max(g.ny, 0.0);
    parallel_for(g.ny, [&](std::size_t j) {
        if (j == 0 || j + 1 == g.ny) return;
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < g.nx; ++i) {
            const Vec3& m = field.at(i, j);
            const auto [d1, d2] = tangent_derivatives(field, i, j);
            const double lhs = d1.squaredNorm() + d2.squaredNorm() + 2.0 * sign * m.dot(d1.cross(d2));
            const double rhs = (d1 - sign * m.cross(d2)).squaredNorm();
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        row_max[j] = worst;
    });
    double worst = 0.0;
    for (double v : row_max) worst = std::max(worst, v);
    return worst;
}

}  // namespace skyrmion
