#pragma once

// Discrete S^2-valued magnetization on a uniform 2D grid, and the model
// parameters of the rescaled energy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "skyrmion/specfun.hpp"

namespace skyrmion {

using Vec3 = Eigen::Vector3d;

inline const Vec3 kSouth{0.0, 0.0, -1.0};

/// Uniform cell-centred grid. Cell (i, j) sits at origin + h (i, j); storage is
/// row-major with x fastest, index = j * nx + i.
struct GridGeometry {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double h = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;

    std::size_t size() const noexcept { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
    double x(std::size_t i) const noexcept { return origin_x + h * static_cast<double>(i); }
    double y(std::size_t j) const noexcept { return origin_y + h * static_cast<double>(j); }
    bool on_ring(std::size_t i, std::size_t j) const noexcept {
        return i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
    }
    bool operator==(const GridGeometry&) const = default;

    /// Square box [-R, R]^2 split into n x n cells.
    static GridGeometry square(double half_width, std::size_t n) {
        const double h = 2.0 * half_width / static_cast<double>(n);
        return {n, n, h, -half_width + 0.5 * h, -half_width + 0.5 * h};
    }
};

/// Read-only view of grid values that need not be unit vectors. Energies are
/// defined on views so that finite-difference checks can leave the sphere.
struct FieldView {
    GridGeometry geom;
    std::span<const Vec3> m;
};

class FieldError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unit-vector field with the boundary ring pinned near -e3.
class SpinField {
public:
    static constexpr double kRenormTolerance = 1e-6;
    static constexpr double kDefaultRingTolerance = 1e-6;

    SpinField(GridGeometry geom, std::vector<Vec3> data, double ring_tolerance = kDefaultRingTolerance)
        : geom_(geom), data_(std::move(data)), ring_tolerance_(ring_tolerance) {
        if (geom_.nx < 4 || geom_.ny < 4) throw FieldError("SpinField: need at least 4x4 cells");
        if (!(geom_.h > 0.0)) throw FieldError("SpinField: grid spacing must be positive");
        if (data_.size() != geom_.size()) throw FieldError("SpinField: data size does not match grid");
        for (auto& v : data_) {
            const double n = v.norm();
            if (!std::isfinite(n) || std::abs(n - 1.0) > kRenormTolerance)
                throw FieldError("SpinField: vector norm deviates from 1 by more than 1e-6");
            if (std::abs(n - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) v /= n;
        }
        const double dev = ring_deviation();
        if (dev > ring_tolerance_)
            throw FieldError("SpinField: boundary ring deviates from -e3 by " + std::to_string(dev));
    }

    /// Uniform -e3 field.
    static SpinField uniform(GridGeometry geom) {
        return SpinField(geom, std::vector<Vec3>(geom.size(), kSouth));
    }

    const GridGeometry& geometry() const noexcept { return geom_; }
    std::size_t nx() const noexcept { return geom_.nx; }
    std::size_t ny() const noexcept { return geom_.ny; }
    double h() const noexcept { return geom_.h; }
    double ring_tolerance() const noexcept { return ring_tolerance_; }
    std::span<const Vec3> data() const noexcept { return data_; }
    const Vec3& at(std::size_t i, std::size_t j) const { return data_[geom_.index(i, j)]; }
    FieldView view() const noexcept { return {geom_, data_}; }

    double ring_deviation() const {
        double dev = 0.0;
        for (std::size_t j = 0; j < geom_.ny; ++j)
            for (std::size_t i = 0; i < geom_.nx; ++i)
                if (geom_.on_ring(i, j)) dev = std::max(dev, (data_[geom_.index(i, j)] - kSouth).norm());
        return dev;
    }

    /// Field with every value mapped through f (e.g. a global rotation).
    template <class F>
    SpinField transformed(F&& f) const {
        std::vector<Vec3> out(data_.size());
        for (std::size_t k = 0; k < data_.size(); ++k) out[k] = f(data_[k]);
        return SpinField(geom_, std::move(out), ring_tolerance_ + 1e-12);
    }

private:
    GridGeometry geom_;
    std::vector<Vec3> data_;
    double ring_tolerance_;
};

/// Couplings (sigma, lambda) of the rescaled energy.
struct EnergyParams {
    double sigma = 0.0;
    double lambda = 0.0;

    EnergyParams() = default;
    EnergyParams(double s, double l) : sigma(s), lambda(l) {
        if (!(sigma > 0.0)) throw DomainError("EnergyParams: sigma must be positive");
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("EnergyParams: lambda must lie in [0, 1]");
    }

    /// Regime in which minimizers over the admissible class are known to exist.
    bool well_posed() const noexcept { return sigma * sigma * (1.0 + lambda) * (1.0 + lambda) <= 2.0; }
};

/// (Q, kappa, delta) -> (sigma, lambda). A negative kappa is absorbed by the
/// reflection m(x) -> m(-x), which flips the sign of the DMI term.
inline EnergyParams from_physical(double quality, double kappa, double delta) {
    if (!(quality > 1.0)) throw DomainError("from_physical: Q must exceed 1");
    if (!(delta >= 0.0)) throw DomainError("from_physical: delta must be non-negative");
    const double k = std::abs(kappa);
    if (!(k + delta > 0.0)) throw DomainError("from_physical: kappa + delta must be positive");
    return EnergyParams((k + delta) / std::sqrt(quality - 1.0), k / (k + delta));
}

/// Per-term energies. The raw terms are the bare integrals; total recombines
/// them as exchange + sigma^2 (anisotropy - lambda dmi + (1 - lambda)(f_vol - f_surf)),
/// where dmi is the integral of 2 m' . grad m3.
struct EnergyBreakdown {
    double exchange = 0.0;
    double anisotropy = 0.0;
    double dmi = 0.0;
    double f_vol = 0.0;
    double f_surf = 0.0;
    double total = 0.0;

    static EnergyBreakdown combine(const EnergyParams& p, double exchange, double anisotropy, double dmi,
                                   double f_vol, double f_surf) {
        EnergyBreakdown b{exchange, anisotropy, dmi, f_vol, f_surf, 0.0};
        b.total = recombine(p, b);
        return b;
    }

    static double recombine(const EnergyParams& p, const EnergyBreakdown& b) {
        const double s2 = p.sigma * p.sigma;
        return b.exchange + s2 * (b.anisotropy - p.lambda * b.dmi + (1.0 - p.lambda) * (b.f_vol - b.f_surf));
    }
};

}  // namespace skyrmion
