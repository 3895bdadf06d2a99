#pragma once

// Volume and surface charge energies through Fourier multipliers on a
// zero-padded grid:
//   F_vol  = 1/2 int |k . M(k)|^2 / |k| dk/(2 pi)^2,   M = FT of m'
//   F_surf = 1/2 int |k| |FT(m3 + 1)|^2 dk/(2 pi)^2
// The continuous transform is approximated by h^2 times the DFT of the
// padded samples.

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "skyrmion/field.hpp"

namespace skyrmion {

struct StrayEnergies {
    double f_vol = 0.0;
    double f_surf = 0.0;
};

/// Transforms and frequency tables for one grid shape. Not shareable across
/// threads; give each worker its own plan.
class SpectralPlan {
public:
    explicit SpectralPlan(const GridGeometry& geom, std::size_t pad = 2)
        : geom_(geom), npx_(pad * geom.nx), npy_(pad * geom.ny), nkx_(npx_ / 2 + 1) {
        if (pad < 2) throw DomainError("SpectralPlan: padding factor must be at least 2");
        real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * npx_ * npy_)));
        for (auto& c : spec_)
            c.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nkx_ * npy_)));
        {
            std::lock_guard lock(planner_mutex());
            const int ny = static_cast<int>(npy_), nx = static_cast<int>(npx_);
            forward_ = fftw_plan_dft_r2c_2d(ny, nx, real_.get(), spec_[0].get(), FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_2d(ny, nx, spec_[0].get(), real_.get(), FFTW_ESTIMATE);
        }
        if (!forward_ || !backward_) throw std::runtime_error("SpectralPlan: FFTW planning failed");

        kx_.resize(nkx_);
        ky_.resize(npy_);
        const double dkx = 2.0 * std::numbers::pi / (static_cast<double>(npx_) * geom.h);
        const double dky = 2.0 * std::numbers::pi / (static_cast<double>(npy_) * geom.h);
        for (std::size_t a = 0; a < nkx_; ++a) kx_[a] = dkx * static_cast<double>(a);
        for (std::size_t b = 0; b < npy_; ++b) {
            const long s = b <= npy_ / 2 ? static_cast<long>(b) : static_cast<long>(b) - static_cast<long>(npy_);
            ky_[b] = dky * static_cast<double>(s);
        }
    }

    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    ~SpectralPlan() {
        std::lock_guard lock(planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
    }

    const GridGeometry& geometry() const noexcept { return geom_; }
    std::size_t padded_nx() const noexcept { return npx_; }
    std::size_t padded_ny() const noexcept { return npy_; }

    /// Both energies. If grad is non-empty it receives w_vol dF_vol/dm - w_surf dF_surf/dm
    /// as a functional derivative (per unit area, not per cell).
    StrayEnergies evaluate(const FieldView& f, std::span<Vec3> grad = {}, double w_vol = 1.0,
                           double w_surf = 1.0) {
        check(f);
        forward(f, 0, 0.0, spec_[0].get());
        forward(f, 1, 0.0, spec_[1].get());
        forward(f, 2, 1.0, spec_[2].get());

        const double n_total = static_cast<double>(npx_ * npy_);
        const double scale = geom_.h * geom_.h / (2.0 * n_total);
        double e_vol = 0.0, e_surf = 0.0;
        auto* a1 = reinterpret_cast<std::complex<double>*>(spec_[0].get());
        auto* a2 = reinterpret_cast<std::complex<double>*>(spec_[1].get());
        auto* a3 = reinterpret_cast<std::complex<double>*>(spec_[2].get());
        const bool want_grad = !grad.empty();
        for (std::size_t b = 0; b < npy_; ++b) {
            double row_vol = 0.0, row_surf = 0.0;
            for (std::size_t a = 0; a < nkx_; ++a) {
                const std::size_t idx = b * nkx_ + a;
                const double kx = kx_[a], ky = ky_[b];
                const double kk = std::sqrt(kx * kx + ky * ky);
                const double weight = (a == 0 || 2 * a == npx_) ? 1.0 : 2.0;
                if (kk == 0.0) {
                    a1[idx] = a2[idx] = a3[idx] = 0.0;
                    continue;
                }
                // The mixed term is dropped on Nyquist lines, where +k and -k alias.
                const bool nyquist = 2 * a == npx_ || 2 * b == npy_;
                const double cxy = nyquist ? 0.0 : kx * ky / kk;
                const double cxx = kx * kx / kk, cyy = ky * ky / kk;
                const std::complex<double> v1 = a1[idx], v2 = a2[idx], v3 = a3[idx];
                row_vol += weight * (cxx * std::norm(v1) + cyy * std::norm(v2) +
                                     2.0 * cxy * std::real(v1 * std::conj(v2)));
                row_surf += weight * kk * std::norm(v3);
                if (want_grad) {
                    a1[idx] = w_vol * (cxx * v1 + cxy * v2);
                    a2[idx] = w_vol * (cxy * v1 + cyy * v2);
                    a3[idx] = -w_surf * kk * v3;
                }
            }
            e_vol += row_vol;
            e_surf += row_surf;
        }
        if (want_grad) {
            if (grad.size() != geom_.size()) throw DomainError("SpectralPlan: gradient size mismatch");
            for (auto& g : grad) g.setZero();
            for (int comp = 0; comp < 3; ++comp) backward(spec_[comp].get(), comp, 1.0 / n_total, grad);
        }
        return {scale * e_vol, scale * e_surf};
    }

private:
    struct FftwFree {
        void operator()(void* p) const noexcept { fftw_free(p); }
    };

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    void check(const FieldView& f) const {
        if (!(f.geom == geom_)) throw DomainError("SpectralPlan: field grid does not match plan");
    }

    void forward(const FieldView& f, int comp, double shift, fftw_complex* out) {
        std::fill(real_.get(), real_.get() + npx_ * npy_, 0.0);
        for (std::size_t j = 0; j < geom_.ny; ++j)
            for (std::size_t i = 0; i < geom_.nx; ++i) real_[j * npx_ + i] = f.m[geom_.index(i, j)][comp] + shift;
        fftw_execute_dft_r2c(forward_, real_.get(), out);
    }

    void backward(fftw_complex* in, int comp, double factor, std::span<Vec3> out) {
        fftw_execute_dft_c2r(backward_, in, real_.get());
        for (std::size_t j = 0; j < geom_.ny; ++j)
            for (std::size_t i = 0; i < geom_.nx; ++i) out[geom_.index(i, j)][comp] = factor * real_[j * npx_ + i];
    }

    GridGeometry geom_;
    std::size_t npx_, npy_, nkx_;
    std::unique_ptr<double[], FftwFree> real_;
    std::unique_ptr<fftw_complex[], FftwFree> spec_[3];
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    std::vector<double> kx_, ky_;
};

inline double f_vol(const FieldView& f, SpectralPlan& plan) { return plan.evaluate(f).f_vol; }
inline double f_vol(const SpinField& f, SpectralPlan& plan) { return f_vol(f.view(), plan); }
inline double f_surf(const FieldView& f, SpectralPlan& plan) { return plan.evaluate(f).f_surf; }
inline double f_surf(const SpinField& f, SpectralPlan& plan) { return f_surf(f.view(), plan); }

/// Functional derivative of F_vol - F_surf.
inline std::vector<Vec3> stray_field_gradient(const FieldView& f, SpectralPlan& plan) {
    std::vector<Vec3> g(f.geom.size(), Vec3::Zero());
    plan.evaluate(f, g);
    return g;
}
inline std::vector<Vec3> stray_field_gradient(const SpinField& f, SpectralPlan& plan) {
    return stray_field_gradient(f.view(), plan);
}

}  // namespace skyrmion
