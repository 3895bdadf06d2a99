#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "skyrmion/bp_profiles.hpp"
#include "skyrmion/stray_field.hpp"
#include "skyrmion/testing/oracles.hpp"

using namespace skyrmion;
using std::numbers::pi;

namespace {

struct Gauss {
    double amp, cx, cy, s;
    double operator()(double x, double y) const {
        return amp * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
    }
    double dx(double x, double y) const { return -(x - cx) / (s * s) * (*this)(x, y); }
    double dy(double x, double y) const { return -(y - cy) / (s * s) * (*this)(x, y); }
};

GridGeometry centred(std::size_t n, double h) { return {n, n, h, -0.5 * h * (n - 1), -0.5 * h * (n - 1)}; }

// m' = (a, b), m3 = c - 1: arbitrary values, not unit vectors.
std::vector<Vec3> gaussian_field(const GridGeometry& g, const Gauss& a, const Gauss& b, const Gauss& c) {
    std::vector<Vec3> m(g.size());
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            m[g.index(i, j)] = Vec3{a(x, y), b(x, y), c(x, y) - 1.0};
        }
    return m;
}

// Unit field equal to -e3 outside a disc.
std::vector<Vec3> compact_texture(const GridGeometry& g, double cx, double cy, double R, double amp, double twist) {
    std::vector<Vec3> m(g.size());
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i) - cx, y = g.y(j) - cy;
            const double r = std::hypot(x, y);
            const double t = r < R ? amp * std::pow(std::cos(0.5 * pi * r / R), 4) : 0.0;
            const double ph = std::atan2(y, x) + twist;
            m[g.index(i, j)] = Vec3{std::sin(t) * std::cos(ph), std::sin(t) * std::sin(ph), -std::cos(t)};
        }
    return m;
}

void check_oracles(std::size_t n, double s) {
    const auto g = centred(n, 1.0);
    const Gauss a{0.8, 0.7, -0.4, s}, b{-0.5, -0.9, 0.6, s}, c{0.6, 0.3, 0.2, s};
    const auto m = gaussian_field(g, a, b, c);
    std::vector<double> div(g.size()), f(g.size()), gsq(g.size());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.x(i), y = g.y(j);
            const std::size_t k = g.index(i, j);
            div[k] = a.dx(x, y) + b.dy(x, y);
            f[k] = c(x, y);
            gsq[k] = c.dx(x, y) * c.dx(x, y) + c.dy(x, y) * c.dy(x, y);
        }
    SpectralPlan plan(g);
    const auto e = plan.evaluate(FieldView{g, m});
    const double vol_ref = oracles::real_space_f_vol(g, div);
    const double surf_ref = oracles::real_space_f_surf(g, f, gsq);
    EXPECT_NEAR(e.f_vol / vol_ref, 1.0, 0.03) << "n=" << n;
    EXPECT_NEAR(e.f_surf / surf_ref, 1.0, 0.05) << "n=" << n;
}

}  // namespace

TEST(StrayField, PlanShapes) {
    const auto g = centred(20, 0.5);
    SpectralPlan plan(g);
    EXPECT_GE(plan.padded_nx(), 40u);
    EXPECT_GE(plan.padded_ny(), 40u);
    EXPECT_THROW(SpectralPlan(g, 1), DomainError);
    SpectralPlan other(centred(16, 0.5));
    std::vector<Vec3> m(g.size(), kSouth);
    EXPECT_THROW(other.evaluate(FieldView{g, m}), DomainError);
}

TEST(StrayField, UniformSouthIsZero) {
    const auto f = SpinField::uniform(centred(32, 0.3));
    SpectralPlan plan(f.geometry());
    EXPECT_EQ(f_vol(f, plan), 0.0);
    EXPECT_EQ(f_surf(f, plan), 0.0);
    for (const auto& v : stray_field_gradient(f, plan)) EXPECT_EQ(v.norm(), 0.0);
}

TEST(StrayField, DivergenceFreeTextureHasNoVolumeCharge) {
    const auto g = centred(64, 1.0);
    std::vector<Vec3> m(g.size());
    const double s = 4.0;
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            const double w = 0.3 * std::exp(-(x * x + y * y) / (2 * s * s));
            m[g.index(i, j)] = Vec3{-y * w, x * w, -1.0};
        }
    SpectralPlan plan(g);
    EXPECT_LT(plan.evaluate(FieldView{g, m}).f_vol, 1e-10);
}

TEST(StrayField, MatchesRealSpaceOracle16) { check_oracles(16, 2.5); }
TEST(StrayField, MatchesRealSpaceOracle24) { check_oracles(24, 3.5); }

TEST(StrayField, NeelTruncatedVolumeConstant) {
    const double L = 64.0;
    const auto f = sample(TruncatedProfile{1.0, 0.0, L}, 4.0 * L, 1024);
    SpectralPlan plan(f.geometry());
    EXPECT_NEAR(f_vol(f, plan) / (3.0 * pi * pi * pi / 8.0), 1.0, 0.10);
}

TEST(StrayField, BelavinPolyakovSurfaceConstant) {
    const auto f = sample(BPProfile{}, 40.0, 400);
    SpectralPlan plan(f.geometry());
    EXPECT_NEAR(f_surf(f, plan) / (pi * pi * pi / 8.0), 1.0, 0.10);
}

TEST(StrayField, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    const auto g = centred(16, 0.4);
    std::vector<Vec3> m(g.size()), v(g.size());
    for (auto& x : m) x = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    for (auto& x : v) x = Vec3(nd(rng), nd(rng), nd(rng));
    SpectralPlan plan(g);
    const auto grad = stray_field_gradient(FieldView{g, m}, plan);
    auto F = [&](double eps) {
        std::vector<Vec3> p(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) p[k] = m[k] + eps * v[k];
        const auto e = plan.evaluate(FieldView{g, p});
        return e.f_vol - e.f_surf;
    };
    const double eps = 1e-5;
    const double fd = (F(eps) - F(-eps)) / (2 * eps);
    double an = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) an += grad[k].dot(v[k]);
    an *= g.h * g.h;
    EXPECT_NEAR(an / fd, 1.0, 1e-5);
}

TEST(StrayField, SurfaceGradientOfWavePacket) {
    const std::size_t n = 128;
    const auto g = centred(n, 1.0);
    const double k0 = 2.0 * pi / 8.0, s = 14.0;
    std::vector<Vec3> m(g.size());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.x(i), y = g.y(j);
            m[g.index(i, j)] = Vec3{0.0, 0.0, -1.0 + 0.01 * std::cos(k0 * x) * std::exp(-(x * x + y * y) / (2 * s * s))};
        }
    SpectralPlan plan(g);
    const auto grad = stray_field_gradient(FieldView{g, m}, plan);
    double worst = 0.0;
    for (std::size_t j = n / 2 - 4; j < n / 2 + 4; ++j)
        for (std::size_t i = n / 2 - 4; i < n / 2 + 4; ++i) {
            const double wave = m[g.index(i, j)][2] + 1.0;
            worst = std::max(worst, std::abs(grad[g.index(i, j)][2] + k0 * wave));
        }
    EXPECT_LT(worst, 0.03 * 0.01 * k0);
}

TEST(StrayField, TranslationInvariance) {
    const auto g = centred(48, 0.5);
    SpectralPlan plan(g);
    const auto a = plan.evaluate(FieldView{g, compact_texture(g, 0.0, 0.0, 5.0, 2.0, 0.4)});
    const auto b = plan.evaluate(FieldView{g, compact_texture(g, 3.0 * g.h, -5.0 * g.h, 5.0, 2.0, 0.4)});
    EXPECT_NEAR(b.f_vol / a.f_vol, 1.0, 1e-10);
    EXPECT_NEAR(b.f_surf / a.f_surf, 1.0, 1e-10);
}

TEST(StrayField, NonnegativeAndInterpolationBound) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = centred(40, 0.5);
    SpectralPlan plan(g);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = compact_texture(g, 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, 3.0 + 4.0 * u(rng),
                                       3.0 * u(rng), 2.0 * pi * u(rng));
        const auto e = plan.evaluate(FieldView{g, m});
        EXPECT_GE(e.f_vol, 0.0);
        EXPECT_GE(e.f_surf, 0.0);
        // Cell-sum norms; nearest-neighbour differences for the gradient.
        double l2 = 0.0, grad = 0.0;
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i) {
                const double f = m[g.index(i, j)][2] + 1.0;
                l2 += f * f;
                if (i + 1 < g.nx) grad += std::pow(m[g.index(i + 1, j)][2] - m[g.index(i, j)][2], 2);
                if (j + 1 < g.ny) grad += std::pow(m[g.index(i, j + 1)][2] - m[g.index(i, j)][2], 2);
            }
        l2 *= g.h * g.h;
        EXPECT_LE(e.f_surf, 0.5 * std::sqrt(l2) * std::sqrt(grad));
    }
}

TEST(RealSpaceOracle, CellPairKernel) {
    const auto& w = oracles::near_cell_coulomb();
    EXPECT_NEAR(w[0][0], 2.9732095982475597, 1e-12);
    EXPECT_NEAR(w[1][0], 1.1121286898490272, 1e-9);
    EXPECT_NEAR(w[1][1], 0.7489522185493661, 1e-9);
    EXPECT_NEAR(w[2][0], 0.5107267522011814, 1e-9);
    EXPECT_NEAR(w[0][3], 0.3364562581897383, 1e-9);
    EXPECT_NEAR(w[3][0], w[0][3], 1e-12);
}
