#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "skyrmion/bp_profiles.hpp"
#include "skyrmion/minimizer.hpp"

using namespace skyrmion;
using std::numbers::pi;

namespace {

SpinField random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const auto g = GridGeometry::square(3.0, n);
    std::vector<Vec3> m(g.size());
    for (auto& v : m) v = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    return SpinField(g, std::move(m), kAnyRing);
}

// Worst relative mismatch between <grad, v> and a central difference over random tangent v.
double gradient_mismatch(const SpinField& f, const EnergyParams& p, EnergyTerms terms, std::uint64_t seed) {
    SpectralPlan plan(f.geometry());
    const auto grad = energy_gradient(f, p, plan, terms);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const auto m = f.data();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<Vec3> v(m.size()), plus(m.size()), minus(m.size());
        double an = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            Vec3 r(nd(rng), nd(rng), nd(rng));
            v[k] = r - r.dot(m[k]) * m[k];
            an += grad[k].dot(v[k]);
        }
        const double e = 1e-4;
        for (std::size_t k = 0; k < m.size(); ++k) {
            plus[k] = m[k] + e * v[k];
            minus[k] = m[k] - e * v[k];
        }
        const auto& g = f.geometry();
        const double fd = (total_energy(FieldView{g, plus}, p, plan, terms).total -
                           total_energy(FieldView{g, minus}, p, plan, terms).total) /
                          (2 * e);
        worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-300}));
    }
    return worst;
}

SpinField reduced_optimum_sample(double sigma, double lambda, double half_width, std::size_t n) {
    const auto m = reduced_minimize(sigma, lambda, k_star());
    const auto ph = reduced_to_physical(m.point(), sigma);
    return sample(TruncatedProfile{ph.rho, ph.theta, ph.L}, half_width, n);
}

}  // namespace

TEST(TotalEnergy, SouthPoleIsZero) {
    const auto f = SpinField::uniform(GridGeometry::square(5.0, 32));
    const EnergyParams p(0.4, 0.3);
    SpectralPlan plan(f.geometry());
    EXPECT_EQ(total_energy(f, p, plan).total, 0.0);
    for (const auto& v : energy_gradient(f, p, plan)) EXPECT_EQ(v.norm(), 0.0);
}

TEST(TotalEnergy, NoDmiAtLambdaZero) {
    const auto f = random_field(32, 1);
    SpectralPlan plan(f.geometry());
    const auto e = total_energy(f, EnergyParams(0.5, 0.0), plan);
    const auto only = total_energy(f, EnergyParams(0.5, 0.0), plan, EnergyTerms::only_dmi());
    EXPECT_EQ(only.total, 0.0);
    EXPECT_NE(e.dmi, 0.0);
    for (const auto& v : raw_energy_gradient(f.view(), EnergyParams(0.5, 0.0), plan, EnergyTerms::only_dmi()))
        EXPECT_EQ(v.norm(), 0.0);
}

TEST(TotalEnergy, ReducedOptimumBelowEightPi) {
    const auto f = reduced_optimum_sample(0.3, 1.0, 12.0, 450);
    SpectralPlan plan(f.geometry());
    EXPECT_LT(total_energy(f, EnergyParams(0.3, 1.0), plan).total, 8 * pi);
    const auto m = reduced_minimize(0.3, 1.0, k_star());
    const auto ph = reduced_to_physical(m.point(), 0.3);
    const auto cf = truncated_energy_closed_form(TruncatedProfile{ph.rho, ph.theta, ph.L}, EnergyParams(0.3, 1.0));
    EXPECT_LT(cf.breakdown.total, 8 * pi);
}

TEST(EnergyGradient, MatchesDifferencesPerTerm) {
    const EnergyParams p(0.5, 0.4);
    const auto f = random_field(32, 2);
    EXPECT_LE(gradient_mismatch(f, p, EnergyTerms::only_exchange(), 10), 1e-5);
    EXPECT_LE(gradient_mismatch(f, p, EnergyTerms::only_anisotropy(), 11), 1e-5);
    EXPECT_LE(gradient_mismatch(f, p, EnergyTerms::only_dmi(), 12), 1e-5);
    EXPECT_LE(gradient_mismatch(f, p, EnergyTerms::only_stray(), 13), 1e-5);
    EXPECT_LE(gradient_mismatch(f, p, EnergyTerms{}, 14), 1e-5);
}

TEST(EnergyGradient, Tangent) {
    const auto f = random_field(32, 3);
    SpectralPlan plan(f.geometry());
    const auto g = energy_gradient(f, EnergyParams(0.5, 0.4), plan);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE(std::abs(g[k].dot(f.data()[k])), 1e-12);
}

TEST(EnergyGradient, HarmonicMapEquationForProfile) {
    // Tangential exchange gradient of a sampled profile in the interior, relative
    // to the raw gradient, shrinks at the stencil order.
    auto ratio = [](std::size_t n) {
        const auto f = sample(BPProfile{1.0}, 8.0, n);
        const auto& g = f.geometry();
        SpectralPlan plan(g);
        const auto raw = raw_energy_gradient(f.view(), EnergyParams(0.1, 0.0), plan, EnergyTerms::only_exchange());
        const auto tan = energy_gradient(f, EnergyParams(0.1, 0.0), plan, EnergyTerms::only_exchange());
        double num = 0.0, den = 0.0;
        for (std::size_t j = 2; j + 2 < g.ny; ++j)
            for (std::size_t i = 2; i + 2 < g.nx; ++i) {
                num = std::max(num, tan[g.index(i, j)].norm());
                den = std::max(den, raw[g.index(i, j)].norm());
            }
        return num / den;
    };
    const double coarse = ratio(81), fine = ratio(161);
    EXPECT_LT(coarse, 0.05);
    EXPECT_LT(fine, coarse / 8);
}

TEST(Minimize, RejectsInadmissibleInitialData) {
    const auto f = SpinField::uniform(GridGeometry::square(5.0, 32));
    EXPECT_THROW(minimize(f, EnergyParams(0.3, 1.0)), DomainError);
    MinimizeConfig bad;
    bad.backtrack = 1.0;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = {};
    bad.max_iter = 0;
    EXPECT_THROW(bad.validate(), DomainError);
}

class MinimizeRun : public ::testing::TestWithParam<DescentMethod> {};

TEST_P(MinimizeRun, DescentInvariants) {
    const double sigma = 0.3, lambda = 1.0;
    const auto init = reduced_optimum_sample(sigma, lambda, 12.0, 450);
    MinimizeConfig cfg;
    cfg.method = GetParam();
    cfg.max_iter = 60;
    const auto r = minimize(init, EnergyParams(sigma, lambda), cfg);
    const auto& rep = r.report;
    ASSERT_EQ(rep.trace.size(), rep.iterations + 1);
    for (std::size_t k = 1; k < rep.trace.size(); ++k) EXPECT_LT(rep.trace[k], rep.trace[k - 1]);
    EXPECT_LE(rep.final_energy.total, rep.initial.total);
    EXPECT_EQ(rep.final_charge, 1);
    EXPECT_EQ(r.field.ring_deviation(), 0.0);
    for (const auto& v : r.field.data()) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    const auto& g = r.field.geometry();
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            if (g.on_ring(i, j)) {
                EXPECT_EQ(r.field.at(i, j), kSouth);
            }
    const double s = sigma * (1 + lambda);
    EXPECT_LE((1 - s * s / 4) * rep.final_energy.exchange, rep.final_energy.total);
    EXPECT_LT(rep.final_energy.total, 8 * pi);
}

INSTANTIATE_TEST_SUITE_P(Methods, MinimizeRun, ::testing::Values(DescentMethod::Gradient, DescentMethod::LBFGS));

TEST(Minimize, WithStrayField) {
    const double sigma = 0.3, lambda = 0.5;
    const auto init = sample(TruncatedProfile{0.5, 0.3, 6.0}, 6.0, 160);
    MinimizeConfig cfg;
    cfg.max_iter = 30;
    const auto r = minimize(init, EnergyParams(sigma, lambda), cfg);
    for (std::size_t k = 1; k < r.report.trace.size(); ++k) EXPECT_LT(r.report.trace[k], r.report.trace[k - 1]);
    EXPECT_EQ(r.report.final_charge, 1);
    SpectralPlan plan(r.field.geometry());
    EXPECT_NEAR(total_energy(r.field, EnergyParams(sigma, lambda), plan).total, r.report.final_energy.total, 1e-12);
    const double s = sigma * (1 + lambda);
    EXPECT_LE((1 - s * s / 4) * r.report.final_energy.exchange, r.report.final_energy.total);
}

TEST(AdviseResolution, FlagsCoarseGrids) {
    const EnergyParams p(0.3, 1.0);
    const auto fine = advise_resolution(GridGeometry::square(12.0, 450), p);
    EXPECT_TRUE(fine.resolved);
    EXPECT_TRUE(fine.box_ok);
    EXPECT_NEAR(fine.rho, 0.5143512896788510 / std::abs(std::log(0.3)), 1e-12);
    const auto coarse = advise_resolution(GridGeometry::square(12.0, 64), p);
    EXPECT_FALSE(coarse.resolved);
    EXPECT_NEAR(coarse.required_h, fine.rho / 5, 1e-15);
    EXPECT_FALSE(advise_resolution(GridGeometry::square(3.0, 450), p).box_ok);
    // No closed-form minimum here; the leading asymptotics are used instead.
    const auto far = advise_resolution(GridGeometry::square(12.0, 450), EnergyParams(0.35, 1.0));
    EXPECT_NEAR(far.rho, 8 * pi / (16 * pi * std::abs(std::log(0.35))), 1e-12);
}
