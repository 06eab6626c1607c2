#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "openspin1/thermo.hpp"
#include "oracles.hpp"

using namespace openspin1;

namespace {

struct RegimePoint {
    char regime;
    double p, q;
};

// One point per regime, located by the N=4 ground-state probe.
const std::vector<RegimePoint> regime_points{
    {'A', 1.0, 1.0},   {'B', 0.25, 1.0},  {'C', 1.0, 0.25},  {'D', 0.25, 0.3},
    {'E', 0.6, -0.2},  {'F', 0.25, -0.2}, {'G', 0.6, -0.7},  {'H', 0.25, -0.7},
    {'I', 1.5, -1.2},  {'J', 0.25, -1.5}, {'K', 0.6, -2.5},  {'L', 0.1, -3.0},
};

} // namespace

TEST(Thermo, FourierPairsMatchClosedForms) {
    const auto rep = fourier_pair_check();
    EXPECT_EQ(rep.entries.size(), 40u);
    EXPECT_LT(rep.max_error, 1e-8);
    EXPECT_TRUE(rep.pass);
}

TEST(Thermo, ConventionGuardRefusesUnmetTolerance) {
    Tolerances strict;
    strict.fourier = 0.0;
    EXPECT_THROW(require_fourier_convention(strict), ConventionError);
    EXPECT_NO_THROW(require_fourier_convention());
}

TEST(Thermo, KernelsAreNormalized) {
    for (double n : {1.0, 2.0, 3.5})
        EXPECT_NEAR(quad_real_line_even([n](double u) { return kernel_a(n, u); }, 1e-10), 1.0, 1e-10);
    EXPECT_EQ(b_tilde(2, 0.0), Complex(0, 0));
    EXPECT_EQ(b_tilde(2, -0.5), -b_tilde(2, 0.5));
}

TEST(Thermo, DeltaDensityAtZeroFrequency) {
    for (int N : {1, 4, 100}) EXPECT_NEAR(rho_delta(0.0, N, 0.3, 1.7), double(N + 1) / N, 1e-15);
}

TEST(Thermo, RegimeBReproducesClosedFormAndIgnoresZx) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(0.02, 0.48), uq(0.52, 4.0);
    for (int i = 0; i < 8; ++i) {
        const double p = up(rng), q = uq(rng);
        const double e1 = ground_energy_thermo('B', p, q, 50, 1.6) + 50;
        const double e2 = ground_energy_thermo('B', p, q, 50, 4.2) + 50;
        EXPECT_NEAR(e1, oracle::surface_energy(p, q), 1e-6) << p << " " << q;
        EXPECT_NEAR(e1, e2, 1e-8);
    }
}

TEST(Thermo, EveryRegimeRecipeReproducesClosedForm) {
    for (const auto& r : regime_points) {
        const double e = ground_energy_thermo(r.regime, r.p, r.q, 100, 2.7, 0.8) + 100;
        EXPECT_NEAR(e, oracle::surface_energy(r.p, r.q), 1e-8) << r.regime;
    }
}

TEST(Thermo, LambdaPairIsFreeParameter) {
    for (char regime : {'G', 'H'}) {
        const double ref = ground_energy_thermo(regime, 0.6, -0.7, 20, 2.2, 0.3);
        for (double lam : {1.0, 2.5}) EXPECT_NEAR(ground_energy_thermo(regime, 0.6, -0.7, 20, 2.2, lam), ref, 1e-8);
    }
}

TEST(Thermo, ThermoErrors) {
    EXPECT_THROW(rho_bstring('B', 0.2, 1.0, 10), ParameterError);
    EXPECT_THROW(rho_bstring('G', 0.6, -0.7, 10, 2.0), ParameterError);
    EXPECT_THROW(rho_bstring('Z', 0.6, -0.7, 10), ParameterError);
    EXPECT_THROW(surface_energy_closed(-0.1, 1.0), DomainError);
    EXPECT_THROW(surface_energy_closed(0.5, 0.0), DomainError);
    EXPECT_THROW(surface_energy_closed(0.5, -1.0), DomainError);
    // z_x = 1 leaves a constant term in the density
    EXPECT_THROW(ground_energy_thermo('K', 0.6, -2.5, 10, 1.0), DomainError);
}

TEST(Thermo, SurfaceEnergyAtSymmetricPoint) {
    EXPECT_NEAR(surface_energy_closed(1.0, 1.0), 3.9499, 1e-4);
    EXPECT_NEAR(surface_energy(1.0, 1.0).closed_form, oracle::surface_energy(1.0, 1.0), 1e-15);
    EXPECT_GT(surface_energy_closed(3.0, 1.0), surface_energy_closed(0.2, 1.0));
}

TEST(Thermo, FiniteSizeFitsRecoverSyntheticLaws) {
    std::vector<std::pair<int, double>> st, pl, qu;
    for (int N = 3; N <= 8; ++N) {
        st.emplace_back(N, 1.25 + 0.7 / N + ((N % 2) ? -1.0 : 1.0) * 0.3 / N);
        pl.emplace_back(N, -0.5 + 2.0 / N);
        qu.emplace_back(N, 4.0 - 1.0 / N + 3.0 / (N * N));
    }
    const auto [e1, s1] = fit_finite_size(st, ExtrapolationModel::staggered);
    EXPECT_NEAR(e1, 1.25, 1e-12);
    EXPECT_LT(s1, 1e-10);
    EXPECT_NEAR(fit_finite_size(pl, ExtrapolationModel::plain).first, -0.5, 1e-12);
    EXPECT_NEAR(fit_finite_size(qu, ExtrapolationModel::quadratic).first, 4.0, 1e-11);
    EXPECT_TRUE(std::isnan(fit_finite_size({{3, 1.0}, {4, 2.0}, {5, 1.5}}, ExtrapolationModel::staggered).second));
    EXPECT_THROW(fit_finite_size({{3, 1.0}, {4, 2.0}}, ExtrapolationModel::staggered), ContractError);
    EXPECT_THROW(extrapolation_model_from_string("cubic"), ConfigError);
}

TEST(Thermo, ExtrapolationHarnessUsesInjectedEnergies) {
    auto ground = [](int N) { return -double(N) + 2.0 + 1.0 / N + ((N % 2) ? 0.4 : -0.4) / N; };
    const auto r = extrapolate_surface_energy(1.0, 1.0, {3, 4, 5, 6}, ExtrapolationModel::staggered, ground);
    EXPECT_NEAR(r.extrapolated, 2.0, 1e-12);
    EXPECT_EQ(r.sequence.size(), 4u);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings.front().find("non-monotone"), std::string::npos);
}

TEST(Thermo, ExactDiagonalizationSequenceIsStaggered) {
    const auto r = extrapolate_surface_energy(1.0, 1.0, {3, 4, 5, 6});
    // E_b(N) alternates between odd and even N
    EXPECT_LT(r.sequence[0].second, r.sequence[1].second);
    EXPECT_GT(r.sequence[1].second, r.sequence[2].second);
    EXPECT_LT(r.relative_deviation(), 0.05);
}
