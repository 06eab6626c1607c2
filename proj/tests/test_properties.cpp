#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "openspin1/io.hpp"
#include "openspin1/model.hpp"
#include "openspin1/patterns.hpp"
#include "openspin1/spectrum.hpp"
#include "openspin1/thermo.hpp"
#include "oracles.hpp"

using namespace openspin1;

namespace {

ModelParams random_model(std::mt19937_64& rng, int N) {
    std::uniform_real_distribution<double> pd(0.15, 2.5), qd(-2.8, 2.5), ad(-1.2, 1.2), fd(-3.0, 3.0);
    double q = qd(rng);
    if (std::abs(q) < 0.1 || std::abs(q + 1) < 0.1) q += 0.3;
    ModelParams m = ModelParams::from_pq(N, pd(rng), q, ad(rng), ad(rng), fd(rng));
    m.phi_plus = fd(rng);
    return m;
}

} // namespace

TEST(Properties, IdentitiesHoldForRandomBoundaries) {
    std::mt19937_64 rng(101);
    IdentitySuiteOptions opt;
    opt.points = 15;
    opt.transfer_points = 1;
    for (int trial = 0; trial < 6; ++trial) {
        const ModelParams m = random_model(rng, 2);
        opt.seed = 1000 + trial;
        for (const auto& r : run_identity_suite(m, opt))
            EXPECT_TRUE(r.pass) << "trial " << trial << " " << r.identity << " " << r.max_residual;
    }
}

TEST(Properties, RootEnergyEqualsEigenvalueForRandomBoundaries) {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 4; ++trial) {
        const ModelParams m = random_model(rng, 2);
        const auto ref = oracle::eigenvalues(hamiltonian(m));
        const auto states = diagonalize(m);
        ASSERT_EQ(states.size(), ref.size());
        for (const auto& s : states) {
            EXPECT_NEAR(s.energy, ref[s.index], 1e-9);
            const auto pair = reconstruct_lambda(s, m);
            const auto rs = extract_roots(pair);
            EXPECT_NEAR(energy_from_roots(rs), s.energy, 1e-6) << "trial " << trial << " state " << s.index;
            EXPECT_LT(verify_relations(pair, m, 20, 5).max(), 1e-7);
        }
    }
}

TEST(Properties, HamiltonianScalesAsInverseEta) {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> ed(0.3, 3.0);
    for (int trial = 0; trial < 3; ++trial) {
        const ModelParams base = random_model(rng, 3);
        const double eta = ed(rng);
        const ModelParams scaled =
            ModelParams::from_pq(3, base.p(), base.q(), base.alpha_minus, base.alpha_plus, base.phi_minus, eta);
        ModelParams s2 = scaled;
        s2.phi_plus = base.phi_plus;
        EXPECT_LT((hamiltonian(s2) * eta - hamiltonian(base)).norm(), 1e-10 * hamiltonian(base).norm());
    }
}

TEST(Properties, HamiltonianIsHermitian) {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix H = hamiltonian(random_model(rng, 3));
        EXPECT_LT((H - H.adjoint()).norm(), 1e-13 * H.norm());
    }
}

TEST(Properties, ClassificationIgnoresRootOrder) {
    const ModelParams m = ModelParams::from_pq(4, 0.6, -2.5);
    auto g = ground_state_roots(m);
    const auto base = classify(g.roots, m);
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 4; ++trial) {
        std::shuffle(g.roots.zbar.begin(), g.roots.zbar.end(), rng);
        std::shuffle(g.roots.zbar1.begin(), g.roots.zbar1.end(), rng);
        const auto rep = classify(g.roots, m);
        EXPECT_EQ(rep.best_label, base.best_label);
        EXPECT_DOUBLE_EQ(rep.misfit, base.misfit);
    }
}

TEST(Properties, SurfaceEnergySymmetricInPositiveBoundaries) {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> d(0.05, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double p = d(rng), q = d(rng);
        EXPECT_NEAR(surface_energy_closed(p, q), surface_energy_closed(q, p), 1e-12);
    }
}

TEST(Properties, DensitiesAreEvenInFrequency) {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> w(0.0, 6.0);
    const Bstring b = rho_bstring('G', 0.6, -0.7, 30, 2.4, 0.9);
    for (int trial = 0; trial < 30; ++trial) {
        const double x = w(rng);
        EXPECT_EQ(rho_delta(x, 10, 0.3, 1.2), rho_delta(-x, 10, 0.3, 1.2));
        EXPECT_EQ(b(x), b(-x));
    }
}

TEST(Properties, CsvNumbersRoundTrip) {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> e(-300, 300), m(-1, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = m(rng) * std::pow(10.0, e(rng));
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
}
