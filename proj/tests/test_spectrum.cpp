#include <gtest/gtest.h>

#include <cmath>

#include "openspin1/patterns.hpp"
#include "openspin1/spectrum.hpp"
#include "oracles.hpp"

using namespace openspin1;

TEST(Spectrum, EnergiesMatchDenseDiagonalization) {
    for (int N : {2, 3}) {
        const ModelParams m = ModelParams::from_pq(N, 1.0, 1.0);
        const auto states = diagonalize(m);
        const auto ref = oracle::eigenvalues(hamiltonian(m));
        ASSERT_EQ(states.size(), ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(states[i].energy, ref[i], 1e-10);
        for (const auto& s : states) EXPECT_TRUE(s.common) << "state " << s.index;
    }
}

TEST(Spectrum, AllStatesRootContractAtN2) {
    const ModelParams m = ModelParams::from_pq(2, 0.6, -0.2);
    for (const auto& s : diagonalize(m)) {
        const auto pair = reconstruct_lambda(s, m);
        EXPECT_EQ(pair.lam11.degree(), 2 * m.N + 3);
        EXPECT_EQ(pair.lam_half.degree(), m.N + 1);
        const RootSet rs = extract_roots(pair);
        EXPECT_EQ(rs.z1.size(), std::size_t(2 * m.N + 3));
        EXPECT_EQ(rs.z.size(), std::size_t(m.N + 1));
        EXPECT_NEAR(energy_from_roots(rs), s.energy, 1e-7) << "state " << s.index;
        EXPECT_LT(verify_relations(pair, m).max(), 1e-7);
    }
}

TEST(Spectrum, EigenvalueIsEvenInShiftedArgument) {
    const ModelParams m = ModelParams::from_pq(3, 0.25, 1.0);
    const auto g = ground_state_roots(m);
    for (Complex v : {Complex(0.3, 0.1), Complex(-1.1, 0.6)}) {
        const Complex u = v - m.eta / 2;
        const Complex w = -v - m.eta / 2;
        const Complex a = g.state.vector.dot(apply_transfer(u, m, TransferKind::spin11, g.state.vector));
        const Complex b = g.state.vector.dot(apply_transfer(w, m, TransferKind::spin11, g.state.vector));
        EXPECT_LT(std::abs(a - b), 1e-10 * std::abs(a));
        EXPECT_LT(std::abs(g.lambda.eval11(u) - a / g.state.vector.squaredNorm()), 1e-8 * std::abs(a));
    }
}

TEST(Spectrum, InhomogeneousRelationsHold) {
    ModelParams m = ModelParams::from_pq(2, 0.6, -0.2);
    m.phi_plus = 0.5;
    m.theta_bar = {-0.13, 0.11};
    const auto states = diagonalize(m);
    ASSERT_EQ(states.size(), 9u);
    for (const auto& s : states) {
        const auto pair = reconstruct_lambda(s, m);
        const auto rel = verify_relations(pair, m);
        EXPECT_TRUE(std::isfinite(rel.theta_relation));
        EXPECT_LT(rel.max(), 1e-7) << "state " << s.index;
        EXPECT_NEAR(energy_from_roots(extract_roots(pair)), s.energy, 1e-7);
    }
}

TEST(Spectrum, InhomogeneityKeepsGroundStatePattern) {
    ModelParams m = ModelParams::from_pq(4, 0.6, -0.2);
    const char homogeneous = classify(ground_state_roots(m).roots, m).best_label;
    for (int j = 0; j < m.N; ++j) m.theta_bar.push_back(0.1 * (j + 1 - (m.N + 1) / 2.0));
    const auto rep = classify(ground_state_roots(m).roots, m);
    EXPECT_EQ(homogeneous, 'E');
    EXPECT_EQ(rep.best_label, homogeneous);
}

TEST(Spectrum, CanonicalZbarIsInUpperHalfPlane) {
    for (Complex z : {Complex(0.3, -0.2), Complex(-0.1, 0.5), Complex(0.0, -1.0), Complex(2.0, 0.0)}) {
        const Complex zb = canonical_zbar(z);
        EXPECT_GE(zb.imag(), -1e-12);
        EXPECT_LT(std::min(std::abs(zb - (-I_unit * z)), std::abs(zb + (-I_unit * z))), 1e-15);
    }
}

TEST(Spectrum, RootsAreClosedUnderNegation) {
    const auto g = ground_state_roots(ModelParams::from_pq(3, 1.0, 1.0));
    EXPECT_LT(g.roots.pair_closure, 1e-8);
    for (auto z : g.roots.z1) EXPECT_LT(std::abs(g.lambda.lam11(z)), 1e-8 * g.lambda.lam11.magnitude_w(z * z));
}
