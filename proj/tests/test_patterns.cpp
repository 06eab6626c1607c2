#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "openspin1/patterns.hpp"

using namespace openspin1;

namespace {

// Roots placed exactly on a template: reals at 0.4, 0.9, ..., string members at +-0.35k + line i.
std::vector<Complex> place(const std::vector<Descriptor>& desc, double zx, double lam) {
    using K = Descriptor::Kind;
    std::vector<Complex> out;
    std::map<double, int> lines;
    int reals = 0, lambdas = 0;
    for (const auto& d : desc) {
        switch (d.kind) {
        case K::zero: out.emplace_back(0.0, 0.0); break;
        case K::real: out.emplace_back(0.4 + 0.5 * reals++, 0.0); break;
        case K::fixed: out.emplace_back(0.0, d.value); break;
        case K::zx: out.emplace_back(0.0, zx + d.value + (d.value > 0 ? 0.8 : 0.0)); break;
        case K::lambda: out.emplace_back(lambdas++ % 2 ? -lam : lam, d.value); break;
        case K::line: ++lines[d.value]; break;
        }
    }
    for (const auto& [c, n] : lines) {
        int k = 1;
        if (n % 2) out.emplace_back(0.0, c);
        for (int i = n % 2; i < n; i += 2, ++k) {
            out.emplace_back(0.35 * k, c);
            out.emplace_back(-0.35 * k, c);
        }
    }
    return out;
}

RootSet synthetic(const RegimeTemplate& t, double zx, double lam) {
    RootSet rs;
    rs.zbar = place(t.zbar, zx, lam);
    rs.zbar1 = place(t.zbar1, zx, lam);
    for (auto z : rs.zbar) rs.z.push_back(I_unit * z);
    for (auto z : rs.zbar1) rs.z1.push_back(I_unit * z);
    return rs;
}

} // namespace

TEST(Patterns, TemplatesHaveContractRootCounts) {
    for (int N : {2, 3, 4, 6}) {
        const auto ts = regime_templates(0.37, -1.4, N);
        ASSERT_EQ(ts.size(), 12u);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            EXPECT_EQ(ts[i].label, regime_labels()[i]);
            EXPECT_EQ(ts[i].zbar.size(), std::size_t(N + 1)) << ts[i].label << " N=" << N;
            EXPECT_EQ(ts[i].zbar1.size(), std::size_t(2 * N + 3)) << ts[i].label << " N=" << N;
        }
    }
}

TEST(Patterns, SyntheticRootsClassifyAsTheirTemplate) {
    const double p = 0.37, q = 0.81;
    const int N = 4;
    const ModelParams m = ModelParams::from_pq(N, p, q);
    for (const auto& t : regime_templates(p, q, N)) {
        const auto rep = classify(synthetic(t, 2.3, 0.55), m);
        EXPECT_TRUE(rep.classified) << t.label;
        EXPECT_LT(rep.misfit, 1e-12) << t.label;
        const double own = rep.scores[std::size_t(t.label - 'A')].misfit;
        EXPECT_LT(own, 1e-12) << t.label;
        // D roots are also B roots with z_x = 1 + q, so an exact tie is allowed there
        if (rep.best_label != t.label) {
            EXPECT_EQ(t.label, 'D');
            EXPECT_EQ(rep.best_label, 'B');
            continue;
        }
        if (t.uses_zx()) EXPECT_NEAR(rep.zx, 2.3, 1e-12);
        if (t.uses_lambda()) EXPECT_NEAR(rep.lambda, 0.55, 1e-12);
    }
}

TEST(Patterns, PerturbedRootsKeepLabelWithinTolerance) {
    const double p = 0.37, q = 0.81;
    const ModelParams m = ModelParams::from_pq(4, p, q);
    const auto ts = regime_templates(p, q, 4);
    RootSet rs = synthetic(ts[10], 2.3, 0.0);  // K
    for (auto& z : rs.zbar1)
        if (std::abs(z.real()) < 1e-12 && z.imag() > 1.5) z += Complex(0.0, 0.01);
    const auto rep = classify(rs, m);
    EXPECT_EQ(rep.best_label, 'K');
    EXPECT_GT(rep.misfit, 0.0);
    EXPECT_LT(rep.misfit, 0.15);
}

TEST(Patterns, UnmatchedRootsAreNotForced) {
    const ModelParams m = ModelParams::from_pq(2, 0.37, 0.81);
    RootSet rs;
    for (int i = 0; i < 3; ++i) rs.zbar.emplace_back(0.7 * i + 0.2, 0.33 + i);
    for (int i = 0; i < 7; ++i) rs.zbar1.emplace_back(0.5 * i + 0.1, 0.77 + 0.6 * i);
    const auto rep = classify(rs, m);
    EXPECT_FALSE(rep.classified);
    EXPECT_EQ(rep.best_label, '?');
    EXPECT_EQ(rep.unassigned.size(), 10u);
}

TEST(Patterns, BetheEquationsHoldForGroundState) {
    for (int N : {2, 3}) {
        const ModelParams m = ModelParams::from_pq(N, 1.0, 1.0);
        const auto g = ground_state_roots(m);
        const auto bae = bae_residual(g.roots, m);
        EXPECT_EQ(bae.residuals.size(), std::size_t(N + 1));
        EXPECT_LT(bae.max_residual, 1e-5) << "N=" << N;
    }
}

TEST(Patterns, BetheEquationsFailForWrongRoots) {
    const ModelParams m = ModelParams::from_pq(3, 1.0, 1.0);
    auto g = ground_state_roots(m);
    g.roots.zbar[1] += Complex(0.05, 0.0);
    EXPECT_GT(bae_residual(g.roots, m).max_residual, 1e-3);
}

TEST(Patterns, CentralStringPairsAtN4) {
    const ModelParams m = ModelParams::from_pq(4, 0.6, -0.2);
    const auto g = ground_state_roots(m);
    const auto matches = pairing_check(g.roots);
    ASSERT_FALSE(matches.empty());
    const auto central = central_string_match(matches);
    ASSERT_TRUE(central.has_value());
    EXPECT_LE(central->gap, 1e-2);
    for (const auto& pm : matches) EXPECT_TRUE(std::isfinite(pm.gap));
}

TEST(Patterns, ProbeReportsUnclassifiedOddChain) {
    // Odd chains at (0.6, -0.2) carry a pair that no template describes.
    EXPECT_THROW(regime_probe(0.6, -0.2, 3), ClassificationError);
    EXPECT_EQ(regime_probe(0.6, -0.2, 2), 'E');
}
