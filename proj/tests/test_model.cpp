#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "openspin1/model.hpp"
#include "oracles.hpp"

using namespace openspin1;

namespace {

ModelParams generic(int N) {
    ModelParams m = ModelParams::from_pq(N, 0.6, -0.2);
    m.phi_plus = 0.7;
    m.phi_minus = -0.4;
    return m;
}

// t'(0) t(0)^{-1} from a plain five-point derivative, independent of hamiltonian_from_transfer.
ComplexMatrix log_derivative_at_zero(const ModelParams& m) {
    const double h = 1e-3;
    auto t = [&](double u) { return transfer(u, m, TransferKind::spin11); };
    const ComplexMatrix d = (-t(2 * h) + 8.0 * t(h) - 8.0 * t(-h) + t(-2 * h)) / (12 * h);
    return d * t(0.0).inverse();
}

} // namespace

TEST(Model, SpinOperatorsMatchOracle) {
    const auto S = spin_one();
    EXPECT_LT((S.sx - oracle::sx()).norm(), 1e-15);
    EXPECT_LT((S.sy - oracle::sy()).norm(), 1e-15);
    EXPECT_LT((S.sz - oracle::sz()).norm(), 1e-15);
    EXPECT_LT((S.sx * S.sy - S.sy * S.sx - I_unit * S.sz).norm(), 1e-15);
    EXPECT_LT((S.sy * S.sz - S.sz * S.sy - I_unit * S.sx).norm(), 1e-15);
    EXPECT_LT((S.sz * S.sx - S.sx * S.sz - I_unit * S.sy).norm(), 1e-15);
    EXPECT_LT((S.sx * S.sx + S.sy * S.sy + S.sz * S.sz - 2.0 * ComplexMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Model, R11EqualsProjectorForm) {
    for (Complex u : {Complex(0.3, 0.0), Complex(-1.2, 0.7), Complex(0.0, 2.0)})
        for (double eta : {1.0, 0.5})
            EXPECT_LT((r11(u, eta) - oracle::r11_projector(u, eta)).norm(), 1e-13) << u << " eta=" << eta;
}

TEST(Model, R11AtZeroIsPermutation) {
    const ComplexMatrix P = swap_matrix(3, 3);
    EXPECT_LT((r11(0.0, 1.0) - 2.0 * P).norm(), 1e-15);
}

TEST(Model, RHalfOneSpectrum) {
    // u + eta/2 + eta sigma.S has eigenvalues u + 3eta/2 (spin 3/2, x4) and u - 3eta/2 (spin 1/2, x2)
    const double eta = 0.8;
    const Complex u(0.3, 0.0);
    const ComplexMatrix R = r_half_one(u, eta);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(R);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(es.eigenvalues()(i), 0.3 - 1.5 * eta, 1e-14);
    for (int i = 2; i < 6; ++i) EXPECT_NEAR(es.eigenvalues()(i), 0.3 + 1.5 * eta, 1e-14);
}

TEST(Model, IdentitySuitePassesWithUnequalPhases) {
    IdentitySuiteOptions opt;
    opt.points = 40;
    opt.transfer_points = 2;
    const auto reports = run_identity_suite(generic(3), opt);
    ASSERT_GE(reports.size(), 8u);
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.identity << " " << r.max_residual;
}

TEST(Model, YangBaxterHoldsForOracleR) {
    const auto builder = [](Complex u, double eta) { return ComplexMatrix(oracle::r11_projector(u, eta)); };
    EXPECT_LT(qybe_residual(Complex(0.3, 0.2), Complex(-0.7, 0.4), 1.0, builder), 1e-13);
}

TEST(Model, CorruptedRFailsYangBaxter) {
    IdentitySuiteOptions opt;
    opt.points = 10;
    opt.transfer_points = 1;
    opt.r11_override = [](Complex u, double eta) {
        ComplexMatrix r = r11(u, eta);
        r(1, 3) *= 1.1;
        return r;
    };
    const auto reports = run_identity_suite(ModelParams::from_pq(2, 1.0, 1.0), opt);
    bool qybe_failed = false;
    for (const auto& r : reports)
        if (r.identity == "qybe") qybe_failed = !r.pass;
    EXPECT_TRUE(qybe_failed);
}

TEST(Model, HamiltonianIsHermitianAndMatchesTransfer) {
    for (int N : {2, 3}) {
        const ModelParams m = generic(N);
        const ComplexMatrix H = hamiltonian(m);
        EXPECT_LT((H - H.adjoint()).norm(), 1e-12 * H.norm());
        EXPECT_LT((H - log_derivative_at_zero(m)).norm(), 1e-7 * H.norm()) << "N=" << N;
        EXPECT_LT((H - hamiltonian_from_transfer(m)).norm(), 1e-6);
    }
}

TEST(Model, HamiltonianAssemblyMatchesKroneckerOracle) {
    // bulk (S.S - (S.S)^2)/eta on each bond, boundary fields on the end sites, constant (3N + 8/3)/eta
    const ModelParams m = generic(3);
    const auto Cs = oracle::casimir2();
    const ComplexMatrix SS = (Cs - 4.0 * ComplexMatrix::Identity(9, 9)) / 2.0;
    const ComplexMatrix h = (SS - SS * SS) / m.eta;
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
    ComplexMatrix H = oracle::kron(h, I3) + oracle::kron(I3, h);
    H += oracle::kron(detail::boundary_term(m.p_minus, m.alpha_minus, m.phi_minus, 1.0, m.eta),
                      ComplexMatrix::Identity(9, 9));
    H += oracle::kron(ComplexMatrix::Identity(9, 9),
                      detail::boundary_term(m.p_plus, m.alpha_plus, m.phi_plus, -1.0, m.eta));
    H += (3.0 * m.N + 8.0 / 3.0) / m.eta * ComplexMatrix::Identity(27, 27);
    EXPECT_LT((H - hamiltonian(m)).norm(), 1e-12);
}

TEST(Model, LeadingCoefficientsFromLargeArgument) {
    const ModelParams m = generic(2);
    const double u = 1e4;
    const ComplexMatrix th = transfer(u, m, TransferKind::spin_half_1) / std::pow(u, 2 * m.N + 2);
    EXPECT_NEAR(th(0, 0).real() / leading_half(m), 1.0, 1e-3);
    const ComplexMatrix t1 = transfer(u, m, TransferKind::spin11) / std::pow(u, 4 * m.N + 6);
    EXPECT_NEAR(t1(0, 0).real() / leading_11(m), 1.0, 1e-3);
    // closed form with the phase difference
    const double d = m.phi_plus - m.phi_minus;
    EXPECT_NEAR(leading_half(m), 2 * (m.alpha_minus * m.alpha_plus * std::cos(d) - 1), 1e-14);
}

TEST(Model, LeadingCoefficientsAtEqualPhases) {
    const ModelParams m = ModelParams::from_pq(3, 0.4, 1.3, 0.7, -0.2, 0.5);
    EXPECT_NEAR(leading_half(m), leading_half_closed(m), 1e-14);
    EXPECT_NEAR(leading_11(m), leading_11_closed(m), 1e-13);
}

TEST(Model, ParameterMapRoundTrip) {
    for (double eta : {1.0, 0.7}) {
        const ModelParams m = ModelParams::from_pq(3, 0.37, -1.4, 0.2, 0.9, 0.1, eta);
        EXPECT_NEAR(m.p(), 0.37, 1e-14);
        EXPECT_NEAR(m.q(), -1.4, 1e-14);
    }
}

TEST(Model, ContractErrors) {
    ModelParams m = ModelParams::from_pq(8, 1.0, 1.0);
    EXPECT_THROW(transfer(0.3, m, TransferKind::spin11), SizeError);
    m.N = 0;
    EXPECT_THROW(m.validate(), ParameterError);
    m = ModelParams::from_pq(3, 1.0, 1.0);
    m.theta_bar = {0.1, 0.2};
    EXPECT_THROW(m.validate(), ParameterError);
    m = ModelParams::from_pq(1, 1.0, 1.0);
    EXPECT_THROW(hamiltonian(m), ParameterError);
    EXPECT_THROW(delta1(0.5, ModelParams::from_pq(2, 1, 1)), PoleError);
    EXPECT_THROW(delta1(-0.5, ModelParams::from_pq(2, 1, 1)), PoleError);
    // p+ = (1+alpha^2)^{1/2} eta / 2 makes the boundary field singular (p = 0)
    EXPECT_THROW(hamiltonian(ModelParams::from_pq(2, 0.0, 1.0)), ParameterError);
}

TEST(Model, MatrixFreeApplyMatchesDenseTransfer) {
    ModelParams m = generic(3);
    m.theta_bar = {0.1, -0.2, 0.05};
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    ComplexVector psi(27);
    for (auto& x : psi) x = Complex(g(rng), g(rng));
    for (auto kind : {TransferKind::spin11, TransferKind::spin_half_1}) {
        const Complex u(0.21, -0.4);
        const ComplexVector dense = transfer(u, m, kind) * psi;
        EXPECT_LT((dense - apply_transfer(u, m, kind, psi)).norm(), 1e-13 * dense.norm());
    }
}
