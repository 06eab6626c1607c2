#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "numerics.hpp"
#include "tolerances.hpp"

namespace openspin1 {

struct EigenState {
    std::size_t index = 0;
    double energy = 0.0;
    ComplexVector vector;
    std::map<std::string, double> transfer_residuals;  ///< kind -> max relative residual over probe points
    bool common = false;                                ///< all residuals within tolerance
};

struct DiagonalizeOptions {
    bool probe_transfer = true;
    std::size_t max_states = std::size_t(-1);  ///< keep only the lowest states (homogeneous route)
    Complex rotation_point{0.37, 0.0};          ///< in units of eta; used to split degenerate subspaces
    Complex inhomogeneous_point{0.37, 0.21};    ///< in units of eta; diagonalized directly when theta != 0
    std::vector<Complex> probes{{0.37, 0.0}, {0.61, 0.23}};
};

namespace detail {

inline double eigen_residual(const TransferOperator& t, const ComplexVector& psi) {
    const ComplexVector tp = t.apply(psi);
    const Complex lam = psi.dot(tp) / psi.squaredNorm();
    const double scale = std::max(tp.norm(), std::abs(lam) * psi.norm());
    return scale > 0 ? (tp - lam * psi).norm() / scale : 0.0;
}

inline void probe(EigenState& s, const ModelParams& m, const DiagonalizeOptions& opt, const Tolerances& tol,
                  const std::vector<TransferOperator>& ops11, const std::vector<TransferOperator>& opsh) {
    double r11 = 0.0, rh = 0.0;
    for (const auto& t : ops11) r11 = std::max(r11, eigen_residual(t, s.vector));
    for (const auto& t : opsh) rh = std::max(rh, eigen_residual(t, s.vector));
    s.transfer_residuals[to_string(TransferKind::spin11)] = r11;
    s.transfer_residuals[to_string(TransferKind::spin_half_1)] = rh;
    s.common = r11 <= tol.common_eigen && rh <= tol.common_eigen;
    (void)m;
    (void)opt;
}

// Rayleigh derivative of ln Lambda^(1,1) at u = 0 (energy for the inhomogeneous route).
inline double log_derivative_energy(const ModelParams& m, const ComplexVector& psi, double h) {
    auto lam = [&](double u) {
        return psi.dot(TransferOperator(u, m, TransferKind::spin11).apply(psi)) / psi.squaredNorm();
    };
    const Complex d1 = (lam(h) - lam(-h)) / (2 * h);
    const Complex d2 = (lam(h / 2) - lam(-h / 2)) / h;
    return ((4.0 * d2 - d1) / 3.0 / lam(0.0)).real();
}

} // namespace detail

/// Full spectrum, ascending in energy, with transfer-matrix eigenstate checks.
inline std::vector<EigenState> diagonalize(const ModelParams& m, const DiagonalizeOptions& opt = {},
                                           const Tolerances& tol = default_tolerances()) {
    m.validate();
    const double eta = m.eta;
    std::vector<TransferOperator> ops11, opsh;
    if (opt.probe_transfer)
        for (auto p : opt.probes) {
            ops11.emplace_back(p * eta, m, TransferKind::spin11);
            opsh.emplace_back(p * eta, m, TransferKind::spin_half_1);
        }

    std::vector<EigenState> out;
    if (m.homogeneous()) {
        const auto eig = eig_hermitian(hamiltonian(m), tol);
        const auto n = std::size_t(eig.values.size());
        const std::size_t keep = std::min(n, opt.max_states);
        ComplexVector scratch;
        std::size_t i = 0;
        while (i < keep) {
            std::size_t j = i + 1;
            const double e0 = eig.values[Eigen::Index(i)];
            while (j < n && eig.values[Eigen::Index(j)] - e0 <= tol.degeneracy_gap * std::max(1.0, std::abs(e0))) ++j;
            ComplexMatrix V = eig.vectors.middleCols(Eigen::Index(i), Eigen::Index(j - i));
            if (j - i > 1 && opt.probe_transfer) {
                const TransferOperator t(opt.rotation_point * eta, m, TransferKind::spin_half_1);
                ComplexMatrix TV(V.rows(), V.cols());
                for (Eigen::Index c = 0; c < V.cols(); ++c) TV.col(c) = t.apply(V.col(c));
                const ComplexMatrix small = V.adjoint() * TV;
                Eigen::ComplexEigenSolver<ComplexMatrix> es(small);
                ComplexMatrix W = V * es.eigenvectors();
                for (Eigen::Index c = 0; c < W.cols(); ++c) {
                    W.col(c).normalize();
                    const double r = detail::eigen_residual(t, W.col(c));
                    if (r > tol.rotation_residual)
                        throw DegeneracyError("diagonalize: degenerate subspace of dimension " +
                                                  std::to_string(j - i) + " not split by the transfer matrix",
                                              j - i);
                }
                V = W;
            }
            for (Eigen::Index c = 0; c < V.cols() && i + std::size_t(c) < keep; ++c) {
                EigenState s;
                s.index = i + std::size_t(c);
                s.energy = eig.values[Eigen::Index(i) + c];
                s.vector = V.col(c);
                if (opt.probe_transfer) detail::probe(s, m, opt, tol, ops11, opsh);
                out.push_back(std::move(s));
            }
            i = j;
        }
        return out;
    }

    // Inhomogeneous: H no longer commutes with the transfer matrices; label states by t^(1/2,1) instead.
    const ComplexMatrix t = transfer(opt.inhomogeneous_point * eta, m, TransferKind::spin_half_1);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(t);
    if (es.info() != Eigen::Success) throw AccuracyError("diagonalize: transfer eigensolver failed", 0, 0);
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
        EigenState s;
        s.vector = es.eigenvectors().col(c).normalized();
        s.energy = detail::log_derivative_energy(m, s.vector, tol.fd_step);
        if (opt.probe_transfer) {
            detail::probe(s, m, opt, tol, ops11, opsh);
            if (!s.common)
                throw DegeneracyError("diagonalize: transfer eigenvector is not a common eigenstate", 1);
        }
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenState& a, const EigenState& b) { return a.energy < b.energy; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
    if (out.size() > opt.max_states) out.resize(opt.max_states);
    return out;
}

struct LambdaPair {
    EvenPoly lam11;      ///< Lambda^(1,1) as a polynomial in v = u + eta/2
    EvenPoly lam_half;   ///< Lambda^(1/2,1)
    double lead11_expected = 0.0;
    double lead_half_expected = 0.0;
    double eta = 1.0;

    Complex eval11(Complex u) const { return lam11(u + eta / 2); }
    Complex eval_half(Complex u) const { return lam_half(u + eta / 2); }
};

struct ReconstructOptions {
    double radius = 1.0;   ///< nodes on |v^2| = radius * eta^2
    int extra_nodes = 2;   ///< nodes beyond degree + 1
};

inline int degree11(int N) { return 2 * N + 3; }
inline int degree_half(int N) { return N + 1; }

/// Samples <psi|t(u)|psi> on a circle in v^2 and fits both eigenvalue polynomials.
inline LambdaPair reconstruct_lambda(const EigenState& s, const ModelParams& m, const ReconstructOptions& opt = {},
                                     const Tolerances& tol = default_tolerances()) {
    const double eta = m.eta;
    const ComplexVector& psi = s.vector;
    auto sample = [&](TransferKind kind, int degree) {
        const int M = degree + 1 + opt.extra_nodes;
        std::vector<PolySample> out;
        for (int j = 0; j < M; ++j) {
            const Complex w = opt.radius * eta * eta * std::polar(1.0, 2 * std::numbers::pi * (j + 0.5) / M);
            const Complex v = std::sqrt(w);
            const Complex u = v - eta / 2;
            const Complex val = psi.dot(TransferOperator(u, m, kind).apply(psi)) / psi.squaredNorm();
            out.push_back({v, val});
        }
        return fit_even_poly(out, degree, tol);
    };
    LambdaPair pair;
    pair.eta = eta;
    pair.lam11 = sample(TransferKind::spin11, degree11(m.N));
    pair.lam_half = sample(TransferKind::spin_half_1, degree_half(m.N));
    pair.lead11_expected = leading_11(m);
    pair.lead_half_expected = leading_half(m);

    auto check_lead = [&](const EvenPoly& p, double expected, const char* name) {
        const double err = std::abs(p.leading() - expected);
        if (err > tol.leading_relative * std::max(std::abs(expected), tol.leading_coeff * p.max_coeff()))
            throw DegreeError(std::string("reconstruct_lambda: leading coefficient of ") + name + " is " +
                              std::to_string(p.leading().real()) + ", expected " + std::to_string(expected));
    };
    check_lead(pair.lam11, pair.lead11_expected, "Lambda^(1,1)");
    check_lead(pair.lam_half, pair.lead_half_expected, "Lambda^(1/2,1)");

    const Complex at0 = pair.eval_half(0.0), expect0 = lambda_half_at_zero(m);
    if (std::abs(at0 - expect0) > tol.relation * std::max(std::abs(expect0), std::abs(at0)))
        throw ReconstructionError("reconstruct_lambda: Lambda^(1/2,1)(0) mismatch");
    return pair;
}

struct RelationReport {
    double crossing = 0.0;
    double value_at_zero = 0.0;
    double asymptotic_half = 0.0;
    double asymptotic_11 = 0.0;
    double fusion = 0.0;
    double theta_relation = std::numeric_limits<double>::quiet_NaN();  ///< NaN when homogeneous
    int fusion_points = 0;

    double max() const {
        double r = std::max({crossing, value_at_zero, asymptotic_half, asymptotic_11, fusion});
        if (!std::isnan(theta_relation)) r = std::max(r, theta_relation);
        return r;
    }
};

inline double relation_residual(Complex lhs, Complex rhs, double scale) {
    const double s = std::max({std::abs(lhs), std::abs(rhs), scale});
    return s > 0 ? std::abs(lhs - rhs) / s : 0.0;
}

/// Residuals of crossing, value at zero, asymptotics, fusion and the inhomogeneity relation.
inline RelationReport verify_relations(const LambdaPair& pr, const ModelParams& m, int fusion_points = 50,
                                       std::uint64_t seed = 7) {
    RelationReport r;
    const double eta = m.eta;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<Complex> pts;
    for (int i = 0; i < fusion_points; ++i) pts.emplace_back(dist(rng) * eta, dist(rng) * eta);

    for (auto u : pts) {
        r.crossing = std::max(r.crossing, relation_residual(pr.eval11(u), pr.eval11(-u - eta), 0));
        r.crossing = std::max(r.crossing, relation_residual(pr.eval_half(u), pr.eval_half(-u - eta), 0));
    }
    r.value_at_zero = relation_residual(pr.eval_half(0.0), lambda_half_at_zero(m), 0);
    r.asymptotic_half = std::abs(pr.lam_half.leading() - pr.lead_half_expected) / std::abs(pr.lead_half_expected);
    r.asymptotic_11 = std::abs(pr.lam11.leading() - pr.lead11_expected) / std::abs(pr.lead11_expected);

    for (auto u : pts) {
        const Complex pre = 4.0 * u * (u + eta);
        const Complex prod = pre * pr.eval_half(u + eta / 2) * pr.eval_half(u - eta / 2);
        const Complex det = pre * delta1(u + eta / 2, m);
        const Complex lhs = pr.eval11(u);
        r.fusion = std::max(r.fusion, relation_residual(lhs, -prod + det, std::max(std::abs(prod), std::abs(det))));
    }
    r.fusion_points = fusion_points;

    if (!m.homogeneous()) {
        r.theta_relation = 0.0;
        for (int j = 0; j < m.N; ++j) {
            const Complex th = m.theta(j);
            if (th == Complex{}) continue;
            const Complex lhs = pr.eval11(th) * pr.eval_half(th - 1.5 * eta);
            const Complex rhs = -4.0 * th * (th + eta) * delta1(th - eta / 2, m) * pr.eval_half(th + eta / 2);
            r.theta_relation = std::max(r.theta_relation, relation_residual(lhs, rhs, 0));
        }
    }
    return r;
}

/// zbar = -i z, with the sign of the pair chosen so that Im > 0, or Im ~ 0 and Re >= 0.
inline Complex canonical_zbar(Complex z, double eps = 1e-9) {
    const Complex zb = -I_unit * z;
    if (zb.imag() > eps || (std::abs(zb.imag()) <= eps && zb.real() >= 0)) return zb;
    return -zb;
}

struct RootSet {
    std::vector<Complex> z1;      ///< 2N+3 roots of Lambda^(1,1), one per +- pair (z = i zbar)
    std::vector<Complex> z;       ///< N+1 roots of Lambda^(1/2,1)
    std::vector<Complex> zbar1;   ///< canonical zbar forms
    std::vector<Complex> zbar;
    double eta = 1.0;
    double pair_closure = 0.0;    ///< max |P(-z)| / scale over all roots
    double max_eval_residual = 0.0;
};

inline RootSet extract_roots(const LambdaPair& pr, const Tolerances& tol = default_tolerances()) {
    RootSet rs;
    rs.eta = pr.eta;
    auto run = [&](const EvenPoly& p, std::vector<Complex>& zs, std::vector<Complex>& zbars) {
        const auto ws = even_poly_w_roots(p, tol);
        if (int(ws.size()) != p.degree())
            throw ExtractionError("extract_roots: expected " + std::to_string(p.degree()) + " roots, found " +
                                  std::to_string(ws.size()));
        for (auto w : ws) {
            const Complex zb = canonical_zbar(std::sqrt(w));
            const Complex z = I_unit * zb;
            zs.push_back(z);
            zbars.push_back(zb);
            const double scale = std::max(p.magnitude_w(w), std::numeric_limits<double>::min());
            rs.max_eval_residual = std::max(rs.max_eval_residual, std::abs(p(z)) / scale);
            rs.pair_closure = std::max(rs.pair_closure, std::abs(p(-z)) / scale);
        }
    };
    run(pr.lam11, rs.z1, rs.zbar1);
    run(pr.lam_half, rs.z, rs.zbar);
    if (rs.pair_closure > tol.pair_closure)
        throw ExtractionError("extract_roots: +- pairing not closed (" + std::to_string(rs.pair_closure) + ")");
    return rs;
}

/// E = -sum_k eta / (z_k^2 - eta^2/4).
inline double energy_from_roots(const RootSet& rs) {
    Complex e{};
    const double eta = rs.eta;
    for (auto z : rs.z1) e -= eta / (z * z - eta * eta / 4);
    return e.real();
}

/// Ground-state pipeline: diagonalize, reconstruct, extract.
struct GroundStateRoots {
    EigenState state;
    LambdaPair lambda;
    RootSet roots;
};

inline GroundStateRoots ground_state_roots(const ModelParams& m, const Tolerances& tol = default_tolerances()) {
    DiagonalizeOptions opt;
    opt.max_states = 1;
    auto states = diagonalize(m, opt, tol);
    GroundStateRoots g{states.front(), {}, {}};
    g.lambda = reconstruct_lambda(g.state, m, {}, tol);
    g.roots = extract_roots(g.lambda, tol);
    return g;
}

} // namespace openspin1
