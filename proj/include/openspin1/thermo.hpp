#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "model.hpp"
#include "numerics.hpp"
#include "tolerances.hpp"

namespace openspin1 {

// Kernels and their transforms under f~(w) = int f(u) e^{2iuw} du.
inline double kernel_a(double n, double u) { return n / (2 * std::numbers::pi * (u * u + n * n / 4)); }
inline double kernel_b(double n, double u) { return 2 * u / (2 * std::numbers::pi * (u * u + n * n / 4)); }
inline double a_tilde(double n, double w) { return std::exp(-std::abs(n * w)); }
inline Complex b_tilde(double n, double w) {
    const double s = w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0);
    return Complex(0, s * std::exp(-std::abs(n * w)));
}

struct FourierEntry {
    std::string kernel;  ///< "a" or "b"
    int n;
    double w;
    Complex numeric;
    Complex expected;
    double error;
};

struct FourierReport {
    std::vector<FourierEntry> entries;
    double max_error = 0.0;
    bool pass = false;
};

/// Quadrature check of the kernel transform pairs for n = 1..5 and w in {+-0.3, +-1}.
inline FourierReport fourier_pair_check(const Tolerances& tol = default_tolerances()) {
    FourierReport rep;
    for (int n = 1; n <= 5; ++n)
        for (double w : {-1.0, -0.3, 0.3, 1.0}) {
            const double om = 2 * std::abs(w), sg = w > 0 ? 1.0 : -1.0;
            auto fa = [n](double u) { return kernel_a(n, u); };
            auto fb = [n](double u) { return kernel_b(n, u); };
            // a_n even: 2 int_0^inf a cos(2uw); b_n odd: 2i int_0^inf b sin(2uw)
            const double ra = 2 * fourier_cos_semiinfinite(fa, om, 1e-13).first;
            const double rb = 2 * sg * fourier_sin_semiinfinite(fb, om, 1e-13).first;
            const FourierEntry ea{"a", n, w, Complex(ra, 0), Complex(a_tilde(n, w), 0), 0};
            const FourierEntry eb{"b", n, w, Complex(0, rb), b_tilde(n, w), 0};
            for (auto e : {ea, eb}) {
                e.error = std::abs(e.numeric - e.expected);
                rep.max_error = std::max(rep.max_error, e.error);
                rep.entries.push_back(e);
            }
        }
    rep.pass = rep.max_error <= tol.fourier;
    return rep;
}

/// Runs the transform check once per process; density evaluation is refused if it fails.
inline void require_fourier_convention(const Tolerances& tol = default_tolerances()) {
    static std::once_flag once;
    static double max_error = 0.0;
    std::call_once(once, [&] { max_error = fourier_pair_check(tol).max_error; });
    if (!(max_error <= tol.fourier))
        throw ConventionError("Fourier convention check failed (max error " + std::to_string(max_error) + ")");
}

/// Point-boundary bulk density with sigma = delta; the i sign(w) factors cancel in the ratio.
inline double rho_delta(double w, int N, double p, double q) {
    auto e = [w](double n) { return a_tilde(n, w); };
    const double num = 2.0 * N * (e(2) + e(4)) - e(1) + e(3) + e(2 * p) + e(2 * p + 2) + e(2 * q) + e(2 * q + 2);
    return num / (N * (e(1) + 2 * e(3) + e(5)));
}

/// One term c * e^{-|n w|} (times 2cos(2 lambda w) when oscillating) of N D(w) rho_bstring(w).
struct BstringTerm {
    double coeff;
    double n;
    bool oscillating = false;
};

struct Bstring {
    std::vector<BstringTerm> terms;
    double lambda = 0.0;
    int N = 1;

    /// rho_bstring(w)
    double operator()(double w) const {
        double num = 0.0;
        for (const auto& t : terms) num += t.coeff * a_tilde(t.n, w) * (t.oscillating ? 2 * std::cos(2 * lambda * w) : 1.0);
        return num / (N * (a_tilde(1, w) + 2 * a_tilde(3, w) + a_tilde(5, w)));
    }
};

inline bool regime_uses_zx(char r) { return std::string("BCFGJK").find(r) != std::string::npos; }
inline bool regime_uses_lambda(char r) { return r == 'G' || r == 'H'; }

inline void check_regime(char r) {
    if (r < 'A' || r > 'L') throw ParameterError(std::string("unknown regime '") + r + "'");
}

/// Boundary-string contribution to the bulk density in each regime.
inline Bstring rho_bstring(char regime, double p, double q, int N, std::optional<double> zx = std::nullopt,
                           std::optional<double> lambda = std::nullopt) {
    check_regime(regime);
    if (regime_uses_zx(regime) && !zx) throw ParameterError(std::string("regime ") + regime + " requires z_x");
    if (regime_uses_lambda(regime) && !lambda)
        throw ParameterError(std::string("regime ") + regime + " requires lambda");
    Bstring b;
    b.N = N;
    b.lambda = lambda.value_or(0.0);
    auto B = [&](double a, bool osc = false) {
        b.terms.push_back({-1.0, 2 * a, osc});
        b.terms.push_back({-1.0, 2 * a + 2, osc});
    };
    const double aq = std::abs(q);
    const double z = zx.value_or(0.0);
    switch (regime) {
    case 'A': break;
    case 'B': B(p); B(p + 1); B(z - 1); B(z); break;
    case 'C': B(q); B(q + 1); B(z - 1); B(z); break;
    case 'D': B(q); B(q + 1); B(p); B(p + 1); break;
    case 'E': B(aq); break;
    case 'F': B(p); B(p + 1); B(z - 1); B(z); B(aq); break;
    case 'G': B(z - 1); B(z); B(1 - aq); B(1, true); break;
    case 'H': B(p); B(p + 1); B(1 - aq); B(1, true); break;
    case 'I': B(aq - 1); B(aq); break;
    case 'J': B(p); B(p + 1); B(z - 1); B(z); B(aq - 1); B(aq); break;
    case 'K': B(z - 1); B(z); break;
    case 'L': B(p); B(p + 1); break;
    }
    return b;
}

/// Discrete zbar^(1) roots of a regime that stay finite in the thermodynamic limit.
inline std::vector<Complex> regime_discrete_roots(char regime, double p, double q, std::optional<double> zx = std::nullopt,
                                                  std::optional<double> lambda = std::nullopt) {
    check_regime(regime);
    const double aq = std::abs(q), z = zx.value_or(0.0), l = lambda.value_or(0.0);
    auto im = [](double c) { return Complex(0, c); };
    std::vector<Complex> r{0.0};
    auto zxpair = [&] { r.push_back(im(z - 0.5)); r.push_back(im(z + 0.5)); };
    auto ppair = [&] { r.push_back(im(0.5 + p)); r.push_back(im(1.5 + p)); };
    auto lam = [&] { r.push_back(Complex(l, 1.5)); r.push_back(Complex(-l, 1.5)); };
    switch (regime) {
    case 'A': break;
    case 'B': zxpair(); ppair(); break;
    case 'C': zxpair(); r.push_back(im(0.5 + q)); r.push_back(im(1.5 + q)); break;
    case 'D': ppair(); r.push_back(im(0.5 + q)); r.push_back(im(1.5 + q)); break;
    case 'E': r.push_back(im(0.5 + aq)); break;
    case 'F': zxpair(); ppair(); r.push_back(im(0.5 + aq)); break;
    case 'G': zxpair(); lam(); r.push_back(im(1.5 - aq)); break;
    case 'H': ppair(); r.push_back(im(1.5 - aq)); lam(); break;
    case 'I': r.push_back(im(aq - 0.5)); r.push_back(im(aq + 0.5)); break;
    case 'J': zxpair(); r.push_back(im(aq - 0.5)); r.push_back(im(aq + 0.5)); ppair(); break;
    case 'K': zxpair(); break;
    case 'L': ppair(); break;
    }
    return r;
}

/// E_g = N int rho~(w) [a~_5 - a~_1] dw + sum over discrete roots of 1/(zbar^2 + 1/4)  (eta = 1).
inline double ground_energy_thermo(char regime, double p, double q, int N, std::optional<double> zx = std::nullopt,
                                   std::optional<double> lambda = std::nullopt,
                                   const Tolerances& tol = default_tolerances()) {
    require_fourier_convention(tol);
    const auto bs = rho_bstring(regime, p, q, N, zx, lambda);

    // Collect N D(w) rho~(w) as sum_n c_n e^{-|n w|}; equal exponents are merged so cancelling terms drop out.
    std::map<double, double> plain;
    std::map<double, double> osc;
    auto add = [&](std::map<double, double>& mp, double n, double c) { mp[std::abs(n)] += c; };
    add(plain, 2, 2.0 * N);
    add(plain, 4, 2.0 * N);
    add(plain, 1, -1.0);
    add(plain, 3, 1.0);
    for (double n : {2 * p, 2 * p + 2, 2 * q, 2 * q + 2}) add(plain, n, 1.0);
    for (const auto& t : bs.terms) add(t.oscillating ? osc : plain, t.n, t.coeff);
    for (auto* mp : {&plain, &osc})
        for (auto it = mp->begin(); it != mp->end();)
            it = std::abs(it->second) < 1e-12 ? mp->erase(it) : std::next(it);
    if (plain.count(0.0) || osc.count(0.0))
        throw DomainError("ground_energy_thermo: non-decaying density term at these parameters");

    // (a~_5 - a~_1) / D = -tanh|w|
    const double lam = bs.lambda;
    auto integrand = [&](double w) {
        double s = 0.0;
        for (const auto& [n, c] : plain) s += c * std::exp(-n * w);
        for (const auto& [n, c] : osc) s += c * std::exp(-n * w) * 2 * std::cos(2 * lam * w);
        return -std::tanh(w) * s;
    };
    const double bulk = quad_real_line_even(integrand, tol.thermo_quad * std::max(1.0, double(N)));

    double discrete = 0.0;
    for (auto z : regime_discrete_roots(regime, p, q, zx, lambda)) discrete += (1.0 / (z * z + 0.25)).real();
    return bulk + discrete;
}

struct SurfaceEnergyResult {
    double p = 0.0, q = 0.0;
    std::string regime;
    double closed_form = std::numeric_limits<double>::quiet_NaN();
    double integral_value = std::numeric_limits<double>::quiet_NaN();
    double extrapolated = std::numeric_limits<double>::quiet_NaN();
    double uncertainty = std::numeric_limits<double>::quiet_NaN();
    std::string model;
    std::vector<std::pair<int, double>> sequence;  ///< (N, E_b(N)) from exact diagonalization
    std::vector<std::string> warnings;

    double relative_deviation() const { return std::abs(extrapolated - closed_form) / std::abs(closed_form); }
};

/// Closed-form surface energy (eta = 1).
inline double surface_energy_closed(double p, double q) {
    if (!(p > 0)) throw DomainError("surface_energy: p <= 0 is outside the covered half-plane");
    if (std::abs(q) < 1e-12 || std::abs(q + 1) < 1e-12) throw DomainError("surface_energy: q at a pole (0 or -1)");
    const double pi = std::numbers::pi;
    double e = 2 * pi - 4.0 / 3.0 + 1 / (p + 1) - 1 / p + 1 / (q + 1) - 1 / q;
    if (q > -1 && q < 0) e += 2 * pi / std::sin(q * pi);
    return e;
}

inline SurfaceEnergyResult surface_energy(double p, double q) {
    SurfaceEnergyResult r;
    r.p = p;
    r.q = q;
    r.closed_form = surface_energy_closed(p, q);
    return r;
}

enum class ExtrapolationModel { staggered, plain, quadratic };

inline const char* to_string(ExtrapolationModel m) {
    switch (m) {
    case ExtrapolationModel::staggered: return "staggered";
    case ExtrapolationModel::plain: return "plain";
    case ExtrapolationModel::quadratic: return "quadratic";
    }
    return "?";
}

inline ExtrapolationModel extrapolation_model_from_string(const std::string& s) {
    if (s == "staggered") return ExtrapolationModel::staggered;
    if (s == "plain") return ExtrapolationModel::plain;
    if (s == "quadratic") return ExtrapolationModel::quadratic;
    throw ConfigError("unknown extrapolation model '" + s + "'");
}

/// Least-squares fit of E_b(N); returns (E_inf, standard error or NaN when exactly determined).
inline std::pair<double, double> fit_finite_size(const std::vector<std::pair<int, double>>& seq, ExtrapolationModel model) {
    const int k = model == ExtrapolationModel::plain ? 2 : 3;
    const auto n = Eigen::Index(seq.size());
    if (n < k) throw ContractError("extrapolation needs at least " + std::to_string(k) + " sizes");
    Eigen::MatrixXd A(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double N = seq[std::size_t(i)].first;
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / N;
        if (model == ExtrapolationModel::staggered) A(i, 2) = ((seq[std::size_t(i)].first % 2) ? -1.0 : 1.0) / N;
        if (model == ExtrapolationModel::quadratic) A(i, 2) = 1.0 / (N * N);
        y(i) = seq[std::size_t(i)].second;
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    double se = std::numeric_limits<double>::quiet_NaN();
    if (n > k) {
        const double s2 = (A * c - y).squaredNorm() / double(n - k);
        se = std::sqrt(s2 * (A.transpose() * A).inverse()(0, 0));
    }
    return {c(0), se};
}

/// Ground-state energy by exact diagonalization (lowest eigenvalue of H).
inline double ground_energy_ed(const ModelParams& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hamiltonian(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Extrapolates E_b(N) = E_g(N) + N to N -> infinity and compares with the closed form.
inline SurfaceEnergyResult extrapolate_surface_energy(double p, double q, const std::vector<int>& sizes,
                                                      ExtrapolationModel model = ExtrapolationModel::staggered,
                                                      const std::function<double(int)>& ground = {}) {
    SurfaceEnergyResult r;
    r.p = p;
    r.q = q;
    r.model = to_string(model);
    try {
        r.closed_form = surface_energy_closed(p, q);
    } catch (const DomainError& e) {
        r.warnings.push_back(e.what());
    }
    for (int N : sizes) {
        const double eg = ground ? ground(N) : ground_energy_ed(ModelParams::from_pq(N, p, q));
        r.sequence.emplace_back(N, eg + N);
    }
    for (const auto& [N, e] : r.sequence)
        if (!std::isfinite(e)) throw AccuracyError("extrapolation: non-finite E_b at N=" + std::to_string(N), e, 0);
    bool up = true, down = true;
    for (std::size_t i = 1; i < r.sequence.size(); ++i) {
        up = up && r.sequence[i].second >= r.sequence[i - 1].second;
        down = down && r.sequence[i].second <= r.sequence[i - 1].second;
    }
    if (!up && !down) {
        std::string raw;
        for (const auto& [N, e] : r.sequence) raw += " N=" + std::to_string(N) + ":" + std::to_string(e);
        r.warnings.push_back("non-monotone E_b(N) sequence (raw:" + raw + ")");
    }
    std::tie(r.extrapolated, r.uncertainty) = fit_finite_size(r.sequence, model);
    return r;
}

} // namespace openspin1
