#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "tolerances.hpp"

namespace openspin1 {

struct ModelParams {
    int N = 2;
    double eta = 1.0;
    double p_minus = 1.0;
    double p_plus = 1.0;
    double alpha_minus = 0.4;
    double alpha_plus = 0.6;
    double phi_minus = 0.3;
    double phi_plus = 0.3;
    std::vector<double> theta_bar;  ///< imaginary parts of the inhomogeneities; empty means all zero

    /// Boundary strengths from the reduced parameters (p, q).
    static ModelParams from_pq(int N, double p, double q, double alpha_minus = 0.4, double alpha_plus = 0.6,
                               double phi = 0.3, double eta = 1.0) {
        ModelParams m;
        m.N = N;
        m.eta = eta;
        m.alpha_minus = alpha_minus;
        m.alpha_plus = alpha_plus;
        m.phi_minus = m.phi_plus = phi;
        m.p_plus = (p + 0.5) * eta * std::sqrt(1.0 + alpha_plus * alpha_plus);
        m.p_minus = -(q + 0.5) * eta * std::sqrt(1.0 + alpha_minus * alpha_minus);
        return m;
    }

    double p() const { return p_plus / (eta * std::sqrt(1.0 + alpha_plus * alpha_plus)) - 0.5; }
    double q() const { return -p_minus / (eta * std::sqrt(1.0 + alpha_minus * alpha_minus)) - 0.5; }

    Complex theta(int j) const {
        return theta_bar.empty() ? Complex{} : Complex{0.0, theta_bar[std::size_t(j)]};
    }
    bool homogeneous() const {
        for (double t : theta_bar)
            if (t != 0.0) return false;
        return true;
    }

    void validate() const {
        if (N < 1) throw ParameterError("N must be positive");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be positive and finite");
        for (double x : {p_minus, p_plus, alpha_minus, alpha_plus, phi_minus, phi_plus})
            if (!std::isfinite(x)) throw ParameterError("non-finite boundary parameter");
        if (!theta_bar.empty() && int(theta_bar.size()) != N)
            throw ParameterError("theta_bar must have N entries (got " + std::to_string(theta_bar.size()) + ")");
        for (double t : theta_bar)
            if (!std::isfinite(t)) throw ParameterError("non-finite inhomogeneity");
    }
};

struct SpinOperators {
    ComplexMatrix sx, sy, sz;
};

inline SpinOperators spin_one() {
    const double r = 1.0 / std::sqrt(2.0);
    SpinOperators s{ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3)};
    s.sx(0, 1) = s.sx(1, 0) = s.sx(1, 2) = s.sx(2, 1) = r;
    s.sy(0, 1) = Complex(0, -r);
    s.sy(1, 0) = Complex(0, r);
    s.sy(1, 2) = Complex(0, -r);
    s.sy(2, 1) = Complex(0, r);
    s.sz(0, 0) = 1.0;
    s.sz(2, 2) = -1.0;
    return s;
}

inline SpinOperators pauli() {
    SpinOperators s{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)};
    s.sx(0, 1) = s.sx(1, 0) = 1.0;
    s.sy(0, 1) = Complex(0, -1);
    s.sy(1, 0) = Complex(0, 1);
    s.sz(0, 0) = 1.0;
    s.sz(1, 1) = -1.0;
    return s;
}

/// Swap on C^a (x) C^b -> C^b (x) C^a.
inline ComplexMatrix swap_matrix(int a, int b) {
    ComplexMatrix P = ComplexMatrix::Zero(a * b, a * b);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) P(j * a + i, i * b + j) = 1.0;
    return P;
}

inline ComplexMatrix r11(Complex u, double eta) {
    const Complex a = u * (u + eta) + 2 * eta * eta, b = u * (u + eta), c = (u + eta) * (u + 2 * eta);
    const Complex d = u * (u - eta), e = 2 * eta * (u + eta), f = 2 * eta * eta, g = 2.0 * u * eta;
    ComplexMatrix R = ComplexMatrix::Zero(9, 9);
    R(0, 0) = c;
    R(1, 1) = b; R(1, 3) = e;
    R(2, 2) = d; R(2, 4) = g; R(2, 6) = f;
    R(3, 1) = e; R(3, 3) = b;
    R(4, 2) = g; R(4, 4) = a; R(4, 6) = g;
    R(5, 5) = b; R(5, 7) = e;
    R(6, 2) = f; R(6, 4) = g; R(6, 6) = d;
    R(7, 5) = e; R(7, 7) = b;
    R(8, 8) = c;
    return R;
}

/// R^(1/2,1) on C^2 (x) C^3.
inline ComplexMatrix r_half_one(Complex u, double eta) {
    const auto s = pauli();
    const auto S = spin_one();
    ComplexMatrix R = (u + eta / 2) * ComplexMatrix::Identity(6, 6);
    R += eta * (kron(s.sx, S.sx) + kron(s.sy, S.sy) + kron(s.sz, S.sz));
    return R;
}

/// R^(1,1/2) on C^3 (x) C^2, the swap conjugate of r_half_one.
inline ComplexMatrix r_one_half(Complex u, double eta) {
    const ComplexMatrix P = swap_matrix(2, 3);
    return P * r_half_one(u, eta) * P.transpose();
}

inline ComplexMatrix k_minus_1(Complex u, double p, double alpha, double phi, double eta) {
    const double h = eta / 2, a2 = alpha * alpha, s2 = std::sqrt(2.0);
    const Complex em = std::polar(1.0, -phi), ep = std::polar(1.0, phi);
    const Complex x1 = (p + u + h) * (p + u - h) + a2 / 2 * eta * (u - h);
    const Complex x2 = (p + u - h) * (p - u + h) + a2 * (u + h) * (u - h);
    const Complex x3 = (p - u - h) * (p - u + h) + a2 / 2 * eta * (u - h);
    const Complex y4 = s2 * alpha * em * u * (p + u - h), y4p = s2 * alpha * ep * u * (p + u - h);
    const Complex y5 = s2 * alpha * em * u * (p - u + h), y5p = s2 * alpha * ep * u * (p - u + h);
    const Complex y6 = a2 * em * em * u * (u - h), y6p = a2 * ep * ep * u * (u - h);
    ComplexMatrix K(3, 3);
    K << x1, y4p, y6p, y4, x2, y5p, y6, y5, x3;
    return (2.0 * u + eta) * K;
}

inline ComplexMatrix k_minus_1(Complex u, const ModelParams& m) {
    return k_minus_1(u, m.p_minus, m.alpha_minus, m.phi_minus, m.eta);
}

/// Dual matrix: K^-(1)(-u-eta) at (p+, -alpha+, phi+).
inline ComplexMatrix k_plus_1(Complex u, const ModelParams& m) {
    return k_minus_1(-u - m.eta, m.p_plus, -m.alpha_plus, m.phi_plus, m.eta);
}

inline ComplexMatrix k_half(Complex u, double p, double alpha, double phi) {
    ComplexMatrix K(2, 2);
    K << p + u, alpha * std::polar(1.0, phi) * u, alpha * std::polar(1.0, -phi) * u, p - u;
    return K;
}

inline ComplexMatrix k_half(Complex u, const ModelParams& m, bool dual) {
    if (!dual) return k_half(u, m.p_minus, m.alpha_minus, m.phi_minus);
    return k_half(-u - m.eta, m.p_plus, -m.alpha_plus, m.phi_plus);
}

enum class TransferKind { spin11, spin_half_1 };

inline const char* to_string(TransferKind k) { return k == TransferKind::spin11 ? "spin11" : "spin_half_1"; }
inline int aux_dim(TransferKind k) { return k == TransferKind::spin11 ? 3 : 2; }

inline std::int64_t pow3(int n) {
    std::int64_t r = 1;
    for (int i = 0; i < n; ++i) r *= 3;
    return r;
}

/// Largest N for which dense N-site operators are built.
inline constexpr int dense_site_limit = 8;

namespace detail {

// Applies a (3 d0)x(3 d0) operator on (aux, site j) of a vector laid out aux-slowest, site 1 slowest.
inline void apply_local(const ComplexMatrix& R, int d0, int j, int N, ComplexVector& x) {
    const std::int64_t D = pow3(N);
    const std::int64_t s = pow3(N - 1 - j);
    const int L = 3 * d0;
    Complex in[9], out[9];
    for (std::int64_t hi = 0; hi < D / (3 * s); ++hi)
        for (std::int64_t lo = 0; lo < s; ++lo) {
            const std::int64_t base = hi * 3 * s + lo;
            for (int a = 0; a < d0; ++a)
                for (int k = 0; k < 3; ++k) in[a * 3 + k] = x[a * D + base + k * s];
            for (int r = 0; r < L; ++r) {
                Complex acc{};
                for (int c = 0; c < L; ++c) acc += R(r, c) * in[c];
                out[r] = acc;
            }
            for (int a = 0; a < d0; ++a)
                for (int k = 0; k < 3; ++k) x[a * D + base + k * s] = out[a * 3 + k];
        }
}

inline void apply_aux(const ComplexMatrix& K, int d0, std::int64_t D, ComplexVector& x) {
    Complex in[3];
    for (std::int64_t b = 0; b < D; ++b) {
        for (int a = 0; a < d0; ++a) in[a] = x[a * D + b];
        for (int r = 0; r < d0; ++r) {
            Complex acc{};
            for (int c = 0; c < d0; ++c) acc += K(r, c) * in[c];
            x[r * D + b] = acc;
        }
    }
}

} // namespace detail

/// Precomputed local factors of a transfer matrix at one spectral point.
class TransferOperator {
public:
    TransferOperator(Complex u, const ModelParams& m, TransferKind kind,
                     const std::function<ComplexMatrix(Complex, double)>& r11_override = {})
        : N_(m.N), d0_(aux_dim(kind)), D_(pow3(m.N)) {
        m.validate();
        if (m.N > dense_site_limit + 2)
            throw SizeError("transfer: N=" + std::to_string(m.N) + " exceeds the site budget; use a smaller N");
        auto R = [&](Complex w) {
            if (kind == TransferKind::spin_half_1) return r_half_one(w, m.eta);
            return r11_override ? r11_override(w, m.eta) : r11(w, m.eta);
        };
        for (int j = 0; j < N_; ++j) {
            rminus_.push_back(R(u - m.theta(j)));
            rplus_.push_back(R(u + m.theta(j)));
        }
        if (kind == TransferKind::spin11) {
            kminus_ = k_minus_1(u, m);
            kplus_ = k_plus_1(u, m);
        } else {
            kminus_ = k_half(u, m, false);
            kplus_ = k_half(u, m, true);
        }
    }

    std::int64_t dim() const { return D_; }

    ComplexVector apply(const ComplexVector& psi) const {
        if (psi.size() != D_) throw ContractError("transfer apply: vector dimension mismatch");
        ComplexVector out = ComplexVector::Zero(D_);
        ComplexVector x(d0_ * D_);
        for (int a = 0; a < d0_; ++a) {
            x.setZero();
            x.segment(a * D_, D_) = psi;
            for (int j = N_ - 1; j >= 0; --j) detail::apply_local(rplus_[std::size_t(j)], d0_, j, N_, x);
            detail::apply_aux(kminus_, d0_, D_, x);
            for (int j = 0; j < N_; ++j) detail::apply_local(rminus_[std::size_t(j)], d0_, j, N_, x);
            detail::apply_aux(kplus_, d0_, D_, x);
            out += x.segment(a * D_, D_);
        }
        return out;
    }

    ComplexMatrix matrix() const {
        check_entries(D_, D_, "transfer");
        ComplexMatrix t(D_, D_);
        ComplexVector e = ComplexVector::Zero(D_);
        for (std::int64_t c = 0; c < D_; ++c) {
            e.setZero();
            e[c] = 1.0;
            t.col(c) = apply(e);
        }
        return t;
    }

private:
    int N_, d0_;
    std::int64_t D_;
    std::vector<ComplexMatrix> rminus_, rplus_;
    ComplexMatrix kminus_, kplus_;
};

inline ComplexVector apply_transfer(Complex u, const ModelParams& m, TransferKind kind, const ComplexVector& psi) {
    return TransferOperator(u, m, kind).apply(psi);
}

inline ComplexMatrix transfer(Complex u, const ModelParams& m, TransferKind kind) {
    if (m.N > dense_site_limit - 1)
        throw SizeError("transfer: dense 3^N x 3^N matrix at N=" + std::to_string(m.N) +
                        " exceeds the memory budget; use N <= " + std::to_string(dense_site_limit - 1));
    return TransferOperator(u, m, kind).matrix();
}

namespace detail {

// Adds a k-site operator acting on sites first..first+k-1 to a dense N-site matrix.
inline void add_local(ComplexMatrix& H, const ComplexMatrix& h, int first, int k, int N) {
    const std::int64_t D = pow3(N);
    const std::int64_t s = pow3(N - first - k);
    const std::int64_t block = pow3(k);
    std::vector<std::int64_t> off(std::size_t(block), 0);
    for (std::int64_t l = 0; l < block; ++l) off[std::size_t(l)] = l * s;
    for (std::int64_t hi = 0; hi < D / (block * s); ++hi)
        for (std::int64_t lo = 0; lo < s; ++lo) {
            const std::int64_t base = hi * block * s + lo;
            for (std::int64_t r = 0; r < block; ++r)
                for (std::int64_t c = 0; c < block; ++c) {
                    const Complex v = h(r, c);
                    if (v != Complex{}) H(base + off[std::size_t(r)], base + off[std::size_t(c)]) += v;
                }
        }
}

inline ComplexMatrix boundary_term(double p, double alpha, double phi, double sgn, double eta) {
    const double den = p * p - 0.25 * (1 + alpha * alpha) * eta * eta;
    if (std::abs(den) <= 1e-12 * std::max(p * p, eta * eta))
        throw ParameterError("boundary denominator p^2 - (1+alpha^2) eta^2/4 vanishes");
    const auto S = spin_one();
    const ComplexMatrix &X = S.sx, &Y = S.sy, &Z = S.sz;
    const ComplexMatrix Id = ComplexMatrix::Identity(3, 3);
    const double a2 = alpha * alpha;
    ComplexMatrix B = 2 * p * (alpha * std::cos(phi) * X - alpha * std::sin(phi) * Y + sgn * Z);
    B -= eta * Z * Z;
    B -= 0.5 * a2 * eta * (std::cos(2 * phi) * (X * X - Y * Y) - Z * Z);
    B -= sgn * alpha * eta * std::cos(phi) * (X * Z + Z * X);
    B += 0.5 * a2 * eta * std::sin(2 * phi) * (X * Y + Y * X);
    B += sgn * alpha * eta * std::sin(phi) * (Y * Z + Z * Y);
    B += eta * Id;
    return B / den;
}

} // namespace detail

/// Dense Hamiltonian of the open chain (homogeneous form).
inline ComplexMatrix hamiltonian(const ModelParams& m) {
    m.validate();
    if (m.N < 2) throw ParameterError("hamiltonian needs N >= 2");
    if (m.N > dense_site_limit)
        throw SizeError("hamiltonian: N=" + std::to_string(m.N) + " exceeds the dense budget");
    const auto S = spin_one();
    const ComplexMatrix SS = kron(S.sx, S.sx) + kron(S.sy, S.sy) + kron(S.sz, S.sz);
    const ComplexMatrix h2 = (SS - SS * SS) / m.eta;
    const std::int64_t D = pow3(m.N);
    ComplexMatrix H = ComplexMatrix::Zero(D, D);
    for (int j = 0; j + 1 < m.N; ++j) detail::add_local(H, h2, j, 2, m.N);
    H.diagonal().array() += (3.0 * m.N + 8.0 / 3.0) / m.eta;
    detail::add_local(H, detail::boundary_term(m.p_minus, m.alpha_minus, m.phi_minus, 1.0, m.eta), 0, 1, m.N);
    detail::add_local(H, detail::boundary_term(m.p_plus, m.alpha_plus, m.phi_plus, -1.0, m.eta), m.N - 1, 1, m.N);
    return H;
}

/// t'(0) t(0)^{-1} by central differences with one Richardson step.
inline ComplexMatrix hamiltonian_from_transfer(const ModelParams& m, double h = default_tolerances().fd_step) {
    auto central = [&](double step) {
        return ComplexMatrix((transfer(step, m, TransferKind::spin11) - transfer(-step, m, TransferKind::spin11)) /
                             (2 * step));
    };
    const ComplexMatrix d = (4.0 * central(h / 2) - central(h)) / 3.0;
    const ComplexMatrix t0 = transfer(0.0, m, TransferKind::spin11);
    // H = d t0^{-1}  <=>  t0^T H^T = d^T
    Eigen::PartialPivLU<ComplexMatrix> lu(t0.transpose());
    return lu.solve(d.transpose()).transpose();
}

inline Complex total_product(Complex u, const ModelParams& m) {
    Complex prod{1.0, 0.0};
    for (int l = 0; l < m.N; ++l)
        prod *= (u + m.theta(l) + 1.5 * m.eta) * (u - m.theta(l) + 1.5 * m.eta);
    return prod;
}

inline Complex a1(Complex u, const ModelParams& m) {
    if (std::abs(2.0 * u + m.eta) <= 1e-14 * m.eta) throw PoleError("a1: pole at u = -eta/2");
    const double sp = std::sqrt(1 + m.alpha_plus * m.alpha_plus), sm = std::sqrt(1 + m.alpha_minus * m.alpha_minus);
    return -(2.0 * u + 2.0 * m.eta) / (2.0 * u + m.eta) * (sp * u + m.p_plus) * (sm * u - m.p_minus) *
           total_product(u, m);
}

inline Complex d1(Complex u, const ModelParams& m) { return a1(-u - m.eta, m); }

/// delta^(1)(u) = a^(1)(u) d^(1)(u - eta); poles at u = +-eta/2.
inline Complex delta1(Complex u, const ModelParams& m) {
    if (std::abs(2.0 * u + m.eta) <= 1e-14 * m.eta || std::abs(2.0 * u - m.eta) <= 1e-14 * m.eta)
        throw PoleError("delta1: pole at u = +-eta/2");
    return a1(u, m) * d1(u - m.eta, m);
}

namespace detail {

inline ComplexMatrix k1_lead(double alpha, double phi) {
    const double s2 = std::sqrt(2.0), a2 = alpha * alpha;
    const Complex em = std::polar(1.0, -phi), ep = std::polar(1.0, phi);
    ComplexMatrix M(3, 3);
    M << 1.0, s2 * alpha * ep, a2 * ep * ep,
         s2 * alpha * em, a2 - 1.0, -s2 * alpha * ep,
         a2 * em * em, -s2 * alpha * em, 1.0;
    return M;
}

inline ComplexMatrix khalf_lead(double alpha, double phi) {
    ComplexMatrix M(2, 2);
    M << 1.0, alpha * std::polar(1.0, phi), alpha * std::polar(1.0, -phi), -1.0;
    return M;
}

} // namespace detail

/// Coefficient of u^{2N+2} in t^(1/2,1); reduces to 2(alpha- alpha+ - 1) at phi+ = phi-.
inline double leading_half(const ModelParams& m) {
    const ComplexMatrix Kp = -detail::khalf_lead(-m.alpha_plus, m.phi_plus);
    const ComplexMatrix Km = detail::khalf_lead(m.alpha_minus, m.phi_minus);
    return (Kp * Km).trace().real();
}

/// Coefficient of u^{4N+6} in t^(1,1).
inline double leading_11(const ModelParams& m) {
    const ComplexMatrix Kp = -2.0 * detail::k1_lead(-m.alpha_plus, m.phi_plus);
    const ComplexMatrix Km = 2.0 * detail::k1_lead(m.alpha_minus, m.phi_minus);
    return (Kp * Km).trace().real();
}

inline double leading_half_closed(const ModelParams& m) { return 2 * (m.alpha_minus * m.alpha_plus - 1); }

inline double leading_11_closed(const ModelParams& m) {
    const double a = m.alpha_plus, b = m.alpha_minus;
    return 4 * ((1 + a * a) * (1 + b * b) - 4 * (a * b - 1) * (a * b - 1));
}

/// Value of t^(1/2,1)(0) on every state.
inline Complex lambda_half_at_zero(const ModelParams& m) { return 2 * m.p_minus * m.p_plus * total_product(0.0, m); }

// ---------------------------------------------------------------- identities

inline double residual(const ComplexMatrix& lhs, const ComplexMatrix& rhs) { return relative_diff(lhs, rhs); }

using R11Builder = std::function<ComplexMatrix(Complex, double)>;

inline ComplexMatrix r11_of(const R11Builder& b, Complex u, double eta) { return b ? b(u, eta) : r11(u, eta); }

inline double qybe_residual(Complex u, Complex v, double eta, const R11Builder& b = {}) {
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
    const ComplexMatrix P23 = kron(I3, swap_matrix(3, 3));
    const ComplexMatrix R12 = kron(r11_of(b, u - v, eta), I3);
    const ComplexMatrix R13 = P23 * kron(r11_of(b, u, eta), I3) * P23;
    const ComplexMatrix R23 = kron(I3, r11_of(b, v, eta));
    return residual(R12 * R13 * R23, R23 * R13 * R12);
}

inline double re_residual(Complex u, Complex v, const ModelParams& m, const R11Builder& b = {}) {
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3), P = swap_matrix(3, 3);
    const ComplexMatrix R12 = r11_of(b, u - v, m.eta);
    const ComplexMatrix R21 = P * r11_of(b, u + v, m.eta) * P;
    const ComplexMatrix K1 = kron(k_minus_1(u, m), I3), K2 = kron(I3, k_minus_1(v, m));
    return residual(R12 * K1 * R21 * K2, K2 * R21 * K1 * R12);
}

inline double dual_re_residual(Complex u, Complex v, const ModelParams& m, const R11Builder& b = {}) {
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3), P = swap_matrix(3, 3);
    const ComplexMatrix R12 = r11_of(b, v - u, m.eta);
    const ComplexMatrix R21 = P * r11_of(b, -u - v - 2 * m.eta, m.eta) * P;
    const ComplexMatrix K1 = kron(k_plus_1(u, m), I3), K2 = kron(I3, k_plus_1(v, m));
    return residual(R12 * K1 * R21 * K2, K2 * R21 * K1 * R12);
}

/// Mixed reflection equation on C^3 (x) C^2 with K^-(1) in space 1 and K^-(1/2) in space 2.
inline double mixed_re_residual(Complex u, Complex v, const ModelParams& m) {
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3), I2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix P = swap_matrix(2, 3);
    const ComplexMatrix Rm = r_one_half(u - v, m.eta), Rp = r_one_half(u + v, m.eta);
    // R21^(1/2,1) acting on C^3 (x) C^2
    const ComplexMatrix Rm21 = P * r_half_one(u - v, m.eta) * P.transpose();
    const ComplexMatrix Rp21 = P * r_half_one(u + v, m.eta) * P.transpose();
    const ComplexMatrix K1 = kron(k_minus_1(u, m), I2), K2 = kron(I3, k_half(v, m, false));
    return residual(Rm * K1 * Rp21 * K2, K2 * Rp * K1 * Rm21);
}

inline double unitarity_residual(Complex u, double eta) {
    const ComplexMatrix P = swap_matrix(2, 3);
    const ComplexMatrix R21 = P.transpose() * r_one_half(-u, eta) * P;
    const ComplexMatrix lhs = r_half_one(u, eta) * R21;
    const ComplexMatrix rhs = -(u + 1.5 * eta) * (u - 1.5 * eta) * ComplexMatrix::Identity(6, 6);
    return residual(lhs, rhs);
}

inline double crossing_residual(Complex u, const ModelParams& m, TransferKind kind) {
    return residual(transfer(u, m, kind), transfer(-u - m.eta, m, kind));
}

inline double commutator_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double scale = a.norm() * b.norm();
    return (a * b - b * a).norm() / (scale > 0 ? scale : 1.0);
}

struct IdentityReport {
    std::string identity;
    int points_tested = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct IdentitySuiteOptions {
    int points = 100;            ///< random spectral points for the local identities
    int transfer_points = 4;     ///< random points for transfer-matrix identities
    std::uint64_t seed = 20240611;
    double box = 2.0;            ///< random points drawn from [-box, box]^2 * eta in the complex plane
    R11Builder r11_override;     ///< test hook: replaces r11 in QYBE/RE checks and the transfer matrix
};

inline std::vector<IdentityReport> run_identity_suite(const ModelParams& m, const IdentitySuiteOptions& opt = {},
                                                      const Tolerances& tol = default_tolerances()) {
    m.validate();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-opt.box, opt.box);
    auto draw = [&] { return Complex(dist(rng), dist(rng)) * m.eta; };

    std::vector<IdentityReport> out;
    auto run = [&](const std::string& name, int n, double t, auto&& fn) {
        IdentityReport r{name, n, 0.0, t, false};
        for (int i = 0; i < n; ++i) r.max_residual = std::max(r.max_residual, fn());
        r.pass = r.max_residual <= t;
        out.push_back(r);
    };

    run("qybe", opt.points, tol.identity, [&] {
        const Complex u = draw(), v = draw();
        return qybe_residual(u, v, m.eta, opt.r11_override);
    });
    run("reflection", opt.points, tol.identity, [&] {
        const Complex u = draw(), v = draw();
        return re_residual(u, v, m, opt.r11_override);
    });
    run("dual_reflection", opt.points, tol.identity, [&] {
        const Complex u = draw(), v = draw();
        return dual_re_residual(u, v, m, opt.r11_override);
    });
    run("mixed_reflection", opt.points, tol.identity, [&] {
        const Complex u = draw(), v = draw();
        return mixed_re_residual(u, v, m);
    });
    run("unitarity", opt.points, tol.identity, [&] { return unitarity_residual(draw(), m.eta); });

    auto tm = [&](Complex u, TransferKind k) {
        if (k == TransferKind::spin11 && opt.r11_override)
            return TransferOperator(u, m, k, opt.r11_override).matrix();
        return transfer(u, m, k);
    };
    run("crossing", opt.transfer_points, tol.crossing, [&] {
        const Complex u = draw();
        return std::max(relative_diff(tm(u, TransferKind::spin11), tm(-u - m.eta, TransferKind::spin11)),
                        relative_diff(tm(u, TransferKind::spin_half_1), tm(-u - m.eta, TransferKind::spin_half_1)));
    });
    run("commutativity", opt.transfer_points, tol.commutator, [&] {
        const Complex u = draw(), v = draw();
        const ComplexMatrix a = tm(u, TransferKind::spin11), b = tm(v, TransferKind::spin11);
        const ComplexMatrix c = tm(u, TransferKind::spin_half_1), d = tm(v, TransferKind::spin_half_1);
        return std::max({commutator_residual(a, b), commutator_residual(c, d), commutator_residual(a, d)});
    });
    run("half_transfer_at_zero", 1, tol.relation, [&] {
        const ComplexMatrix t0 = tm(0.0, TransferKind::spin_half_1);
        const ComplexMatrix expect = lambda_half_at_zero(m) * ComplexMatrix::Identity(t0.rows(), t0.cols());
        return relative_diff(t0, expect);
    });
    if (m.homogeneous() && m.N >= 2) {
        run("hamiltonian", 1, tol.hamiltonian, [&] {
            return (hamiltonian(m) - hamiltonian_from_transfer(m, tol.fd_step)).norm();
        });
    }
    return out;
}

} // namespace openspin1
