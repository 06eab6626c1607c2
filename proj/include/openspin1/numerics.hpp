#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "errors.hpp"
#include "tolerances.hpp"

namespace openspin1 {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex I_unit{0.0, 1.0};

inline std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

/// Upper bound on the number of entries of any dense matrix we are willing to build.
inline constexpr std::int64_t max_matrix_entries = std::int64_t{1} << 28;

inline void check_entries(std::int64_t rows, std::int64_t cols, const std::string& what) {
    if (rows < 0 || cols < 0) throw SizeError(what + ": negative dimension");
    if (rows != 0 && cols > max_matrix_entries / rows)
        throw SizeError(what + ": " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the dense-matrix budget; use a smaller N");
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::int64_t r = std::int64_t(a.rows()) * b.rows();
    const std::int64_t c = std::int64_t(a.cols()) * b.cols();
    check_entries(r, c, "kron");
    ComplexMatrix out(r, c);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double relative_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double scale = std::max({a.norm(), b.norm(), std::numeric_limits<double>::min()});
    return (a - b).norm() / scale;
}

struct HermitianEigen {
    Eigen::VectorXd values;  ///< ascending
    ComplexMatrix vectors;   ///< orthonormal columns
};

inline HermitianEigen eig_hermitian(const ComplexMatrix& m, const Tolerances& tol = default_tolerances()) {
    if (m.rows() != m.cols()) throw ContractError("eig_hermitian: matrix is not square");
    if (!m.allFinite()) throw ContractError("eig_hermitian: non-finite entries");
    const double scale = m.norm();
    if (scale > 0 && (m - m.adjoint()).norm() > tol.hermitian * scale)
        throw ContractError("eig_hermitian: matrix is not Hermitian (relative asymmetry " +
                            std::to_string((m - m.adjoint()).norm() / scale) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success) throw AccuracyError("eig_hermitian: solver did not converge", 0, 0);
    HermitianEigen out{es.eigenvalues(), es.eigenvectors()};
    const double res = (m * out.vectors - out.vectors * out.values.asDiagonal()).norm();
    if (scale > 0 && res > tol.eig_residual * scale * std::max<double>(1.0, std::sqrt(double(m.rows()))))
        throw AccuracyError("eig_hermitian: residual above tolerance", res / scale, res / scale);
    return out;
}

/// P(v) = sum_j c_j (v^2)^j.
struct EvenPoly {
    std::vector<Complex> coeffs;
    double fit_residual = 0.0;  ///< max |P(v_i) - y_i| / max |y_i| of the fit that produced it

    int degree() const { return int(coeffs.size()) - 1; }
    Complex leading() const { return coeffs.empty() ? Complex{} : coeffs.back(); }

    Complex eval_w(Complex w) const {
        Complex acc{};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * w + *it;
        return acc;
    }
    Complex operator()(Complex v) const { return eval_w(v * v); }

    /// sum_j |c_j| |w|^j, the natural scale for |P(w)|.
    double magnitude_w(Complex w) const {
        double acc = 0.0;
        const double aw = std::abs(w);
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * aw + std::abs(*it);
        return acc;
    }
    double max_coeff() const {
        double m = 0.0;
        for (auto c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }
};

struct PolySample {
    Complex v;
    Complex value;
};

/// Least-squares fit of an even polynomial in w = v^2 of exactly `degree` in w.
inline EvenPoly fit_even_poly(const std::vector<PolySample>& samples, int degree,
                              const Tolerances& tol = default_tolerances()) {
    if (degree < 0) throw ContractError("fit_even_poly: negative degree");
    const auto n = Eigen::Index(samples.size());
    const Eigen::Index m = degree + 1;
    if (n < m)
        throw ContractError("fit_even_poly: " + std::to_string(n) + " samples for degree " +
                            std::to_string(degree));

    ComplexMatrix A(n, m);
    ComplexVector b(n);
    double ymax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex w = samples[i].v * samples[i].v;
        Complex pw{1.0, 0.0};
        for (Eigen::Index j = 0; j < m; ++j, pw *= w) A(i, j) = pw;
        b(i) = samples[i].value;
        ymax = std::max(ymax, std::abs(b(i)));
    }

    // Condition of the column-equilibrated Vandermonde: reflects the node geometry only.
    Eigen::VectorXd colscale(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        colscale(j) = A.col(j).norm();
        if (colscale(j) == 0.0) colscale(j) = 1.0;
    }
    const ComplexMatrix As = A * colscale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<ComplexMatrix> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(m - 1) > 0 ? sv(0) / sv(m - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= tol.fit_condition_max))
        throw ConditioningError("fit_even_poly: node set ill-conditioned (condition " + std::to_string(cond) +
                                    "); respace the nodes, e.g. on a circle |v^2| = const",
                                cond);

    const ComplexVector cs = svd.solve(b);
    EvenPoly p;
    p.coeffs.resize(std::size_t(m));
    for (Eigen::Index j = 0; j < m; ++j) p.coeffs[std::size_t(j)] = cs(j) / colscale(j);

    double res = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) res = std::max(res, std::abs(p(samples[i].v) - b(i)));
    p.fit_residual = ymax > 0 ? res / ymax : res;
    if (p.fit_residual > tol.fit_residual)
        throw ReconstructionError("fit_even_poly: residual " + std::to_string(p.fit_residual) +
                                  " exceeds " + std::to_string(tol.fit_residual));
    return p;
}

namespace detail {

// Row/column power-of-two balancing before the companion eigenproblem.
inline void balance(ComplexMatrix& a) {
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < a.rows(); ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) { f *= radix; c *= radix * radix; }
            g = r * radix;
            while (c > g) { f /= radix; c /= radix * radix; }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

} // namespace detail

/// Roots in w = v^2 of an even polynomial (companion matrix, then Newton polish).
inline std::vector<Complex> even_poly_w_roots(const EvenPoly& p, const Tolerances& tol = default_tolerances()) {
    const int m = p.degree();
    if (m < 0) throw DegreeError("even_poly_roots: empty polynomial");
    if (std::abs(p.leading()) <= tol.leading_coeff * p.max_coeff() || p.leading() == Complex{})
        throw DegreeError("even_poly_roots: leading coefficient vanishes; the contract degree " +
                          std::to_string(m) + " cannot be honoured");
    if (m == 0) return {};

    ComplexMatrix comp = ComplexMatrix::Zero(m, m);
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) comp(i, m - 1) = -p.coeffs[std::size_t(i)] / p.leading();
    detail::balance(comp);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(comp, false);
    if (es.info() != Eigen::Success) throw AccuracyError("even_poly_roots: companion eigensolver failed", 0, 0);

    std::vector<Complex> ws(es.eigenvalues().data(), es.eigenvalues().data() + m);
    for (auto& w : ws) {
        for (int it = 0; it < 3; ++it) {
            Complex val{}, der{};
            for (int j = m; j >= 0; --j) {
                der = der * w + val;
                val = val * w + p.coeffs[std::size_t(j)];
            }
            if (der == Complex{}) break;
            const Complex cand = w - val / der;
            if (std::abs(p.eval_w(cand)) < std::abs(val)) w = cand;
            else break;
        }
        const double scale = p.magnitude_w(w);
        const double res = std::abs(p.eval_w(w)) / (scale > 0 ? scale : 1.0);
        if (res > tol.root_eval)
            throw AccuracyError("even_poly_roots: root fails evaluation check", res, res);
    }
    return ws;
}

/// All 2m v-roots, ordered (+sqrt(w_0), -sqrt(w_0), +sqrt(w_1), ...).
inline std::vector<Complex> even_poly_roots(const EvenPoly& p, const Tolerances& tol = default_tolerances()) {
    std::vector<Complex> out;
    for (auto w : even_poly_w_roots(p, tol)) {
        const Complex v = std::sqrt(w);
        out.push_back(v);
        out.push_back(-v);
    }
    return out;
}

/// Integral of f over [0, inf) with absolute error at most `abs_tol`.
template <typename F>
double quad_semiinfinite(F&& f, double abs_tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double value = integrator.integrate(std::forward<F>(f), 0.0, std::numeric_limits<double>::infinity(),
                                              1e-14, &err, &l1, &levels);
    if (!std::isfinite(value) || err > abs_tol)
        throw AccuracyError("quad_semiinfinite: error estimate " + fmt_sci(err) + " above " + fmt_sci(abs_tol),
                            value, err);
    return value;
}

/// Integral of an even integrand over the real line.
template <typename F>
double quad_real_line_even(F&& f, double abs_tol) {
    return 2.0 * quad_semiinfinite(std::forward<F>(f), abs_tol / 2.0);
}

/// int_0^inf f(t) sin(omega t) dt and its error estimate (omega > 0).
template <typename F>
std::pair<double, double> fourier_sin_semiinfinite(F&& f, double omega, double rel_tol = 1e-12) {
    boost::math::quadrature::ooura_fourier_sin<double> integrator(rel_tol);
    return integrator.integrate(std::forward<F>(f), omega);
}

template <typename F>
std::pair<double, double> fourier_cos_semiinfinite(F&& f, double omega, double rel_tol = 1e-12) {
    boost::math::quadrature::ooura_fourier_cos<double> integrator(rel_tol);
    return integrator.integrate(std::forward<F>(f), omega);
}

} // namespace openspin1
