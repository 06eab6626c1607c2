#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "spectrum.hpp"
#include "tolerances.hpp"

namespace openspin1 {

/// One symbolic root position of a regime template, in units of eta.
struct Descriptor {
    enum class Kind {
        zero,    ///< the root 0
        real,    ///< an extra real root (z0, z1, z2)
        fixed,   ///< value * i
        line,    ///< bulk string member with imaginary part `value`
        zx,      ///< (z_x + value) i
        lambda,  ///< +-lambda + value * i
    };
    Kind kind;
    double value = 0.0;

    std::string name() const {
        auto num = [](double x) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", x);
            return std::string(buf);
        };
        switch (kind) {
        case Kind::zero: return "0";
        case Kind::real: return "real";
        case Kind::fixed: return num(value) + "i";
        case Kind::line: return "string@" + num(value) + "i";
        case Kind::zx: return value == 0 ? "z_x i" : "(z_x" + std::string(value > 0 ? "+" : "") + num(value) + ")i";
        case Kind::lambda: return "+-lambda+" + num(value) + "i";
        }
        return "?";
    }
};

struct RegimeTemplate {
    char label;
    std::vector<Descriptor> zbar;   ///< roots of Lambda^(1/2,1), bulk lines expanded
    std::vector<Descriptor> zbar1;  ///< roots of Lambda^(1,1)
    int bulk_count = 0;             ///< j_max = k_max

    bool uses_zx() const {
        return std::any_of(zbar.begin(), zbar.end(), [](const Descriptor& d) { return d.kind == Descriptor::Kind::zx; });
    }
    bool uses_lambda() const {
        return std::any_of(zbar.begin(), zbar.end(),
                           [](const Descriptor& d) { return d.kind == Descriptor::Kind::lambda; });
    }
};

inline const std::string& regime_labels() {
    static const std::string s = "ABCDEFGHIJKL";
    return s;
}

/// The twelve ground-state templates expanded at N.
inline std::vector<RegimeTemplate> regime_templates(double p, double q, int N) {
    using K = Descriptor::Kind;
    const double aq = std::abs(q);
    const Descriptor zero{K::zero}, real{K::real};
    auto fix = [](double c) { return Descriptor{K::fixed, c}; };
    auto zx = [](double off) { return Descriptor{K::zx, off}; };
    auto lam = [](double c) { return Descriptor{K::lambda, c}; };

    std::vector<RegimeTemplate> out;
    auto add = [&](char label, std::vector<Descriptor> zb, std::vector<Descriptor> zb1, int bulk) {
        for (int j = 0; j < bulk; ++j) zb.push_back({K::line, 1.5});
        for (int k = 0; k < bulk; ++k) {
            zb1.push_back({K::line, 1.0});
            zb1.push_back({K::line, 2.0});
        }
        out.push_back({label, std::move(zb), std::move(zb1), bulk});
    };
    add('A', {real}, {zero, real, real}, N);
    add('B', {real, zx(0), fix(1 + p)}, {zero, real, real, zx(-0.5), zx(0.5), fix(0.5 + p), fix(1.5 + p)}, N - 2);
    add('C', {real, zx(0), fix(1 + q)}, {zero, real, real, zx(-0.5), zx(0.5), fix(0.5 + q), fix(1.5 + q)}, N - 2);
    add('D', {real, fix(1 + p), fix(1 + q)},
        {zero, real, real, fix(0.5 + p), fix(1.5 + p), fix(0.5 + q), fix(1.5 + q)}, N - 2);
    add('E', {real}, {zero, real, fix(0.5 + aq)}, N);
    add('F', {real, zx(0), fix(1 + p)},
        {zero, real, zx(-0.5), zx(0.5), fix(0.5 + p), fix(1.5 + p), fix(0.5 + aq)}, N - 2);
    add('G', {zx(0), lam(1.0), lam(1.0)}, {zero, real, zx(-0.5), zx(0.5), lam(1.5), lam(1.5), fix(1.5 - aq)}, N - 2);
    add('H', {fix(1 + p), lam(1.0), lam(1.0)},
        {zero, real, fix(0.5 + p), fix(1.5 + p), fix(1.5 - aq), lam(1.5), lam(1.5)}, N - 2);
    add('I', {fix(aq)}, {zero, fix(aq - 0.5), fix(aq + 0.5)}, N);
    add('J', {zx(0), fix(aq), fix(1 + p)},
        {zero, zx(-0.5), zx(0.5), fix(aq - 0.5), fix(aq + 0.5), fix(0.5 + p), fix(1.5 + p)}, N - 2);
    add('K', {zx(0)}, {zero, zx(-0.5), zx(0.5)}, N);
    add('L', {fix(1 + p)}, {zero, fix(0.5 + p), fix(1.5 + p)}, N);
    return out;
}

struct RootAssignment {
    std::string family;      ///< "zbar" or "zbar1"
    std::string descriptor;
    Complex root;            ///< zbar / eta
    double deviation = 0.0;  ///< anchors: distance to the descriptor; bulk members: |Im - line|
    bool bulk = false;
};

struct TemplateScore {
    char label;
    double misfit;
    double zx = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct PatternReport {
    bool classified = false;
    char best_label = '?';
    double misfit = std::numeric_limits<double>::infinity();
    char second_label = '?';
    double second_misfit = std::numeric_limits<double>::infinity();
    double zx = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double bulk_deviation = 0.0;  ///< largest |Im - line| among bulk string members of the best template
    std::vector<RootAssignment> assignments;
    std::vector<Complex> unassigned;
    std::vector<TemplateScore> scores;  ///< in template order A..L

    double ratio() const { return second_misfit / std::max(misfit, std::numeric_limits<double>::min()); }
};

namespace detail {

inline constexpr double infeasible_cost = 1e3;

// Perfect matching on the bipartite graph allowed(i, j); returns match_of_col or empty.
inline std::vector<int> perfect_matching(const std::vector<std::vector<char>>& allowed) {
    const int n = int(allowed.size());
    const int m = n ? int(allowed[0].size()) : 0;
    std::vector<int> col_match(std::size_t(m), -1);
    std::vector<char> seen;
    std::function<bool(int)> augment = [&](int r) {
        for (int c = 0; c < m; ++c) {
            if (!allowed[std::size_t(r)][std::size_t(c)] || seen[std::size_t(c)]) continue;
            seen[std::size_t(c)] = 1;
            if (col_match[std::size_t(c)] < 0 || augment(col_match[std::size_t(c)])) {
                col_match[std::size_t(c)] = r;
                return true;
            }
        }
        return false;
    };
    for (int r = 0; r < n; ++r) {
        seen.assign(std::size_t(m), 0);
        if (!augment(r)) return {};
    }
    return col_match;
}

struct Bottleneck {
    double value = infeasible_cost;
    std::vector<int> col_match;  ///< column -> row
};

// Minimizes the largest assigned cost over perfect matchings of a square cost matrix.
inline Bottleneck bottleneck_assignment(const std::vector<std::vector<double>>& cost) {
    std::vector<double> vals;
    for (const auto& row : cost) vals.insert(vals.end(), row.begin(), row.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    auto feasible = [&](double thr) {
        std::vector<std::vector<char>> allowed(cost.size());
        for (std::size_t i = 0; i < cost.size(); ++i)
            for (double c : cost[i]) allowed[i].push_back(c <= thr);
        return perfect_matching(allowed);
    };
    std::size_t lo = 0, hi = vals.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (!feasible(vals[mid]).empty()) hi = mid;
        else lo = mid + 1;
    }
    return {vals[lo], feasible(vals[lo])};
}

struct Column {
    const Descriptor* anchor = nullptr;
    double line = 0.0;
    bool on_axis = false;
};

inline double anchor_deviation(const Descriptor& d, Complex z, double zx, double lam) {
    using K = Descriptor::Kind;
    switch (d.kind) {
    case K::zero: return std::abs(z);
    case K::real: return std::abs(z.imag());
    case K::fixed: return std::abs(z - Complex(0, d.value));
    case K::zx:
        if (d.value <= 0) return std::abs(z - Complex(0, zx + d.value));
        // upper member: purely imaginary at or above z_x + 1/2
        return std::abs(z.real()) + std::max(0.0, zx + d.value - z.imag());
    case K::lambda:
        return std::min(std::abs(z - Complex(lam, d.value)), std::abs(z - Complex(-lam, d.value)));
    case K::line: break;
    }
    return infeasible_cost;
}

struct FamilyFit {
    double misfit = infeasible_cost;
    double bulk_deviation = 0.0;
    std::vector<RootAssignment> assignments;
};

inline FamilyFit fit_family(const std::vector<Descriptor>& desc, const std::vector<Complex>& roots, double zx,
                            double lam, const Tolerances& tol, const char* family) {
    std::vector<Column> cols;
    std::map<double, int> lines;
    for (const auto& d : desc) {
        if (d.kind == Descriptor::Kind::line) ++lines[d.value];
        else cols.push_back({&d, 0.0, false});
    }
    for (const auto& [c, count] : lines)
        for (int i = 0; i < count; ++i) cols.push_back({nullptr, c, i < count % 2});

    std::vector<std::vector<double>> cost(roots.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const Complex z = roots[i];
            if (cols[j].anchor) {
                cost[i][j] = anchor_deviation(*cols[j].anchor, z, zx, lam);
            } else {
                const bool band = std::abs(z.imag() - cols[j].line) <= tol.bulk_band;
                const bool axis = std::abs(z.real()) < tol.axis;
                cost[i][j] = (band && axis == cols[j].on_axis) ? 0.0 : infeasible_cost;
            }
        }
    FamilyFit fit;
    if (roots.empty()) {
        fit.misfit = 0.0;
        return fit;
    }
    const auto b = bottleneck_assignment(cost);
    fit.misfit = b.value;
    for (std::size_t j = 0; j < cols.size() && !b.col_match.empty(); ++j) {
        const Complex z = roots[std::size_t(b.col_match[j])];
        RootAssignment a;
        a.family = family;
        a.root = z;
        if (cols[j].anchor) {
            a.descriptor = cols[j].anchor->name();
            a.deviation = cost[std::size_t(b.col_match[j])][j];
        } else {
            a.descriptor = Descriptor{Descriptor::Kind::line, cols[j].line}.name();
            a.deviation = std::abs(z.imag() - cols[j].line);
            a.bulk = true;
            fit.bulk_deviation = std::max(fit.bulk_deviation, a.deviation);
        }
        fit.assignments.push_back(a);
    }
    return fit;
}

struct TemplateFit {
    double misfit = std::numeric_limits<double>::infinity();
    double zx = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    FamilyFit zbar, zbar1;
};

inline TemplateFit fit_template(const RegimeTemplate& t, const std::vector<Complex>& zb,
                                const std::vector<Complex>& zb1, const Tolerances& tol) {
    TemplateFit best;
    if (t.bulk_count < 0 || t.zbar.size() != zb.size() || t.zbar1.size() != zb1.size()) return best;
    std::vector<double> zxs{0.0}, lams{0.0};
    if (t.uses_zx()) {
        zxs.clear();
        for (auto z : zb)
            if (z.imag() > 1.5) zxs.push_back(z.imag());
        if (zxs.empty()) return best;
    }
    if (t.uses_lambda()) {
        std::set<double> s;
        for (auto z : zb) s.insert(std::abs(z.real()));
        for (auto z : zb1) s.insert(std::abs(z.real()));
        lams.assign(s.begin(), s.end());
    }
    for (double zx : zxs)
        for (double lam : lams) {
            auto a = fit_family(t.zbar, zb, zx, lam, tol, "zbar");
            auto b = fit_family(t.zbar1, zb1, zx, lam, tol, "zbar1");
            const double score = std::max(a.misfit, b.misfit);
            if (score < best.misfit) {
                best.misfit = score;
                best.zx = t.uses_zx() ? zx : std::numeric_limits<double>::quiet_NaN();
                best.lambda = t.uses_lambda() ? lam : std::numeric_limits<double>::quiet_NaN();
                best.zbar = std::move(a);
                best.zbar1 = std::move(b);
            }
        }
    return best;
}

inline std::vector<Complex> scaled(const std::vector<Complex>& v, double eta) {
    std::vector<Complex> out;
    for (auto z : v) out.push_back(z / eta);
    return out;
}

} // namespace detail

/// Scores the roots against all twelve templates; best is accepted when its misfit is within tol.pattern.
inline PatternReport classify(const RootSet& roots, const ModelParams& m, const Tolerances& tol = default_tolerances()) {
    const auto zb = detail::scaled(roots.zbar, roots.eta);
    const auto zb1 = detail::scaled(roots.zbar1, roots.eta);
    PatternReport rep;
    std::vector<detail::TemplateFit> fits;
    for (const auto& t : regime_templates(m.p(), m.q(), m.N)) {
        fits.push_back(detail::fit_template(t, zb, zb1, tol));
        rep.scores.push_back({t.label, fits.back().misfit, fits.back().zx, fits.back().lambda});
    }
    std::vector<std::size_t> order(fits.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fits[a].misfit < fits[b].misfit; });

    const auto& best = fits[order[0]];
    rep.misfit = best.misfit;
    rep.second_label = rep.scores[order[1]].label;
    rep.second_misfit = fits[order[1]].misfit;
    rep.zx = best.zx;
    rep.lambda = best.lambda;
    rep.bulk_deviation = std::max(best.zbar.bulk_deviation, best.zbar1.bulk_deviation);
    rep.assignments = best.zbar.assignments;
    rep.assignments.insert(rep.assignments.end(), best.zbar1.assignments.begin(), best.zbar1.assignments.end());
    rep.classified = best.misfit <= tol.pattern;
    rep.best_label = rep.classified ? rep.scores[order[0]].label : '?';
    if (!rep.classified) {
        rep.unassigned = zb;
        rep.unassigned.insert(rep.unassigned.end(), zb1.begin(), zb1.end());
        rep.assignments.clear();
    }
    return rep;
}

struct BaeReport {
    std::vector<double> residuals;     ///< |log(LHS/RHS)| per zbar_l
    std::vector<double> pole_distance; ///< smallest distance of zbar_l to a singular point
    double max_residual = 0.0;
    std::vector<std::string> warnings;
};

/// Left-hand side of the zero-root Bethe equation at zbar (eta = 1 units).
inline Complex bae_lhs(Complex z, int N) {
    const Complex i = I_unit;
    return std::pow((z - 2.0 * i) * (z + i) / ((z + 2.0 * i) * (z - i)), 2 * N);
}

inline Complex bae_rhs(Complex z, const std::vector<Complex>& zbar1, double p, double q) {
    const Complex i = I_unit;
    Complex r = (z + 1.5 * i) / (z - 1.5 * i) * (z - 0.5 * i) / (z + 0.5 * i);
    r *= (z - i * p) / (z + i * p) * (z + i * p + i) / (z - i * p - i);
    r *= (z - i * q) / (z + i * q) * (z + i * q + i) / (z - i * q - i);
    for (auto w : zbar1) r *= (z - w - 0.5 * i) / (z - w + 0.5 * i) * (z + w - 0.5 * i) / (z + w + 0.5 * i);
    return r;
}

/// Residual of the homogeneous zero-root Bethe equations for each zbar_l.
inline BaeReport bae_residual(const RootSet& roots, const ModelParams& m, double pole_warning = 1e-8) {
    if (!m.homogeneous()) throw ContractError("bae_residual: requires homogeneous inhomogeneities");
    const double p = m.p(), q = m.q();
    const auto zb = detail::scaled(roots.zbar, roots.eta);
    const auto zb1 = detail::scaled(roots.zbar1, roots.eta);
    BaeReport rep;
    for (auto z : zb) {
        std::vector<Complex> poles;
        for (double c : {2.0, 1.0, 1.5, 0.5, p, p + 1, q, q + 1}) {
            poles.emplace_back(0, c);
            poles.emplace_back(0, -c);
        }
        for (auto w : zb1)
            for (double s : {0.5, -0.5}) {
                poles.push_back(w + Complex(0, s));
                poles.push_back(-w + Complex(0, s));
            }
        double dist = std::numeric_limits<double>::infinity();
        for (auto pz : poles) dist = std::min(dist, std::abs(z - pz));
        rep.pole_distance.push_back(dist);
        if (dist < pole_warning)
            rep.warnings.push_back("root " + std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
                                   "i lies within " + std::to_string(dist) + " of a singular point");
        const double r = std::abs(std::log(bae_lhs(z, m.N) / bae_rhs(z, zb1, p, q)));
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

struct PairMatch {
    Complex zbar;   ///< -zbar_l, the member with negative imaginary part
    Complex zbar1;  ///< the matched zbar1 form (signed)
    double gap = 0.0;
};

/// For each zbar_l off the real axis, the nearest +-zbar1_k after the -i/2 shift (eta = 1 units).
inline std::vector<PairMatch> pairing_check(const RootSet& roots, double real_eps = 1e-6) {
    const auto zb = detail::scaled(roots.zbar, roots.eta);
    const auto zb1 = detail::scaled(roots.zbar1, roots.eta);
    std::vector<PairMatch> out;
    for (auto z : zb) {
        if (z.imag() <= real_eps) continue;
        const Complex zl = -z;
        PairMatch best{zl, {}, std::numeric_limits<double>::infinity()};
        for (auto w : zb1)
            for (Complex s : {w, -w}) {
                const double g = std::abs(zl - s + 0.5 * I_unit);
                if (g < best.gap) best = {zl, s, g};
            }
        out.push_back(best);
    }
    return out;
}

/// Gap of the bulk two-string member closest to the imaginary axis.
inline std::optional<PairMatch> central_string_match(const std::vector<PairMatch>& matches,
                                                     const Tolerances& tol = default_tolerances()) {
    std::optional<PairMatch> best;
    for (const auto& mt : matches) {
        if (std::abs(-mt.zbar.imag() - 1.5) > tol.bulk_band) continue;
        if (!best || std::abs(mt.zbar.real()) < std::abs(best->zbar.real())) best = mt;
    }
    return best;
}

struct RegimeProbe {
    PatternReport report;
    GroundStateRoots ground;
};

inline RegimeProbe regime_probe_full(double p, double q, int N, const Tolerances& tol = default_tolerances()) {
    const auto m = ModelParams::from_pq(N, p, q);
    RegimeProbe r{{}, ground_state_roots(m, tol)};
    r.report = classify(r.ground.roots, m, tol);
    return r;
}

/// Empirical regime label of the ground state at (p, q).
inline char regime_probe(double p, double q, int N, const Tolerances& tol = default_tolerances()) {
    const auto r = regime_probe_full(p, q, N, tol);
    if (!r.report.classified)
        throw ClassificationError("regime_probe: no template within " + std::to_string(tol.pattern) +
                                  " (best misfit " + std::to_string(r.report.misfit) + ")");
    return r.report.best_label;
}

} // namespace openspin1
