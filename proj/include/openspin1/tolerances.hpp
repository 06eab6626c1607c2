#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "errors.hpp"

namespace openspin1 {

/// Every numerical threshold used by the library, in one record.
/// The CLI exposes each field by name through `--tol NAME=VALUE`.
struct Tolerances {
    // numerics
    double hermitian = 1e-10;          ///< relative Frobenius asymmetry accepted by eig_hermitian
    double eig_residual = 1e-10;       ///< ||mV - V diag(l)|| / ||m||
    double fit_residual = 1e-8;        ///< fit residual relative to max |sample|
    double fit_condition_max = 1e12;   ///< Vandermonde condition ceiling
    double root_eval = 1e-6;           ///< |P(root)| relative to max |coeff|
    double leading_coeff = 1e-12;      ///< relative size below which a leading coefficient counts as zero
    double quad_abs = 1e-10;           ///< default absolute quadrature tolerance

    // model
    double identity = 1e-10;           ///< QYBE / RE / unitarity residuals (relative Frobenius)
    double commutator = 1e-9;          ///< [t(u),t(v)] relative to ||t(u)|| ||t(v)||
    double crossing = 1e-10;
    double hamiltonian = 1e-6;         ///< ||H - t'(0) t(0)^-1||
    double fd_step = 1e-5;             ///< central-difference step for t'(0)

    // spectrum
    double common_eigen = 1e-8;        ///< transfer residual for a common eigenstate (relative)
    double degeneracy_gap = 1e-8;      ///< energies closer than this are grouped
    double rotation_residual = 1e-6;
    double relation = 1e-7;            ///< functional relations, relative
    double leading_relative = 1e-6;
    double energy_from_roots = 1e-6;
    double pair_closure = 1e-8;

    // patterns
    double bae = 1e-5;
    double pattern = 0.15;             ///< classification acceptance for the best template
    double bulk_band = 0.75;           ///< admissible |Im z - line| for bulk string members
    double axis = 1e-4;                ///< |Re z| below which a root sits on the imaginary axis

    // thermo
    double fourier = 1e-8;
    double thermo_quad = 1e-12;

    template <typename Fn>
    static constexpr void for_each_field(Fn&& fn) {
        fn("hermitian", &Tolerances::hermitian);
        fn("eig_residual", &Tolerances::eig_residual);
        fn("fit_residual", &Tolerances::fit_residual);
        fn("fit_condition_max", &Tolerances::fit_condition_max);
        fn("root_eval", &Tolerances::root_eval);
        fn("leading_coeff", &Tolerances::leading_coeff);
        fn("quad_abs", &Tolerances::quad_abs);
        fn("identity", &Tolerances::identity);
        fn("commutator", &Tolerances::commutator);
        fn("crossing", &Tolerances::crossing);
        fn("hamiltonian", &Tolerances::hamiltonian);
        fn("fd_step", &Tolerances::fd_step);
        fn("common_eigen", &Tolerances::common_eigen);
        fn("degeneracy_gap", &Tolerances::degeneracy_gap);
        fn("rotation_residual", &Tolerances::rotation_residual);
        fn("relation", &Tolerances::relation);
        fn("leading_relative", &Tolerances::leading_relative);
        fn("energy_from_roots", &Tolerances::energy_from_roots);
        fn("pair_closure", &Tolerances::pair_closure);
        fn("bae", &Tolerances::bae);
        fn("pattern", &Tolerances::pattern);
        fn("bulk_band", &Tolerances::bulk_band);
        fn("axis", &Tolerances::axis);
        fn("fourier", &Tolerances::fourier);
        fn("thermo_quad", &Tolerances::thermo_quad);
    }

    /// Sets a field by name; unknown names raise ConfigError.
    void set(std::string_view name, double value) {
        bool found = false;
        for_each_field([&](std::string_view key, double Tolerances::*member) {
            if (key == name) {
                this->*member = value;
                found = true;
            }
        });
        if (!found) throw ConfigError("unknown tolerance '" + std::string(name) + "'");
    }

    double get(std::string_view name) const {
        double out = 0.0;
        bool found = false;
        for_each_field([&](std::string_view key, double Tolerances::*member) {
            if (key == name) {
                out = this->*member;
                found = true;
            }
        });
        if (!found) throw ConfigError("unknown tolerance '" + std::string(name) + "'");
        return out;
    }
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace openspin1
