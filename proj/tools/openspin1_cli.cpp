#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "openspin1/errors.hpp"
#include "openspin1/io.hpp"
#include "openspin1/model.hpp"
#include "openspin1/parallel.hpp"
#include "openspin1/patterns.hpp"
#include "openspin1/spectrum.hpp"
#include "openspin1/thermo.hpp"

namespace fs = std::filesystem;
using namespace openspin1;

namespace {

enum Exit { ok = 0, check_failed = 1, usage = 2, numeric = 3 };

struct Context {
    RunConfig cfg;
    fs::path out;
    std::string command;

    unsigned workers() const { return cfg.workers > 0 ? unsigned(cfg.workers) : default_workers(); }
};

void report_error(const std::string& command, const std::string& code, const std::string& message,
                  const std::optional<fs::path>& out) {
    Json j{{"error", Json{{"command", command}, {"code", code}, {"message", message}}}};
    std::cerr << j.dump() << "\n";
    if (!out) return;
    try {
        write_text(*out / "error.json", j.dump(2) + "\n");
    } catch (...) {
    }
}

int cmd_verify(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ModelParams m = cfg.model();
    IdentitySuiteOptions opt;
    opt.points = cfg.points;
    opt.transfer_points = cfg.transfer_points;
    opt.seed = cfg.seed;
    if (cfg.sabotage == "r11")
        opt.r11_override = [](Complex u, double eta) {
            ComplexMatrix r = r11(u, eta);
            r(1, 3) *= 1.1;
            return r;
        };

    const auto reports = run_identity_suite(m, opt, cfg.tol);
    Json ids = Json::array();
    std::vector<std::string> failed;
    for (const auto& r : reports) {
        ids.push_back(to_json(r));
        std::printf("%-22s points=%-4d max_residual=%.3e tol=%.1e %s\n", r.identity.c_str(), r.points_tested,
                    r.max_residual, r.tolerance, r.pass ? "PASS" : "FAIL");
        if (!r.pass) failed.push_back(r.identity);
    }
    write_json(ctx.out / "verify.json", cfg, ctx.command,
               Json{{"params", to_json(m)}, {"identities", ids}, {"pass", failed.empty()}});
    if (!failed.empty()) {
        std::string names;
        for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
        std::cerr << "identity check failed: " << names << "\n";
        return check_failed;
    }
    return ok;
}

struct StateResult {
    EigenState state;
    RootSet roots;
    RelationReport relations;
};

std::vector<StateResult> solve_states(const Context& ctx, bool all_states) {
    const auto& cfg = ctx.cfg;
    const ModelParams m = cfg.model();
    DiagonalizeOptions opt;
    if (!all_states) opt.max_states = 1;
    const auto states = diagonalize(m, opt, cfg.tol);
    return parallel_map(
        states,
        [&](const EigenState& s) {
            StateResult r{s, {}, {}};
            const LambdaPair pair = reconstruct_lambda(s, m, {}, cfg.tol);
            r.relations = verify_relations(pair, m, cfg.fusion_points, cfg.seed);
            r.roots = extract_roots(pair, cfg.tol);
            r.state.vector.resize(0);
            return r;
        },
        ctx.workers());
}

Json pairing_json(const RootSet& roots) {
    Json pairs = Json::array();
    const auto matches = pairing_check(roots);
    for (const auto& pm : matches)
        pairs.push_back(Json{{"zbar", jcomplex(pm.zbar)}, {"zbar1", jcomplex(pm.zbar1)}, {"gap", jnum(pm.gap)}});
    Json j{{"matches", pairs}};
    const auto central = central_string_match(matches);
    j["central_gap"] = central ? jnum(central->gap) : Json(nullptr);
    return j;
}

void write_roots(const Context& ctx, const std::vector<StateResult>& results, const ModelParams& m) {
    Json records = Json::array();
    CsvTable csv;
    for (const auto& r : results) {
        records.push_back(to_json(r.roots, m, r.state.index, r.state.energy));
        append_root_rows(csv, r.roots, r.state.index, r.state.energy);
    }
    write_json(ctx.out / "roots.json", ctx.cfg, ctx.command, Json{{"records", records}});
    write_csv(ctx.out / "roots.csv", ctx.cfg, ctx.command, csv);
}

int cmd_spectrum(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ModelParams m = cfg.model();
    const auto results = solve_states(ctx, cfg.all_states);

    Json states = Json::array();
    bool pass = true;
    for (const auto& r : results) {
        const double e_roots = energy_from_roots(r.roots);
        const double de = std::abs(e_roots - r.state.energy);
        const bool state_ok = r.relations.max() <= cfg.tol.relation && de <= cfg.tol.energy_from_roots;
        pass = pass && state_ok;
        Json tr = Json::object();
        for (const auto& [k, v] : r.state.transfer_residuals) tr[k] = jnum(v);
        states.push_back(Json{{"index", r.state.index},
                              {"energy", jnum(r.state.energy)},
                              {"energy_from_roots", jnum(e_roots)},
                              {"energy_deviation", jnum(de)},
                              {"common_eigenstate", r.state.common},
                              {"transfer_residuals", tr},
                              {"relations", to_json(r.relations)},
                              {"pass", state_ok}});
    }

    const auto& ground = results.front();
    const PatternReport pattern = classify(ground.roots, m, cfg.tol);
    Json body{{"params", to_json(m)}, {"states", states}, {"pattern", to_json(pattern)}};
    if (m.homogeneous()) {
        body["bae"] = to_json(bae_residual(ground.roots, m));
        body["pairing"] = pairing_json(ground.roots);
    }
    body["pass"] = pass;
    write_json(ctx.out / "spectrum.json", cfg, ctx.command, body);
    write_roots(ctx, results, m);

    std::printf("N=%d p=%g q=%g states=%zu ground_energy=%.12f label=%c misfit=%.3e ratio=%.3e\n", m.N, cfg.p,
                cfg.q, results.size(), ground.state.energy, pattern.best_label, pattern.misfit, pattern.ratio());
    if (!pass) {
        std::cerr << "spectrum check failed: relation or root-energy residual above tolerance\n";
        return check_failed;
    }
    return ok;
}

int cmd_roots(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const ModelParams m = cfg.model();
    const auto results = solve_states(ctx, cfg.all_states);
    write_roots(ctx, results, m);

    const auto& ground = results.front();
    Json body{{"params", to_json(m)}, {"energy", jnum(ground.state.energy)}};
    bool pass = true;
    if (m.homogeneous()) {
        const BaeReport bae = bae_residual(ground.roots, m);
        pass = bae.max_residual <= cfg.tol.bae;
        body["bae"] = to_json(bae);
        body["pairing"] = pairing_json(ground.roots);
        std::printf("N=%d ground_energy=%.12f bae_max_residual=%.3e\n", m.N, ground.state.energy, bae.max_residual);
    }
    body["pass"] = pass;
    write_json(ctx.out / "roots_report.json", cfg, ctx.command, body);
    if (!pass) {
        std::cerr << "Bethe-equation residual above tolerance\n";
        return check_failed;
    }
    return ok;
}

std::vector<std::pair<double, double>> grid_points(const RunConfig& cfg) {
    const auto ps = cfg.grid_p.empty() ? std::vector<double>{cfg.p} : cfg.grid_p;
    const auto qs = cfg.grid_q.empty() ? std::vector<double>{cfg.q} : cfg.grid_q;
    std::vector<std::pair<double, double>> pts;
    for (double p : ps)
        for (double q : qs) pts.emplace_back(p, q);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

ModelParams model_at(const RunConfig& cfg, int N, double p, double q) {
    RunConfig c = cfg;
    c.N = N;
    c.p = p;
    c.q = q;
    c.theta_bar.clear();
    return c.model();
}

PatternReport probe_pattern(const RunConfig& cfg, int N, double p, double q) {
    const ModelParams m = model_at(cfg, N, p, q);
    return classify(ground_state_roots(m, cfg.tol).roots, m, cfg.tol);
}

int cmd_classify(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto pts = grid_points(cfg);
    struct Row {
        std::optional<PatternReport> report;
        std::string error;
    };
    const auto rows = parallel_map(
        pts,
        [&](const std::pair<double, double>& pq) {
            Row r;
            try {
                r.report = probe_pattern(cfg, cfg.N, pq.first, pq.second);
            } catch (const Error& e) {
                r.error = e.code() + ": " + e.what();
            }
            return r;
        },
        ctx.workers());

    CsvTable csv{{"p", "q", "label", "misfit"}, {}};
    Json reports = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& [p, q] = pts[i];
        const auto& r = rows[i];
        const char label = r.report ? r.report->best_label : '?';
        const double misfit = r.report ? r.report->misfit : std::numeric_limits<double>::quiet_NaN();
        csv.rows.push_back({format_double(p), format_double(q), std::string(1, label), format_double(misfit)});
        Json j{{"p", jnum(p)}, {"q", jnum(q)}, {"N", cfg.N}};
        if (r.report) j["report"] = to_json(*r.report);
        else j["error"] = r.error;
        reports.push_back(j);
        std::printf("p=%g q=%g label=%c misfit=%.3e%s%s\n", p, q, label, misfit, r.error.empty() ? "" : " error=",
                    r.error.c_str());
    }
    write_csv(ctx.out / "labels.csv", cfg, ctx.command, csv);
    write_json(ctx.out / "classify.json", cfg, ctx.command, Json{{"points", reports}});
    return ok;
}

int cmd_thermo(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const FourierReport fourier = fourier_pair_check(cfg.tol);
    Json body{{"fourier", Json{{"max_error", jnum(fourier.max_error)},
                                {"tolerance", jnum(cfg.tol.fourier)},
                                {"checks", fourier.entries.size()},
                                {"pass", fourier.pass}}}};
    std::printf("fourier max_error=%.3e %s\n", fourier.max_error, fourier.pass ? "PASS" : "FAIL");
    if (!fourier.pass) {
        write_json(ctx.out / "thermo.json", cfg, ctx.command, body);
        std::cerr << "Fourier convention check failed\n";
        return check_failed;
    }

    const double p = cfg.p, q = cfg.q;
    char regime = cfg.regime == "auto" ? '?' : cfg.regime[0];
    std::optional<double> zx = cfg.zx, lambda = cfg.lambda;
    if (cfg.regime == "auto") {
        const PatternReport rep = probe_pattern(cfg, cfg.probe_N, p, q);
        if (!rep.classified)
            throw ClassificationError("regime probe at N=" + std::to_string(cfg.probe_N) +
                                      " matched no template; set thermo.regime explicitly");
        regime = rep.best_label;
        if (!zx && std::isfinite(rep.zx)) zx = rep.zx;
        if (!lambda && std::isfinite(rep.lambda)) lambda = rep.lambda;
        body["probe"] = Json{{"N", cfg.probe_N}, {"label", std::string(1, regime)}, {"misfit", jnum(rep.misfit)}};
    }

    SurfaceEnergyResult res = extrapolate_surface_energy(
        p, q, cfg.sizes(), extrapolation_model_from_string(cfg.extrapolation),
        [&](int N) { return ground_energy_ed(model_at(cfg, N, p, q)); });
    res.regime = std::string(1, regime);
    res.integral_value = ground_energy_thermo(regime, p, q, cfg.thermo_N, zx, lambda, cfg.tol) + cfg.thermo_N;
    res.warnings.push_back("the per-regime integral recipe outside regime B is derived functionality");

    body["regime"] = std::string(1, regime);
    body["zx"] = zx ? jnum(*zx) : Json(nullptr);
    body["lambda"] = lambda ? jnum(*lambda) : Json(nullptr);
    body["thermo_N"] = cfg.thermo_N;
    body["surface_energy"] = to_json(res);
    write_json(ctx.out / "thermo.json", cfg, ctx.command, body);
    std::printf("regime=%c E_b closed=%.12g integral=%.12g extrapolated=%.12g (+- %.2g, %s)\n", regime,
                res.closed_form, res.integral_value, res.extrapolated, res.uncertainty, res.model.c_str());
    return ok;
}

int cmd_sweep(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto pts = grid_points(cfg);
    const auto sizes = cfg.sizes();
    const auto model = extrapolation_model_from_string(cfg.extrapolation);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    struct Row {
        std::string regime = "-";
        double closed = std::numeric_limits<double>::quiet_NaN();
        double extrapolated = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    const auto rows = parallel_map(
        pts,
        [&](const std::pair<double, double>& pq) {
            Row r;
            const auto [p, q] = pq;
            try {
                if (cfg.sweep_probe_N > 0) {
                    const PatternReport rep = probe_pattern(cfg, cfg.sweep_probe_N, p, q);
                    r.regime = std::string(1, rep.best_label);
                }
                r.closed = surface_energy_closed(p, q);
                if (cfg.extrapolate)
                    r.extrapolated = extrapolate_surface_energy(p, q, sizes, model, [&](int N) {
                                         return ground_energy_ed(model_at(cfg, N, p, q));
                                     }).extrapolated;
            } catch (const Error& e) {
                r.error = e.code();
            }
            return r;
        },
        ctx.workers());

    CsvTable csv{{"p", "q", "regime", "E_b_closed", "E_b_extrapolated", "abs_deviation", "error"}, {}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = rows[i];
        const double dev = cfg.extrapolate ? std::abs(r.extrapolated - r.closed) : nan;
        csv.rows.push_back({format_double(pts[i].first), format_double(pts[i].second), r.regime,
                            format_double(r.closed), format_double(r.extrapolated), format_double(dev), r.error});
    }
    write_csv(ctx.out / "sweep.csv", cfg, ctx.command, csv);
    std::printf("sweep: %zu points written to %s\n", pts.size(), (ctx.out / "sweep.csv").string().c_str());
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"openspin1: spin-1 Heisenberg chain with non-diagonal open boundaries"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", tool_version());

    std::string config_path, out_dir = "out";
    std::optional<long long> seed;
    std::optional<int> n_max;
    std::vector<std::string> tols;
    app.add_option("--config", config_path, "INI or JSON config file");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "random seed for identity and relation probes");
    app.add_option("--n-max", n_max, "largest chain length any command may build");
    app.add_option("--tol", tols, "override a tolerance, NAME=VALUE (repeatable)");

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const Context&);
    };
    const std::vector<Sub> subs{
        {"verify", "check the integrability identities", cmd_verify},
        {"spectrum", "diagonalize, reconstruct eigenvalues, extract and classify roots", cmd_spectrum},
        {"roots", "zero roots with Bethe-equation and pairing checks", cmd_roots},
        {"classify", "ground-state root pattern over a (p, q) grid", cmd_classify},
        {"thermo", "thermodynamic-limit surface energy and finite-size extrapolation", cmd_thermo},
        {"sweep", "surface-energy CSV over a (p, q) grid", cmd_sweep},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, s.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("", "usage", e.what(), std::nullopt);
        return usage;
    }

    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out = out_dir;
    const Sub& sub = *std::find_if(subs.begin(), subs.end(), [&](const Sub& s) { return ctx.command == s.name; });

    try {
        if (!config_path.empty()) ctx.cfg = load_config(config_path);
        if (seed) {
            if (*seed < 0) throw ConfigError("--seed must be non-negative");
            ctx.cfg.seed = std::uint64_t(*seed);
        }
        if (n_max) ctx.cfg.n_max = *n_max;
        for (const auto& t : tols) {
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw ConfigError("--tol expects NAME=VALUE, got '" + t + "'");
            ctx.cfg.tol.set(t.substr(0, eq), parse_double(t.substr(eq + 1), "--tol " + t.substr(0, eq)));
        }
        ctx.cfg.validate();
    } catch (const Error& e) {
        report_error(ctx.command, e.code(), e.what(), std::nullopt);
        return usage;
    }

    try {
        return sub.run(ctx);
    } catch (const ConfigError& e) {
        report_error(ctx.command, e.code(), e.what(), ctx.out);
        return usage;
    } catch (const ParameterError& e) {
        report_error(ctx.command, e.code(), e.what(), ctx.out);
        return usage;
    } catch (const DomainError& e) {
        report_error(ctx.command, e.code(), e.what(), ctx.out);
        return usage;
    } catch (const ConventionError& e) {
        report_error(ctx.command, e.code(), e.what(), ctx.out);
        return check_failed;
    } catch (const Error& e) {
        report_error(ctx.command, e.code(), e.what(), ctx.out);
        return numeric;
    } catch (const std::exception& e) {
        report_error(ctx.command, "internal", e.what(), ctx.out);
        return numeric;
    }
}
