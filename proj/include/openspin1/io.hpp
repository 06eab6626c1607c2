#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "errors.hpp"
#include "model.hpp"
#include "patterns.hpp"
#include "spectrum.hpp"
#include "thermo.hpp"
#include "tolerances.hpp"

#ifndef OPENSPIN1_VERSION
#define OPENSPIN1_VERSION "0.0.0"
#endif

namespace openspin1 {

using Json = nlohmann::ordered_json;

inline const char* tool_version() { return OPENSPIN1_VERSION; }

/// 17 significant digits, '.' decimal, independent of the global locale.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    if (b < e && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e) throw ConfigError(what + ": '" + s + "' is not a number");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
    const double v = parse_double(s, what);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(what + ": '" + s + "' is not an integer");
    return static_cast<long long>(v);
}

inline bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(what + ": '" + s + "' is not a boolean");
}

/// "a,b,c" or "start:stop:count" (inclusive linspace); empty string gives an empty list.
inline std::vector<double> parse_values(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (s.find_first_not_of(" \t") == std::string::npos) return out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
        if (parts.size() != 3) throw ConfigError(what + ": range must be start:stop:count");
        const double a = parse_double(parts[0], what), b = parse_double(parts[1], what);
        const long long n = parse_int(parts[2], what);
        if (n < 1) throw ConfigError(what + ": range count must be positive");
        for (long long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
        return out;
    }
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) out.push_back(parse_double(t, what));
    return out;
}

inline std::string join_values(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

struct RunConfig {
    // [model]
    int N = 4;
    double p = 0.6;
    double q = -0.2;
    double eta = 1.0;
    double alpha_minus = 0.4;
    double alpha_plus = 0.6;
    double phi_minus = 0.3;
    double phi_plus = 0.3;
    std::vector<double> theta_bar;

    // [run]
    std::uint64_t seed = 20240611;
    int n_max = 7;
    int workers = 0;  ///< 0 means hardware concurrency; never affects numeric output

    // [verify]
    int points = 100;
    int transfer_points = 4;
    std::string sabotage = "none";  ///< "none" or "r11" (corrupts one R entry)

    // [spectrum]
    bool all_states = false;
    int fusion_points = 50;

    // [thermo]
    std::string regime = "auto";
    std::optional<double> zx;
    std::optional<double> lambda;
    std::vector<double> n_list{3, 4, 5, 6};
    std::string extrapolation = "staggered";
    int thermo_N = 100;
    int probe_N = 4;

    // [sweep]
    std::vector<double> grid_p;  ///< empty means the model p
    std::vector<double> grid_q;
    int sweep_probe_N = 0;       ///< 0 disables the per-point regime probe
    bool extrapolate = false;

    Tolerances tol;

    void set(const std::string& section, const std::string& key, const std::string& value) {
        const std::string what = section + "." + key;
        auto d = [&] { return parse_double(value, what); };
        auto i = [&] { return int(parse_int(value, what)); };
        auto opt = [&]() -> std::optional<double> {
            if (value.empty() || value == "auto" || value == "none") return std::nullopt;
            return d();
        };
        if (section == "model") {
            if (key == "N") N = i();
            else if (key == "p") p = d();
            else if (key == "q") q = d();
            else if (key == "eta") eta = d();
            else if (key == "alpha_minus") alpha_minus = d();
            else if (key == "alpha_plus") alpha_plus = d();
            else if (key == "phi_minus") phi_minus = d();
            else if (key == "phi_plus") phi_plus = d();
            else if (key == "theta_bar") theta_bar = parse_values(value, what);
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "run") {
            if (key == "seed") {
                const long long s = parse_int(value, what);
                if (s < 0) throw ConfigError(what + " must be non-negative");
                seed = std::uint64_t(s);
            } else if (key == "n_max") n_max = i();
            else if (key == "workers") workers = i();
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "verify") {
            if (key == "points") points = i();
            else if (key == "transfer_points") transfer_points = i();
            else if (key == "sabotage") sabotage = value;
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "spectrum") {
            if (key == "all_states") all_states = parse_bool(value, what);
            else if (key == "fusion_points") fusion_points = i();
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "thermo") {
            if (key == "regime") regime = value;
            else if (key == "zx") zx = opt();
            else if (key == "lambda") lambda = opt();
            else if (key == "n_list") n_list = parse_values(value, what);
            else if (key == "extrapolation") extrapolation = value;
            else if (key == "N") thermo_N = i();
            else if (key == "probe_N") probe_N = i();
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "sweep") {
            if (key == "p") grid_p = parse_values(value, what);
            else if (key == "q") grid_q = parse_values(value, what);
            else if (key == "probe_N") sweep_probe_N = i();
            else if (key == "extrapolate") extrapolate = parse_bool(value, what);
            else throw ConfigError("unknown key '" + what + "'");
        } else if (section == "tolerances") {
            tol.set(key, d());
        } else {
            throw ConfigError("unknown section '" + section + "'");
        }
    }

    /// Every setting, defaults included, as (section.key, value) in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const {
        auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("auto"); };
        std::vector<std::pair<std::string, std::string>> e{
            {"model.N", std::to_string(N)},
            {"model.p", format_double(p)},
            {"model.q", format_double(q)},
            {"model.eta", format_double(eta)},
            {"model.alpha_minus", format_double(alpha_minus)},
            {"model.alpha_plus", format_double(alpha_plus)},
            {"model.phi_minus", format_double(phi_minus)},
            {"model.phi_plus", format_double(phi_plus)},
            {"model.theta_bar", join_values(theta_bar)},
            {"run.seed", std::to_string(seed)},
            {"run.n_max", std::to_string(n_max)},
            {"verify.points", std::to_string(points)},
            {"verify.transfer_points", std::to_string(transfer_points)},
            {"verify.sabotage", sabotage},
            {"spectrum.all_states", all_states ? "true" : "false"},
            {"spectrum.fusion_points", std::to_string(fusion_points)},
            {"thermo.regime", regime},
            {"thermo.zx", opt(zx)},
            {"thermo.lambda", opt(lambda)},
            {"thermo.n_list", join_values(n_list)},
            {"thermo.extrapolation", extrapolation},
            {"thermo.N", std::to_string(thermo_N)},
            {"thermo.probe_N", std::to_string(probe_N)},
            {"sweep.p", join_values(grid_p)},
            {"sweep.q", join_values(grid_q)},
            {"sweep.probe_N", std::to_string(sweep_probe_N)},
            {"sweep.extrapolate", extrapolate ? "true" : "false"},
        };
        Tolerances::for_each_field([&](std::string_view k, double Tolerances::*mem) {
            e.emplace_back("tolerances." + std::string(k), format_double(tol.*mem));
        });
        return e;
    }

    /// FNV-1a over the canonical entry list; `workers` is excluded since it cannot change results.
    std::string hash() const {
        std::string canon;
        for (const auto& [k, v] : entries()) canon += k + "=" + v + "\n";
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
        return buf;
    }

    std::vector<int> sizes() const {
        std::vector<int> out;
        for (double n : n_list) {
            if (n != std::floor(n)) throw ConfigError("thermo.n_list entries must be integers");
            out.push_back(int(n));
        }
        return out;
    }

    void validate() const {
        if (N < 1) throw ConfigError("model.N must be positive");
        if (n_max < 1) throw ConfigError("run.n_max must be positive");
        if (N > n_max) throw ConfigError("model.N = " + std::to_string(N) + " exceeds n_max = " + std::to_string(n_max));
        if (points < 1 || transfer_points < 1) throw ConfigError("verify point counts must be positive");
        if (sabotage != "none" && sabotage != "r11") throw ConfigError("verify.sabotage must be none or r11");
        if (fusion_points < 1) throw ConfigError("spectrum.fusion_points must be positive");
        if (regime != "auto" && (regime.size() != 1 || regime[0] < 'A' || regime[0] > 'L'))
            throw ConfigError("thermo.regime must be auto or one of A..L");
        extrapolation_model_from_string(extrapolation);
        if (thermo_N < 1 || probe_N < 1) throw ConfigError("thermo.N and thermo.probe_N must be positive");
        if (probe_N > n_max) throw ConfigError("thermo.probe_N exceeds n_max");
        for (int n : sizes())
            if (n < 1 || n > n_max) throw ConfigError("thermo.n_list entry " + std::to_string(n) + " outside [1, n_max]");
        if (sweep_probe_N < 0 || sweep_probe_N > n_max) throw ConfigError("sweep.probe_N outside [0, n_max]");
        if (!theta_bar.empty() && int(theta_bar.size()) != N)
            throw ConfigError("model.theta_bar must have N entries");
        model().validate();
    }

    ModelParams model() const {
        ModelParams m = ModelParams::from_pq(N, p, q, alpha_minus, alpha_plus, phi_minus, eta);
        m.phi_plus = phi_plus;
        m.theta_bar = theta_bar;
        return m;
    }
};

inline std::string json_scalar_to_string(const Json& v, const std::string& what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_null()) return "";
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(what + ": arrays must hold numbers");
            s += (i ? "," : "") + json_scalar_to_string(v[i], what);
        }
        return s;
    }
    throw ConfigError(what + ": unsupported value type");
}

inline void apply_json_config(RunConfig& cfg, const Json& j) {
    if (!j.is_object()) throw ConfigError("JSON config must be an object of sections");
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw ConfigError("section '" + section + "' must be an object");
        for (const auto& [key, value] : body.items())
            cfg.set(section, key, json_scalar_to_string(value, section + "." + key));
    }
}

inline void apply_ini_config(RunConfig& cfg, std::istream& in) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("INI parse error: ") + e.what());
    }
    for (const auto& [section, body] : pt) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, value] : body) cfg.set(section, key, value.data());
    }
}

/// Reads an INI (default) or JSON config (".json" extension or leading '{').
inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    RunConfig cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("JSON parse error: ") + e.what());
        }
        apply_json_config(cfg, j);
    } else {
        std::istringstream is(text);
        apply_ini_config(cfg, is);
    }
    return cfg;
}

inline Json provenance(const RunConfig& cfg, const std::string& command) {
    Json p;
    p["tool"] = "openspin1";
    p["version"] = tool_version();
    p["command"] = command;
    p["config_hash"] = cfg.hash();
    p["seed"] = cfg.seed;
    Json settings = Json::object();
    for (const auto& [k, v] : cfg.entries()) settings[k] = v;
    p["config"] = settings;
    return p;
}

inline std::string provenance_comment(const RunConfig& cfg, const std::string& command) {
    std::string s = "# openspin1 " + std::string(tool_version()) + " command=" + command + " config_hash=" +
                    cfg.hash() + " seed=" + std::to_string(cfg.seed) + "\n";
    for (const auto& [k, v] : cfg.entries()) s += "# " + k + "=" + v + "\n";
    return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

inline void write_json(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command,
                       const Json& body) {
    Json doc;
    doc["provenance"] = provenance(cfg, command);
    for (const auto& [k, v] : body.items()) doc[k] = v;
    write_text(path, doc.dump(2) + "\n");
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void write_csv(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command,
                      const CsvTable& t) {
    std::string s = provenance_comment(cfg, command);
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + csv_field(r[i]);
        s += "\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    write_text(path, s);
}

// Report serialization. Non-finite values become null.

inline Json jnum(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

inline Json jcomplex(Complex z) { return Json::array({jnum(z.real()), jnum(z.imag())}); }

inline Json to_json(const IdentityReport& r) {
    return Json{{"identity", r.identity},
                {"points_tested", r.points_tested},
                {"max_residual", jnum(r.max_residual)},
                {"tolerance", jnum(r.tolerance)},
                {"pass", r.pass}};
}

inline Json to_json(const ModelParams& m) {
    Json j{{"N", m.N},           {"eta", jnum(m.eta)},
           {"p", jnum(m.p())},   {"q", jnum(m.q())},
           {"p_minus", jnum(m.p_minus)}, {"p_plus", jnum(m.p_plus)},
           {"alpha_minus", jnum(m.alpha_minus)}, {"alpha_plus", jnum(m.alpha_plus)},
           {"phi_minus", jnum(m.phi_minus)}, {"phi_plus", jnum(m.phi_plus)}};
    Json t = Json::array();
    for (double x : m.theta_bar) t.push_back(jnum(x));
    j["theta_bar"] = t;
    return j;
}

inline Json to_json(const RelationReport& r) {
    return Json{{"crossing", jnum(r.crossing)},
                {"value_at_zero", jnum(r.value_at_zero)},
                {"asymptotic_half", jnum(r.asymptotic_half)},
                {"asymptotic_11", jnum(r.asymptotic_11)},
                {"fusion", jnum(r.fusion)},
                {"theta_relation", jnum(r.theta_relation)},
                {"fusion_points", r.fusion_points},
                {"max", jnum(r.max())}};
}

/// Root record {params, state_index, energy, z_roots, z1_roots}; roots are listed as zbar = -i z.
inline Json to_json(const RootSet& rs, const ModelParams& m, std::size_t state_index, double energy) {
    Json z = Json::array(), z1 = Json::array();
    for (auto v : rs.zbar) z.push_back(jcomplex(v));
    for (auto v : rs.zbar1) z1.push_back(jcomplex(v));
    return Json{{"params", to_json(m)},
                {"state_index", state_index},
                {"energy", jnum(energy)},
                {"energy_from_roots", jnum(energy_from_roots(rs))},
                {"z_roots", z},
                {"z1_roots", z1},
                {"pair_closure", jnum(rs.pair_closure)},
                {"max_eval_residual", jnum(rs.max_eval_residual)}};
}

inline void append_root_rows(CsvTable& t, const RootSet& rs, std::size_t state_index, double energy) {
    if (t.header.empty()) t.header = {"state_index", "energy", "family", "index", "re_zbar", "im_zbar"};
    auto add = [&](const std::vector<Complex>& v, const char* fam) {
        for (std::size_t i = 0; i < v.size(); ++i)
            t.rows.push_back({std::to_string(state_index), format_double(energy), fam, std::to_string(i),
                              format_double(v[i].real()), format_double(v[i].imag())});
    };
    add(rs.zbar, "zbar");
    add(rs.zbar1, "zbar1");
}

inline Json to_json(const PatternReport& r) {
    Json a = Json::array();
    for (const auto& x : r.assignments)
        a.push_back(Json{{"family", x.family},
                         {"descriptor", x.descriptor},
                         {"root", jcomplex(x.root)},
                         {"deviation", jnum(x.deviation)},
                         {"bulk", x.bulk}});
    Json s = Json::array();
    for (const auto& x : r.scores)
        s.push_back(Json{{"label", std::string(1, x.label)},
                         {"misfit", jnum(x.misfit)},
                         {"zx", jnum(x.zx)},
                         {"lambda", jnum(x.lambda)}});
    Json u = Json::array();
    for (auto z : r.unassigned) u.push_back(jcomplex(z));
    return Json{{"classified", r.classified},
                {"best_label", std::string(1, r.best_label)},
                {"misfit", jnum(r.misfit)},
                {"second_label", std::string(1, r.second_label)},
                {"second_misfit", jnum(r.second_misfit)},
                {"ratio", jnum(r.ratio())},
                {"zx", jnum(r.zx)},
                {"lambda", jnum(r.lambda)},
                {"bulk_deviation", jnum(r.bulk_deviation)},
                {"assignments", a},
                {"unassigned", u},
                {"scores", s}};
}

inline Json to_json(const BaeReport& r) {
    Json res = Json::array(), pd = Json::array(), w = Json::array();
    for (double x : r.residuals) res.push_back(jnum(x));
    for (double x : r.pole_distance) pd.push_back(jnum(x));
    for (const auto& x : r.warnings) w.push_back(x);
    return Json{{"max_residual", jnum(r.max_residual)}, {"residuals", res}, {"pole_distance", pd}, {"warnings", w}};
}

inline Json to_json(const SurfaceEnergyResult& r) {
    Json seq = Json::array(), w = Json::array();
    for (const auto& [n, e] : r.sequence) seq.push_back(Json{{"N", n}, {"E_b", jnum(e)}});
    for (const auto& x : r.warnings) w.push_back(x);
    return Json{{"p", jnum(r.p)},
                {"q", jnum(r.q)},
                {"regime", r.regime},
                {"closed_form", jnum(r.closed_form)},
                {"integral_value", jnum(r.integral_value)},
                {"extrapolated", jnum(r.extrapolated)},
                {"uncertainty", jnum(r.uncertainty)},
                {"model", r.model},
                {"sequence", seq},
                {"warnings", w}};
}

} // namespace openspin1
