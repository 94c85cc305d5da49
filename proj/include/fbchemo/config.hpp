#pragma once

// Run configuration: a flat sectioned key=value format ([problem], [numerics],
// [output]; '#'/';' comments; unknown keys are hard errors) plus a JSON form
// used for the summary round-trip. Parameter keys n, a, b, M accept comma
// lists so one file can describe a sweep; single-run modes require singletons.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "params.hpp"

namespace fbchemo {

struct ConfigData {
    std::vector<int> n{3};
    std::vector<double> b{0.5};
    std::vector<double> a{1.0};
    std::vector<double> M; // empty: mass comes from the initial profile
    std::string k_law = "linear";
    std::string k_table;
    double k_lipschitz = 0.0, k_bound = 0.0;
    std::string u0 = "constant";
    double u0_value = 24.0;
    double u0_peak = 0.0, u0_floor = 0.0;
    std::string u0_table;

    int grid_n = 256;
    double dt = 0.0; // <= 0: auto
    double t_end = 0.05;
    double tol_mass = 1e-6;
    double tol_elliptic = 5e-2;
    double tol_picard = 1e-8;
    double eps_collapse = 1e-3;
    double eps_fill = 1e-3;
    bool renormalize_mass = false;
    int elliptic_subiters = 1;

    std::vector<double> snapshots;
};

namespace detail_config {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("bad numeric value for '" + key + "': " + v);
}

inline int to_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (trim(v.substr(pos)).empty()) return static_cast<int>(x);
    } catch (...) {
    }
    throw ConfigError("bad integer value for '" + key + "': " + v);
}

inline bool to_bool(const std::string& v, const std::string& key) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("bad boolean value for '" + key + "': " + v);
}

inline std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (out.empty()) out.push_back("");
    return out;
}

inline std::vector<double> to_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& s : split(v, ',')) out.push_back(to_double(s, key));
    return out;
}

// "r0:v0, r1:v1, ..." into two columns
inline void parse_table(const std::string& v, const std::string& key, std::vector<double>& r,
                        std::vector<double>& val) {
    r.clear();
    val.clear();
    for (const auto& pair : split(v, ',')) {
        const auto cs = split(pair, ':');
        if (cs.size() != 2) throw ConfigError("bad table entry for '" + key + "': " + pair);
        r.push_back(to_double(cs[0], key));
        val.push_back(to_double(cs[1], key));
    }
}

} // namespace detail_config

inline ConfigData parse_config_text(const std::string& text) {
    using namespace detail_config;
    ConfigData cfg;
    bool u0_given = false, M_given = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "problem" && section != "numerics" && section != "output")
                throw ConfigError("unknown section '" + section + "' at line " + std::to_string(lineno));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section == "problem") {
            if (key == "n") {
                cfg.n.clear();
                for (const auto& s : split(val, ',')) cfg.n.push_back(to_int(s, key));
            } else if (key == "b") {
                cfg.b = to_double_list(val, key);
            } else if (key == "a") {
                cfg.a = to_double_list(val, key);
            } else if (key == "M") {
                cfg.M = to_double_list(val, key);
                M_given = true;
            } else if (key == "k_law") {
                if (val != "linear" && val != "tabulated") throw ConfigError("k_law must be linear or tabulated");
                cfg.k_law = val;
            } else if (key == "k_table") {
                cfg.k_table = val;
            } else if (key == "k_lipschitz") {
                cfg.k_lipschitz = to_double(val, key);
            } else if (key == "k_bound") {
                cfg.k_bound = to_double(val, key);
            } else if (key == "u0") {
                if (val != "constant" && val != "bump" && val != "table")
                    throw ConfigError("u0 must be constant, bump or table");
                cfg.u0 = val;
                u0_given = true;
            } else if (key == "u0_value") {
                cfg.u0_value = to_double(val, key);
                u0_given = true;
            } else if (key == "u0_peak") {
                cfg.u0_peak = to_double(val, key);
            } else if (key == "u0_floor") {
                cfg.u0_floor = to_double(val, key);
            } else if (key == "u0_table") {
                cfg.u0_table = val;
            } else {
                throw ConfigError("unknown key '" + key + "' in [problem] at line " + std::to_string(lineno));
            }
        } else if (section == "numerics") {
            if (key == "grid_n") cfg.grid_n = to_int(val, key);
            else if (key == "dt") cfg.dt = (val == "auto") ? 0.0 : to_double(val, key);
            else if (key == "t_end") cfg.t_end = to_double(val, key);
            else if (key == "tol_mass") cfg.tol_mass = to_double(val, key);
            else if (key == "tol_elliptic") cfg.tol_elliptic = to_double(val, key);
            else if (key == "tol_picard") cfg.tol_picard = to_double(val, key);
            else if (key == "eps_collapse") cfg.eps_collapse = to_double(val, key);
            else if (key == "eps_fill") cfg.eps_fill = to_double(val, key);
            else if (key == "renormalize_mass") cfg.renormalize_mass = to_bool(val, key);
            else if (key == "elliptic_subiters") cfg.elliptic_subiters = to_int(val, key);
            else throw ConfigError("unknown key '" + key + "' in [numerics] at line " + std::to_string(lineno));
        } else if (section == "output") {
            if (key == "snapshots") cfg.snapshots = to_double_list(val, key);
            else throw ConfigError("unknown key '" + key + "' in [output] at line " + std::to_string(lineno));
        } else {
            throw ConfigError("key '" + key + "' outside any section at line " + std::to_string(lineno));
        }
    }
    if (M_given && u0_given)
        throw ConfigError("give either M or an explicit initial profile, not both");
    return cfg;
}

// Materialize one parameter point. M (if used) fixes a constant profile of the
// matching total mass: u0 = n M / b^n.
inline Params config_to_params(const ConfigData& cfg, int n, double a, double b, double M_opt,
                               bool has_M) {
    Params p;
    p.n = n;
    p.b = b;
    if (cfg.k_law == "linear") {
        p.k_law = LinearK{a};
    } else {
        TabulatedK tk;
        detail_config::parse_table(cfg.k_table, "k_table", tk.r, tk.v);
        tk.lipschitz = cfg.k_lipschitz;
        tk.bound = cfg.k_bound;
        p.k_law = tk;
    }
    if (has_M) {
        if (!(b > 0.0)) throw ConfigError("b must be positive");
        p.u0 = ConstantProfile{n * M_opt / std::pow(b, n)};
    } else if (cfg.u0 == "constant") {
        p.u0 = ConstantProfile{cfg.u0_value};
    } else if (cfg.u0 == "bump") {
        p.u0 = BumpProfile{cfg.u0_peak, cfg.u0_floor};
    } else {
        TableProfile tp;
        detail_config::parse_table(cfg.u0_table, "u0_table", tp.r, tp.v);
        p.u0 = tp;
    }
    p.grid_n = cfg.grid_n;
    p.dt = cfg.dt;
    p.t_end = cfg.t_end;
    p.tol_mass = cfg.tol_mass;
    p.tol_elliptic = cfg.tol_elliptic;
    p.tol_picard = cfg.tol_picard;
    p.eps_collapse = cfg.eps_collapse;
    p.eps_fill = cfg.eps_fill;
    p.renormalize_mass = cfg.renormalize_mass;
    p.elliptic_subiters = cfg.elliptic_subiters;
    return validate(p);
}

inline Params single_params(const ConfigData& cfg) {
    if (cfg.n.size() != 1 || cfg.a.size() != 1 || cfg.b.size() != 1 || cfg.M.size() > 1)
        throw ConfigError("this mode needs a single parameter point; lists are for sweep");
    return config_to_params(cfg, cfg.n[0], cfg.a[0], cfg.b[0], cfg.M.empty() ? 0.0 : cfg.M[0],
                            !cfg.M.empty());
}

struct SweepPoint {
    int n;
    double a, b, M;
    bool has_M;
    Params params;
};

inline std::vector<SweepPoint> sweep_points(const ConfigData& cfg) {
    std::vector<SweepPoint> pts;
    const std::vector<double> Ms = cfg.M.empty() ? std::vector<double>{0.0} : cfg.M;
    const bool has_M = !cfg.M.empty();
    for (int n : cfg.n)
        for (double a : cfg.a)
            for (double b : cfg.b)
                for (double M : Ms)
                    pts.push_back({n, a, b, M, has_M, config_to_params(cfg, n, a, b, M, has_M)});
    return pts;
}

// --- JSON round-trip of a fully-resolved Params ---

inline nlohmann::ordered_json params_to_json(const Params& p) {
    nlohmann::ordered_json j;
    j["n"] = p.n;
    j["b"] = p.b;
    if (const auto* lin = std::get_if<LinearK>(&p.k_law)) {
        j["k_law"] = "linear";
        j["a"] = lin->a;
    } else {
        const auto& tk = std::get<TabulatedK>(p.k_law);
        j["k_law"] = "tabulated";
        std::string table;
        char buf[64];
        for (std::size_t i = 0; i < tk.r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g:%.17g", tk.r[i], tk.v[i]);
            if (i) table += ",";
            table += buf;
        }
        j["k_table"] = table;
        j["k_lipschitz"] = tk.lipschitz;
        j["k_bound"] = tk.bound;
    }
    if (const auto* c = std::get_if<ConstantProfile>(&p.u0)) {
        j["u0"] = "constant";
        j["u0_value"] = c->value;
    } else if (const auto* bmp = std::get_if<BumpProfile>(&p.u0)) {
        j["u0"] = "bump";
        j["u0_peak"] = bmp->peak;
        j["u0_floor"] = bmp->floor;
    } else {
        const auto& tp = std::get<TableProfile>(p.u0);
        j["u0"] = "table";
        std::string table;
        char buf[64];
        for (std::size_t i = 0; i < tp.r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g:%.17g", tp.r[i], tp.v[i]);
            if (i) table += ",";
            table += buf;
        }
        j["u0_table"] = table;
    }
    j["grid_n"] = p.grid_n;
    j["dt"] = p.dt;
    j["t_end"] = p.t_end;
    j["tol_mass"] = p.tol_mass;
    j["tol_elliptic"] = p.tol_elliptic;
    j["tol_picard"] = p.tol_picard;
    j["eps_collapse"] = p.eps_collapse;
    j["eps_fill"] = p.eps_fill;
    j["renormalize_mass"] = p.renormalize_mass;
    j["elliptic_subiters"] = p.elliptic_subiters;
    return j;
}

inline ConfigData config_from_json(const nlohmann::json& params) {
    using detail_config::parse_table;
    ConfigData cfg;
    static const std::vector<std::string> known = {
        "n", "b", "a", "k_law", "k_table", "k_lipschitz", "k_bound",
        "u0", "u0_value", "u0_peak", "u0_floor", "u0_table",
        "grid_n", "dt", "t_end", "tol_mass", "tol_elliptic", "tol_picard",
        "eps_collapse", "eps_fill", "renormalize_mass", "elliptic_subiters", "snapshots"};
    for (auto it = params.begin(); it != params.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown key '" + it.key() + "' in JSON params");
    try {
        if (params.contains("n")) cfg.n = {params["n"].get<int>()};
        if (params.contains("b")) cfg.b = {params["b"].get<double>()};
        if (params.contains("a")) cfg.a = {params["a"].get<double>()};
        if (params.contains("k_law")) cfg.k_law = params["k_law"].get<std::string>();
        if (params.contains("k_table")) cfg.k_table = params["k_table"].get<std::string>();
        if (params.contains("k_lipschitz")) cfg.k_lipschitz = params["k_lipschitz"].get<double>();
        if (params.contains("k_bound")) cfg.k_bound = params["k_bound"].get<double>();
        if (params.contains("u0")) cfg.u0 = params["u0"].get<std::string>();
        if (params.contains("u0_value")) cfg.u0_value = params["u0_value"].get<double>();
        if (params.contains("u0_peak")) cfg.u0_peak = params["u0_peak"].get<double>();
        if (params.contains("u0_floor")) cfg.u0_floor = params["u0_floor"].get<double>();
        if (params.contains("u0_table")) cfg.u0_table = params["u0_table"].get<std::string>();
        if (params.contains("grid_n")) cfg.grid_n = params["grid_n"].get<int>();
        if (params.contains("dt")) {
            if (params["dt"].is_string())
                cfg.dt = (params["dt"].get<std::string>() == "auto")
                             ? 0.0
                             : detail_config::to_double(params["dt"].get<std::string>(), "dt");
            else
                cfg.dt = params["dt"].get<double>();
        }
        if (params.contains("t_end")) cfg.t_end = params["t_end"].get<double>();
        if (params.contains("tol_mass")) cfg.tol_mass = params["tol_mass"].get<double>();
        if (params.contains("tol_elliptic")) cfg.tol_elliptic = params["tol_elliptic"].get<double>();
        if (params.contains("tol_picard")) cfg.tol_picard = params["tol_picard"].get<double>();
        if (params.contains("eps_collapse")) cfg.eps_collapse = params["eps_collapse"].get<double>();
        if (params.contains("eps_fill")) cfg.eps_fill = params["eps_fill"].get<double>();
        if (params.contains("renormalize_mass")) cfg.renormalize_mass = params["renormalize_mass"].get<bool>();
        if (params.contains("elliptic_subiters")) cfg.elliptic_subiters = params["elliptic_subiters"].get<int>();
        if (params.contains("snapshots")) cfg.snapshots = params["snapshots"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad JSON params value: ") + e.what());
    }
    return cfg;
}

// Accepts the sectioned text format, a bare JSON params object, or a full
// summary JSON (its "params" block is used).
inline ConfigData load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad JSON config: ") + e.what());
        }
        if (j.contains("params")) return config_from_json(j["params"]);
        return config_from_json(j);
    }
    return parse_config_text(text);
}

} // namespace fbchemo
