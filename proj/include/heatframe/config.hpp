#pragma once

#include "heatframe/calculus.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/io.hpp"
#include "heatframe/operators.hpp"
#include "heatframe/symbols.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace heatframe {

/// Flat key-value config with dotted keys: one `key = value` per line,
/// `#` starts a comment, whitespace is ignored around tokens.
struct RunConfig {
    int dim = 1;
    int n = 128;
    double side = 1.0;
    int point_cap = GridDomain::default_point_cap;

    std::string operator_kind = "laplacian";
    std::string potential_file;
    std::string coefficient_file;

    std::string symbol_name = "zeta_exp";
    int symbol_k = 1;

    int contour_nodes = 200;
    double contour_theta = 0.25 * M_PI;

    double quad_t_lo = 1e-8;
    double quad_t_hi = 1e4;
    int quad_points = 600;

    double delta = 1.05;
    int M = 1;
    bool auto_range = true;
    int j_min = 0;
    int j_max = 0;
    double target_norm = 0.5;

    int cone_points = 48;
    double cone_aperture = 1.0;

    std::uint64_t seed = 42;
    std::string cache_dir = ".heatframe-cache";
    std::string output_dir = ".";
    double band_fraction = 0.25;
    int test_functions = 20;
    double time_budget_seconds = 600.0;

    std::string text;        // raw config file contents
    std::uint64_t hash = 0;  // FNV-1a of the raw text

    GridDomain domain() const { return GridDomain(dim, n, side, point_cap); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

} // namespace detail

/// Parses and fully validates; reports every violation, not just the first.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.text = text;
    cfg.hash = fnv1a64(text);

    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        kv[key] = val;
    }

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto get_int = [&](const char* key, int& dst) {
        if (auto v = take(key)) {
            try {
                size_t used = 0;
                dst = std::stoi(*v, &used);
                if (used != v->size()) throw std::invalid_argument("");
            } catch (...) { errors.push_back(std::string(key) + ": not an integer: " + *v); }
        }
    };
    auto get_f64 = [&](const char* key, double& dst) {
        if (auto v = take(key)) {
            try {
                size_t used = 0;
                dst = std::stod(*v, &used);
                if (used != v->size()) throw std::invalid_argument("");
            } catch (...) { errors.push_back(std::string(key) + ": not a number: " + *v); }
        }
    };
    auto get_str = [&](const char* key, std::string& dst) {
        if (auto v = take(key)) dst = *v;
    };

    get_int("domain.dim", cfg.dim);
    get_int("domain.n", cfg.n);
    get_f64("domain.side", cfg.side);
    get_int("domain.cap", cfg.point_cap);
    get_str("operator.kind", cfg.operator_kind);
    get_str("operator.potential_file", cfg.potential_file);
    get_str("operator.coefficient_file", cfg.coefficient_file);
    get_str("symbol.name", cfg.symbol_name);
    get_int("symbol.k", cfg.symbol_k);
    get_int("contour.nodes", cfg.contour_nodes);
    get_f64("contour.theta", cfg.contour_theta);
    get_f64("quad.t_lo", cfg.quad_t_lo);
    get_f64("quad.t_hi", cfg.quad_t_hi);
    get_int("quad.points", cfg.quad_points);
    get_f64("frame.delta", cfg.delta);
    get_int("frame.M", cfg.M);
    get_f64("frame.target_norm", cfg.target_norm);
    get_int("cone.points", cfg.cone_points);
    get_f64("cone.aperture", cfg.cone_aperture);
    get_f64("test.band_fraction", cfg.band_fraction);
    get_int("test.functions", cfg.test_functions);
    get_f64("suite.time_budget_seconds", cfg.time_budget_seconds);
    get_str("cache.dir", cfg.cache_dir);
    get_str("output.dir", cfg.output_dir);
    if (auto v = take("seed")) {
        try {
            cfg.seed = std::stoull(*v);
        } catch (...) { errors.push_back(std::string("seed: not an integer: ") + *v); }
    }

    cfg.auto_range = true;
    auto jmin = take("frame.j_min");
    auto jmax = take("frame.j_max");
    if (jmin.has_value() != jmax.has_value())
        errors.push_back("frame.j_min and frame.j_max must be given together (or both auto)");
    if (jmin && jmax) {
        if (*jmin == "auto" || *jmax == "auto") {
            cfg.auto_range = true;
        } else {
            cfg.auto_range = false;
            try {
                cfg.j_min = std::stoi(*jmin);
                cfg.j_max = std::stoi(*jmax);
            } catch (...) { errors.push_back("frame.j_min/j_max: not integers"); }
        }
    }

    if (const char* env = std::getenv("HEATFRAME_CACHE")) cfg.cache_dir = env;

    for (const auto& [k, v] : kv) errors.push_back("unknown key: " + k);

    // range validation against module preconditions, before any compute
    if (cfg.dim != 1 && cfg.dim != 2) errors.push_back("domain.dim: must be 1 or 2");
    if (cfg.n < 2) errors.push_back("domain.n: must be at least 2");
    if (cfg.side <= 0.0) errors.push_back("domain.side: must be positive");
    if (cfg.dim == 1 ? cfg.n > cfg.point_cap : cfg.n * cfg.n > cfg.point_cap)
        errors.push_back("domain: total grid size exceeds the cap of " +
                         std::to_string(cfg.point_cap) + " points");
    if (cfg.operator_kind != "laplacian" && cfg.operator_kind != "schrodinger" &&
        cfg.operator_kind != "divergence_form")
        errors.push_back("operator.kind: unknown kind '" + cfg.operator_kind +
                         "' (valid: laplacian, schrodinger, divergence_form)");
    if (cfg.operator_kind == "schrodinger" && cfg.potential_file.empty())
        errors.push_back("operator.potential_file: required for schrodinger");
    if (cfg.operator_kind == "divergence_form" && cfg.coefficient_file.empty())
        errors.push_back("operator.coefficient_file: required for divergence_form");
    for (const std::string& f : {cfg.potential_file, cfg.coefficient_file})
        if (!f.empty() && !std::filesystem::exists(f))
            errors.push_back("referenced file does not exist: " + f);
    if (cfg.symbol_name != "zeta_exp")
        errors.push_back("symbol.name: unknown symbol '" + cfg.symbol_name +
                         "' (valid: zeta_exp)");
    if (cfg.symbol_k < 1) errors.push_back("symbol.k: must be >= 1");
    if (cfg.contour_nodes < 16) errors.push_back("contour.nodes: must be >= 16");
    if (!(cfg.contour_theta > 0.0 && cfg.contour_theta < 0.5 * M_PI))
        errors.push_back("contour.theta: must lie in (0, pi/2)");
    if (!(cfg.quad_t_lo > 0.0 && cfg.quad_t_hi > cfg.quad_t_lo))
        errors.push_back("quad.t_lo/t_hi: need 0 < t_lo < t_hi");
    if (cfg.quad_points < 2) errors.push_back("quad.points: must be >= 2");
    if (!(cfg.delta > 1.0 && cfg.delta <= 2.0))
        errors.push_back("frame.delta: must lie in (1, 2]");
    if (cfg.M < 1) errors.push_back("frame.M: must be a positive integer");
    if (!cfg.auto_range && cfg.j_min > cfg.j_max)
        errors.push_back("frame.j_min: must not exceed frame.j_max");
    if (!(cfg.target_norm > 0.0)) errors.push_back("frame.target_norm: must be positive");
    if (cfg.cone_points < 2) errors.push_back("cone.points: must be >= 2");
    if (cfg.cone_aperture <= 0.0) errors.push_back("cone.aperture: must be positive");
    if (!(cfg.band_fraction > 0.0 && cfg.band_fraction <= 1.0))
        errors.push_back("test.band_fraction: must lie in (0, 1]");
    if (cfg.test_functions < 1) errors.push_back("test.functions: must be >= 1");

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline OperatorModel build_operator_from_config(const RunConfig& cfg) {
    GridDomain dom = cfg.domain();
    if (cfg.operator_kind == "laplacian") return build_laplacian(dom);
    if (cfg.operator_kind == "schrodinger")
        return build_schrodinger(dom, read_grid_function(cfg.potential_file, cfg.side));
    return build_divergence_form(dom, read_grid_function(cfg.coefficient_file, cfg.side));
}

inline AnalyticSymbol symbol_from_config(const RunConfig& cfg) {
    return builtin_zeta_exp(cfg.symbol_k);
}

/// Decompose with the disk cache: load on hit, compute and store on miss.
/// Returns true when the cache was warm.
inline bool spectral_with_cache(const RunConfig& cfg, const OperatorModel& op) {
    const std::string path = spectral_cache_path(cfg.cache_dir, op);
    if (load_spectral_cache(path, op)) return true;
    spectral_decompose(op);
    save_spectral_cache(path, op);
    return false;
}

} // namespace heatframe
