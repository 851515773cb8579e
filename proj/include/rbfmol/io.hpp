#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbfmol/basis.hpp"
#include "rbfmol/spectral.hpp"
#include "rbfmol/symbols.hpp"

namespace rbfmol {

using json = nlohmann::json;

// ---------------------------------------------------------------------------------------------
// Basis: {"family": "polyharmonic", "n": 1, "c": 1, "p": 3}

struct BasisSpec {
    Family family = Family::polyharmonic;
    int n = 1;
    double c = 1.0;
    double p = 0.0;

    BasisFunction build() const { return make_basis(family, n, c, p); }
};

inline void to_json(json& j, const BasisSpec& s) {
    j = json{{"family", to_string(s.family)}, {"n", s.n}, {"c", s.c}, {"p", s.p}};
}
inline void from_json(const json& j, BasisSpec& s) {
    s.family = family_from_string(j.at("family").get<std::string>());
    s.n = j.at("n").get<int>();
    s.c = j.value("c", 1.0);
    s.p = j.value("p", 0.0);
}

// ---------------------------------------------------------------------------------------------
// Datum: {"kind": "gaussian", "params": {"sigma": 1}}
// kinds: gaussian{sigma}, algebraic{m}, reduced_rate{r}, singular{order, sigma}, bump{radius}, zero

struct DatumSpec {
    std::string kind = "gaussian";
    json params = json::object();

    SpectralDensity build(int n) const {
        if (kind == "gaussian") return make_gaussian_density(n, params.value("sigma", 1.0));
        if (kind == "algebraic") return make_algebraic_density(n, params.at("m").get<double>());
        if (kind == "reduced_rate") return make_reduced_rate_density(n, params.at("r").get<double>());
        if (kind == "singular") return make_singular_density(n, params.at("order").get<double>(), params.value("sigma", 1.0));
        if (kind == "bump") return make_bump_density(n, params.value("radius", 1.0));
        if (kind == "zero") return make_zero_density(n);
        throw std::invalid_argument("unknown datum kind: " + kind);
    }
};

inline void to_json(json& j, const DatumSpec& s) { j = json{{"kind", s.kind}, {"params", s.params}}; }
inline void from_json(const json& j, DatumSpec& s) {
    s.kind = j.at("kind").get<std::string>();
    s.params = j.value("params", json::object());
}

// ---------------------------------------------------------------------------------------------
// Symbol: {"kind": "fractional_reg", "params": {"s": 0.75, "cutoff": {"r0": 1, "r1": 2}}}
// Levy: {"kind": "levy", "params": {"drift": [..], "diffusion": [[..]], "jumps": {"kind": "gaussian",
//        "intensity": 2, "mean": 0, "sd": 1}, "compensator": {"r0": 1, "r1": 2}}}

inline CutoffSpec cutoff_from_json(const json& j) {
    CutoffSpec c;
    c.r0 = j.value("r0", c.r0);
    c.r1 = j.value("r1", c.r1);
    if (!(c.r0 > 0.0 && c.r1 > c.r0)) throw std::invalid_argument("cutoff: need 0 < r0 < r1");
    return c;
}

inline SymbolKind symbol_kind_from_string(const std::string& s) {
    for (SymbolKind k : {SymbolKind::heat, SymbolKind::transport, SymbolKind::schrodinger, SymbolKind::halfwave_reg,
                         SymbolKind::fractional_reg, SymbolKind::levy})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown symbol kind: " + s);
}

inline LevySpec levy_from_json(int n, const json& p) {
    LevySpec s;
    s.n = n;
    s.drift = p.value("drift", std::vector<double>(n, 0.0));
    if (p.contains("diffusion")) {
        const json& d = p.at("diffusion");
        if (!d.is_array() || static_cast<int>(d.size()) != n) throw std::invalid_argument("levy: diffusion must be an n x n array");
        for (const json& row : d) {
            if (!row.is_array() || static_cast<int>(row.size()) != n) throw std::invalid_argument("levy: diffusion must be an n x n array");
            for (const json& v : row) s.diffusion.push_back(v.get<double>());
        }
    } else {
        s.diffusion.assign(n * n, 0.0);
    }
    if (p.contains("jumps")) {
        const json& jm = p.at("jumps");
        const std::string kind = jm.value("kind", "gaussian");
        if (kind == "none") {
            s.jumps.kind = JumpKind::none;
        } else if (kind == "gaussian") {
            s.jumps.kind = JumpKind::gaussian;
            s.jumps.intensity = jm.at("intensity").get<double>();
            s.jumps.mean = jm.value("mean", 0.0);
            s.jumps.sd = jm.value("sd", 1.0);
        } else {
            throw std::invalid_argument("levy: jump kind must be none or gaussian in a config file");
        }
    }
    if (p.contains("compensator")) s.compensator = cutoff_from_json(p.at("compensator"));
    return s;
}

struct SymbolSpec {
    std::string kind = "heat";
    json params = json::object();

    Symbol build(int n) const {
        const SymbolKind k = symbol_kind_from_string(kind);
        if (k == SymbolKind::levy) return levy_symbol(levy_from_json(n, params));
        SymbolParams sp;
        sp.v = params.value("v", std::vector<double>{});
        sp.s = params.value("s", sp.s);
        if (params.contains("cutoff")) sp.cutoff = cutoff_from_json(params.at("cutoff"));
        return make_symbol(k, n, sp);
    }
};

inline void to_json(json& j, const SymbolSpec& s) { j = json{{"kind", s.kind}, {"params", s.params}}; }
inline void from_json(const json& j, SymbolSpec& s) {
    s.kind = j.at("kind").get<std::string>();
    s.params = j.value("params", json::object());
}

// ---------------------------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

/// Writes via a temporary file in the same directory and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Finite doubles as numbers, non-finite ones as strings ("inf", "-inf", "nan").
inline json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace rbfmol
