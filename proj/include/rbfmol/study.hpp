#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/constants.hpp"
#include "rbfmol/evolve.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/io.hpp"
#include "rbfmol/multiplier.hpp"
#include "rbfmol/parallel.hpp"
#include "rbfmol/plot.hpp"
#include "rbfmol/spectral.hpp"

namespace rbfmol {

enum class StudyKind { interp_convergence, interp_saturation, scheme_convergence, scheme_saturation, constants_table, cross_validation };

inline std::string to_string(StudyKind k) {
    switch (k) {
        case StudyKind::interp_convergence: return "interp_convergence";
        case StudyKind::interp_saturation: return "interp_saturation";
        case StudyKind::scheme_convergence: return "scheme_convergence";
        case StudyKind::scheme_saturation: return "scheme_saturation";
        case StudyKind::constants_table: return "constants_table";
        case StudyKind::cross_validation: return "cross_validation";
    }
    return "?";
}

inline StudyKind study_kind_from_string(const std::string& s) {
    for (StudyKind k : {StudyKind::interp_convergence, StudyKind::interp_saturation, StudyKind::scheme_convergence,
                        StudyKind::scheme_saturation, StudyKind::constants_table, StudyKind::cross_validation})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown study kind: " + s);
}

inline bool is_scheme(StudyKind k) {
    return k == StudyKind::scheme_convergence || k == StudyKind::scheme_saturation || k == StudyKind::cross_validation;
}

/// h_i = 2^-(start + i), i < count.
struct Ladder {
    int start = 2;
    int count = 8;

    std::vector<double> values() const {
        std::vector<double> h;
        for (int i = 0; i < count; ++i) h.push_back(std::ldexp(1.0, -(start + i)));
        return h;
    }
};

inline Ladder default_ladder(int n) { return n == 1 ? Ladder{2, 8} : Ladder{1, 6}; }

struct CrossValidationSpec {
    double h = 0.25;
    int J = 64;
    double T = 0.5;
    double budget = 1e-4;
    std::vector<int> rk4_steps{64, 128, 256, 512};
};

struct ConstantsSpec {
    std::vector<double> q{0.0, 1.0, 2.0};
    std::vector<double> sweep_c;  // optional shape sweep for the same family and dimension
    double eps = 0.5;
};

/// One study per config file.
struct ExperimentConfig {
    StudyKind study = StudyKind::interp_convergence;
    BasisSpec basis;
    DatumSpec datum;
    std::optional<SymbolSpec> symbol;
    Ladder ladder;
    std::vector<double> t{1.0};
    double tolerance = 1e-14;  // lattice-sum tail tolerance
    double rate_tolerance = 0.25;
    double plateau_threshold = 0.2;
    double bracket_tolerance = 0.1;  // relative slack on both ends of a plateau bracket
    CrossValidationSpec cross;
    ConstantsSpec constants;
    std::string out_dir = "results";
    int jobs = 1;

    /// Everything that determines the results; output location and thread count are excluded.
    json canonical() const {
        json j;
        j["study"] = to_string(study);
        j["basis"] = basis;
        j["datum"] = datum;
        if (symbol) j["symbol"] = *symbol;
        j["ladder"] = {{"start", ladder.start}, {"count", ladder.count}};
        j["t"] = t;
        j["tolerance"] = tolerance;
        j["rate_tolerance"] = rate_tolerance;
        j["plateau_threshold"] = plateau_threshold;
        j["bracket_tolerance"] = bracket_tolerance;
        if (study == StudyKind::cross_validation)
            j["cross_validation"] = {{"h", cross.h}, {"J", cross.J}, {"T", cross.T}, {"budget", cross.budget}, {"rk4_steps", cross.rk4_steps}};
        if (study == StudyKind::constants_table)
            j["constants"] = {{"q", constants.q}, {"sweep_c", constants.sweep_c}, {"eps", constants.eps}};
        return j;
    }

    std::string hash() const { return hex64(fnv1a(canonical().dump())); }
};

/// Parses and validates a config document; throws std::invalid_argument with the offending field.
inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    try {
        c.study = study_kind_from_string(j.at("study").get<std::string>());
        c.basis = j.at("basis").get<BasisSpec>();
        if (j.contains("datum")) c.datum = j.at("datum").get<DatumSpec>();
        if (j.contains("symbol")) c.symbol = j.at("symbol").get<SymbolSpec>();
        c.ladder = default_ladder(c.basis.n);
        if (j.contains("ladder")) {
            c.ladder.start = j["ladder"].value("start", c.ladder.start);
            c.ladder.count = j["ladder"].value("count", c.ladder.count);
        }
        if (j.contains("t")) c.t = j.at("t").get<std::vector<double>>();
        c.tolerance = j.value("tolerance", c.tolerance);
        c.rate_tolerance = j.value("rate_tolerance", c.rate_tolerance);
        c.plateau_threshold = j.value("plateau_threshold", c.plateau_threshold);
        c.bracket_tolerance = j.value("bracket_tolerance", c.bracket_tolerance);
        if (j.contains("cross_validation")) {
            const json& x = j["cross_validation"];
            c.cross.h = x.value("h", c.cross.h);
            c.cross.J = x.value("J", c.cross.J);
            c.cross.T = x.value("T", c.cross.T);
            c.cross.budget = x.value("budget", c.cross.budget);
            c.cross.rk4_steps = x.value("rk4_steps", c.cross.rk4_steps);
        }
        if (j.contains("constants")) {
            const json& x = j["constants"];
            c.constants.q = x.value("q", c.constants.q);
            c.constants.sweep_c = x.value("sweep_c", c.constants.sweep_c);
            c.constants.eps = x.value("eps", c.constants.eps);
        }
        if (j.contains("output")) c.out_dir = j["output"].value("dir", c.out_dir);
        c.jobs = j.value("jobs", c.jobs);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (c.ladder.count < 4) throw std::invalid_argument("config: ladder length must be at least 4");
    if (!(c.tolerance > 0.0) || !(c.rate_tolerance > 0.0) || !(c.plateau_threshold > 0.0) || !(c.bracket_tolerance >= 0.0))
        throw std::invalid_argument("config: tolerances must be positive");
    if (c.t.empty()) throw std::invalid_argument("config: t-list must not be empty");
    for (double t : c.t)
        if (!(t > 0.0)) throw std::invalid_argument("config: times must be positive");
    if (is_scheme(c.study) && !c.symbol) throw std::invalid_argument("config: scheme studies need a symbol");
    if (c.study == StudyKind::cross_validation && (c.cross.J < 1 || !(c.cross.h > 0.0) || !(c.cross.T > 0.0) || c.cross.rk4_steps.size() < 3))
        throw std::invalid_argument("config: cross_validation needs h > 0, J >= 1, T > 0 and >= 3 rk4 step counts");
    // referenced specs must resolve
    (void)c.basis.build();
    (void)c.datum.build(c.basis.n);
    if (c.symbol) (void)c.symbol->build(c.basis.n);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

// ---------------------------------------------------------------------------------------------
// Results

/// One error-vs-h ladder (one per time for scheme studies).
struct Series {
    std::string label;
    double t = 0.0;
    std::string x_name = "h";
    std::vector<double> h;
    std::vector<double> error;  // NaN at failed points
    std::vector<std::string> failures;  // empty string where the point succeeded
    RateFit fit;
    RateFit asymptotic_fit;
    bool fit_ok = false;
    std::optional<double> predicted_rate;
    std::optional<bool> rate_pass;
    std::optional<double> predicted_constant;  // lim h^-rate error
    std::optional<double> observed_constant;  // h^-rate error at the finest h
    Plateau plateau;
    std::optional<std::pair<double, double>> plateau_bracket;
    std::optional<bool> plateau_in_bracket;
    double pre_plateau_slope = 0.0;  // largest pairwise order
};

struct StudyResult {
    ExperimentConfig config;
    std::string hash;
    std::vector<Series> series;
    json details = json::object();  // constants report, cross-validation figures
    double runtime_seconds = 0.0;
    std::filesystem::path directory;

    bool all_predictions_pass() const {
        for (const Series& s : series) {
            if (s.rate_pass && !*s.rate_pass) return false;
            if (s.plateau_in_bracket && !*s.plateau_in_bracket) return false;
        }
        return true;
    }
};

inline json to_json_value(const LimitAmplitudes& a) {
    return {{"A_lower", a.A_lower}, {"A_upper", a.A_upper}, {"converged", a.converged}, {"directions", a.directions}};
}

inline json to_json_value(const ConstantsReport& r) {
    json j;
    j["basis"] = {{"family", to_string(r.basis.family)}, {"n", r.basis.n}, {"c", r.basis.c}, {"p", r.basis.p}, {"kappa", r.basis.kappa},
                  {"decayN", number_or_string(r.basis.decayN)}};
    j["A_lower"] = r.A.A_lower;
    j["A_upper"] = r.A.A_upper;
    j["A_converged"] = r.A.converged;
    j["l_upper"] = r.interp.l_upper;
    j["l_lower"] = r.interp.l_lower;
    j["R0"] = r.interp.R0;
    json lq = json::array();
    for (const auto& [q, v] : r.interp.l_kq) lq.push_back({{"q", q}, {"value", v}});
    j["l_kappa_q"] = lq;
    if (r.heat) {
        j["g_upper"] = r.heat->g_upper;
        j["g_lower"] = r.heat->g_lower;
    } else {
        j["g_upper"] = nullptr;
        j["g_lower"] = nullptr;
    }
    if (r.g_symbol) j["g_symbol"] = {{"kind", r.symbol_kind}, {"re", r.g_symbol->real()}, {"im", r.g_symbol->imag()}};
    j["rho"] = {{"eps", r.rho.eps},   {"r", r.rho.r},         {"rho", r.rho.rho},   {"rho1", r.rho.rho1},
                {"rho2", r.rho.rho2}, {"p_r", r.rho.p_r},     {"log_p_r", number_or_string(r.rho.log_p_r)},
                {"R0", r.rho.R0},     {"log_R0", number_or_string(r.rho.log_R0)}};
    j["tails"] = {{"tolerance", r.tail_tolerance}, {"K", r.lattice.K}, {"tail_bound", r.lattice.tail_bound},
                  {"tail_corrected", r.lattice.tail_corrected}};
    j["invariants_hold"] = r.invariants_hold();
    return j;
}

inline json to_json_value(const Series& s) {
    json j;
    j["label"] = s.label;
    j["t"] = s.t;
    j["x_name"] = s.x_name;
    json pts = json::array();
    for (std::size_t i = 0; i < s.h.size(); ++i) {
        json p{{"h", s.h[i]}, {"error", number_or_string(s.error[i])}};
        if (!s.failures[i].empty()) p["failure"] = s.failures[i];
        pts.push_back(p);
    }
    j["points"] = pts;
    j["fit_ok"] = s.fit_ok;
    if (s.fit_ok) {
        j["fitted_rate"] = s.fit.slope;
        j["fitted_rate_band"] = {s.fit.slope - 2.0 * s.fit.slope_stderr, s.fit.slope + 2.0 * s.fit.slope_stderr};
        j["fit_residual"] = s.fit.residual;
        j["asymptotic_rate"] = s.asymptotic_fit.slope;
        j["pairwise_orders"] = s.fit.pairwise;
        j["exact"] = s.fit.exact;
    }
    j["predicted_rate"] = s.predicted_rate ? json(*s.predicted_rate) : json(nullptr);
    j["rate_pass"] = s.rate_pass ? json(*s.rate_pass) : json(nullptr);
    j["predicted_constant"] = s.predicted_constant ? json(*s.predicted_constant) : json(nullptr);
    j["observed_constant"] = s.observed_constant ? json(*s.observed_constant) : json(nullptr);
    j["plateau"] = s.plateau.found ? json(s.plateau.value) : json(nullptr);
    j["plateau_bracket"] = s.plateau_bracket ? json{s.plateau_bracket->first, s.plateau_bracket->second} : json(nullptr);
    j["plateau_in_bracket"] = s.plateau_in_bracket ? json(*s.plateau_in_bracket) : json(nullptr);
    j["pre_plateau_slope"] = s.pre_plateau_slope;
    return j;
}

inline json to_json_value(const StudyResult& r) {
    json j;
    j["hash"] = r.hash;
    j["config"] = r.config.canonical();
    json ss = json::array();
    for (const Series& s : r.series) ss.push_back(to_json_value(s));
    j["series"] = ss;
    j["details"] = r.details;
    j["all_predictions_pass"] = r.all_predictions_pass();
    return j;
}

// ---------------------------------------------------------------------------------------------
// Running

namespace detail {

inline void finish_series(Series& s, double rate_tol, double plateau_threshold, double bracket_tol) {
    std::vector<double> h, e;
    for (std::size_t i = 0; i < s.h.size(); ++i)
        if (std::isfinite(s.error[i])) {
            h.push_back(s.h[i]);
            e.push_back(s.error[i]);
        }
    if (h.size() >= 3) {
        s.fit = estimate_rate(h, e);
        s.asymptotic_fit = estimate_rate_asymptotic(h, e);
        s.fit_ok = !s.fit.exact && std::isfinite(s.fit.slope);
        if (s.fit_ok) {
            s.plateau = estimate_plateau(h, e, plateau_threshold);
            for (double o : s.fit.pairwise) s.pre_plateau_slope = std::max(s.pre_plateau_slope, o);
        }
    }
    if (s.predicted_rate && s.fit_ok) {
        const double fitted = h.size() >= 6 ? s.asymptotic_fit.slope : s.fit.slope;
        s.rate_pass = std::abs(fitted - *s.predicted_rate) <= rate_tol;
    } else if (s.predicted_rate) {
        s.rate_pass = false;
    }
    if (s.predicted_rate && !e.empty()) s.observed_constant = e.back() * std::pow(h.back(), -*s.predicted_rate);
    if (s.plateau_bracket) {
        if (s.plateau.found) {
            const auto [lo, hi] = *s.plateau_bracket;
            s.plateau_in_bracket = s.plateau.value >= lo / (1.0 + bracket_tol) && s.plateau.value <= hi * (1.0 + bracket_tol);
        } else {
            s.plateau_in_bracket = false;
        }
    }
}

template <class F>
void run_ladder(Series& s, const std::vector<double>& hs, int jobs, F&& point) {
    s.h = hs;
    s.error.assign(hs.size(), std::numeric_limits<double>::quiet_NaN());
    s.failures.assign(hs.size(), "");
    parallel_for(static_cast<long>(hs.size()), jobs, [&](long i) {
        try {
            s.error[i] = point(hs[i]);
        } catch (const std::exception& ex) {
            s.failures[i] = ex.what();
        }
    });
}

/// Rate predicted by the theory for interpolation: kappa, or the datum's decay margin when it is smaller.
inline double predicted_interp_rate(const BasisFunction& b, const SpectralDensity& f) {
    double r = b.kappa;
    if (std::isfinite(f.decay_rate)) r = std::min(r, f.decay_rate - b.n);
    return r;
}

}  // namespace detail

inline StudyResult run_study(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    StudyResult res;
    res.config = cfg;
    res.hash = cfg.hash();
    const BasisFunction b = cfg.basis.build();
    const SpectralDensity f = cfg.datum.build(b.n);
    const LatticeSumParams lp = choose_truncation(b, cfg.tolerance);
    const std::vector<double> hs = cfg.ladder.values();
    const LimitAmplitudes A = limit_amplitudes(b);
    const bool exact_limit = A.converged && std::abs(A.A_upper - A.A_lower) <= 1e-9 * A.A_upper;

    switch (cfg.study) {
        case StudyKind::interp_convergence:
        case StudyKind::interp_saturation: {
            Series s;
            s.label = "interpolation";
            detail::run_ladder(s, hs, cfg.jobs, [&](double h) { return interp_error_norm(f, b, h, lp).error; });
            const InterpConstants ic = interp_constants(b, {}, lp, A);
            const double wiener = moment_norm(f, 0.0);
            if (cfg.study == StudyKind::interp_convergence) {
                s.predicted_rate = detail::predicted_interp_rate(b, f);
                if (exact_limit && b.kappa > 0.0 && *s.predicted_rate == b.kappa)
                    s.predicted_constant = ic.l_upper * moment_norm(f, b.kappa);
            } else if (b.kappa == 0.0) {
                s.plateau_bracket = std::make_pair(ic.l_lower * wiener, ic.l_upper * wiener);
            }
            res.details["l_upper"] = ic.l_upper;
            res.details["l_lower"] = ic.l_lower;
            res.details["wiener_norm"] = wiener;
            detail::finish_series(s, cfg.rate_tolerance, cfg.plateau_threshold, cfg.bracket_tolerance);
            res.series.push_back(std::move(s));
            break;
        }
        case StudyKind::scheme_convergence:
        case StudyKind::scheme_saturation: {
            const Symbol a = cfg.symbol->build(b.n);
            std::optional<cplx> g;
            try {
                g = symbol_constant(a, b, lp, A);
            } catch (const std::exception& ex) {
                res.details["g_symbol_error"] = ex.what();
            }
            if (g) res.details["g_symbol"] = {{"re", g->real()}, {"im", g->imag()}};
            const bool heat = a.kind == SymbolKind::heat;
            std::optional<HeatConstants> hc;
            if (heat) {
                hc = heat_constants(b, lp, A);
                res.details["g_upper"] = hc->g_upper;
                res.details["g_lower"] = hc->g_lower;
            }
            for (double t : cfg.t) {
                Series s;
                s.t = t;
                s.label = to_string(a.kind) + " t=" + json(t).dump();
                detail::run_ladder(s, hs, cfg.jobs, [&](double h) { return evolution_error_norm(f, b, a, h, t, lp).error; });
                const double q = std::max(a.q, 0.0);
                if (cfg.study == StudyKind::scheme_convergence) {
                    s.predicted_rate = b.kappa - q;
                    if (g && exact_limit && b.kappa > q && std::abs(*g) > 0.0)
                        s.predicted_constant = symbol_limit_prediction(f, a, *g, t, b.kappa);
                } else if (heat && b.kappa == 2.0) {
                    s.plateau_bracket = std::make_pair(heat_kappa2_prediction(f, hc->g_lower, t), heat_kappa2_prediction(f, hc->g_upper, t));
                }
                detail::finish_series(s, cfg.rate_tolerance, cfg.plateau_threshold, cfg.bracket_tolerance);
                res.series.push_back(std::move(s));
            }
            break;
        }
        case StudyKind::constants_table: {
            const Symbol* sym = nullptr;
            std::optional<Symbol> a;
            if (cfg.symbol) {
                a = cfg.symbol->build(b.n);
                sym = &*a;
            }
            res.details["report"] = to_json_value(constants_report(b, cfg.constants.q, sym, cfg.tolerance, cfg.constants.eps));
            if (!cfg.constants.sweep_c.empty()) {
                const auto sweep = shape_sweep(b.family, b.n, cfg.constants.sweep_c, b.p, cfg.constants.q, cfg.jobs);
                json arr = json::array();
                std::vector<double> rhos;
                for (const auto& r : sweep) {
                    arr.push_back(to_json_value(r));
                    rhos.push_back(r.rho.rho);
                }
                res.details["sweep"] = arr;
                if (sweep.size() >= 2) res.details["rho_exponent"] = fit_power_law(cfg.constants.sweep_c, rhos);
            }
            break;
        }
        case StudyKind::cross_validation: {
            const Symbol a = cfg.symbol->build(b.n);
            const auto& x = cfg.cross;
            const CrossValidation cv = cross_validate(f, b, a, x.h, x.J, x.T, lp, x.budget);
            res.details["discrepancy"] = cv.discrepancy;
            res.details["discrepancy_2J"] = cv.discrepancy_2J;
            res.details["budget"] = cv.budget;
            res.details["pass"] = cv.pass;
            res.details["stencil_resolution"] = cv.stencil_resolution;
            const int radius = std::min(default_stencil_grid(b.n) / 4 - 1, std::max(4 * x.J, 16));
            const GeneratorStencil st = generator_stencil(b, a, x.h, radius, lp);
            const LatticeState s0 = make_lattice_state(f, x.h, x.J);
            const LatticeState ref = integrate_mol(s0, st, x.T);
            Series s;
            s.label = "rk4 vs exponential";
            s.x_name = "dt";
            s.t = x.T;
            std::vector<int> steps = x.rk4_steps;
            std::sort(steps.begin(), steps.end());
            std::vector<double> dts;
            for (int m : steps) dts.push_back(x.T / m);
            s.h = dts;
            s.error.assign(dts.size(), std::numeric_limits<double>::quiet_NaN());
            s.failures.assign(dts.size(), "");
            parallel_for(static_cast<long>(steps.size()), cfg.jobs, [&](long i) {
                const LatticeState r = integrate_mol(s0, st, x.T, TimeMethod::rk4, steps[i]);
                if (r.unstable) {
                    s.failures[i] = "rk4 unstable at this step size";
                    return;
                }
                s.error[i] = max_node_difference(r, ref);
            });
            s.predicted_rate = 4.0;
            detail::finish_series(s, cfg.rate_tolerance, cfg.plateau_threshold, cfg.bracket_tolerance);
            res.series.push_back(std::move(s));
            break;
        }
    }
    res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// ---------------------------------------------------------------------------------------------
// Outputs

inline std::string series_csv(const Series& s) {
    std::ostringstream out;
    out.precision(17);
    out << "h,error,order\n";
    for (std::size_t i = 0; i < s.h.size(); ++i) {
        out << s.h[i] << ',';
        if (std::isfinite(s.error[i])) out << s.error[i];
        else out << "nan";
        out << ',';
        if (i > 0 && std::isfinite(s.error[i]) && std::isfinite(s.error[i - 1]) && s.error[i] > 0 && s.error[i - 1] > 0)
            out << std::log(s.error[i - 1] / s.error[i]) / std::log(s.h[i - 1] / s.h[i]);
        out << '\n';
    }
    return out.str();
}

inline std::string series_svg(const StudyResult& r, const Series& s) {
    LogLogPlot p;
    p.title = to_string(r.config.study) + ": " + to_string(r.config.basis.family) + " n=" + std::to_string(r.config.basis.n) + ", " + s.label;
    p.x_label = s.x_name;
    p.y_label = "error (Wiener norm)";
    if (r.config.study == StudyKind::cross_validation) p.y_label = "max node difference";
    p.x = s.h;
    p.y = s.error;
    if (s.predicted_rate) {
        p.slope_guide = *s.predicted_rate;
    } else if (s.fit_ok) {
        p.slope_guide = s.pre_plateau_slope;
        p.slope_from_coarsest = true;
        p.slope_label = "apparent pre-plateau slope";
    }
    if (s.plateau_bracket) {
        p.plateau_guide = std::sqrt(s.plateau_bracket->first * s.plateau_bracket->second);
        if (!(*p.plateau_guide > 0.0)) p.plateau_guide = s.plateau_bracket->second;
    } else if (s.plateau.found) {
        p.plateau_guide = s.plateau.value;
        p.plateau_label = "plateau estimate";
    }
    return p.svg();
}

struct OutputFormats {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

/// Writes the result into <out_dir>/<hash>/ with atomic file replacement; returns the directory.
inline std::filesystem::path emit_outputs(StudyResult& r, const std::filesystem::path& out_dir, const OutputFormats& fmt = {}) {
    const std::filesystem::path dir = out_dir / r.hash;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_file_atomic(dir / "config.json", r.config.canonical().dump(2) + "\n");
    if (fmt.json) write_file_atomic(dir / "result.json", to_json_value(r).dump(2) + "\n");
    for (std::size_t i = 0; i < r.series.size(); ++i) {
        const std::string stem = i == 0 ? "results" : "results_" + std::to_string(i);
        if (fmt.csv) write_file_atomic(dir / (stem + ".csv"), series_csv(r.series[i]));
        if (fmt.svg) write_file_atomic(dir / (i == 0 ? std::string("plot.svg") : "plot_" + std::to_string(i) + ".svg"), series_svg(r, r.series[i]));
    }
    if (r.series.empty() && fmt.csv && r.details.contains("report")) {
        // constants table: one row per shape parameter
        std::ostringstream out;
        out.precision(17);
        out << "c,A_lower,A_upper,l_upper,l_lower,g_upper,g_lower,rho,rho1,rho2\n";
        auto row = [&](const json& j) {
            out << j["basis"]["c"].get<double>() << ',' << j["A_lower"] << ',' << j["A_upper"] << ',' << j["l_upper"] << ','
                << j["l_lower"] << ',' << j["g_upper"] << ',' << j["g_lower"] << ',' << j["rho"]["rho"] << ',' << j["rho"]["rho1"] << ','
                << j["rho"]["rho2"] << '\n';
        };
        if (r.details.contains("sweep"))
            for (const json& j : r.details["sweep"]) row(j);
        else
            row(r.details["report"]);
        write_file_atomic(dir / "constants.csv", out.str());
    }
    write_file_atomic(dir / "run.json", json{{"runtime_seconds", r.runtime_seconds}, {"jobs", r.config.jobs}}.dump(2) + "\n");
    r.directory = dir;
    return dir;
}

}  // namespace rbfmol
