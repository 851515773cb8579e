#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/cardinal.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/multiplier.hpp"
#include "rbfmol/parallel.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/spectral.hpp"
#include "rbfmol/symbols.hpp"

namespace rbfmol {

// ---------------------------------------------------------------------------------------------
// Limit amplitudes A = lim |eta|^kappa phi^(eta)

struct LimitAmplitudes {
    double A_lower = 0.0;
    double A_upper = 0.0;
    bool converged = false;
    int directions = 0;
};

namespace detail {

inline std::vector<Vec> amplitude_directions(const BasisFunction& b) {
    const int n = b.n;
    std::vector<Vec> dirs{Vec::axis(n, 0, 1.0)};
    if (b.radial()) return dirs;
    for (int i = 1; i < n; ++i) dirs.push_back(Vec::axis(n, i, 1.0));
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::axis(n, i, -1.0));
    if (n > 1) {
        Vec d(n);
        for (int i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(double(n));
        dirs.push_back(d);
        dirs.push_back(d * -1.0);
    }
    return dirs;
}

}  // namespace detail

/// liminf / limsup of |eta|^kappa phi^(eta) at 0 along eta = 2^-m d, m = 6..26, over a direction sample.
inline LimitAmplitudes limit_amplitudes(const BasisFunction& b, double tol = 1e-6) {
    LimitAmplitudes out;
    out.A_lower = std::numeric_limits<double>::infinity();
    out.converged = true;
    const auto dirs = detail::amplitude_directions(b);
    out.directions = static_cast<int>(dirs.size());
    for (const Vec& d : dirs) {
        double prev = 0.0, last = 0.0;
        for (int m = 6; m <= 26; ++m) {
            const double r = std::ldexp(1.0, -m);
            const double v = std::pow(r, b.kappa) * b.fourier(d * r);
            prev = last;
            last = v;
        }
        if (!(std::abs(last - prev) <= tol * std::abs(last))) out.converged = false;
        out.A_lower = std::min(out.A_lower, last);
        out.A_upper = std::max(out.A_upper, last);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Lattice sums over k != 0

namespace detail {

/// sum_{k != 0} w(2 pi k) phi^(2 pi k), with w(x) ~ |x|^w_exp, plus a power-law tail beyond the box.
template <class W>
double lattice_constant_sum(const BasisFunction& b, W&& w, double w_exp, const LatticeSumParams& lp) {
    const int n = b.n;
    if (!b.super_polynomial() && !(b.decayN - w_exp > n))
        throw std::invalid_argument("constant: lattice sum not summable (decay exponent too small)");
    int K = lp.K;
    if (n == 1 && !b.super_polynomial()) K = std::max(K, 20000);
    double s = 0.0;
    if (n == 1) {
        for (int k = K; k >= 1; --k) {
            const Vec xp = Vec::scalar(kTwoPi * k), xm = Vec::scalar(-kTwoPi * k);
            s += w(xp) * b.fourier(xp) + w(xm) * b.fourier(xm);
        }
    } else {
        LatticeBox(n, K).for_each([&](const std::array<int, kMaxDim>& k) {
            if (is_zero_index(k, n)) return;
            const Vec x = lattice_point(k, n, kTwoPi);
            s += w(x) * b.fourier(x);
        });
    }
    if (!b.super_polynomial()) {
        const double N = b.decayN - w_exp;
        if (n == 1) {
            const Vec xk = Vec::scalar(kTwoPi * K);
            const double last = w(xk) * b.fourier(xk) + w(xk * -1.0) * b.fourier(xk * -1.0);
            s += power_tail_1d(last, K, K + 0.5, 1.0, N);
        } else if (n == 2 && b.radial()) {
            const double r_ref = 1e3;
            const Vec xr = Vec::axis(n, 0, r_ref);
            const double CN = std::abs(w(xr)) * b.fourier(xr) * std::pow(r_ref, N);
            s += CN * std::pow(kTwoPi, -2.0) * detail::square_complement_integral(kTwoPi * (K + 0.5), N);
        }
    }
    return s;
}

}  // namespace detail

/// R(0) = sum_{k != 0} phi^(2 pi k).
inline double alias_mass(const BasisFunction& b, const LatticeSumParams& lp) {
    return detail::lattice_constant_sum(b, [](const Vec&) { return 1.0; }, 0.0, lp);
}

struct InterpConstants {
    double l_upper = 0.0;
    double l_lower = 0.0;
    double R0 = 0.0;
    std::vector<std::pair<double, double>> l_kq;  // (q, l_{kappa,q})
};

/// l_kappa bracket: 2 R(0)/A for kappa > 0 and 2 R(0)/(A + R(0)) for kappa = 0; l_{kappa,q} = sum (1+|k|^q) phi^(2 pi k)/A.
inline InterpConstants interp_constants(const BasisFunction& b, const std::vector<double>& qs, const LatticeSumParams& lp,
                                        const LimitAmplitudes& A) {
    InterpConstants c;
    c.R0 = alias_mass(b, lp);
    if (b.kappa > 0.0) {
        c.l_upper = 2.0 * c.R0 / A.A_lower;
        c.l_lower = 2.0 * c.R0 / A.A_upper;
    } else {
        c.l_upper = 2.0 * c.R0 / (A.A_lower + c.R0);
        c.l_lower = 2.0 * c.R0 / (A.A_upper + c.R0);
    }
    for (double q : qs) {
        const double s = detail::lattice_constant_sum(
            b, [q](const Vec& x) { return 1.0 + std::pow(x.norm() / kTwoPi, q); }, q, lp);
        c.l_kq.emplace_back(q, s / A.A_lower);
    }
    return c;
}
inline InterpConstants interp_constants(const BasisFunction& b, const std::vector<double>& qs = {}) {
    return interp_constants(b, qs, choose_truncation(b), limit_amplitudes(b));
}

struct HeatConstants {
    double g_upper = 0.0;
    double g_lower = 0.0;
    double sum = 0.0;  // sum_{k != 0} |2 pi k|^2 phi^(2 pi k)
};

/// g_kappa bracket: sum_{k != 0} |2 pi k|^2 phi^(2 pi k) over A (A + R(0) when kappa = 0).
inline HeatConstants heat_constants(const BasisFunction& b, const LatticeSumParams& lp, const LimitAmplitudes& A) {
    detail::require_scheme_decay(b, 2.0);
    HeatConstants g;
    g.sum = detail::lattice_constant_sum(b, [](const Vec& x) { return x.norm2(); }, 2.0, lp);
    if (b.kappa > 0.0) {
        g.g_upper = g.sum / A.A_lower;
        g.g_lower = g.sum / A.A_upper;
    } else {
        const double R0 = alias_mass(b, lp);
        g.g_upper = g.sum / (A.A_lower + R0);
        g.g_lower = g.sum / (A.A_upper + R0);
    }
    return g;
}
inline HeatConstants heat_constants(const BasisFunction& b) {
    return heat_constants(b, choose_truncation(b), limit_amplitudes(b));
}

/// g_{a,kappa} = A^-1 sum_{k != 0} a_inf(2 pi k) phi^(2 pi k); for kappa = 0 the normaliser is A + R(0), as for the heat constant.
inline cplx symbol_constant(const Symbol& a, const BasisFunction& b, const LatticeSumParams& lp, const LimitAmplitudes& A) {
    if (a.n != b.n) throw std::invalid_argument("symbol_constant: dimension mismatch");
    detail::require_scheme_decay(b, a.q);
    std::function<cplx(const Vec&)> ainf;
    if (a.a_inf) {
        ainf = a.a_inf;
    } else if (b.n == 1) {
        // a_inf is homogeneous of degree q, so the two unit directions determine it
        const auto plus = asymptotic_limit(a, Vec::scalar(kTwoPi), a.q);
        const auto minus = asymptotic_limit(a, Vec::scalar(-kTwoPi), a.q);
        if (!plus || !minus) throw std::runtime_error("symbol_constant: symbol has no asymptotic limit");
        const cplx p = *plus, m = *minus;
        const double q = a.q;
        ainf = [p, m, q](const Vec& x) { return (x[0] > 0 ? p : m) * std::pow(std::abs(x[0]) / kTwoPi, q); };
    } else {
        ainf = [&a](const Vec& x) {
            const auto v = asymptotic_limit(a, x, a.q);
            if (!v) throw std::runtime_error("symbol_constant: symbol has no asymptotic limit");
            return *v;
        };
    }
    const double re = detail::lattice_constant_sum(b, [&](const Vec& x) { return ainf(x).real(); }, a.q, lp);
    const double im = detail::lattice_constant_sum(b, [&](const Vec& x) { return ainf(x).imag(); }, a.q, lp);
    const double denom = b.kappa > 0.0 ? A.A_lower : A.A_lower + alias_mass(b, lp);
    return cplx(re, im) / denom;
}
inline cplx symbol_constant(const Symbol& a, const BasisFunction& b) {
    return symbol_constant(a, b, choose_truncation(b), limit_amplitudes(b));
}

/// Per-homogeneous-part constants g_{p_{q-j},kappa} for a symbol given as a sum of homogeneous parts.
inline std::vector<cplx> symbol_constants(const std::vector<Symbol>& parts, const BasisFunction& b) {
    const auto lp = choose_truncation(b);
    const auto A = limit_amplitudes(b);
    std::vector<cplx> out;
    for (const Symbol& p : parts) out.push_back(symbol_constant(p, b, lp, A));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Thresholds rho

struct RhoReport {
    double eps = 0.5;
    double r = kPi;
    double R0 = 0.0;
    double p_r = 0.0;  // sum_{k != 0} sup_{|eta| <= r} |grad phi^(eta + 2 pi k)| on a sample
    double log_R0 = 0.0;  // finite when R0 and p_r underflow
    double log_p_r = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho = 0.0;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline std::vector<Vec> ball_sample(int n, double r, int per_axis = 33) {
    std::vector<Vec> pts;
    if (n == 1) {
        for (int i = 0; i < per_axis; ++i) pts.push_back(Vec::scalar(-r + 2.0 * r * i / (per_axis - 1)));
        return pts;
    }
    const long total = ipow(per_axis, n);
    for (long idx = 0; idx < total; ++idx) {
        Vec x(n);
        long rem = idx;
        for (int i = 0; i < n; ++i) {
            x[i] = -r + 2.0 * r * static_cast<double>(rem % per_axis) / (per_axis - 1);
            rem /= per_axis;
        }
        if (x.norm() <= r * (1.0 + 1e-12)) pts.push_back(x);
    }
    return pts;
}

}  // namespace detail

/// rho_1 = min(r, eps R(0)/p_r(|grad phi^|)), rho_2 the first radius where |eta|^kappa phi^ < (1 - eps) A, rho = min.
inline RhoReport threshold_rho(const BasisFunction& b, double eps, double r, const LatticeSumParams& lp, const LimitAmplitudes& A) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("threshold_rho: eps must lie in (0, 1)");
    if (!(r > 0.0 && r <= kPi)) throw std::invalid_argument("threshold_rho: r must lie in (0, pi]");
    RhoReport rep;
    rep.eps = eps;
    rep.r = r;
    rep.R0 = alias_mass(b, lp);
    const auto ball = detail::ball_sample(b.n, r);
    const int n = b.n;
    if (b.radial()) {
        // log domain: R(0) and p_r underflow together for strongly peaked transforms
        std::vector<double> log_r, log_p;
        LatticeBox(n, std::max(lp.K, 1)).for_each([&](const std::array<int, kMaxDim>& k) {
            if (is_zero_index(k, n)) return;
            const Vec c = lattice_point(k, n, kTwoPi);
            log_r.push_back(b.log_fourier_radial(c.norm()));
            double sup = -std::numeric_limits<double>::infinity();
            for (const Vec& e : ball) sup = std::max(sup, b.log_fourier_radial_slope((c + e).norm()));
            log_p.push_back(sup);
        });
        const double lr = detail::log_sum_exp(log_r), lpr = detail::log_sum_exp(log_p);
        rep.p_r = std::exp(lpr);
        rep.log_R0 = lr;
        rep.log_p_r = lpr;
        rep.rho1 = std::min(r, eps * std::exp(lr - lpr));
    } else {
        LatticeBox(n, std::max(lp.K, 1)).for_each([&](const std::array<int, kMaxDim>& k) {
            if (is_zero_index(k, n)) return;
            const Vec c = lattice_point(k, n, kTwoPi);
            double sup = 0.0;
            for (const Vec& e : ball) {
                const double g = b.fourier_gradient(c + e).norm();
                if (!std::isfinite(g)) throw std::runtime_error("threshold_rho: gradient evaluation failed near a lattice point");
                sup = std::max(sup, g);
            }
            rep.p_r += sup;
        });
        rep.rho1 = rep.p_r > 0.0 ? std::min(r, eps * rep.R0 / rep.p_r) : r;
        rep.log_R0 = std::log(rep.R0);
        rep.log_p_r = std::log(rep.p_r);
    }

    const double target = (1.0 - eps) * A.A_lower;
    double rho2 = kPi;
    for (const Vec& d : detail::amplitude_directions(b)) {
        auto ok = [&](double s) { return std::pow(s, b.kappa) * b.fourier(d * s) >= target; };
        const int steps = 400;
        double good = 1e-8, bad = -1.0;
        for (int i = 0; i <= steps; ++i) {
            const double s = 1e-8 * std::pow(kPi / 1e-8, double(i) / steps);
            if (ok(s)) {
                good = s;
            } else {
                bad = s;
                break;
            }
        }
        if (bad < 0.0) continue;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (good + bad);
            (ok(mid) ? good : bad) = mid;
        }
        rho2 = std::min(rho2, good);
    }
    rep.rho2 = rho2;
    rep.rho = std::min(rep.rho1, rep.rho2);
    return rep;
}
inline RhoReport threshold_rho(const BasisFunction& b, double eps = 0.5, double r = kPi) {
    return threshold_rho(b, eps, r, choose_truncation(b), limit_amplitudes(b));
}

// ---------------------------------------------------------------------------------------------
// Reports and sweeps

struct ConstantsReport {
    BasisFunction basis;
    LimitAmplitudes A;
    InterpConstants interp;
    std::optional<HeatConstants> heat;  // present when the decay exponent exceeds n + 2
    std::optional<cplx> g_symbol;
    std::string symbol_kind;
    RhoReport rho;
    LatticeSumParams lattice;
    double tail_tolerance = 1e-14;

    bool invariants_hold() const {
        bool ok = interp.l_lower <= interp.l_upper * (1.0 + 1e-12) && interp.l_lower >= 0.0;
        if (heat) ok = ok && heat->g_lower <= heat->g_upper * (1.0 + 1e-12) && heat->g_lower >= 0.0;
        if (heat && basis.kappa > 0.0) ok = ok && heat->g_upper >= 2.0 * kPi * kPi * interp.l_upper * (1.0 - 1e-12);
        return ok;
    }
};

/// Natural rho radius parameter: r = c^-2 for the Gaussian, c^-1 for the multiquadric, pi otherwise.
inline double default_rho_radius(const BasisFunction& b) {
    switch (b.family) {
        case Family::gaussian: return std::min(kPi, 1.0 / (b.c * b.c));
        case Family::multiquadric: return std::min(kPi, 1.0 / b.c);
        default: return kPi;
    }
}

inline ConstantsReport constants_report(const BasisFunction& b, const std::vector<double>& qs = {0.0, 1.0, 2.0},
                                        const Symbol* a = nullptr, double tol = 1e-14, double eps = 0.5) {
    ConstantsReport rep;
    rep.basis = b;
    rep.tail_tolerance = tol;
    rep.lattice = choose_truncation(b, tol);
    rep.A = limit_amplitudes(b);
    std::vector<double> admissible;
    for (double q : qs)
        if (b.super_polynomial() || b.decayN > b.n + q) admissible.push_back(q);
    rep.interp = interp_constants(b, admissible, rep.lattice, rep.A);
    if (b.super_polynomial() || b.decayN > b.n + 2.0) rep.heat = heat_constants(b, rep.lattice, rep.A);
    if (a) {
        rep.g_symbol = symbol_constant(*a, b, rep.lattice, rep.A);
        rep.symbol_kind = to_string(a->kind);
    }
    rep.rho = threshold_rho(b, eps, default_rho_radius(b), rep.lattice, rep.A);
    return rep;
}

/// Constants report per shape parameter, computed in parallel.
inline std::vector<ConstantsReport> shape_sweep(Family family, int n, const std::vector<double>& cs, double p = 0.0,
                                                const std::vector<double>& qs = {0.0, 1.0, 2.0}, int jobs = 1) {
    std::vector<ConstantsReport> out(cs.size());
    parallel_for(static_cast<long>(cs.size()), jobs, [&](long i) { out[i] = constants_report(make_basis(family, n, cs[i], p), qs); });
    return out;
}

/// Exponent of a power law y ~ C c^e fitted on log-log scale.
inline double fit_power_law(const std::vector<double>& cs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        lx.push_back(std::log(cs[i]));
        ly.push_back(std::log(ys[i]));
    }
    return least_squares(lx, ly).slope;
}

// ---------------------------------------------------------------------------------------------
// Empirical counterparts and predicted limits

/// lim (G(eta) - |eta|^2)/|eta|^kappa along eta = 2^-m, m = 3..12 (last value and its change).
struct HeatDefectLimit {
    double value = 0.0;
    double change = 0.0;
    double sup = 0.0;
};

inline HeatDefectLimit heat_defect_limit(const BasisFunction& b, const LatticeSumParams& lp) {
    HeatDefectLimit out;
    double prev = 0.0;
    for (int m = 3; m <= 12; ++m) {
        const double r = std::ldexp(1.0, -m);
        const double v = heat_defect(b, Vec::axis(b.n, 0, r), lp) / std::pow(r, b.kappa);
        out.sup = std::max(out.sup, v);
        out.change = std::abs(v - prev);
        prev = v;
    }
    out.value = prev;
    return out;
}

/// ||f^||°_{1,kappa} = int |xi|^kappa |f^|.
inline double moment_norm(const SpectralDensity& f, double kappa) {
    return kappa == 0.0 ? weighted_l1_norm(f, Weight::wiener()).value : weighted_l1_norm(f, Weight::hom(kappa)).value;
}

/// weight(xi) |f^(xi)| integrated over R^n, for prediction integrals.
template <class W>
double spectral_integral(const SpectralDensity& f, W&& weight) {
    GridOptions o;
    if (f.n == 2) {
        o.grade_levels = 20;
        o.uniform_width = 0.5;
    }
    const double R = std::isfinite(f.support_radius) ? f.support_radius : 1e4;
    QuadratureGrid grid{f.n, R, 0.0, o};
    return grid.integrate([&](const Vec& xi) { return weight(xi) * std::abs(f.evaluate(xi)); }).value;
}

/// g t int |xi|^kappa e^{-t |xi|^2} |f^| (kappa > 2 heat limit).
inline double heat_limit_prediction(const SpectralDensity& f, double g, double t, double kappa) {
    return g * t * spectral_integral(f, [&](const Vec& xi) { return std::pow(xi.norm(), kappa) * std::exp(-t * xi.norm2()); });
}

/// int (1 - e^{-g t |xi|^2}) e^{-t |xi|^2} |f^| (kappa = 2 heat limit).
inline double heat_kappa2_prediction(const SpectralDensity& f, double g, double t) {
    return spectral_integral(f, [&](const Vec& xi) { return -std::expm1(-g * t * xi.norm2()) * std::exp(-t * xi.norm2()); });
}

/// |g_{a,kappa}| t int |xi|^kappa e^{-t Re a} |f^| (exact symbol-scheme limit).
inline double symbol_limit_prediction(const SpectralDensity& f, const Symbol& a, cplx g, double t, double kappa) {
    return std::abs(g) * t *
           spectral_integral(f, [&](const Vec& xi) { return std::pow(xi.norm(), kappa) * std::exp(-t * a(xi).real()); });
}

}  // namespace rbfmol
