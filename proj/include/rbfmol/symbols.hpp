#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/vec.hpp"

namespace rbfmol {

enum class SymbolKind { heat, transport, schrodinger, halfwave_reg, fractional_reg, levy, custom };

inline std::string to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::heat: return "heat";
        case SymbolKind::transport: return "transport";
        case SymbolKind::schrodinger: return "schrodinger";
        case SymbolKind::halfwave_reg: return "halfwave_reg";
        case SymbolKind::fractional_reg: return "fractional_reg";
        case SymbolKind::levy: return "levy";
        case SymbolKind::custom: return "custom";
    }
    return "custom";
}

/// Multiplier a(xi) of order q generating u_t + a(D) u = 0.
struct Symbol {
    int n = 1;
    SymbolKind kind = SymbolKind::heat;
    double q = 2.0;
    bool re_nonneg = true;
    std::function<cplx(const Vec&)> value;
    std::function<cplx(const Vec&)> a_inf;  // lim a(lambda xi)/lambda^q when known in closed form

    cplx operator()(const Vec& xi) const { return value(xi); }
    bool has_limit() const { return static_cast<bool>(a_inf); }
};

struct SymbolParams {
    std::vector<double> v;  // transport velocity; padded with zeros to n
    double s = 0.5;  // fractional exponent in (0, 1)
    CutoffSpec cutoff{};
};

inline Symbol make_symbol(SymbolKind kind, int n, const SymbolParams& p = {}) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("make_symbol: dimension out of range");
    Symbol a;
    a.n = n;
    a.kind = kind;
    switch (kind) {
        case SymbolKind::heat:
            a.q = 2.0;
            a.value = [](const Vec& xi) { return cplx(xi.norm2(), 0.0); };
            a.a_inf = a.value;
            break;
        case SymbolKind::transport: {
            Vec v(n);
            for (int i = 0; i < n && i < static_cast<int>(p.v.size()); ++i) v[i] = p.v[i];
            if (p.v.empty()) v[0] = 1.0;
            a.q = 1.0;
            a.value = [v](const Vec& xi) { return cplx(0.0, v.dot(xi)); };
            a.a_inf = a.value;
            break;
        }
        case SymbolKind::schrodinger:
            a.q = 2.0;
            a.value = [](const Vec& xi) { return cplx(0.0, xi.norm2()); };
            a.a_inf = a.value;
            break;
        case SymbolKind::halfwave_reg: {
            const CutoffSpec chi = p.cutoff;
            a.q = 1.0;
            a.value = [chi](const Vec& xi) {
                const double r = xi.norm();
                return cplx(0.0, (1.0 - chi(r)) * r);
            };
            a.a_inf = [](const Vec& xi) { return cplx(0.0, xi.norm()); };
            break;
        }
        case SymbolKind::fractional_reg: {
            if (!(p.s > 0.0 && p.s < 1.0)) throw std::invalid_argument("fractional_reg: s must lie in (0, 1)");
            const CutoffSpec chi = p.cutoff;
            const double s = p.s;
            a.q = 2.0 * s;
            a.value = [chi, s](const Vec& xi) {
                const double r = xi.norm();
                const double w = 1.0 - chi(r);
                return cplx(w == 0.0 ? 0.0 : w * std::pow(r, 2.0 * s), 0.0);
            };
            a.a_inf = [s](const Vec& xi) { return cplx(std::pow(xi.norm(), 2.0 * s), 0.0); };
            break;
        }
        default: throw std::invalid_argument("make_symbol: use levy_symbol or make_custom_symbol for this kind");
    }
    return a;
}

inline Symbol make_custom_symbol(int n, std::function<cplx(const Vec&)> value, double q, bool re_nonneg,
                                 std::function<cplx(const Vec&)> a_inf = nullptr) {
    Symbol a;
    a.n = n;
    a.kind = SymbolKind::custom;
    a.q = q;
    a.re_nonneg = re_nonneg;
    a.value = std::move(value);
    a.a_inf = std::move(a_inf);
    return a;
}

// ---------------------------------------------------------------------------------------------
// Levy-Khintchine symbols

enum class JumpKind { none, gaussian, custom };

/// Finite jump measure lambda * p(x) dx in one dimension, p a probability density.
struct JumpMeasure {
    JumpKind kind = JumpKind::none;
    double intensity = 0.0;
    double mean = 0.0;  // gaussian jumps
    double sd = 1.0;
    std::function<double(double)> density;  // custom jumps
    double window_lo = 0.0;  // integration window of a custom density
    double window_hi = 0.0;

    double operator()(double x) const {
        if (kind == JumpKind::gaussian) {
            const double z = (x - mean) / sd;
            return std::exp(-0.5 * z * z) / (sd * std::sqrt(kTwoPi));
        }
        if (kind == JumpKind::custom) return density(x);
        return 0.0;
    }
    double lo() const { return kind == JumpKind::gaussian ? mean - 12.0 * sd : window_lo; }
    double hi() const { return kind == JumpKind::gaussian ? mean + 12.0 * sd : window_hi; }
    double scale() const { return kind == JumpKind::gaussian ? sd : 0.25 * (window_hi - window_lo); }
};

struct LevySpec {
    int n = 1;
    std::vector<double> drift;  // mu, length n
    std::vector<double> diffusion;  // Sigma, row-major n x n
    JumpMeasure jumps;
    CutoffSpec compensator{};  // truncation chi(x) in the compensator i (x, xi) chi(x)
};

namespace detail {

// int_lo^hi g(x) dx on uniform GK15 panels with phase increment <= 2 per panel.
template <class G>
QuadResult<cplx> oscillatory_integral(G&& g, double lo, double hi, double freq) {
    const int panels = std::max(16, static_cast<int>(std::ceil((hi - lo) * std::abs(freq) / 2.0)));
    std::vector<double> bp(panels + 1);
    for (int i = 0; i <= panels; ++i) bp[i] = lo + (hi - lo) * i / panels;
    return integrate_panels(g, bp);
}

inline void check_levy(const LevySpec& s) {
    if (s.n < 1 || s.n > kMaxDim) throw std::invalid_argument("levy: dimension out of range");
    if (!s.drift.empty() && static_cast<int>(s.drift.size()) != s.n)
        throw std::invalid_argument("levy: drift must have n entries");
    if (!s.diffusion.empty() && static_cast<int>(s.diffusion.size()) != s.n * s.n)
        throw std::invalid_argument("levy: diffusion must be n x n");
    if (s.jumps.kind != JumpKind::none && s.n != 1)
        throw std::invalid_argument("levy: jump measures are implemented for n = 1");
    if (s.jumps.kind != JumpKind::none && !(s.jumps.intensity >= 0.0))
        throw std::invalid_argument("levy: jump intensity must be nonnegative");
    if (s.jumps.kind == JumpKind::gaussian && !(s.jumps.sd > 0.0))
        throw std::invalid_argument("levy: gaussian jump sd must be positive");
    if (s.jumps.kind == JumpKind::custom && (!s.jumps.density || !(s.jumps.window_hi > s.jumps.window_lo)))
        throw std::invalid_argument("levy: custom jumps need a density and a window");
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
            if (!s.diffusion.empty() && std::abs(s.diffusion[i * s.n + j] - s.diffusion[j * s.n + i]) > 1e-12)
                throw std::invalid_argument("levy: diffusion must be symmetric");
    if (!s.diffusion.empty()) {
        // semidefinite Cholesky; zero pivots allowed
        const int n = s.n;
        std::vector<double> L(n * n, 0.0);
        for (int j = 0; j < n; ++j) {
            double d = s.diffusion[j * n + j];
            for (int k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
            if (d < -1e-12) throw std::invalid_argument("levy: diffusion must be positive semidefinite");
            const double ljj = std::sqrt(std::max(d, 0.0));
            L[j * n + j] = ljj;
            for (int i = j + 1; i < n; ++i) {
                double v = s.diffusion[i * n + j];
                for (int k = 0; k < j; ++k) v -= L[i * n + k] * L[j * n + k];
                if (ljj == 0.0) {
                    if (std::abs(v) > 1e-12) throw std::invalid_argument("levy: diffusion must be positive semidefinite");
                } else {
                    L[i * n + j] = v / ljj;
                }
            }
        }
    }
}

}  // namespace detail

struct LevyDiagnostics {
    double measure_moment = 0.0;  // int min(|x|^2, 1) dnu
    double window_mass = 0.0;  // int over the window of p, should be 1
    double compensator_drift = 0.0;  // lambda int x chi(x) p(x) dx
    bool converged = true;
};

/// Checks the Levy-measure condition and that the quadrature window captures the jump density.
inline LevyDiagnostics levy_diagnostics(const LevySpec& s) {
    detail::check_levy(s);
    LevyDiagnostics d;
    if (s.jumps.kind == JumpKind::none) return d;
    const JumpMeasure& J = s.jumps;
    const double tol = 1e-13;
    d.window_mass = adaptive_gk([&](double x) { return J(x); }, J.lo(), J.hi(), tol).value;
    d.measure_moment =
        J.intensity * adaptive_gk([&](double x) { return std::min(x * x, 1.0) * J(x); }, J.lo(), J.hi(), tol).value;
    d.compensator_drift =
        J.intensity * adaptive_gk([&](double x) { return x * s.compensator(std::abs(x)) * J(x); }, J.lo(), J.hi(), tol).value;
    d.converged = std::abs(d.window_mass - 1.0) < 1e-8 && std::isfinite(d.measure_moment);
    return d;
}

/// a(xi) = -psi(xi), psi(xi) = i(mu, xi) - (Sigma xi, xi)/2 + int (e^{i x xi} - 1 - i x xi chi(x)) dnu(x).
inline Symbol levy_symbol(const LevySpec& s) {
    detail::check_levy(s);
    const LevyDiagnostics diag = levy_diagnostics(s);
    if (!diag.converged) throw std::runtime_error("levy: jump density not captured by its quadrature window (heavy tail?)");
    Symbol a;
    a.n = s.n;
    a.kind = SymbolKind::levy;
    a.re_nonneg = true;
    bool has_diffusion = false;
    for (double v : s.diffusion)
        if (v != 0.0) has_diffusion = true;
    const LevySpec spec = s;
    const double comp = diag.compensator_drift;
    a.value = [spec, comp](const Vec& xi) {
        const int n = spec.n;
        cplx psi = 0.0;
        for (int i = 0; i < n && !spec.drift.empty(); ++i) psi += cplx(0.0, spec.drift[i] * xi[i]);
        if (!spec.diffusion.empty()) {
            double quad = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) quad += spec.diffusion[i * n + j] * xi[i] * xi[j];
            psi -= 0.5 * quad;
        }
        if (spec.jumps.kind != JumpKind::none && spec.jumps.intensity > 0.0) {
            const JumpMeasure& J = spec.jumps;
            const double w = xi[0];
            cplx phi;  // int (e^{i x w} - 1) p(x) dx
            if (J.kind == JumpKind::gaussian) {
                phi = std::exp(cplx(-0.5 * J.sd * J.sd * w * w, J.mean * w)) - 1.0;
            } else {
                phi = detail::oscillatory_integral(
                          [&](double x) {
                              const double ph = x * w;
                              return cplx(std::cos(ph) - 1.0, std::sin(ph)) * J(x);
                          },
                          J.lo(), J.hi(), w)
                          .value;
            }
            psi += J.intensity * phi - cplx(0.0, comp * w);
        }
        return -psi;
    };
    // effective drift mu - compensator drift decides between orders 1 and 0
    std::vector<double> eff(s.n, 0.0);
    for (int i = 0; i < s.n && !s.drift.empty(); ++i) eff[i] = s.drift[i];
    if (s.jumps.kind != JumpKind::none) eff[0] -= comp;
    const bool has_drift = std::any_of(eff.begin(), eff.end(), [](double v) { return v != 0.0; });
    if (has_diffusion) {
        a.q = 2.0;
        a.a_inf = [spec](const Vec& xi) {
            double quad = 0.0;
            for (int i = 0; i < spec.n; ++i)
                for (int j = 0; j < spec.n; ++j) quad += spec.diffusion[i * spec.n + j] * xi[i] * xi[j];
            return cplx(0.5 * quad, 0.0);
        };
    } else if (has_drift) {
        a.q = 1.0;
        a.a_inf = [eff](const Vec& xi) {
            double d = 0.0;
            for (std::size_t i = 0; i < eff.size(); ++i) d += eff[i] * xi[static_cast<int>(i)];
            return cplx(0.0, -d);
        };
    } else {
        a.q = 0.0;
        // Riemann-Lebesgue: the jump characteristic function vanishes at infinity
        const double lambda = s.jumps.kind == JumpKind::none ? 0.0 : s.jumps.intensity;
        a.a_inf = [lambda](const Vec&) { return cplx(lambda, 0.0); };
    }
    return a;
}

// ---------------------------------------------------------------------------------------------
// Order and asymptotic homogeneity

struct SymbolOrderReport {
    double q_hat = 0.0;
    double constant = 0.0;  // sup |a| (1+|xi|)^-q_hat over samples
    double derivative_constant = 0.0;  // sup |d a/d xi_1| (1+|xi|)^-q_hat over samples
    double residual = 0.0;
    bool bounded_order = false;
    bool re_nonneg_ok = true;
};

/// Fits log|a| against log(1+|xi|) over radii 10^lo .. 10^hi along axes and diagonals.
inline SymbolOrderReport verify_symbol_order(const Symbol& a, double log10_lo = 0.0, double log10_hi = 4.0, int samples = 120) {
    if (log10_hi - log10_lo < 4.0) throw std::invalid_argument("verify_symbol_order: radii must span >= 4 decades");
    const int n = a.n;
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::axis(n, i, 1.0));
    if (n > 1) {
        Vec d(n);
        for (int i = 0; i < n; ++i) d[i] = 1.0 / std::sqrt(double(n));
        dirs.push_back(d);
    }
    SymbolOrderReport rep;
    std::vector<double> lx, ly, rad;
    double worst_slope = -1e300;
    double q_hat = 0.0;
    bool first = true;
    for (const Vec& d : dirs) {
        lx.clear();
        ly.clear();
        for (int k = 0; k < samples; ++k) {
            const double r = std::pow(10.0, log10_lo + (log10_hi - log10_lo) * k / (samples - 1));
            const Vec xi = d * r;
            const cplx v = a(xi);
            if (a.re_nonneg && v.real() < -1e-12 * std::max(1.0, std::abs(v))) rep.re_nonneg_ok = false;
            if (r < std::pow(10.0, log10_hi - 2.0)) continue;  // fit on the top two decades
            lx.push_back(std::log1p(r));
            ly.push_back(std::log(std::max(std::abs(v), 1e-300)));
        }
        const LineFit f = least_squares(lx, ly);
        rep.residual = std::max(rep.residual, f.residual);
        if (first || f.slope > worst_slope) {
            worst_slope = f.slope;
            q_hat = f.slope;
        }
        first = false;
    }
    if (std::abs(q_hat) < 1e-6) q_hat = 0.0;
    rep.q_hat = q_hat;
    rep.bounded_order = rep.residual < 0.05;
    for (const Vec& d : dirs) {
        for (int k = 0; k < samples; ++k) {
            const double r = std::pow(10.0, log10_lo + (log10_hi - log10_lo) * k / (samples - 1));
            const Vec xi = d * r;
            const double w = std::pow(1.0 + r, -q_hat);
            rep.constant = std::max(rep.constant, std::abs(a(xi)) * w);
            const double step = 1e-5 * std::max(1.0, r);
            const Vec e = Vec::axis(n, 0, step);
            const cplx der = (a(xi + e) - a(xi - e)) / (2.0 * step);
            rep.derivative_constant = std::max(rep.derivative_constant, std::abs(der) * w);
        }
    }
    return rep;
}

/// Declared order rounded to the fitted value when within 0.1.
inline double resolve_order(double declared, double fitted) { return std::abs(declared - fitted) <= 0.1 ? declared : fitted; }

/// lim a(lambda xi)/lambda^q over lambda = 2^m, m = m_lo..m_hi; empty when the values are not Cauchy.
inline std::optional<cplx> asymptotic_limit(const Symbol& a, const Vec& xi, double q, int m_lo = 6, int m_hi = 16,
                                            double tol = 1e-8) {
    if (xi.norm() == 0.0) throw std::invalid_argument("asymptotic_limit: xi must be nonzero");
    cplx prev = 0.0;
    cplx prev_diff = std::numeric_limits<double>::infinity();
    int settled = 0;
    for (int m = m_lo; m <= m_hi; ++m) {
        const double lam = std::ldexp(1.0, m);
        const cplx v = a(xi * lam) / std::pow(lam, q);
        if (m > m_lo) {
            const cplx diff = v - prev;
            const double scale = std::max(1.0, std::abs(v));
            if (std::abs(diff) <= tol * scale) {
                if (++settled >= 2) return v;
            } else {
                settled = 0;
            }
            // geometric Richardson step when differences contract steadily
            if (m == m_hi && std::abs(prev_diff) < std::numeric_limits<double>::infinity()) {
                const double ratio = std::abs(diff) / std::abs(prev_diff);
                if (ratio < 0.9 && std::abs(diff) * ratio / (1.0 - ratio) <= 1e3 * tol * scale) return v + diff * ratio / (1.0 - ratio);
            }
            prev_diff = diff;
        }
        prev = v;
    }
    return std::nullopt;
}

/// a_inf(xi) from the closed form when available, else from asymptotic_limit.
inline std::optional<cplx> symbol_limit(const Symbol& a, const Vec& xi) {
    if (a.a_inf) return a.a_inf(xi);
    return asymptotic_limit(a, xi, a.q);
}

}  // namespace rbfmol
