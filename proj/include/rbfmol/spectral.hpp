#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/cardinal.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/vec.hpp"

namespace rbfmol {

enum class DatumKind { gaussian, algebraic, singular, bump, zero, custom };

inline std::string to_string(DatumKind k) {
    switch (k) {
        case DatumKind::gaussian: return "gaussian";
        case DatumKind::algebraic: return "algebraic";
        case DatumKind::singular: return "singular";
        case DatumKind::bump: return "bump";
        case DatumKind::zero: return "zero";
        case DatumKind::custom: return "custom";
    }
    return "custom";
}

/// Initial datum described by its Fourier transform.
struct SpectralDensity {
    int n = 1;
    DatumKind kind = DatumKind::gaussian;
    double sigma = 1.0;  // gaussian width: exp(-sigma^2 |xi|^2)
    double m = 1.0;  // algebraic: (1 + |xi|^2)^-m
    double singularity_order = 0.0;  // |f^| <= C |xi|^-s near 0
    double decay_rate = std::numeric_limits<double>::infinity();  // |f^| <= C |xi|^-s at infinity
    double support_radius = std::numeric_limits<double>::infinity();  // f^ is zero (or underflows) beyond
    std::function<cplx(const Vec&)> custom;
    std::function<double(const Vec&)> custom_spatial;

    cplx operator()(const Vec& xi) const { return value(xi); }

    double value(const Vec& xi) const { return std::real(evaluate(xi)); }

    cplx evaluate(const Vec& xi) const {
        switch (kind) {
            case DatumKind::gaussian: return std::exp(-sigma * sigma * xi.norm2());
            case DatumKind::algebraic: return std::pow(1.0 + xi.norm2(), -m);
            case DatumKind::singular: {
                const double r2 = xi.norm2();
                return std::pow(r2, -0.5 * singularity_order) * std::exp(-sigma * sigma * r2);
            }
            case DatumKind::bump: {
                const double s2 = xi.norm2() / (support_radius * support_radius);
                if (s2 >= 1.0) return 0.0;
                return std::exp(1.0 - 1.0 / (1.0 - s2));
            }
            case DatumKind::zero: return 0.0;
            case DatumKind::custom: return custom(xi);
        }
        return 0.0;
    }

    bool has_spatial() const {
        return kind == DatumKind::gaussian || kind == DatumKind::zero ||
               (kind == DatumKind::custom && static_cast<bool>(custom_spatial));
    }

    /// f(x) = (2 pi)^-n int f^(xi) exp(i x.xi) dxi.
    double spatial(const Vec& x) const {
        switch (kind) {
            case DatumKind::gaussian:
                return std::pow(kTwoPi, -n) * std::pow(kPi / (sigma * sigma), 0.5 * n) *
                       std::exp(-x.norm2() / (4.0 * sigma * sigma));
            case DatumKind::zero: return 0.0;
            case DatumKind::custom:
                if (custom_spatial) return custom_spatial(x);
                break;
            default: break;
        }
        throw std::logic_error("datum has no spatial form");
    }
};

inline SpectralDensity make_gaussian_density(int n, double sigma = 1.0) {
    SpectralDensity d;
    d.n = n;
    d.kind = DatumKind::gaussian;
    d.sigma = sigma;
    d.support_radius = std::sqrt(745.0) / sigma;
    return d;
}

inline SpectralDensity make_algebraic_density(int n, double m) {
    if (!(2.0 * m > n)) throw std::invalid_argument("algebraic density must be integrable: need 2m > n");
    SpectralDensity d;
    d.n = n;
    d.kind = DatumKind::algebraic;
    d.m = m;
    d.decay_rate = 2.0 * m;
    return d;
}

/// Algebraic density whose decay exponent is r + n + 0.25, giving the reduced interpolation rate r.
inline SpectralDensity make_reduced_rate_density(int n, double r) { return make_algebraic_density(n, 0.5 * (r + n + 0.25)); }

inline SpectralDensity make_singular_density(int n, double order, double sigma = 1.0) {
    if (!(order >= 0.0 && order < n)) throw std::invalid_argument("singular density needs 0 <= order < n");
    SpectralDensity d;
    d.n = n;
    d.kind = DatumKind::singular;
    d.sigma = sigma;
    d.singularity_order = order;
    d.support_radius = std::sqrt(745.0) / sigma;
    return d;
}

inline SpectralDensity make_bump_density(int n, double radius) {
    SpectralDensity d;
    d.n = n;
    d.kind = DatumKind::bump;
    d.support_radius = radius;
    return d;
}

inline SpectralDensity make_zero_density(int n) {
    SpectralDensity d;
    d.n = n;
    d.kind = DatumKind::zero;
    d.support_radius = 0.0;
    return d;
}

// ---------------------------------------------------------------------------------------------
// Norms

enum class WeightKind { wiener, homogeneous, mixed };

/// Weight w(xi): 1, |xi|^s, or min(|xi|^r, |xi|^s).
struct Weight {
    WeightKind kind = WeightKind::wiener;
    double r = 0.0;
    double s = 0.0;

    static Weight wiener() { return {}; }
    static Weight hom(double s) { return {WeightKind::homogeneous, s, s}; }
    static Weight mixed(double r, double s) { return {WeightKind::mixed, r, s}; }

    double operator()(double rad) const {
        switch (kind) {
            case WeightKind::wiener: return 1.0;
            case WeightKind::homogeneous: return std::pow(rad, s);
            case WeightKind::mixed: return std::min(std::pow(rad, r), std::pow(rad, s));
        }
        return 1.0;
    }
    double exponent_at_zero() const { return kind == WeightKind::wiener ? 0.0 : std::max(r, s); }
    double exponent_at_infinity() const { return kind == WeightKind::wiener ? 0.0 : std::min(r, s); }
};

struct NormResult {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
};

/// int |g(xi)| w(xi) dxi for a density, with a power-law tail estimate beyond the grid.
inline NormResult weighted_l1_norm(const SpectralDensity& g, const Weight& w, double radius = 0.0,
                                   GridOptions opts = {}) {
    NormResult out;
    const int n = g.n;
    if (g.singularity_order - w.exponent_at_zero() >= n || g.decay_rate - w.exponent_at_infinity() <= n) {
        out.divergent = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    if (g.kind == DatumKind::zero) return out;
    double R = radius > 0.0 ? radius : (std::isfinite(g.support_radius) ? g.support_radius : 1e4);
    if (n == 2) {
        opts.grade_levels = std::min(opts.grade_levels, 20);
        opts.uniform_width = std::max(opts.uniform_width, 0.5);
    }
    QuadratureGrid grid{n, R, 0.0, opts};
    const auto q = grid.integrate([&](const Vec& xi) { return std::abs(g.evaluate(xi)) * w(xi.norm()); });
    out.value = q.value;
    out.error = q.error;
    if (!std::isfinite(g.support_radius) || R < g.support_radius) {
        const double edge = std::abs(g.evaluate(Vec::axis(n, 0, R))) * w(R);
        const double s_eff = g.decay_rate - w.exponent_at_infinity();
        const double tail = std::isfinite(g.decay_rate) ? power_tail_integral(n, edge, R, s_eff) : 0.0;
        out.value += tail;
        out.error += 1e-2 * tail;
    }
    return out;
}

/// int |g(xi)| w(xi) dxi for an arbitrary integrand on a grid.
template <class F>
NormResult weighted_l1_norm(F&& g, const Weight& w, const QuadratureGrid& grid) {
    const auto q = grid.integrate([&](const Vec& xi) { return std::abs(g(xi)) * w(xi.norm()); });
    return {q.value, q.error, false};
}

/// sup (1 + |x|)^s |g(x)| over samples.
inline double weighted_sup_norm(const std::vector<Vec>& points, const std::vector<double>& values, double s) {
    if (points.size() != values.size()) throw std::invalid_argument("weighted_sup_norm: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) m = std::max(m, std::pow(1.0 + points[i].norm(), s) * std::abs(values[i]));
    return m;
}

// ---------------------------------------------------------------------------------------------
// Alias sums

namespace detail {

// Number of alias shifts k (per axis) with f^(xi + 2 pi k/h) above underflow for xi in the cell.
inline int density_window(const SpectralDensity& f, double h, double tol = 1e-11) {
    if (f.kind == DatumKind::zero) return 0;
    if (std::isfinite(f.support_radius)) {
        return static_cast<int>(std::ceil(f.support_radius * h / kTwoPi + 0.5)) + 1;
    }
    // power law (1 + |xi|^2)^-m: corrected tail relative error ~ s^2/(8 K^2) * K^{1-s}
    const double s = f.decay_rate;
    int K = 8;
    while (K < 200000 && s * s / (8.0 * K * K) * std::pow(double(K), 1.0 - s) > tol) K = int(K * 1.25) + 1;
    return K;
}

inline cplx complex_expm1(cplx z) {
    if (std::abs(z) < 1e-3) return z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0))));
    if (z.real() < -700.0) return -1.0;
    return std::exp(z) - 1.0;
}

}  // namespace detail

/// Bracketed alias sum sum_k f^(xi + 2 pi k/h), (2 pi/h)-periodic.
inline cplx alias_sum(const SpectralDensity& f, double h, const Vec& xi) {
    const int n = f.n;
    const int K = detail::density_window(f, h);
    const double sp = kTwoPi / h;
    Vec x0 = xi;
    for (int i = 0; i < n; ++i) x0[i] = std::remainder(xi[i], sp);
    cplx s = 0.0;
    LatticeBox(n, K).for_each([&](const std::array<int, kMaxDim>& k) { s += f.evaluate(x0 + lattice_point(k, n, sp)); });
    if (n == 1 && !std::isfinite(f.support_radius)) {
        const double xr = x0[0] + sp * K, xl = sp * K - x0[0];
        s += power_tail_1d(f.value(Vec::scalar(xr)), xr, x0[0] + sp * (K + 0.5), sp, f.decay_rate) +
             power_tail_1d(f.value(Vec::scalar(-xl)), xl, sp * (K + 0.5) - x0[0], sp, f.decay_rate);
    }
    return s;
}

/// Sigma_h(f^)(xi) = (sum_k f^(xi + 2 pi k/h)) L^_1(h xi).
inline cplx alias_apply(const SpectralDensity& f, const BasisFunction& b, double h, const Vec& xi,
                        const LatticeSumParams& lp) {
    return alias_sum(f, h, xi) * lagrange_symbol(b, xi * h, lp);
}

// ---------------------------------------------------------------------------------------------
// Folded error engine

using SymbolFn = std::function<cplx(const Vec&)>;

/// Per-point result of the folded evaluation at xi0 in the cell Q_h.
struct FoldedPoint {
    double abs_sum = 0.0;  // sum over shifts l of |e(xi0 + 2 pi l/h)|
    double interp_abs_sum = 0.0;  // same for the interpolation error alone
    double multiplier_abs_sum = 0.0;  // sum of |exp(-t G*) - exp(-t a)| |f^| over shifts
    double bound_integrand = 0.0;  // 2 (1 - L^_1(h xi)) |f^(xi)| summed over shifts
    cplx G = 0.0;  // scheme multiplier G*(xi0; h)
};

/**
 * @brief Evaluates the Fourier-side error of interpolation and of the semi-discrete scheme.
 *
 * Every point xi0 of the cell Q_h = [-pi/h, pi/h]^n stands for the shifts xi0 + 2 pi l/h. Because
 * the scheme multiplier is (2 pi/h)-periodic and sum_l L^_1(h xi0 + 2 pi l) = 1, integrating the
 * folded sum over the cell equals the integral of |error| over R^n. The shift l = 0 term and the
 * defect G* - a are evaluated in complement form so tiny errors keep their relative accuracy.
 */
class FoldedErrorEngine {
public:
    FoldedErrorEngine(const BasisFunction& b, const SpectralDensity& f, double h, const LatticeSumParams& lp,
                      SymbolFn a = nullptr, double t = 0.0, double symbol_order = 0.0)
        : b_(b), f_(f), h_(h), lp_(lp), a_(std::move(a)), t_(t), q_(symbol_order) {
        if (b.n != f.n) throw std::invalid_argument("FoldedErrorEngine: dimension mismatch");
        if (b.n > 2) throw std::invalid_argument("FoldedErrorEngine: implemented for n <= 2");
        if (a_ && !b.super_polynomial() && !(b.decayN > b.n + q_))
            throw std::invalid_argument("scheme multiplier: decay exponent must exceed n + q");
        Kf_ = detail::density_window(f, h);
        K_ = std::max(lp.K, Kf_);
        if (b.n == 1) K_ = std::min(K_, 400000);
        const long side = 2L * K_ + 1;
        count_ = b.n == 1 ? side : side * side;
    }

    int window() const { return K_; }
    double cell_half_width() const { return kPi / h_; }

    /// Radius beyond which the folded integrand vanishes to underflow.
    double active_radius() const { return std::min(cell_half_width(), f_.support_radius); }

    FoldedPoint evaluate(const Vec& xi0) const {
        const int n = b_.n;
        const double sp = kTwoPi / h_;
        const Vec eta = xi0 * h_;
        FoldedPoint out;

        thread_local std::vector<double> phi;
        thread_local std::vector<cplx> fv;
        thread_local std::vector<cplx> av;
        phi.assign(count_, 0.0);
        fv.assign(count_, 0.0);
        if (a_) av.assign(count_, 0.0);

        long zero_idx = 0;
        bool eta_zero = true;
        for (int i = 0; i < n; ++i)
            if (eta[i] != 0.0) eta_zero = false;
        if (eta_zero && b_.kappa > 0.0) return out;  // measure-zero lattice point

        // fill window
        double rest = 0.0;
        cplx s_prime = 0.0;
        cplx f0 = 0.0;
        const int Kphi = lp_.K;
        long idx = 0;
        LatticeBox(n, K_).for_each([&](const std::array<int, kMaxDim>& k) {
            bool inside_phi = true;
            bool inside_f = true;
            bool zero = true;
            for (int i = 0; i < n; ++i) {
                if (std::abs(k[i]) > Kphi) inside_phi = false;
                if (std::abs(k[i]) > Kf_) inside_f = false;
                if (k[i] != 0) zero = false;
            }
            if (inside_phi) phi[idx] = b_.fourier(eta + lattice_point(k, n, kTwoPi));
            const Vec xs = xi0 + lattice_point(k, n, sp);
            if (inside_f) fv[idx] = f_.evaluate(xs);
            if (a_) av[idx] = a_(xs);
            if (zero) {
                zero_idx = idx;
                f0 = fv[idx];
            } else {
                rest += phi[idx];
                s_prime += fv[idx];
            }
            ++idx;
        });
        const double phi_tail = lattice_tail_correction(b_, eta, lp_);
        rest += phi_tail;
        double f_tail = 0.0;  // mass of |f^| beyond the window
        if (n == 1 && !std::isfinite(f_.support_radius)) {
            const double xr = xi0[0] + sp * Kf_, xl = sp * Kf_ - xi0[0];
            f_tail = power_tail_1d(f_.value(Vec::scalar(xr)), xr, xi0[0] + sp * (Kf_ + 0.5), sp, f_.decay_rate) +
                     power_tail_1d(f_.value(Vec::scalar(-xl)), xl, sp * (Kf_ + 0.5) - xi0[0], sp, f_.decay_rate);
            s_prime += f_tail;
        }
        const double P = phi[zero_idx] + rest;
        const double comp0 = rest / P;
        const cplx S = f0 + s_prime;

        // scheme multiplier in defect form: G* - a0 = sum_{l != 0} (a_l - a_0) L^_l
        cplx E = 1.0;
        cplx a0 = 0.0;
        cplx defect = 0.0;
        if (a_) {
            a0 = av[zero_idx];
            for (long j = 0; j < count_; ++j) {
                if (j == zero_idx || phi[j] == 0.0) continue;
                defect += (av[j] - a0) * (phi[j] / P);
            }
            if (n == 1 && !b_.super_polynomial()) {
                const double s_exp = b_.decayN - q_;
                const int Kp = std::min(Kphi, K_);
                const long jr_phi = zero_idx + Kp, jl_phi = zero_idx - Kp;
                const cplx tr = (av[jr_phi] - a0) * (phi[jr_phi] / P);
                const cplx tl = (av[jl_phi] - a0) * (phi[jl_phi] / P);
                const double cr = power_tail_1d(1.0, Kp, Kp + 0.5, 1.0, s_exp);
                defect += (tr + tl) * cr;
            }
            out.G = a0 + defect;
            E = clamped_exp(-t_ * out.G);
        }

        // shift l = 0
        const cplx i0 = -comp0 * f0 + (phi[zero_idx] / P) * s_prime;
        cplx m0 = 0.0;
        if (a_) m0 = clamped_exp(-t_ * a0) * detail::complex_expm1(-t_ * defect) * f0;
        const cplx e0 = E * i0 + m0;
        out.abs_sum += std::abs(e0);
        out.interp_abs_sum += std::abs(i0);
        out.multiplier_abs_sum += std::abs(m0);
        out.bound_integrand += 2.0 * comp0 * std::abs(f0);

        for (long j = 0; j < count_; ++j) {
            if (j == zero_idx) continue;
            const cplx ij = (phi[j] / P) * S - fv[j];
            cplx mj = 0.0;
            if (a_) mj = (E - clamped_exp(-t_ * av[j])) * fv[j];
            out.abs_sum += std::abs(E * ij + mj);
            out.interp_abs_sum += std::abs(ij);
            out.multiplier_abs_sum += std::abs(mj);
            out.bound_integrand += 2.0 * (1.0 - phi[j] / P) * std::abs(fv[j]);
        }
        // window remainder: symbol mass outside the phi window and data mass outside the data window
        const double lhat_tail = phi_tail / P;
        out.abs_sum += std::abs(E * S) * lhat_tail + f_tail;
        out.interp_abs_sum += std::abs(S) * lhat_tail + f_tail;
        out.multiplier_abs_sum += 2.0 * f_tail;
        out.bound_integrand += 2.0 * f_tail;
        return out;
    }

private:
    BasisFunction b_;
    SpectralDensity f_;
    double h_;
    LatticeSumParams lp_;
    SymbolFn a_;
    double t_;
    double q_;
    int Kf_ = 0;
    int K_ = 0;
    long count_ = 0;
};

/// Default quadrature layout for folded cell integrals.
inline GridOptions folded_grid_options(int n) {
    GridOptions o;
    if (n == 2) {
        o.grade_levels = 12;
        o.uniform_width = 0.5;
        o.uniform_until = 10.0;
        o.angular_panels_per_octant = 1;
    }
    return o;
}

struct ErrorNorms {
    double error = 0.0;  // ||error||_1 over R^n
    double quadrature_error = 0.0;
    double interp_error = 0.0;  // ||s_h - f^||_1
    double multiplier_term = 0.0;  // int |exp(-t G*) - exp(-t a)| |f^|
    double interp_bound = 0.0;  // 2 int (1 - L^_1(h xi)) |f^|
};

/// Integrates a folded engine over the cell.
inline ErrorNorms integrate_folded(const FoldedErrorEngine& eng, int n, const GridOptions* opts = nullptr) {
    QuadratureGrid grid{n, eng.active_radius(), eng.cell_half_width(), opts ? *opts : folded_grid_options(n)};
    const auto q = grid.integrate([&](const Vec& xi) { return eng.evaluate(xi).abs_sum; });
    ErrorNorms out;
    out.error = q.value;
    out.quadrature_error = q.error;
    return out;
}

/// Full decomposition of the folded integrals (interpolation, multiplier and bound parts).
inline ErrorNorms integrate_folded_components(const FoldedErrorEngine& eng, int n, const GridOptions* opts = nullptr) {
    QuadratureGrid grid{n, eng.active_radius(), eng.cell_half_width(), opts ? *opts : folded_grid_options(n)};
    ErrorNorms out;
    auto run = [&](int which) {
        const auto q = grid.integrate([&](const Vec& xi) {
            const FoldedPoint p = eng.evaluate(xi);
            switch (which) {
                case 0: return p.abs_sum;
                case 1: return p.interp_abs_sum;
                case 2: return p.multiplier_abs_sum;
                default: return p.bound_integrand;
            }
        });
        return q;
    };
    const auto e = run(0);
    out.error = e.value;
    out.quadrature_error = e.error;
    out.interp_error = run(1).value;
    out.multiplier_term = run(2).value;
    out.interp_bound = run(3).value;
    return out;
}

/// Pointwise interpolation error s^_h[f](xi) - f^(xi) at any xi.
inline cplx interp_error_density(const SpectralDensity& f, const BasisFunction& b, double h, const Vec& xi,
                                 const LatticeSumParams& lp) {
    const int n = f.n;
    const double sp = kTwoPi / h;
    Vec x0 = xi;
    bool own_zero = true;
    for (int i = 0; i < n; ++i) {
        x0[i] = std::remainder(xi[i], sp);
        if (std::lround((xi[i] - x0[i]) / sp) != 0) own_zero = false;
    }
    const cplx fx = f.evaluate(xi);
    if (own_zero) {
        // (L^ - 1) f^ + L^ * sum_{k != 0} f^(xi + 2 pi k/h)
        const cplx others = alias_sum(f, h, xi) - fx;
        const PeriodizedValue pv = periodize(b, xi * h, lp);
        if (pv.on_lattice) return others * 0.0;
        return -(pv.rest / pv.total) * fx + (pv.own / pv.total) * others;
    }
    return alias_sum(f, h, xi) * lagrange_symbol(b, xi * h, lp) - fx;
}

/// ||s_h[f] - f||_A, the Wiener norm of the interpolation error.
inline ErrorNorms interp_error_norm(const SpectralDensity& f, const BasisFunction& b, double h,
                                    const LatticeSumParams& lp, bool components = false) {
    FoldedErrorEngine eng(b, f, h, lp);
    return components ? integrate_folded_components(eng, b.n) : integrate_folded(eng, b.n);
}

// ---------------------------------------------------------------------------------------------
// Spatial interpolant s_h[f](x) = sum_j f(hj) L_1(x/h - j)

/// Gaussian summation taper e^{-(eps |hj|)^2}, eps halved until the value changes by less than tol.
struct SpatialTaper {
    double eps0 = 0.5;
    double tol = 1e-10;
    int max_halvings = 30;
};

struct SpatialInterpolation {
    double value = 0.0;
    double truncation_estimate = 0.0;  // tail beyond |j|_inf = J extrapolated from the outermost shell
    int halvings = 0;
    double taper_eps = 0.0;
    bool converged = true;
};

template <class F>
    requires(!std::is_same_v<std::decay_t<F>, SpectralDensity>)
SpatialInterpolation interpolate_spatial(F&& f, const CardinalFunction& L, double h, const Vec& x, int J,
                                         const std::optional<SpatialTaper>& taper = std::nullopt) {
    const int n = L.n();
    if (x.dim() != n) throw std::invalid_argument("interpolate_spatial: dimension mismatch");
    if (!(h > 0.0) || J < 0) throw std::invalid_argument("interpolate_spatial: need h > 0 and J >= 0");
    if (L.kappa == 0.0 && !taper)
        throw std::invalid_argument("interpolate_spatial: kappa = 0 needs a summation taper (series not absolutely summable)");
    // products f(hj) L_1(x/h - j) are fixed; only the taper weights change
    std::vector<double> terms, radii;
    double shell = 0.0;
    LatticeBox(n, J).for_each([&](const std::array<int, kMaxDim>& j) {
        const Vec node = lattice_point(j, n, h);
        const Vec arg = x * (1.0 / h) - lattice_point(j, n, 1.0);
        const double v = static_cast<double>(f(node)) * L(arg);
        terms.push_back(v);
        radii.push_back(node.norm());
        int m = 0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(j[i]));
        if (m == J) shell += std::abs(v);
    });
    SpatialInterpolation out;
    out.truncation_estimate = L.kappa > 0.0 && J > 0 ? shell * J / L.kappa : shell;
    auto sum_with = [&](double eps) {
        double s = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) s += eps > 0.0 ? terms[i] * std::exp(-std::pow(eps * radii[i], 2)) : terms[i];
        return s;
    };
    if (!taper) {
        out.value = sum_with(0.0);
        return out;
    }
    double eps = taper->eps0;
    double prev = sum_with(eps);
    out.converged = false;
    for (int k = 1; k <= taper->max_halvings; ++k) {
        eps *= 0.5;
        const double cur = sum_with(eps);
        out.halvings = k;
        out.taper_eps = eps;
        out.value = cur;
        if (std::abs(cur - prev) < taper->tol) {
            out.converged = true;
            break;
        }
        prev = cur;
    }
    return out;
}

/// Spatial interpolant of a density with a closed-form spatial datum.
inline SpatialInterpolation interpolate_spatial(const SpectralDensity& f, const CardinalFunction& L, double h, const Vec& x, int J,
                                                const std::optional<SpatialTaper>& taper = std::nullopt) {
    if (!f.has_spatial()) throw std::invalid_argument("interpolate_spatial: datum has no spatial form");
    return interpolate_spatial([&f](const Vec& y) { return f.spatial(y); }, L, h, x, J, taper);
}

}  // namespace rbfmol
