#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/bessel.hpp"
#include "rbfmol/vec.hpp"

namespace rbfmol {

enum class Family { gaussian, multiquadric, polyharmonic, custom };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::multiquadric: return "multiquadric";
        case Family::polyharmonic: return "polyharmonic";
        case Family::custom: return "custom";
    }
    return "custom";
}

inline Family family_from_string(const std::string& s) {
    if (s == "gaussian") return Family::gaussian;
    if (s == "multiquadric") return Family::multiquadric;
    if (s == "polyharmonic") return Family::polyharmonic;
    throw std::invalid_argument("unknown basis family: " + s);
}

/// Smooth radial cutoff: 1 on |x| <= r0, 0 on |x| >= r1, C-infinity in between.
struct CutoffSpec {
    double r0 = 1.0;
    double r1 = 2.0;

    CutoffSpec() = default;
    CutoffSpec(double inner, double outer) : r0(inner), r1(outer) {
        if (!(inner > 0.0 && outer > inner)) throw std::invalid_argument("CutoffSpec: need 0 < r0 < r1");
    }

    double operator()(double r) const {
        if (r <= r0) return 1.0;
        if (r >= r1) return 0.0;
        const double s = (r - r0) / (r1 - r0);
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    double operator()(const Vec& x) const { return (*this)(x.norm()); }
};

inline constexpr double kSuperPolynomial = std::numeric_limits<double>::infinity();

/**
 * @brief Basis function given through its Fourier transform.
 *
 * Fourier convention: f^(xi) = int f(x) exp(-i x.xi) dx. Shape c dilates x -> x/c.
 */
struct BasisFunction {
    int n = 1;
    Family family = Family::gaussian;
    double c = 1.0;
    double p = 0.0;
    double kappa = 0.0;
    double decayN = kSuperPolynomial;
    double A_lower = 1.0;
    double A_upper = 1.0;
    std::function<double(const Vec&)> custom_fourier;
    std::function<double(const Vec&)> custom_spatial;

    bool radial() const { return family != Family::custom; }
    bool super_polynomial() const { return std::isinf(decayN); }

    double fourier_radial(double r) const {
        switch (family) {
            case Family::gaussian: return std::pow(c, n) * std::exp(-c * c * r * r);
            case Family::multiquadric: {
                const double nu = 0.5 * (n + 1);
                const double z = c * r;
                if (z > 740.0) return 0.0;
                return std::pow(kTwoPi * c, nu) / kPi * std::pow(r, -nu) * modified_bessel_k(nu, z);
            }
            case Family::polyharmonic: return std::pow(c, -p) * std::pow(r, -(n + p));
            case Family::custom: break;
        }
        throw std::logic_error("fourier_radial on non-radial basis");
    }

    /// d/dr of the radial profile.
    double fourier_radial_derivative(double r) const {
        switch (family) {
            case Family::gaussian: return -2.0 * c * c * r * fourier_radial(r);
            case Family::multiquadric: {
                const double nu = 0.5 * (n + 1);
                const double z = c * r;
                if (z > 740.0) return 0.0;
                return -std::pow(kTwoPi * c, nu) / kPi * c * std::pow(r, -nu) * modified_bessel_k(nu + 1.0, z);
            }
            case Family::polyharmonic: return -(n + p) * fourier_radial(r) / r;
            case Family::custom: break;
        }
        throw std::logic_error("fourier_radial_derivative on non-radial basis");
    }

    /// log phi^ along the radius, finite where the direct value underflows.
    double log_fourier_radial(double r) const {
        switch (family) {
            case Family::gaussian: return n * std::log(c) - c * c * r * r;
            case Family::multiquadric: {
                const double nu = 0.5 * (n + 1);
                return nu * std::log(kTwoPi * c) - std::log(kPi) - nu * std::log(r) + detail::log_bessel_k(nu, c * r);
            }
            case Family::polyharmonic: return -p * std::log(c) - (n + p) * std::log(r);
            case Family::custom: break;
        }
        throw std::logic_error("log_fourier_radial on non-radial basis");
    }

    /// log |d/dr phi^|.
    double log_fourier_radial_slope(double r) const {
        switch (family) {
            case Family::gaussian: return std::log(2.0 * c * c * r) + log_fourier_radial(r);
            case Family::multiquadric: {
                const double nu = 0.5 * (n + 1);
                return nu * std::log(kTwoPi * c) - std::log(kPi) + std::log(c) - nu * std::log(r) +
                       detail::log_bessel_k(nu + 1.0, c * r);
            }
            case Family::polyharmonic: return std::log((n + p) / r) + log_fourier_radial(r);
            case Family::custom: break;
        }
        throw std::logic_error("log_fourier_radial_slope on non-radial basis");
    }

    double fourier(const Vec& eta) const {
        if (family == Family::custom) return custom_fourier(eta);
        return fourier_radial(eta.norm());
    }

    Vec fourier_gradient(const Vec& eta) const {
        Vec g(eta.dim());
        if (family == Family::custom) {
            for (int i = 0; i < eta.dim(); ++i) {
                const double step = 1e-6 * std::max(1.0, std::abs(eta[i]));
                Vec a = eta, b = eta;
                a[i] += step;
                b[i] -= step;
                g[i] = (custom_fourier(a) - custom_fourier(b)) / (2.0 * step);
            }
            return g;
        }
        const double r = eta.norm();
        const double d = fourier_radial_derivative(r);
        for (int i = 0; i < eta.dim(); ++i) g[i] = d * eta[i] / r;
        return g;
    }

    bool has_spatial() const {
        if (family == Family::custom) return static_cast<bool>(custom_spatial);
        if (family == Family::polyharmonic) return std::abs(std::remainder(p, 2.0)) > 1e-12;
        return true;
    }

    /// phi(x) normalised so that its (generalised) Fourier transform is fourier().
    double spatial(const Vec& x) const {
        const double r2 = x.norm2();
        switch (family) {
            case Family::gaussian:
                return std::pow(4.0 * kPi, -0.5 * n) * std::exp(-r2 / (4.0 * c * c));
            case Family::multiquadric: return -std::sqrt(r2 + c * c);
            case Family::polyharmonic: {
                // FT of |x|^p is 2^{p+n} pi^{n/2} Gamma((n+p)/2) / Gamma(-p/2) |eta|^{-n-p}
                const double C = std::pow(2.0, p + n) * std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * (n + p)) /
                                 std::tgamma(-0.5 * p);
                return std::pow(c, -p) * std::pow(std::sqrt(r2), p) / C;
            }
            case Family::custom:
                if (custom_spatial) return custom_spatial(x);
                break;
        }
        throw std::logic_error("basis has no spatial form");
    }

    /// Upper envelope of fourier() at radius >= r, used for truncation bounds.
    double envelope(double r) const {
        if (family == Family::custom) {
            double m = 0.0;
            for (int i = 0; i < 16; ++i) {
                Vec e = Vec::axis(n, 0, r * (1.0 + 0.05 * i));
                m = std::max(m, std::abs(custom_fourier(e)));
            }
            return m;
        }
        return fourier_radial(r);
    }
};

/**
 * @brief Catalogue constructor.
 *
 * gaussian: c^n exp(-c^2|eta|^2); multiquadric: Fourier transform of -sqrt(|x|^2+c^2);
 * polyharmonic: c^n |c eta|^{-n-p}.
 */
inline BasisFunction make_basis(Family family, int n, double c = 1.0, double p = 0.0) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("make_basis: dimension must be in [1,4]");
    if (!(c > 0.0)) throw std::invalid_argument("make_basis: shape c must be positive");
    BasisFunction b;
    b.n = n;
    b.family = family;
    b.c = c;
    switch (family) {
        case Family::gaussian:
            b.kappa = 0.0;
            b.decayN = kSuperPolynomial;
            b.A_lower = b.A_upper = std::pow(c, n);
            break;
        case Family::multiquadric: {
            b.kappa = n + 1;
            b.decayN = kSuperPolynomial;
            const double An = std::pow(2.0, n) * std::pow(kPi, 0.5 * (n - 1)) * std::tgamma(0.5 * (n + 1));
            b.A_lower = b.A_upper = An;
            break;
        }
        case Family::polyharmonic:
            if (!(p > 0.0)) throw std::invalid_argument("make_basis: polyharmonic needs p > 0");
            b.p = p;
            b.kappa = n + p;
            b.decayN = n + p;
            b.A_lower = b.A_upper = std::pow(c, -p);
            break;
        case Family::custom: throw std::invalid_argument("make_basis: use make_custom_basis");
    }
    return b;
}

/// Basis given by an arbitrary transform; kappa and decay are declared by the caller.
inline BasisFunction make_custom_basis(int n, std::function<double(const Vec&)> fourier, double kappa,
                                       double decayN, double A_lower = 1.0, double A_upper = 1.0) {
    BasisFunction b;
    b.n = n;
    b.family = Family::custom;
    b.custom_fourier = std::move(fourier);
    b.kappa = kappa;
    b.decayN = decayN;
    b.A_lower = A_lower;
    b.A_upper = A_upper;
    return b;
}

struct MembershipCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct MembershipReport {
    std::vector<MembershipCheck> checks;
    double fitted_lower = 0.0;  // min |eta|^kappa phi^ on 0 < |eta| <= 1
    double fitted_upper = 0.0;  // max |eta|^kappa phi^ on 0 < |eta| <= 1
    double decay_constant = 0.0;  // max |eta|^N phi^ on |eta| >= 1
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct MembershipTolerances {
    int radial_samples = 200;
    int directions = 16;
    double small_radius = 1e-6;
    double large_radius = 1e3;
    double growth_factor = 4.0;  // allowed drift of scaled derivative bounds across decades
};

namespace detail {

inline std::vector<Vec> direction_sample(int n, int count) {
    std::vector<Vec> dirs;
    if (n == 1) {
        dirs.push_back(Vec::scalar(1.0));
        dirs.push_back(Vec::scalar(-1.0));
        return dirs;
    }
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::axis(n, i));
    Vec diag(n, 1.0 / std::sqrt(double(n)));
    dirs.push_back(diag);
    // deterministic quasi-random directions
    double g = 0.0;
    for (int j = 0; (int)dirs.size() < count; ++j) {
        Vec d(n);
        for (int i = 0; i < n; ++i) {
            g = std::fmod(g + 0.6180339887498949 + 0.1 * i, 1.0);
            d[i] = std::cos(kTwoPi * g) + 0.3 * (i + 1) * std::sin(kPi * g * (j + 1));
        }
        const double r = d.norm();
        if (r > 1e-3) dirs.push_back(d * (1.0 / r));
    }
    return dirs;
}

// Mixed second partial by central differences.
inline double fourier_second(const BasisFunction& b, const Vec& eta, int i, int j, double step) {
    auto f = [&](double si, double sj) {
        Vec e = eta;
        e[i] += si;
        e[j] += sj;
        return b.fourier(e);
    };
    if (i == j) return (f(step, 0) - 2.0 * b.fourier(eta) + f(-step, 0)) / (step * step);
    return (f(step, step) - f(step, -step) - f(-step, step) + f(-step, -step)) / (4.0 * step * step);
}

}  // namespace detail

/// Numerical check of positivity, the elliptic sandwich at 0 with derivative bounds, and decay.
inline MembershipReport verify_membership(const BasisFunction& b, const MembershipTolerances& tol = {}) {
    MembershipReport rep;
    const auto dirs = detail::direction_sample(b.n, tol.directions);
    const int n = b.n;

    bool positive = true;
    double min_val = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    // scaled derivative maxima on two ranges: [small, 1e-2] and [1e-2, 1]
    double d1_inner = 0.0, d1_outer = 0.0, d2_inner = 0.0, d2_outer = 0.0;
    const double lmin = std::log(tol.small_radius);
    for (const auto& d : dirs) {
        for (int s = 0; s <= tol.radial_samples; ++s) {
            const double r = std::exp(lmin * (1.0 - double(s) / tol.radial_samples));
            const Vec eta = d * r;
            const double v = b.fourier(eta);
            if (!(v > 0.0)) positive = false;
            min_val = std::min(min_val, v);
            const double scaled = std::pow(r, b.kappa) * v;
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
            if (s % 10 != 0) continue;
            const double step = 1e-3 * r;
            const Vec g = b.fourier_gradient(eta);
            const double d1 = g.norm() * std::pow(r, b.kappa + 1.0);
            double d2 = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    d2 = std::max(d2, std::abs(detail::fourier_second(b, eta, i, j, step)));
            d2 *= std::pow(r, b.kappa + 2.0);
            if (r < 1e-2) {
                d1_inner = std::max(d1_inner, d1);
                d2_inner = std::max(d2_inner, d2);
            } else {
                d1_outer = std::max(d1_outer, d1);
                d2_outer = std::max(d2_outer, d2);
            }
        }
    }
    // positivity also on the far field
    double decay_c = 0.0;
    double decay_c_inner = 0.0;
    double grad_decay_c = 0.0;
    const double N = b.super_polynomial() ? n + 20.0 : b.decayN;
    const double lmax = std::log(tol.large_radius);
    for (const auto& d : dirs) {
        for (int s = 0; s <= tol.radial_samples; ++s) {
            const double r = std::exp(lmax * double(s) / tol.radial_samples);
            const Vec eta = d * r;
            const double v = b.fourier(eta);
            if (!(v > 0.0) && !(b.super_polynomial() && v == 0.0)) positive = false;
            const double scaled = std::pow(r, N) * std::abs(v);
            if (r < std::sqrt(tol.large_radius)) decay_c_inner = std::max(decay_c_inner, scaled);
            decay_c = std::max(decay_c, scaled);
            grad_decay_c = std::max(grad_decay_c, b.fourier_gradient(eta).norm() * std::pow(r, N));
        }
    }

    rep.fitted_lower = lo;
    rep.fitted_upper = hi;
    rep.decay_constant = decay_c;

    rep.checks.push_back({"positivity", positive, min_val, "fourier > 0 on sampled eta != 0"});
    const bool sandwich = positive && lo > 0.0 && std::isfinite(hi) && hi / lo < 1e6;
    rep.checks.push_back({"elliptic_sandwich", sandwich, hi / (lo > 0 ? lo : 1e-300),
                          "c|eta|^-kappa <= fourier <= C|eta|^-kappa on 0<|eta|<=1"});
    const bool deriv1 = std::isfinite(d1_inner) && d1_inner <= tol.growth_factor * std::max(d1_outer, 1e-300) + 1e-12;
    const bool deriv2 = std::isfinite(d2_inner) && d2_inner <= tol.growth_factor * std::max(d2_outer, 1e-300) + 1e-12;
    rep.checks.push_back({"derivative_order1", deriv1, d1_inner, "|grad fourier| <= C|eta|^{-kappa-1} near 0"});
    rep.checks.push_back({"derivative_order2", deriv2, d2_inner, "|D^2 fourier| <= C|eta|^{-kappa-2} near 0"});
    const bool decay = std::isfinite(decay_c) && decay_c <= tol.growth_factor * std::max(decay_c_inner, 1e-300) + 1e-300;
    rep.checks.push_back({"decay", decay && b.decayN > n, decay_c, "fourier <= C|eta|^-N on |eta|>=1, N>n"});
    rep.checks.push_back({"decay_gradient", std::isfinite(grad_decay_c), grad_decay_c,
                          "|grad fourier| <= C|eta|^-N on |eta|>=1"});
    return rep;
}

}  // namespace rbfmol
