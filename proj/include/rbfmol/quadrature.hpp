#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <limits>
#include <type_traits>
#include <vector>

#include "rbfmol/vec.hpp"

namespace rbfmol {

namespace detail {
// 15-point Kronrod nodes (non-negative half) and weights; odd-indexed nodes are the 7-point Gauss nodes.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
};

/// Gauss-Kronrod 7/15 on [a, b]; error is |K15 - G7|.
template <class F>
auto gk15(F&& f, double a, double b) {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T kr = fc * detail::kWgk[7];
    T ga = fc * detail::kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * detail::kXgk[j];
        const T s = f(c - dx) + f(c + dx);
        kr += s * detail::kWgk[j];
        if (j % 2 == 1) ga += s * detail::kWg[j / 2];
    }
    QuadResult<T> r;
    r.value = kr * h;
    r.error = detail::magnitude((kr - ga) * h);
    return r;
}

/// Sum of gk15 over consecutive panels [bp[i], bp[i+1]].
template <class F>
auto integrate_panels(F&& f, const std::vector<double>& bp) {
    using T = std::decay_t<decltype(f(0.0))>;
    QuadResult<T> total;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(bp[i + 1] > bp[i])) continue;
        const auto r = gk15(f, bp[i], bp[i + 1]);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

/// Globally adaptive Gauss-Kronrod by repeated bisection of the worst panel.
template <class F>
auto adaptive_gk(F&& f, double a, double b, double abs_tol, double rel_tol = 1e-12, int max_panels = 20000) {
    using T = std::decay_t<decltype(f(a))>;
    struct Panel {
        double a, b;
        QuadResult<T> r;
        bool operator<(const Panel& o) const { return r.error < o.r.error; }
    };
    std::priority_queue<Panel> heap;
    const auto first = gk15(f, a, b);
    heap.push({a, b, first});
    T value = first.value;
    double err = first.error;
    int panels = 1;
    while (err > std::max(abs_tol, rel_tol * detail::magnitude(value)) && panels < max_panels) {
        const Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        const auto l = gk15(f, p.a, m);
        const auto r = gk15(f, m, p.b);
        value += l.value + r.value - p.r.value;
        err += l.error + r.error - p.r.error;
        heap.push({p.a, m, l});
        heap.push({m, p.b, r});
        ++panels;
    }
    QuadResult<T> out;
    out.value = value;
    out.error = err;
    return out;
}

struct GridOptions {
    int grade_levels = 40;  // geometric refinement 2^-levels .. 1 toward the origin, ratio 1/2
    double grade_scale = 1.0;  // outer end of the graded zone
    double uniform_width = 0.25;
    double uniform_until = 12.0;
    double growth = 1.2;  // geometric far field beyond uniform_until
    int angular_panels_per_octant = 2;
};

/// Breakpoints of [0, r_max]: graded near 0, uniform mid range, geometric far field.
inline std::vector<double> radial_breakpoints(double r_max, const GridOptions& o = {}) {
    std::vector<double> bp{0.0};
    const double s = std::min(o.grade_scale, r_max);
    for (int l = o.grade_levels; l >= 1; --l) bp.push_back(s * std::ldexp(1.0, -l));
    bp.push_back(s);
    double r = s;
    const double u_end = std::min(o.uniform_until, r_max);
    while (r + o.uniform_width < u_end - 1e-12) {
        r += o.uniform_width;
        bp.push_back(r);
    }
    if (u_end > r) {
        r = u_end;
        bp.push_back(r);
    }
    while (r < r_max) {
        r = std::min(r_max, std::max(r * o.growth, r + o.uniform_width));
        bp.push_back(r);
    }
    return bp;
}

/// Breakpoints of [-r_max, r_max] mirrored around 0.
inline std::vector<double> symmetric_breakpoints(double r_max, const GridOptions& o = {}) {
    const auto half = radial_breakpoints(r_max, o);
    std::vector<double> bp;
    for (auto it = half.rbegin(); it != half.rend(); ++it) bp.push_back(-*it);
    for (std::size_t i = 1; i < half.size(); ++i) bp.push_back(half[i]);
    return bp;
}

/**
 * @brief Integration domain for Fourier-side integrals in n = 1 or 2.
 *
 * n = 1: [-radius, radius] on symmetric graded panels. n = 2: polar coordinates with graded radial
 * panels; `cell_half_width` > 0 clips each ray at the square [-w, w]^2.
 */
struct QuadratureGrid {
    int n = 1;
    double radius = 0.0;
    double cell_half_width = 0.0;
    GridOptions options;

    template <class F>
    auto integrate(F&& f) const {
        using T = std::decay_t<decltype(f(Vec(n)))>;
        if (n == 1) {
            double R = radius;
            if (cell_half_width > 0.0) R = std::min(R, cell_half_width);
            auto g = [&](double x) { return f(Vec::scalar(x)); };
            return integrate_panels(g, symmetric_breakpoints(R, options));
        }
        if (n != 2) throw std::invalid_argument("QuadratureGrid: implemented for n <= 2");
        const auto full = radial_breakpoints(radius, options);
        std::vector<double> ang;
        const int per = options.angular_panels_per_octant;
        for (int k = 0; k <= 8 * per; ++k) ang.push_back(k * (kPi / 4.0) / per);
        QuadResult<T> total;
        auto outer = [&](double th) {
            const double c = std::cos(th), s = std::sin(th);
            double R = radius;
            if (cell_half_width > 0.0) R = std::min(R, cell_half_width / std::max(std::abs(c), std::abs(s)));
            std::vector<double> bp;
            for (double r : full) {
                if (r < R) bp.push_back(r);
            }
            bp.push_back(R);
            auto g = [&](double r) {
                Vec x(2);
                x[0] = r * c;
                x[1] = r * s;
                return T(f(x) * r);
            };
            const auto q = integrate_panels(g, bp);
            total.error += q.error;  // accumulated per angular node; rescaled below
            return q.value;
        };
        QuadResult<T> out;
        for (std::size_t i = 0; i + 1 < ang.size(); ++i) {
            const double before = total.error;
            const auto r = gk15(outer, ang[i], ang[i + 1]);
            out.value += r.value;
            // radial errors were summed over 15 nodes; weight them by the mean angular weight
            out.error += r.error + (total.error - before) * (ang[i + 1] - ang[i]) / 15.0;
        }
        return out;
    }
};

/// Integral of |x|^{-s} style tails: int_{|xi| > R} C |xi|^{-s} dxi in n = 1, 2 from the value at R.
inline double power_tail_integral(int n, double value_at_R, double R, double s) {
    if (!(s > n)) return std::numeric_limits<double>::infinity();
    const double surface = n == 1 ? 2.0 : kTwoPi;
    return surface * value_at_R * std::pow(R, n) / (s - n);
}

}  // namespace rbfmol
