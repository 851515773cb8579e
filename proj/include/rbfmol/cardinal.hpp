#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/fft.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/vec.hpp"

namespace rbfmol {

/// Truncation of a lattice sum to |k|_inf <= K with the estimated remainder.
struct LatticeSumParams {
    int K = 0;
    double tail_bound = 0.0;  // remainder before any tail correction, relative to the smallest periodization
    bool tail_corrected = false;  // power-law tails are replaced by their integral approximation
};

namespace detail {

inline long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

inline long shell_count(int n, long m) { return ipow(2 * m + 1, n) - ipow(2 * m - 1, n); }

// Integral of |z|^{-N} over the complement of the square [-a,a]^2.
inline double square_complement_integral(double a, double N) {
    // composite Simpson over theta in [0, pi/4]
    const int steps = 256;
    const double d = (kPi / 4.0) / steps;
    double s = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::pow(std::cos(i * d), N - 2.0);
    }
    s *= d / 3.0;
    return 8.0 * std::pow(a, 2.0 - N) / (N - 2.0) * s;
}

}  // namespace detail

/// Power-law tail estimate of sum_{k>K} g(x_k) with x_k = x_0 + spacing*k, given g at the last kept term.
inline double power_tail_1d(double last_term, double x_last, double x_half, double spacing, double s) {
    if (!(s > 1.0) || last_term == 0.0) return 0.0;
    return last_term * std::pow(x_last, s) * std::pow(x_half, 1.0 - s) / (spacing * (s - 1.0));
}

/// Picks K so that the lattice-sum remainder over the cell is below tol relative to the periodization.
inline LatticeSumParams choose_truncation(const BasisFunction& b, double tol = 1e-14) {
    const int n = b.n;
    if (!b.super_polynomial() && !(b.decayN > n))
        throw std::invalid_argument("lattice sum: decay exponent must exceed the dimension");
    const int K_max = n == 1 ? 100000 : n == 2 ? 600 : n == 3 ? 80 : 30;
    double pmin = b.envelope(kPi * std::sqrt(double(n)));
    if (!(pmin > 0.0)) pmin = std::numeric_limits<double>::min();

    LatticeSumParams lp;
    if (b.super_polynomial()) {
        auto tail = [&](int K) {
            double s = 0.0;
            for (long m = K + 1; m < K + 10000; ++m) {
                const double term = detail::shell_count(n, m) * b.envelope(kTwoPi * (m - 0.5));
                s += term;
                if (term <= 1e-6 * s || term == 0.0) break;
            }
            return s / pmin;
        };
        int K = 1;
        while (tail(K) > tol && K < K_max) ++K;
        lp.K = K;
        lp.tail_bound = tail(K);
        return lp;
    }
    const double N = b.decayN;
    const double r_ref = 1e3;
    const double CN = b.envelope(r_ref) * std::pow(r_ref, N);
    lp.tail_corrected = b.radial() && (n == 1 || n == 2);
    auto tail = [&](double K) {
        return 2.0 * n * std::pow(2.0, n - 1) * CN * std::pow(kTwoPi, -N) * std::pow(K, n - N) / (N - n) / pmin;
    };
    auto effective = [&](double K) {
        const double t = tail(K);
        if (!lp.tail_corrected) return t;
        // 2D: the corrected remainder measured against K = 200 references is below 1e-3 of this model
        return n == 1 ? t * N * N / (8.0 * K * K) : t * std::pow(N * (N + 2.0), 2) / (1000.0 * std::pow(K, 4));
    };
    int K = 8;
    while (effective(K) > tol && K < K_max) K = std::min(K_max, int(std::ceil(K * 1.25)));
    lp.K = K;
    lp.tail_bound = tail(K);
    return lp;
}

/// Integral approximation of the terms of sum_k phi^(eta0 + 2 pi k) outside |k|_inf <= K.
inline double lattice_tail_correction(const BasisFunction& b, const Vec& eta0, const LatticeSumParams& lp) {
    if (!lp.tail_corrected || b.super_polynomial()) return 0.0;
    const double N = b.decayN;
    const int K = lp.K;
    if (b.n == 1) {
        const double e = eta0[0];
        const double xr = e + kTwoPi * K, xl = kTwoPi * K - e;
        const double tr = b.fourier_radial(xr), tl = b.fourier_radial(xl);
        return power_tail_1d(tr, xr, e + kTwoPi * (K + 0.5), kTwoPi, N) +
               power_tail_1d(tl, xl, kTwoPi * (K + 0.5) - e, kTwoPi, N);
    }
    if (b.n == 2) {
        const double r_ref = 1e3;
        const double CN = b.envelope(r_ref) * std::pow(r_ref, N);
        // midpoint rule over the complement of the shifted square, with its second-order term:
        // (2 pi)^-2 [ int f + (|eta0|^2/4 - (2 pi)^2/24) int Lap f ], Lap |z|^-N = N^2 |z|^-N-2
        const double a = kTwoPi * (K + 0.5);
        const double second = (eta0.norm2() / 4.0 - kTwoPi * kTwoPi / 24.0) * N * N;
        return CN * std::pow(kTwoPi, -2.0) *
               (detail::square_complement_integral(a, N) + second * detail::square_complement_integral(a, N + 2.0));
    }
    return 0.0;
}

/// Periodization sum_k phi^(eta + 2 pi k) split into the term of eta itself and the rest.
struct PeriodizedValue {
    double total = 0.0;
    double own = 0.0;
    double rest = 0.0;
    bool on_lattice = false;  // kappa > 0 and eta in 2 pi Z^n
    bool at_origin_term = false;  // eta is the k = 0 lattice point itself
};

inline PeriodizedValue periodize(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    const int n = b.n;
    const Vec e0 = reduce_to_cell(eta);
    std::array<int, kMaxDim> m{};
    bool zero = true;
    int m_inf = 0;
    for (int i = 0; i < n; ++i) {
        m[i] = static_cast<int>(std::lround((eta[i] - e0[i]) / kTwoPi));
        m_inf = std::max(m_inf, std::abs(m[i]));
        if (e0[i] != 0.0) zero = false;
    }
    PeriodizedValue out;
    if (b.kappa > 0.0 && (zero || !std::isfinite(b.fourier(e0)))) {
        out.on_lattice = true;
        out.at_origin_term = (m_inf == 0);
        double rest = 0.0;
        LatticeBox(n, lp.K).for_each([&](const std::array<int, kMaxDim>& k) {
            if (is_zero_index(k, n)) return;
            rest += b.fourier(lattice_point(k, n, kTwoPi));
        });
        rest += lattice_tail_correction(b, Vec(n), lp);
        out.total = std::numeric_limits<double>::infinity();
        out.own = out.at_origin_term ? out.total : b.fourier(eta);
        out.rest = out.at_origin_term ? rest : out.total;
        return out;
    }
    double own = 0.0, rest = 0.0;
    bool own_in_box = false;
    if (n == 1) {
        const double e = e0[0];
        for (int k = -lp.K; k <= lp.K; ++k) {
            const double v = b.fourier(Vec::scalar(e + kTwoPi * k));
            if (k == m[0]) {
                own = v;
                own_in_box = true;
            } else {
                rest += v;
            }
        }
    } else {
        LatticeBox(n, lp.K).for_each([&](const std::array<int, kMaxDim>& k) {
            const double v = b.fourier(e0 + lattice_point(k, n, kTwoPi));
            bool is_own = true;
            for (int i = 0; i < n; ++i)
                if (k[i] != m[i]) is_own = false;
            if (is_own) {
                own = v;
                own_in_box = true;
            } else {
                rest += v;
            }
        });
    }
    rest += lattice_tail_correction(b, e0, lp);
    if (!own_in_box) {
        own = b.fourier(eta);
        rest = std::max(0.0, rest - own);
    }
    out.own = own;
    out.rest = rest;
    out.total = own + rest;
    return out;
}

/// Periodization P(eta) = sum_k phi^(eta + 2 pi k); exactly 2 pi periodic.
inline double periodized_transform(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    return periodize(b, eta, lp).total;
}
inline double periodized_transform(const BasisFunction& b, const Vec& eta, double tol = 1e-14) {
    return periodized_transform(b, eta, choose_truncation(b, tol));
}

/// Cardinal symbol L^_1(eta) = phi^(eta) / P(eta); lattice points take their limit delta_{0k}.
inline double lagrange_symbol(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    const PeriodizedValue pv = periodize(b, eta, lp);
    if (pv.on_lattice) return pv.at_origin_term ? 1.0 : 0.0;
    return pv.own / pv.total;
}
inline double lagrange_symbol(const BasisFunction& b, const Vec& eta, double tol = 1e-14) {
    return lagrange_symbol(b, eta, choose_truncation(b, tol));
}

/// 1 - L^_1(eta) computed without cancellation.
inline double lagrange_complement(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    const PeriodizedValue pv = periodize(b, eta, lp);
    if (pv.on_lattice) return pv.at_origin_term ? 0.0 : 1.0;
    return pv.rest / pv.total;
}

struct CardinalOptions {
    int cell_points = 128;  // samples of the cell per axis; spatial box is [-cell_points/2, cell_points/2)
    int periods = 512;  // periods of the symbol sampled per axis; also spatial oversampling per unit
    int coefficient_grid = 4096;  // cell samples per axis for the coefficient FFT
    int coefficient_radius = 64;  // M
    double tol = 1e-14;
};

inline CardinalOptions default_cardinal_options(int n) {
    CardinalOptions o;
    if (n == 2) {
        o.cell_points = 32;
        o.periods = 32;
        o.coefficient_grid = 256;
        o.coefficient_radius = 16;
        o.tol = 1e-12;
    } else if (n > 2) {
        throw std::invalid_argument("cardinal grids are implemented for n <= 2");
    }
    return o;
}

/**
 * @brief Cardinal function on Z^n: the symbol on a cell grid, coefficients c_k and spatial samples.
 *
 * Spatial samples come from an inverse FFT of L^_1 sampled over `periods` periods; the grid spacing
 * is 1/periods and the box is [-cell_points/2, cell_points/2)^n.
 */
struct CardinalFunction {
    BasisFunction basis;
    CardinalOptions options;
    LatticeSumParams lattice;
    double kappa = 0.0;
    std::vector<double> cell_samples;  // L^_1 on eta_m = 2 pi (m - Q/2)/Q, row-major
    std::vector<double> coefficients;  // c_k on |k|_inf <= M, row-major
    std::vector<double> spatial_samples;  // L_1 on x_j = (j - N/2)/periods, row-major
    double imag_residue = 0.0;
    double coefficient_edge = 0.0;  // max |c_k| on the boundary |k|_inf = M
    double node_alias_change = 0.0;  // node change when halving the sampled frequency extent

    int n() const { return basis.n; }
    int samples_per_axis() const { return options.cell_points * options.periods; }
    double spacing() const { return 1.0 / options.periods; }
    double box_radius() const { return 0.5 * options.cell_points; }

    double coefficient(const std::array<int, kMaxDim>& k) const {
        const int M = options.coefficient_radius;
        long idx = 0;
        for (int i = 0; i < n(); ++i) {
            if (std::abs(k[i]) > M) return 0.0;
            idx = idx * (2 * M + 1) + (k[i] + M);
        }
        return coefficients[idx];
    }

    /// L_1 at a grid node index (per-axis indices in [0, N)).
    double node(const std::array<long, kMaxDim>& j) const {
        const long N = samples_per_axis();
        long idx = 0;
        for (int i = 0; i < n(); ++i) idx = idx * N + j[i];
        return spatial_samples[idx];
    }

    /// L_1(x) by local cubic interpolation of the samples; zero outside the box.
    double operator()(const Vec& x) const {
        const long N = samples_per_axis();
        const double dx = spacing();
        std::array<long, kMaxDim> base{};
        std::array<std::array<double, 4>, kMaxDim> w{};
        for (int i = 0; i < n(); ++i) {
            const double u = x[i] / dx + 0.5 * N;
            const long f = static_cast<long>(std::floor(u));
            if (f < 1 || f + 2 >= N) return 0.0;
            const double t = u - f;
            base[i] = f - 1;
            w[i][0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
            w[i][1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
            w[i][2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
            w[i][3] = (t + 1.0) * t * (t - 1.0) / 6.0;
        }
        if (n() == 1) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a) s += w[0][a] * spatial_samples[base[0] + a];
            return s;
        }
        double s = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c)
                s += w[0][a] * w[1][c] * spatial_samples[(base[0] + a) * N + (base[1] + c)];
        return s;
    }

    /// L_1 at an integer lattice point j (exact grid node).
    double at_integer(const std::array<int, kMaxDim>& j) const {
        const long N = samples_per_axis();
        std::array<long, kMaxDim> idx{};
        for (int i = 0; i < n(); ++i) idx[i] = N / 2 + static_cast<long>(j[i]) * options.periods;
        return node(idx);
    }
};

namespace detail {

// Symbol samples at eta_m = (m - N/2) * 2 pi / Q, using the periodization on the Q-point cell grid.
inline std::vector<std::complex<double>> symbol_over_periods(const BasisFunction& b, const CardinalOptions& o,
                                                             const LatticeSumParams& lp, std::vector<double>& cell) {
    const int n = b.n;
    const int Q = o.cell_points;
    const long N = long(Q) * o.periods;
    const double d_eta = kTwoPi / Q;
    const long cells = ipow(Q, n);
    cell.assign(cells, 0.0);
    std::vector<double> P(cells, 0.0);
    for (long c = 0; c < cells; ++c) {
        Vec eta(n);
        long rem = c;
        for (int i = n - 1; i >= 0; --i) {
            eta[i] = (rem % Q - Q / 2) * d_eta;
            rem /= Q;
        }
        const PeriodizedValue pv = periodize(b, eta, lp);
        P[c] = pv.total;
        cell[c] = pv.on_lattice ? 1.0 : pv.own / pv.total;
    }
    const long total = ipow(N, n);
    std::vector<std::complex<double>> g(total);
    for (long idx = 0; idx < total; ++idx) {
        Vec eta(n);
        long rem = idx;
        long cidx = 0;
        long cmul = 1;
        bool lattice_zero = true;
        bool origin = true;
        int parity = 0;
        for (int i = n - 1; i >= 0; --i) {
            const long m = rem % N;
            rem /= N;
            const long s = m - N / 2;
            eta[i] = s * d_eta;
            long cm = ((s % Q) + Q) % Q;  // cell residue in [0,Q)
            long centered = cm >= Q / 2 ? cm - Q : cm;
            if (centered != 0) lattice_zero = false;
            if (s != 0) origin = false;
            cidx += (centered + Q / 2) * cmul;
            cmul *= Q;
            parity += static_cast<int>(m & 1);
        }
        double val;
        if (b.kappa > 0.0 && lattice_zero) {
            val = origin ? 1.0 : 0.0;
        } else {
            val = b.fourier(eta) / P[cidx];
        }
        g[idx] = (parity % 2 == 0) ? val : -val;
    }
    return g;
}

}  // namespace detail

/// Fourier coefficients of 1/P: 1/P(eta) = sum_k c_k exp(-i k.eta), for |k|_inf <= M.
inline std::vector<double> lagrange_coefficients(const BasisFunction& b, int M, int grid, const LatticeSumParams& lp,
                                                 double* edge = nullptr) {
    const int n = b.n;
    if (M < 1) throw std::invalid_argument("lagrange_coefficients: M must be >= 1");
    if (grid < 4 * M) throw std::invalid_argument("lagrange_coefficients: grid too coarse for M");
    const long total = detail::ipow(grid, n);
    std::vector<std::complex<double>> g(total);
    const double d = kTwoPi / grid;
    for (long idx = 0; idx < total; ++idx) {
        Vec eta(n);
        long rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            eta[i] = -kPi + (rem % grid) * d;
            rem /= grid;
        }
        const PeriodizedValue pv = periodize(b, eta, lp);
        g[idx] = pv.on_lattice ? 0.0 : 1.0 / pv.total;
    }
    fft_inplace(g, std::vector<int>(n, grid), +1);
    const long side = 2L * M + 1;
    std::vector<double> c(detail::ipow(side, n));
    double edge_max = 0.0;
    const double scale = 1.0 / double(total);
    for (long out = 0; out < (long)c.size(); ++out) {
        long rem = out;
        long src = 0;
        long mul = 1;
        int ksum = 0;
        int kinf = 0;
        for (int i = n - 1; i >= 0; --i) {
            const int k = static_cast<int>(rem % side) - M;
            rem /= side;
            src += ((k % grid + grid) % grid) * mul;
            mul *= grid;
            ksum += k;
            kinf = std::max(kinf, std::abs(k));
        }
        // eta_m = -pi + 2 pi m/grid contributes exp(-i pi k) per axis
        const double sign = (std::abs(ksum) % 2 == 0) ? 1.0 : -1.0;
        c[out] = sign * scale * g[src].real();
        if (kinf == M) edge_max = std::max(edge_max, std::abs(c[out]));
    }
    if (edge) *edge = edge_max;
    return c;
}

/// Builds the cardinal function: cell symbol, coefficients and spatial samples.
inline CardinalFunction make_cardinal(const BasisFunction& b, CardinalOptions o) {
    const int n = b.n;
    if (n > 2) throw std::invalid_argument("make_cardinal: implemented for n <= 2");
    if (o.cell_points < 8 || (o.cell_points & (o.cell_points - 1)) != 0)
        throw std::invalid_argument("make_cardinal: cell_points must be a power of two >= 8");
    if (o.periods < 2 || (o.periods & (o.periods - 1)) != 0)
        throw std::invalid_argument("make_cardinal: periods must be a power of two");
    CardinalFunction cf;
    cf.basis = b;
    cf.options = o;
    cf.kappa = b.kappa;
    cf.lattice = choose_truncation(b, o.tol);

    auto g = detail::symbol_over_periods(b, o, cf.lattice, cf.cell_samples);
    const long N = long(o.cell_points) * o.periods;
    const double d_eta = kTwoPi / o.cell_points;

    // node values with half the frequency extent, by direct summation (1D only, |j| <= 10)
    if (n == 1) {
        double change = 0.0;
        for (int j = -10; j <= 10; ++j) {
            std::complex<double> full = 0.0, half = 0.0;
            for (long m = 0; m < N; ++m) {
                const long s = m - N / 2;
                const double val = (m & 1) ? -g[m].real() : g[m].real();
                const std::complex<double> term = val * std::polar(1.0, s * d_eta * j);
                full += term;
                if (std::abs(s) < N / 4) half += term;
            }
            change = std::max(change, std::abs(full - half) * d_eta / kTwoPi);
        }
        cf.node_alias_change = change;
    }

    fft_inplace(g, std::vector<int>(n, static_cast<int>(N)), +1);
    const double scale = std::pow(d_eta / kTwoPi, n);
    const long total = detail::ipow(N, n);
    cf.spatial_samples.resize(total);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        int parity = 0;
        for (int i = 0; i < n; ++i) {
            parity += static_cast<int>(rem % N & 1);
            rem /= N;
        }
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        const std::complex<double> v = sign * scale * g[idx];
        cf.spatial_samples[idx] = v.real();
        cf.imag_residue = std::max(cf.imag_residue, std::abs(v.imag()));
    }
    cf.coefficients = lagrange_coefficients(b, o.coefficient_radius, o.coefficient_grid, cf.lattice, &cf.coefficient_edge);
    return cf;
}

inline CardinalFunction make_cardinal(const BasisFunction& b) { return make_cardinal(b, default_cardinal_options(b.n)); }

/// Writes (eta, L^_1) and (x, L_1) tables for n = 1; for n = 2 writes the first axis slice through 0.
inline void export_cardinal_csv(const CardinalFunction& cf, const std::string& symbol_path, const std::string& spatial_path) {
    const int Q = cf.options.cell_points;
    const long N = cf.samples_per_axis();
    {
        std::ofstream out(symbol_path);
        if (!out) throw std::runtime_error("cannot open " + symbol_path);
        out << "eta,Lhat\n";
        out.precision(17);
        for (int m = 0; m < Q; ++m) {
            const long idx = cf.n() == 1 ? m : long(m) * Q + Q / 2;
            out << (m - Q / 2) * kTwoPi / Q << ',' << cf.cell_samples[idx] << '\n';
        }
    }
    std::ofstream out(spatial_path);
    if (!out) throw std::runtime_error("cannot open " + spatial_path);
    out << "x,L\n";
    out.precision(17);
    for (long j = 0; j < N; ++j) {
        const long idx = cf.n() == 1 ? j : j * N + N / 2;
        out << (j - N / 2) * cf.spacing() << ',' << cf.spatial_samples[idx] << '\n';
    }
}

struct FixStrangFit {
    bool fit_ok = false;
    double order = 0.0;
    double residual = 0.0;
    double constant_sup = 0.0;  // sup over (0, pi] of (1 - L^_1)/|eta|^kappa
    double constant_limit = 0.0;  // (1 - L^_1)/|eta|^kappa at the smallest ladder point
    double limit_value = 0.0;  // 1 - L^_1 at the smallest ladder point
};

/// Slope of log(1 - L^_1) against log|eta| along the first axis on eta = 2^-m, m = 3..12.
inline FixStrangFit fix_strang_fit(const BasisFunction& b, const LatticeSumParams& lp) {
    FixStrangFit f;
    std::vector<double> lx, ly;
    for (int m = 3; m <= 12; ++m) {
        const double r = std::ldexp(1.0, -m);
        const double v = lagrange_complement(b, Vec::axis(b.n, 0, r), lp);
        if (m >= 5) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(v));
        }
        if (m == 12) f.limit_value = v;
    }
    const LineFit lf = least_squares(lx, ly);
    f.order = lf.slope;
    f.residual = lf.residual;
    f.fit_ok = lf.residual < 0.05 && lf.slope > 0.1;
    const double kap = b.kappa;
    f.constant_limit = f.limit_value / std::pow(std::ldexp(1.0, -12), kap);
    double sup = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const double r = kPi * i / 400.0;
        sup = std::max(sup, lagrange_complement(b, Vec::axis(b.n, 0, r), lp) / std::pow(r, kap));
    }
    for (int m = 3; m <= 12; ++m) {
        const double r = std::ldexp(1.0, -m);
        sup = std::max(sup, lagrange_complement(b, Vec::axis(b.n, 0, r), lp) / std::pow(r, kap));
    }
    f.constant_sup = sup;
    return f;
}
inline FixStrangFit fix_strang_fit(const BasisFunction& b) { return fix_strang_fit(b, choose_truncation(b)); }

}  // namespace rbfmol
