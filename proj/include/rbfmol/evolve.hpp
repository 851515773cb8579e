#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/cardinal.hpp"
#include "rbfmol/fft.hpp"
#include "rbfmol/fit.hpp"
#include "rbfmol/multiplier.hpp"
#include "rbfmol/spectral.hpp"
#include "rbfmol/symbols.hpp"

namespace rbfmol {

namespace detail {

inline long pow_int(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

inline int wrap_index(long j, int M) { return static_cast<int>(((j % M) + M) % M); }

// Samples g(eta_m) on the periodic grid eta_m = 2 pi m/N of [0, 2 pi)^n, row-major.
template <class G>
std::vector<cplx> sample_cell(int n, int N, G&& g) {
    const long total = pow_int(N, n);
    std::vector<cplx> out(total);
    for (long idx = 0; idx < total; ++idx) {
        Vec eta(n);
        long rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            eta[i] = kTwoPi * static_cast<double>(rem % N) / N;
            rem /= N;
        }
        out[idx] = g(eta);
    }
    return out;
}

}  // namespace detail

/**
 * @brief Generator of the coefficient ODE system c_j' = sum_k S(j - k) c_k.
 *
 * S(j) = -(2 pi)^-n int a(eta/h) L^_1(eta) e^{i j.eta} d eta, the lattice values of -a(h^-1 D) L_1. Folding the
 * integral onto the cell turns it into the Fourier coefficients of the periodic scheme multiplier G_a^*.
 */
struct GeneratorStencil {
    int n = 1;
    double h = 1.0;
    int radius = 0;  // entries stored for |j|_inf <= radius
    int grid = 0;  // frequency samples per axis
    std::vector<cplx> values;  // row-major over [-radius, radius]^n
    double resolution_change = 0.0;  // max change when the frequency grid is halved
    double decay_exponent = 0.0;  // fitted exponent of |S(j)| along the first axis
    bool resolved = true;

    long side() const { return 2L * radius + 1; }
    cplx operator()(const std::array<int, kMaxDim>& j) const {
        long idx = 0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(j[i]) > radius) return 0.0;
            idx = idx * side() + (j[i] + radius);
        }
        return values[idx];
    }
    cplx row_sum() const {
        cplx s = 0.0;
        for (const cplx& v : values) s += v;
        return s;
    }

    /// Eigenvalues of the periodic-wrap generator on M points per axis, in FFT order.
    std::vector<cplx> diagonal(int M) const {
        const long total = detail::pow_int(M, n);
        std::vector<cplx> wrapped(total, 0.0);
        LatticeBox(n, radius).for_each([&](const std::array<int, kMaxDim>& j) {
            long idx = 0;
            for (int i = 0; i < n; ++i) idx = idx * M + detail::wrap_index(j[i], M);
            wrapped[idx] += (*this)(j);
        });
        fft_inplace(wrapped, std::vector<int>(n, M), -1);
        return wrapped;
    }
};

namespace detail {

inline std::vector<cplx> stencil_from_multiplier(const BasisFunction& b, const Symbol& a, double h, int N,
                                                 const LatticeSumParams& lp) {
    auto g = sample_cell(b.n, N, [&](const Vec& eta) { return scheme_multiplier(b, a, eta * (1.0 / h), h, lp); });
    fft_inplace(g, std::vector<int>(b.n, N), +1);
    const double scale = -1.0 / static_cast<double>(pow_int(N, b.n));
    for (cplx& v : g) v *= scale;
    return g;
}

inline cplx pick(const std::vector<cplx>& full, int n, int N, const std::array<int, kMaxDim>& j) {
    long idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * N + wrap_index(j[i], N);
    return full[idx];
}

}  // namespace detail

inline int default_stencil_grid(int n) { return n == 1 ? 4096 : 256; }

/// Lattice stencil of the generator with a resolution check against a grid of half the size.
inline GeneratorStencil generator_stencil(const BasisFunction& b, const Symbol& a, double h, int radius,
                                          const LatticeSumParams& lp, int grid = 0, double tol = 1e-10) {
    if (a.n != b.n) throw std::invalid_argument("generator_stencil: dimension mismatch");
    if (b.n > 2) throw std::invalid_argument("generator_stencil: implemented for n <= 2");
    detail::require_scheme_decay(b, a.q);
    if (grid <= 0) grid = default_stencil_grid(b.n);
    if (2 * radius + 1 > grid / 2) throw std::invalid_argument("generator_stencil: radius too large for the grid");
    GeneratorStencil st;
    st.n = b.n;
    st.h = h;
    st.radius = radius;
    st.grid = grid;
    const auto full = detail::stencil_from_multiplier(b, a, h, grid, lp);
    const auto half = detail::stencil_from_multiplier(b, a, h, grid / 2, lp);
    double scale = 0.0;
    LatticeBox(b.n, radius).for_each([&](const std::array<int, kMaxDim>& j) {
        const cplx v = detail::pick(full, b.n, grid, j);
        st.values.push_back(v);
        scale = std::max(scale, std::abs(v));
        st.resolution_change = std::max(st.resolution_change, std::abs(v - detail::pick(half, b.n, grid / 2, j)));
    });
    st.resolved = st.resolution_change <= tol * std::max(1.0, scale);
    // decay along the first axis over j in [4, radius]
    std::vector<double> lx, ly;
    for (int j = 4; j <= radius; j = std::max(j + 1, int(j * 1.2))) {
        std::array<int, kMaxDim> k{};
        k[0] = j;
        const double v = std::abs(st(k));
        if (v <= 1e-13 * scale) break;
        lx.push_back(std::log(double(j)));
        ly.push_back(std::log(v));
    }
    if (lx.size() >= 3) st.decay_exponent = least_squares(lx, ly).slope;
    return st;
}

/// Coefficients c_j(t; h) on |j|_inf <= J with periodic wrap.
struct LatticeState {
    int n = 1;
    double h = 1.0;
    int J = 0;
    double t = 0.0;
    std::vector<cplx> coeffs;  // row-major over [-J, J]^n
    bool unstable = false;

    int side() const { return 2 * J + 1; }
    long size() const { return detail::pow_int(side(), n); }
    cplx& at(const std::array<int, kMaxDim>& j) {
        long idx = 0;
        for (int i = 0; i < n; ++i) idx = idx * side() + (j[i] + J);
        return coeffs[idx];
    }
    cplx at(const std::array<int, kMaxDim>& j) const {
        long idx = 0;
        for (int i = 0; i < n; ++i) idx = idx * side() + (j[i] + J);
        return coeffs[idx];
    }
    bool finite() const {
        for (const cplx& c : coeffs)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }
};

/// c_j(0) = f(h j).
template <class F>
LatticeState make_lattice_state(int n, double h, int J, F&& f) {
    LatticeState s;
    s.n = n;
    s.h = h;
    s.J = J;
    s.coeffs.resize(s.size());
    long idx = 0;
    LatticeBox(n, J).for_each([&](const std::array<int, kMaxDim>& j) { s.coeffs[idx++] = f(lattice_point(j, n, h)); });
    return s;
}

inline LatticeState make_lattice_state(const SpectralDensity& f, double h, int J) {
    if (!f.has_spatial()) throw std::invalid_argument("make_lattice_state: datum has no spatial form");
    return make_lattice_state(f.n, h, J, [&](const Vec& x) { return cplx(f.spatial(x), 0.0); });
}

enum class TimeMethod { exponential, rk4 };

namespace detail {

// Lattice order [-J, J]^n <-> FFT order [0, M)^n.
inline std::vector<cplx> to_fft_order(const LatticeState& s) {
    const int M = s.side();
    std::vector<cplx> out(s.size());
    long idx = 0;
    LatticeBox(s.n, s.J).for_each([&](const std::array<int, kMaxDim>& j) {
        long f = 0;
        for (int i = 0; i < s.n; ++i) f = f * M + wrap_index(j[i], M);
        out[f] = s.coeffs[idx++];
    });
    return out;
}

inline void from_fft_order(const std::vector<cplx>& v, LatticeState& s) {
    const int M = s.side();
    long idx = 0;
    LatticeBox(s.n, s.J).for_each([&](const std::array<int, kMaxDim>& j) {
        long f = 0;
        for (int i = 0; i < s.n; ++i) f = f * M + wrap_index(j[i], M);
        s.coeffs[idx++] = v[f];
    });
}

}  // namespace detail

/// Advances the state by T with the exponential integrator or classical rk4 with `steps` steps.
inline LatticeState integrate_mol(const LatticeState& state, const GeneratorStencil& st, double T,
                                  TimeMethod method = TimeMethod::exponential, int steps = 0) {
    if (st.n != state.n) throw std::invalid_argument("integrate_mol: dimension mismatch");
    if (T < 0.0) throw std::invalid_argument("integrate_mol: T must be nonnegative");
    LatticeState out = state;
    out.t = state.t + T;
    if (T == 0.0) return out;
    const int M = state.side();
    const std::vector<int> shape(state.n, M);
    const std::vector<cplx> lambda = st.diagonal(M);
    const double scale = 1.0 / static_cast<double>(state.size());
    double bound0 = 0.0;
    for (const cplx& c : state.coeffs) bound0 = std::max(bound0, std::abs(c));

    std::vector<cplx> c = detail::to_fft_order(state);
    if (method == TimeMethod::exponential) {
        fft_inplace(c, shape, -1);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= clamped_exp(lambda[i] * T) * scale;
        fft_inplace(c, shape, +1);
    } else {
        if (steps <= 0) throw std::invalid_argument("integrate_mol: rk4 needs a positive step count");
        const double dt = T / steps;
        auto rhs = [&](const std::vector<cplx>& x) {
            std::vector<cplx> y = x;
            fft_inplace(y, shape, -1);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] *= lambda[i] * scale;
            fft_inplace(y, shape, +1);
            return y;
        };
        std::vector<cplx> tmp(c.size());
        for (int s = 0; s < steps; ++s) {
            const auto k1 = rhs(c);
            for (std::size_t i = 0; i < c.size(); ++i) tmp[i] = c[i] + 0.5 * dt * k1[i];
            const auto k2 = rhs(tmp);
            for (std::size_t i = 0; i < c.size(); ++i) tmp[i] = c[i] + 0.5 * dt * k2[i];
            const auto k3 = rhs(tmp);
            for (std::size_t i = 0; i < c.size(); ++i) tmp[i] = c[i] + dt * k3[i];
            const auto k4 = rhs(tmp);
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    detail::from_fft_order(c, out);
    for (const cplx& v : out.coeffs)
        if (!(std::abs(v) <= 1e6 * std::max(bound0, 1e-300))) out.unstable = true;
    if (!out.finite()) out.unstable = true;
    return out;
}

inline void export_state_csv(const LatticeState& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << (s.n == 1 ? "j" : "j1,j2") << ",re_c,im_c\n";
    long idx = 0;
    LatticeBox(s.n, s.J).for_each([&](const std::array<int, kMaxDim>& j) {
        for (int i = 0; i < s.n; ++i) out << j[i] << ',';
        out << s.coeffs[idx].real() << ',' << s.coeffs[idx].imag() << '\n';
        ++idx;
    });
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------------------------
// Spectral path

/// u^_h(xi, t) = exp(-t G_a^*(xi; h)) Sigma_h(f^)(xi).
inline cplx solve_spectral(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h, double t,
                           const Vec& xi, const LatticeSumParams& lp) {
    const cplx G = scheme_multiplier(b, a, xi, h, lp);
    return clamped_exp(-t * G) * alias_apply(f, b, h, xi, lp);
}

/// u^_h on a list of frequencies.
inline std::vector<cplx> solve_spectral(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h,
                                        double t, const std::vector<Vec>& grid, const LatticeSumParams& lp) {
    std::vector<cplx> out;
    out.reserve(grid.size());
    for (const Vec& xi : grid) out.push_back(solve_spectral(f, b, a, h, t, xi, lp));
    return out;
}

/**
 * @brief Nodal values u_h(h j, t) from the spectral solution by inverse FFT.
 *
 * u_h(h j, t) = (2 pi h)^-n int_{[-pi, pi]^n} exp(-t G_a^*(eta/h; h)) S(eta/h) e^{i j.eta} d eta with S the
 * bracketed alias sum; the cell integrand is periodic so the trapezoidal rule is spectrally accurate.
 */
inline LatticeState spectral_nodes(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h, double t,
                                   int J, const LatticeSumParams& lp, int grid = 0) {
    if (b.n > 2) throw std::invalid_argument("spectral_nodes: implemented for n <= 2");
    if (grid <= 0) grid = default_stencil_grid(b.n);
    if (2 * J + 1 > grid) throw std::invalid_argument("spectral_nodes: grid too small for J");
    const double hn = std::pow(h, -b.n);
    auto g = detail::sample_cell(b.n, grid, [&](const Vec& eta) {
        const Vec xi = eta * (1.0 / h);
        return clamped_exp(-t * scheme_multiplier(b, a, xi, h, lp)) * alias_sum(f, h, xi) * hn;
    });
    fft_inplace(g, std::vector<int>(b.n, grid), +1);
    const double scale = 1.0 / static_cast<double>(detail::pow_int(grid, b.n));
    LatticeState s;
    s.n = b.n;
    s.h = h;
    s.J = J;
    s.t = t;
    s.coeffs.reserve(s.size());
    LatticeBox(b.n, J).for_each([&](const std::array<int, kMaxDim>& j) { s.coeffs.push_back(detail::pick(g, b.n, grid, j) * scale); });
    return s;
}

struct CrossValidation {
    double discrepancy = 0.0;  // max_j |time path - spectral path|
    double discrepancy_2J = 0.0;  // same with twice the lattice truncation
    double budget = 0.0;
    bool pass = false;
    bool truncation_dominated = false;  // doubling J at least halves the discrepancy
    double stencil_resolution = 0.0;
};

inline double max_node_difference(const LatticeState& a, const LatticeState& b) {
    double d = 0.0;
    LatticeBox(a.n, std::min(a.J, b.J)).for_each([&](const std::array<int, kMaxDim>& j) { d = std::max(d, std::abs(a.at(j) - b.at(j))); });
    return d;
}

/// Compares the exponential-integrator lattice solution with the spectral solution at the nodes |j| <= J.
inline CrossValidation cross_validate(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h, int J,
                                      double T, const LatticeSumParams& lp, double budget = 1e-4) {
    CrossValidation cv;
    cv.budget = budget;
    const int radius = std::min(default_stencil_grid(b.n) / 4 - 1, std::max(4 * J, 16));
    const GeneratorStencil st = generator_stencil(b, a, h, radius, lp);
    cv.stencil_resolution = st.resolution_change;
    auto run = [&](int JJ) {
        const LatticeState s0 = make_lattice_state(f, h, JJ);
        const LatticeState sT = integrate_mol(s0, st, T);
        const LatticeState ref = spectral_nodes(f, b, a, h, T, JJ, lp, std::max(default_stencil_grid(b.n), 4 * JJ + 4));
        return max_node_difference(sT, ref);
    };
    cv.discrepancy = run(J);
    cv.discrepancy_2J = run(2 * J);
    cv.truncation_dominated = cv.discrepancy_2J <= 0.5 * cv.discrepancy;
    cv.pass = cv.discrepancy <= budget;
    return cv;
}

}  // namespace rbfmol
