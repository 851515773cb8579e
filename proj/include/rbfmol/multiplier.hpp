#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfmol/basis.hpp"
#include "rbfmol/cardinal.hpp"
#include "rbfmol/spectral.hpp"
#include "rbfmol/symbols.hpp"
#include "rbfmol/vec.hpp"

namespace rbfmol {

/// G_a^*(xi; h) split as a(xi0) + defect, xi0 the representative of xi in the cell.
struct SchemeValue {
    cplx G = 0.0;
    cplx defect = 0.0;  // G - a(xi0), summed without cancellation
    Vec xi0;
};

namespace detail {

inline void require_scheme_decay(const BasisFunction& b, double q) {
    if (!b.super_polynomial() && !(b.decayN > b.n + q))
        throw std::invalid_argument("scheme multiplier: decay exponent must exceed n + q");
}

template <class A>
SchemeValue scheme_value(const BasisFunction& b, A&& a, double q, const Vec& xi, double h, const LatticeSumParams& lp) {
    const int n = b.n;
    const double sp = kTwoPi / h;
    SchemeValue out;
    out.xi0 = xi;
    for (int i = 0; i < n; ++i) out.xi0[i] = std::remainder(xi[i], sp);
    const Vec eta = out.xi0 * h;
    const cplx a0 = a(out.xi0);
    const PeriodizedValue pv = periodize(b, eta, lp);
    if (pv.on_lattice) {
        out.G = a0;
        return out;
    }
    const double P = pv.total;
    cplx d = 0.0;
    LatticeBox(n, lp.K).for_each([&](const std::array<int, kMaxDim>& k) {
        if (is_zero_index(k, n)) return;
        const double w = b.fourier(eta + lattice_point(k, n, kTwoPi));
        if (w == 0.0) return;
        d += (a(out.xi0 + lattice_point(k, n, sp)) - a0) * (w / P);
    });
    if (n == 1 && lp.tail_corrected && !b.super_polynomial()) {
        const int K = lp.K;
        const cplx tr = (a(Vec::scalar(out.xi0[0] + sp * K)) - a0) * (b.fourier(Vec::scalar(eta[0] + kTwoPi * K)) / P);
        const cplx tl = (a(Vec::scalar(out.xi0[0] - sp * K)) - a0) * (b.fourier(Vec::scalar(eta[0] - kTwoPi * K)) / P);
        d += (tr + tl) * power_tail_1d(1.0, K, K + 0.5, 1.0, b.decayN - q);
    }
    out.defect = d;
    out.G = a0 + d;
    return out;
}

}  // namespace detail

/// G(eta) = sum_k |eta + 2 pi k|^2 L^_1(eta + 2 pi k); 2 pi periodic.
inline double heat_multiplier(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    detail::require_scheme_decay(b, 2.0);
    auto sq = [](const Vec& x) { return cplx(x.norm2(), 0.0); };
    return detail::scheme_value(b, sq, 2.0, eta, 1.0, lp).G.real();
}
inline double heat_multiplier(const BasisFunction& b, const Vec& eta, double tol = 1e-14) {
    return heat_multiplier(b, eta, choose_truncation(b, tol));
}

/// G(eta) - |eta|^2 for eta in [-pi, pi]^n, without cancellation.
inline double heat_defect(const BasisFunction& b, const Vec& eta, const LatticeSumParams& lp) {
    detail::require_scheme_decay(b, 2.0);
    auto sq = [](const Vec& x) { return cplx(x.norm2(), 0.0); };
    const SchemeValue v = detail::scheme_value(b, sq, 2.0, eta, 1.0, lp);
    for (int i = 0; i < b.n; ++i)
        if (v.xi0[i] != eta[i]) return v.G.real() - eta.norm2();
    return v.defect.real();
}

/// G_a^*(xi; h) = sum_k a(xi + 2 pi k/h) L^_1(h xi + 2 pi k).
inline cplx scheme_multiplier(const BasisFunction& b, const Symbol& a, const Vec& xi, double h, const LatticeSumParams& lp) {
    if (a.n != b.n) throw std::invalid_argument("scheme_multiplier: dimension mismatch");
    detail::require_scheme_decay(b, a.q);
    return detail::scheme_value(b, a.value, a.q, xi, h, lp).G;
}
inline cplx scheme_multiplier(const BasisFunction& b, const Symbol& a, const Vec& xi, double h, double tol = 1e-14) {
    return scheme_multiplier(b, a, xi, h, choose_truncation(b, tol));
}

/// G_a^*(xi; h) - a(xi) for xi in the cell |xi|_inf <= pi/h.
inline cplx scheme_defect(const BasisFunction& b, const Symbol& a, const Vec& xi, double h, const LatticeSumParams& lp) {
    detail::require_scheme_decay(b, a.q);
    const SchemeValue v = detail::scheme_value(b, a.value, a.q, xi, h, lp);
    for (int i = 0; i < b.n; ++i)
        if (v.xi0[i] != xi[i]) return v.G - a(xi);
    return v.defect;
}

struct DefectRow {
    double h = 0.0;
    double constant = 0.0;  // sup |G^* - a| / (h^{kappa - max(q,0)} |xi|^kappa)
    double argsup = 0.0;  // |xi| of the sup
};

struct DefectReport {
    std::vector<DefectRow> rows;
    double spread = 0.0;  // max/min constant over the ladder
    bool uniform = false;  // spread below 2
};

/// Sample points of the cell |xi|_inf <= pi/h: log-spaced radii along axes (and the diagonal in 2D).
inline std::vector<Vec> defect_grid(int n, double h, int radial = 160) {
    std::vector<Vec> pts;
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        dirs.push_back(Vec::axis(n, i, 1.0));
        dirs.push_back(Vec::axis(n, i, -1.0));
    }
    if (n == 2) {
        for (double sx : {1.0, -1.0})
            for (double sy : {1.0, -1.0}) {
                Vec d(2);
                d[0] = sx;
                d[1] = sy;
                dirs.push_back(d);  // the diagonal reaches the cell corner
            }
    }
    for (const Vec& d : dirs) {
        for (int k = 0; k < radial; ++k) {
            const double u = std::pow(10.0, -4.0 + 4.0 * k / (radial - 1));
            pts.push_back(d * (u * kPi / h));
        }
    }
    return pts;
}

/// Sweeps sup |G^* - a| / (h^{kappa - max(q,0)} |xi|^kappa) over an h-ladder.
inline DefectReport defect_check(const BasisFunction& b, const Symbol& a, const std::vector<double>& hs,
                                 const LatticeSumParams& lp, int radial = 160) {
    detail::require_scheme_decay(b, a.q);
    DefectReport rep;
    const double order = b.kappa - std::max(a.q, 0.0);
    for (double h : hs) {
        DefectRow row;
        row.h = h;
        for (const Vec& xi : defect_grid(b.n, h, radial)) {
            const double r = xi.norm();
            const double v = std::abs(scheme_defect(b, a, xi, h, lp)) / (std::pow(h, order) * std::pow(r, b.kappa));
            if (v > row.constant) {
                row.constant = v;
                row.argsup = r;
            }
        }
        rep.rows.push_back(row);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep.rows) {
        lo = std::min(lo, r.constant);
        hi = std::max(hi, r.constant);
    }
    rep.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.uniform = rep.spread < 2.0;
    return rep;
}

/// Pointwise Fourier-side error of the semi-discrete scheme at time t.
inline cplx evolution_error_density(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h, double t,
                                    const Vec& xi, const LatticeSumParams& lp) {
    const SchemeValue sv = detail::scheme_value(b, a.value, a.q, xi, h, lp);
    const cplx interp = interp_error_density(f, b, h, xi, lp);
    const cplx fx = f.evaluate(xi);
    const cplx ax = a(xi);
    bool in_cell = true;
    for (int i = 0; i < b.n; ++i)
        if (std::abs(xi[i] - sv.xi0[i]) > 0.0) in_cell = false;
    cplx mult;
    if (in_cell) {
        mult = clamped_exp(-t * ax) * detail::complex_expm1(-t * sv.defect) * fx;
    } else {
        mult = (clamped_exp(-t * sv.G) - clamped_exp(-t * ax)) * fx;
    }
    return clamped_exp(-t * sv.G) * interp + mult;
}

/// ||u_h(., t) - u(., t)||_A with its interpolation and multiplier parts.
inline ErrorNorms evolution_error_norm(const SpectralDensity& f, const BasisFunction& b, const Symbol& a, double h, double t,
                                       const LatticeSumParams& lp, bool components = false) {
    if (a.n != b.n) throw std::invalid_argument("evolution_error_norm: dimension mismatch");
    FoldedErrorEngine eng(b, f, h, lp, a.value, t, a.q);
    return components ? integrate_folded_components(eng, b.n) : integrate_folded(eng, b.n);
}

/// Samples of G_a^*(xi; h) and its defect on a uniform grid of the cell.
struct MultiplierField {
    double h = 0.0;
    int n = 1;
    int points_per_axis = 0;
    std::vector<Vec> xi;
    std::vector<cplx> values;
    std::vector<cplx> defect;

    double min_real_part() const {
        double m = std::numeric_limits<double>::infinity();
        for (const cplx& v : values) m = std::min(m, v.real());
        return m;
    }
};

inline MultiplierField make_multiplier_field(const BasisFunction& b, const Symbol& a, double h, int points_per_axis,
                                             const LatticeSumParams& lp) {
    detail::require_scheme_decay(b, a.q);
    if (b.n > 2) throw std::invalid_argument("make_multiplier_field: implemented for n <= 2");
    MultiplierField mf;
    mf.h = h;
    mf.n = b.n;
    mf.points_per_axis = points_per_axis;
    const double w = kPi / h;
    auto coord = [&](int i) { return -w + 2.0 * w * (i + 0.5) / points_per_axis; };
    const int total = b.n == 1 ? points_per_axis : points_per_axis * points_per_axis;
    for (int idx = 0; idx < total; ++idx) {
        Vec x(b.n);
        x[0] = coord(idx % points_per_axis);
        if (b.n == 2) x[1] = coord(idx / points_per_axis);
        const SchemeValue sv = detail::scheme_value(b, a.value, a.q, x, h, lp);
        mf.xi.push_back(x);
        mf.values.push_back(sv.G);
        mf.defect.push_back(sv.defect);
    }
    return mf;
}

inline void export_multiplier_csv(const MultiplierField& mf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << (mf.n == 1 ? "xi" : "xi1,xi2") << ",re_G,im_G,re_defect,im_defect\n";
    for (std::size_t i = 0; i < mf.xi.size(); ++i) {
        out << mf.xi[i][0];
        if (mf.n == 2) out << ',' << mf.xi[i][1];
        out << ',' << mf.values[i].real() << ',' << mf.values[i].imag() << ',' << mf.defect[i].real() << ','
            << mf.defect[i].imag() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rbfmol
